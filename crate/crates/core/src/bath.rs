//! Bath coupling spectra and correlation functions.
//!
//! The correlation function is `Φ(t) = ∫ G(ω) e^{−iωt} dω`. Two independent
//! routes are provided: a closed residue expansion ([`ResidueExpansion`]),
//! used by the integrator, and a direct frequency quadrature
//! ([`correlation_function`]).

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BathLabel {
    Cold,
    Hot,
}

impl BathLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BathLabel::Cold => "cold",
            BathLabel::Hot => "hot",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec {
    pub beta: f64,
    pub g: f64,
    pub omega_res: f64,
    pub f: f64,
    pub label: BathLabel,
}

impl BathSpec {
    pub fn new(beta: f64, g: f64, omega_res: f64, f: f64, label: BathLabel) -> Result<Self> {
        let spec = BathSpec { beta, g, omega_res, f, label };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("g", self.g), ("omega_res", self.omega_res), ("f", self.f)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Amplitude `A` of the high-frequency tail `G(ω) ≈ A/ω`.
    pub fn tail_amplitude(&self) -> f64 {
        let r = self.g * self.omega_res / self.f;
        r * r
    }
}

/// Resonator factor `1/(1 + f²(ω/ω_r − ω_r/ω)²)`, even in ω, zero at ω = 0.
pub fn lorentzian(omega: f64, spec: &BathSpec) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    let x = omega / spec.omega_res - spec.omega_res / omega;
    1.0 / (1.0 + spec.f * spec.f * x * x)
}

/// Bose factor `ω/(1 − e^{−βω})`, continuous through ω = 0.
fn bose_weight(omega: f64, beta: f64) -> f64 {
    let x = beta * omega;
    if x.abs() < 1e-8 {
        (1.0 + 0.5 * x) / beta
    } else {
        omega / -(-x).exp_m1()
    }
}

/// `G(ω)` for all real ω.
pub fn coupling_spectrum(omega: f64, spec: &BathSpec) -> f64 {
    spec.g * spec.g * lorentzian(omega, spec) * bose_weight(omega, spec.beta)
}

/// Pole and Matsubara decomposition of `Φ(t)` for `t > 0`:
/// `Φ(t) = Σ_p a_p e^{−κ_p t} + Σ_n b_n e^{−ν_n t}`.
#[derive(Clone, Debug)]
pub struct ResidueExpansion {
    spec: BathSpec,
    /// `(κ_p, a_p)` with `Re κ_p > 0`.
    poles: Vec<(C64, C64)>,
    /// `(ν_n, b_n)`, `n = 1..=N`.
    matsubara: Vec<(f64, f64)>,
    /// Sum of `b_n/ν_n` over `n > N` (asymptotic form).
    tail: f64,
}

impl ResidueExpansion {
    /// `h_min` is the smallest time step at which hat weights will be requested.
    pub fn new(spec: &BathSpec, h_min: f64) -> Result<Self> {
        spec.validate()?;
        if !(spec.f > 0.5) {
            return Err(Error::param("f", format!("residue expansion needs f > 1/2, got {}", spec.f)));
        }
        if !(h_min > 0.0) {
            return Err(Error::param("h_min", "must be > 0"));
        }
        let (f, wr, g2) = (spec.f, spec.omega_res, spec.g * spec.g);
        // f²u² + ω_r²(1−2f²)u + f²ω_r⁴ = 0 with u = ω²
        let a = f * f;
        let b = wr * wr * (1.0 - 2.0 * f * f);
        let c = f * f * wr.powi(4);
        let disc = C64::from(b * b - 4.0 * a * c).sqrt();
        let mut poles = Vec::with_capacity(2);
        for u in [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)] {
            for z in [u.sqrt(), -u.sqrt()] {
                if z.im < 0.0 {
                    let dp = 4.0 * a * z * z * z + 2.0 * b * z;
                    let bose = z / (1.0 - (-spec.beta * z).exp());
                    let amp = C64::new(0.0, -TAU) * g2 * wr * wr * z * z / dp * bose;
                    poles.push((C64::i() * z, amp));
                }
            }
        }
        let nu1 = TAU / spec.beta;
        let n_max = ((60.0 / (nu1 * h_min)).ceil() as usize).max(4000);
        let matsubara: Vec<(f64, f64)> = (1..=n_max)
            .map(|n| {
                let nu = nu1 * n as f64;
                (nu, -TAU * g2 * lorentzian_imag_axis(nu, spec) * nu / spec.beta)
            })
            .collect();
        let tail = spec.tail_amplitude() * spec.beta / (TAU * n_max as f64);
        Ok(ResidueExpansion { spec: *spec, poles, matsubara, tail })
    }

    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    /// Decay rates `κ_p` of the resonator poles.
    pub fn pole_rates(&self) -> Vec<C64> {
        self.poles.iter().map(|p| p.0).collect()
    }

    /// `Φ(t)` for `t > 0` (log-divergent as `t → 0⁺`).
    pub fn phi(&self, t: f64) -> Result<C64> {
        if !(t > 0.0) {
            return Err(Error::OutOfDomain { t, lo: 0.0, hi: f64::INFINITY });
        }
        let mut acc: C64 = self.poles.iter().map(|(k, a)| a * (-k * t).exp()).sum();
        let nu1 = TAU / self.spec.beta;
        let mut n = 1usize;
        loop {
            let nu = nu1 * n as f64;
            let e = (-nu * t).exp();
            if e < 1e-18 {
                break;
            }
            acc += -TAU * self.spec.g * self.spec.g * lorentzian_imag_axis(nu, &self.spec) * nu / self.spec.beta * e;
            n += 1;
        }
        Ok(acc)
    }

    /// `∫₀ᵀ Φ(s) e^{i·shift·s} ds`.
    pub fn partial_integral(&self, t_end: f64, shift: f64) -> C64 {
        self.partial_integral_with(t_end, shift, self.matsubara_sum(shift))
    }

    /// `Σ_n b_n/(ν_n − i·shift)` including the tail beyond the stored terms.
    pub fn matsubara_sum(&self, shift: f64) -> C64 {
        let is = C64::new(0.0, shift);
        let s: C64 = self.matsubara.iter().map(|&(nu, b)| b / (nu - is)).sum();
        s + self.tail
    }

    /// [`ResidueExpansion::partial_integral`] with a precomputed
    /// [`ResidueExpansion::matsubara_sum`] for the same shift; only the
    /// Matsubara terms not yet decayed at `t_end` are visited.
    pub fn partial_integral_with(&self, t_end: f64, shift: f64, full_sum: C64) -> C64 {
        if t_end <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let is = C64::new(0.0, shift);
        let mut acc: C64 = self
            .poles
            .iter()
            .map(|(k, a)| {
                let r = k - is;
                a * (1.0 - (-r * t_end).exp()) / r
            })
            .sum();
        acc += full_sum;
        for &(nu, b) in &self.matsubara {
            if nu * t_end > 41.0 {
                break;
            }
            let r = C64::from(nu) - is;
            acc -= b * (-r * t_end).exp() / r;
        }
        acc
    }

    /// Product-integration weights of `∫₀^{t_n} Φ(s) a(t_n − s) ds` for a
    /// piecewise-linear `a` on a grid of spacing `h`, for up to `n_window` nodes.
    pub fn hat_weights(&self, h: f64, n_window: usize) -> HatWeights {
        let n_window = n_window.max(1);
        let mut full = vec![C64::new(0.0, 0.0); n_window + 1];
        let mut left = vec![C64::new(0.0, 0.0); n_window + 1];
        let mut right0 = C64::new(0.0, 0.0);
        let mut add = |kappa: C64, amp: C64, real_decay: f64, is_matsubara: bool| {
            right0 += amp * w_right0(kappa, h);
            for m in 1..=n_window {
                // e^{−κ(m−1)h} bounds every remaining contribution
                if is_matsubara && real_decay * (m as f64 - 1.0) * h > 41.0 {
                    break;
                }
                full[m] += amp * w_full(kappa, m, h);
                left[m] += amp * w_left(kappa, m, h);
            }
        };
        for &(k, a) in &self.poles {
            add(k, a, k.re, false);
        }
        for &(nu, b) in &self.matsubara {
            add(C64::from(nu), C64::from(b), nu, true);
        }
        right0 += self.tail;
        HatWeights { h, right0, full, left }
    }
}

/// `L(−iν)` for the analytic continuation of the resonator factor.
fn lorentzian_imag_axis(nu: f64, spec: &BathSpec) -> f64 {
    let (f, wr) = (spec.f, spec.omega_res);
    let s = nu * nu + wr * wr;
    -wr * wr * nu * nu / (f * f * s * s - wr * wr * nu * nu)
}

// sinh(x)/x
fn sinhc(x: C64) -> C64 {
    if x.norm() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

fn w_full(kappa: C64, m: usize, h: f64) -> C64 {
    let s = sinhc(kappa * (0.5 * h));
    h * (-kappa * (m as f64 * h)).exp() * s * s
}

fn w_right0(kappa: C64, h: f64) -> C64 {
    let x = kappa * h;
    if x.norm() < 1e-3 {
        h * (0.5 - x / 6.0 + x * x / 24.0)
    } else {
        1.0 / kappa - (1.0 - (-x).exp()) / (kappa * x)
    }
}

fn w_left(kappa: C64, n: usize, h: f64) -> C64 {
    let x = kappa * h;
    let unit = if x.norm() < 1e-3 {
        h * (0.5 - x / 3.0 + x * x / 8.0)
    } else {
        (1.0 - (-x).exp()) / (kappa * x) - (-x).exp() / kappa
    };
    (-kappa * ((n as f64 - 1.0) * h)).exp() * unit
}

/// Quadrature weights for memory convolutions on a uniform grid.
#[derive(Clone, Debug)]
pub struct HatWeights {
    pub h: f64,
    pub right0: C64,
    /// Full hat at node `m ≥ 1`.
    pub full: Vec<C64>,
    /// Left half-hat terminating the integral at node `m ≥ 1`.
    pub left: Vec<C64>,
}

impl HatWeights {
    pub fn window(&self) -> usize {
        self.full.len() - 1
    }

    /// Weight of lag `m` when the integral spans `last` grid steps.
    pub fn weight(&self, m: usize, last: usize) -> C64 {
        if last == 0 {
            C64::new(0.0, 0.0)
        } else if m == 0 {
            self.right0
        } else if m == last {
            self.left[m]
        } else {
            self.full[m]
        }
    }
}

/// `Φ` sampled on `t = 0, dt, 2dt, …` by direct frequency quadrature.
#[derive(Clone, Debug)]
pub struct CorrelationTable {
    pub dt: f64,
    pub values: Vec<C64>,
    pub omega_cutoff: f64,
}

impl CorrelationTable {
    pub fn t_max(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    /// Linear interpolation, extended to `t < 0` by `Φ(−t) = Φ(t)*`.
    pub fn at(&self, t: f64) -> Result<C64> {
        let ta = t.abs();
        if ta > self.t_max() * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain { t, lo: -self.t_max(), hi: self.t_max() });
        }
        let x = ta / self.dt;
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let w = x - i as f64;
        let v = self.values[i] * (1.0 - w) + self.values[i + 1] * w;
        Ok(if t < 0.0 { v.conj() } else { v })
    }
}

/// Frequency grid for the quadrature route: uniform near the resonance,
/// geometric in the `1/ω` tail, symmetric about zero.
#[derive(Clone, Debug)]
pub struct FrequencyGrid {
    pub nodes: Vec<f64>,
    /// Half-width of the uniform band.
    pub uniform_edge: f64,
}

impl FrequencyGrid {
    pub fn new(spec: &BathSpec, spacing: f64, ratio: f64) -> Self {
        let cutoff = spectrum_cutoff(spec);
        let w_lin = (8.0 * spec.omega_res).max(40.0 / spec.beta).max(spacing / ratio);
        let mut pos = Vec::new();
        let n_lin = (w_lin / spacing).ceil() as usize;
        let d = w_lin / n_lin as f64;
        for k in 1..=n_lin {
            pos.push(k as f64 * d);
        }
        let mut w = w_lin;
        while w < cutoff {
            w = (w * (1.0 + ratio)).min(cutoff);
            pos.push(w);
        }
        let mut nodes: Vec<f64> = pos.iter().rev().map(|w| -w).collect();
        nodes.push(0.0);
        nodes.extend(pos);
        FrequencyGrid { nodes, uniform_edge: n_lin as f64 * d }
    }

    pub fn cutoff(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// `∫ G(ω) e^{−iωt} dω`: trapezoid sum on the uniform band, exact panel
    /// integrals of the linear interpolant on the geometric tails.
    pub fn transform(&self, spec: &BathSpec, t: f64) -> C64 {
        let g: Vec<f64> = self.nodes.iter().map(|&w| coupling_spectrum(w, spec)).collect();
        self.transform_sampled(&g, t)
    }

    fn transform_sampled(&self, g: &[f64], t: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..self.nodes.len() - 1 {
            let (a, b) = (self.nodes[j], self.nodes[j + 1]);
            let d = b - a;
            if a >= -self.uniform_edge * (1.0 + 1e-12) && b <= self.uniform_edge * (1.0 + 1e-12) {
                acc += (C64::from_polar(g[j], -a * t) + C64::from_polar(g[j + 1], -b * t)) * (0.5 * d);
                continue;
            }
            let th = t * d;
            let (p0, p1) = panel_moments(th);
            acc += C64::from_polar(d, -a * t) * (g[j] * p0 + (g[j + 1] - g[j]) * p1);
        }
        acc
    }
}

// (∫₀¹ e^{−iθu} du, ∫₀¹ u e^{−iθu} du)
fn panel_moments(th: f64) -> (C64, C64) {
    if th.abs() < 1e-3 {
        let i = C64::i();
        (1.0 - i * th / 2.0 - th * th / 6.0, 0.5 - i * th / 3.0 - th * th / 8.0)
    } else {
        let e = C64::from_polar(1.0, -th);
        let i = C64::i();
        let p0 = (1.0 - e) / (i * th);
        let p1 = e * (i / th + 1.0 / (th * th)) - 1.0 / (th * th);
        (p0, p1)
    }
}

/// Frequency above which `G` stays below `1e-6` of its maximum.
pub fn spectrum_cutoff(spec: &BathSpec) -> f64 {
    let g_max = spectrum_peak(spec);
    // beyond the resonance G decreases monotonically towards A/ω
    let mut w = spec.tail_amplitude() / (1e-6 * g_max);
    while coupling_spectrum(w, spec) >= 1e-6 * g_max {
        w *= 1.1;
    }
    w
}

fn spectrum_peak(spec: &BathSpec) -> f64 {
    let hi = 10.0 * spec.omega_res + 20.0 / spec.beta;
    (1..=20_000)
        .map(|k| coupling_spectrum(hi * k as f64 / 20_000.0, spec))
        .fold(0.0, f64::max)
}

/// Tabulates `Φ` on `[0, t_max]` by quadrature, checking the result against a
/// grid with halved spacing.
pub fn correlation_function(spec: &BathSpec, dt: f64, t_max: f64) -> Result<CorrelationTable> {
    spec.validate()?;
    if !(dt > 0.0) || !(t_max >= dt) {
        return Err(Error::param("dt", format!("need 0 < dt <= t_max, got dt={dt}, t_max={t_max}")));
    }
    let spacing = (TAU / (10.0 * t_max)).min(spec.omega_res / (20.0 * spec.f));
    let ratio = 0.004;
    let coarse = FrequencyGrid::new(spec, spacing, ratio);
    let fine = FrequencyGrid::new(spec, spacing / 2.0, ratio / 2.0);
    let gc: Vec<f64> = coarse.nodes.iter().map(|&w| coupling_spectrum(w, spec)).collect();
    let gf: Vec<f64> = fine.nodes.iter().map(|&w| coupling_spectrum(w, spec)).collect();

    let n = (t_max / dt).round() as usize;
    let values: Vec<C64> = (0..=n).map(|k| coarse.transform_sampled(&gc, k as f64 * dt)).collect();

    let floor = 1e-2 * values.iter().skip(1).map(|v| v.norm()).fold(0.0, f64::max);
    let stride = (n / 64).max(1);
    for k in (0..=n).step_by(stride) {
        let t = k as f64 * dt;
        let refined = fine.transform_sampled(&gf, t);
        let change = (refined - values[k]).norm() / values[k].norm().max(floor);
        if change > 1e-3 {
            return Err(Error::Quadrature { t, change });
        }
    }
    Ok(CorrelationTable { dt, values, omega_cutoff: coarse.cutoff() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeScales {
    pub tau_r: f64,
    pub tau_b: f64,
    pub tau_c: f64,
}

/// `τ_R = 1/G(ω_r)`, `τ_B = 2π/ω_r`, and `τ_C` the envelope decay time of
/// the resonator part of `Φ`, `1/min_p Re κ_p`.
pub fn time_scales(spec: &BathSpec) -> Result<TimeScales> {
    spec.validate()?;
    let tau_r = 1.0 / coupling_spectrum(spec.omega_res, spec);
    let tau_b = TAU / spec.omega_res;
    let exp = ResidueExpansion::new(spec, 1.0)?;
    let slowest = exp.pole_rates().iter().map(|k| k.re).fold(f64::INFINITY, f64::min);
    Ok(TimeScales { tau_r, tau_b, tau_c: 1.0 / slowest })
}

/// Exponential decay time of the envelope of `|Φ|`, from a least-squares fit
/// of `ln|Φ|` at its local maxima within `[t_from, t_to]`.
pub fn envelope_decay_time(table: &CorrelationTable, t_from: f64, t_to: f64) -> Option<f64> {
    let v: Vec<f64> = table.values.iter().map(|z| z.norm()).collect();
    let lo = ((t_from / table.dt).ceil() as usize).max(1);
    let hi = ((t_to / table.dt).floor() as usize).min(v.len() - 2);
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&k| v[k] >= v[k - 1] && v[k] >= v[k + 1] && v[k] > 0.0)
        .map(|k| (k as f64 * table.dt, v[k].ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx) * (p.0 - mx)));
    let slope = sxy / sxx;
    (slope < 0.0).then(|| -1.0 / slope)
}

/// `e^{−1}` threshold crossing of `|Φ|` relative to `|Φ(t_ref)|`.
pub fn threshold_decay_time(table: &CorrelationTable, t_ref: f64) -> Option<f64> {
    let k0 = (t_ref / table.dt).round() as usize;
    let level = table.values.get(k0)?.norm() / std::f64::consts::E;
    table.values[k0..]
        .iter()
        .position(|z| z.norm() < level)
        .map(|k| (k0 + k) as f64 * table.dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hot(f: f64) -> BathSpec {
        BathSpec::new(2.0, 0.17, 0.6, f, BathLabel::Hot).unwrap()
    }
    fn cold(f: f64) -> BathSpec {
        BathSpec::new(5.0, 0.2, 0.6, f, BathLabel::Cold).unwrap()
    }

    #[test]
    fn spectrum_at_resonance() {
        let h = coupling_spectrum(0.6, &hot(2.0));
        let expected = 0.17f64.powi(2) * 0.6 / (1.0 - (-1.2f64).exp());
        assert!((h - expected).abs() < 1e-15);
        assert!((h - 0.02481).abs() < 5e-6);
        let c = coupling_spectrum(0.6, &cold(2.0));
        assert!((c - 0.02526).abs() < 5e-6);
        assert!((c - h).abs() / h < 0.03);
    }

    #[test]
    fn spectrum_vanishes_cubically_at_zero() {
        let s = hot(2.0);
        assert_eq!(coupling_spectrum(0.0, &s), 0.0);
        let r1 = coupling_spectrum(1e-3, &s);
        let r2 = coupling_spectrum(2e-3, &s);
        assert!((r2 / r1 - 4.0).abs() < 1e-2, "G ∝ ω² near zero: {}", r2 / r1);
        assert!(coupling_spectrum(-1e-3, &s) > 0.0);
    }

    #[test]
    fn rejects_invalid_spec() {
        assert!(BathSpec::new(0.0, 0.1, 0.6, 2.0, BathLabel::Hot).is_err());
        assert!(BathSpec::new(1.0, 0.1, -0.6, 2.0, BathLabel::Hot).is_err());
    }

    #[test]
    fn residue_expansion_matches_quadrature() {
        for spec in [hot(2.0), cold(3.0)] {
            let exp = ResidueExpansion::new(&spec, 0.01).unwrap();
            let table = correlation_function(&spec, 0.05, 60.0).unwrap();
            let scale = table.values[2..].iter().map(|z| z.norm()).fold(0.0, f64::max);
            for k in (2..table.values.len()).step_by(7) {
                let t = k as f64 * table.dt;
                let d = (exp.phi(t).unwrap() - table.values[k]).norm();
                assert!(d < 1e-3 * scale, "t={t}: {} vs {}", exp.phi(t).unwrap(), table.values[k]);
            }
        }
    }

    #[test]
    fn zero_time_value_matches_direct_integral() {
        let spec = hot(2.0);
        let table = correlation_function(&spec, 0.05, 40.0).unwrap();
        assert!(table.values[0].im.abs() < 1e-10);
        assert!(table.values[0].re > 0.0);
        // independent composite Simpson on a log-mapped grid up to the same cutoff
        let wc = table.omega_cutoff;
        let simpson = |a: f64, b: f64, n: usize, f: &dyn Fn(f64) -> f64| {
            let h = (b - a) / n as f64;
            let mut s = f(a) + f(b);
            for k in 1..n {
                s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        let g = |w: f64| coupling_spectrum(w, &spec);
        let inner = simpson(-5.0, 5.0, 200_000, &g);
        // ω = e^u on the tails
        let tail = |u: f64| {
            let w = u.exp();
            (g(w) + g(-w)) * w
        };
        let outer = simpson(5f64.ln(), wc.ln(), 200_000, &tail);
        let direct = inner + outer;
        assert!((table.values[0].re - direct).abs() / direct < 1e-3, "{} vs {direct}", table.values[0].re);
    }

    #[test]
    fn table_conjugate_symmetry() {
        let spec = cold(2.0);
        let grid = FrequencyGrid::new(&spec, 0.01, 0.01);
        for t in [0.3, 1.7, 9.0] {
            let plus = grid.transform(&spec, t);
            let minus = grid.transform(&spec, -t);
            assert!((plus - minus.conj()).norm() < 1e-12 * plus.norm().max(1.0));
        }
    }

    #[test]
    fn table_decays_before_horizon() {
        let spec = hot(2.0);
        let table = correlation_function(&spec, 0.05, 80.0).unwrap();
        let phi0 = table.values[0].norm();
        let tail = table.values[table.values.len() - 100..].iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(tail < 1e-3 * phi0);
    }

    #[test]
    fn time_scale_relations() {
        let g1 = hot(2.0);
        let mut g2 = g1;
        g2.g *= 2f64.sqrt();
        let (a, b) = (time_scales(&g1).unwrap(), time_scales(&g2).unwrap());
        assert!((a.tau_r / b.tau_r - 2.0).abs() < 1e-12);
        assert!((a.tau_b - 10.471975511965978).abs() < 1e-12);
        assert_eq!(a.tau_c, b.tau_c);
        // resonator poles sit at Im ω = −ω_r/(2f)
        assert!((a.tau_c - 2.0 * 2.0 / 0.6).abs() < 1e-10);
    }

    #[test]
    fn envelope_fit_agrees_with_pole_decay() {
        for f in [2.0, 3.0] {
            let spec = hot(f);
            let table = correlation_function(&spec, 0.05, 80.0).unwrap();
            let tc = time_scales(&spec).unwrap().tau_c;
            let fit = envelope_decay_time(&table, 15.0, 6.0 * tc).unwrap();
            assert!((fit / tc - 1.0).abs() < 0.02, "f={f}: fit {fit}, poles {tc}");
        }
    }

    #[test]
    fn threshold_time_is_scale_invariant() {
        let spec = hot(2.0);
        let table = correlation_function(&spec, 0.05, 40.0).unwrap();
        let mut scaled = table.clone();
        scaled.values.iter_mut().for_each(|v| *v *= 3.7);
        assert_eq!(threshold_decay_time(&table, 0.0), threshold_decay_time(&scaled, 0.0));
    }

    #[test]
    fn hat_weights_integrate_smooth_functions() {
        let spec = hot(2.0);
        let exp = ResidueExpansion::new(&spec, 0.01).unwrap();
        let h = 0.02;
        let n = 500;
        let w = exp.hat_weights(h, n);
        // a ≡ 1 reproduces ∫₀ᵀ Φ
        let sum: C64 = (0..=n).map(|m| w.weight(m, n)).sum();
        let exact = exp.partial_integral(n as f64 * h, 0.0);
        assert!((sum - exact).norm() < 1e-6 * exact.norm(), "{sum} vs {exact}");
        // a(τ) = cos(ωτ) is approximated to second order
        let om = 0.7;
        let t_end = n as f64 * h;
        let approx: C64 = (0..=n).map(|m| w.weight(m, n) * (om * (t_end - m as f64 * h)).cos()).sum();
        let exact = (exp.partial_integral(t_end, om) * C64::from_polar(1.0, om * t_end).conj()
            + exp.partial_integral(t_end, -om) * C64::from_polar(1.0, om * t_end))
            * 0.5;
        assert!((approx - exact).norm() < 1e-4 * exact.norm(), "{approx} vs {exact}");
    }

    proptest! {
        #[test]
        fn kms_identity(w in 0.001..20.0f64, beta in 0.1..10.0f64, g in 0.01..1.0f64, f in 0.6..5.0f64) {
            let spec = BathSpec::new(beta, g, 0.6, f, BathLabel::Hot).unwrap();
            let lhs = coupling_spectrum(-w, &spec);
            let rhs = (-beta * w).exp() * coupling_spectrum(w, &spec);
            prop_assert!((lhs - rhs).abs() < 1e-12);
            prop_assert!(coupling_spectrum(w, &spec) >= 0.0 && lhs >= 0.0);
        }
    }
}
