//! Time-convolutionless generator: memory operator, instantaneous-basis rates,
//! rotating and counter-rotating parts, state stepping and frozen-generator
//! asymptotics.
//!
//! The memory operator of one bath is `M(t) = ∫ Φ(t−τ) S̃(t,τ) dτ` over the
//! current coupling interval. Energy-basis indices are `0 = e`, `1 = g`.

use num_complex::Complex64 as C64;

use crate::bath::{coupling_spectrum, BathSpec, HatWeights, ResidueExpansion};
use crate::error::{Error, Result};
use crate::propagator::{rotation_matrix, PropagatorGrid};
use crate::qops::{norm3, DensityMatrix, EigenFrame, Mat2, PauliOperator};

const E: usize = 0;
const G: usize = 1;
const CZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorMode {
    Full,
    RotatingOnly,
}

/// Four-index table `R_{nm,rs}`.
pub type RateTable = [[[[C64; 2]; 2]; 2]; 2];

/// Instantaneous generator coefficients of one bath.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSet {
    pub gamma_down: f64,
    pub gamma_up: f64,
    pub delta_r: f64,
    pub delta_cr: f64,
    /// Coefficients of `E_nm ρ E_rs − E_rs E_nm ρ`.
    pub r_down: RateTable,
    /// Coefficients of `E_rs ρ E_nm − ρ E_nm E_rs`.
    pub r_up: RateTable,
}

/// The four scalar rates without the coefficient tables.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RateSummary {
    pub gamma_down: f64,
    pub gamma_up: f64,
    pub delta_r: f64,
    pub delta_cr: f64,
}

impl RateSet {
    pub const ZERO: RateSet = RateSet {
        gamma_down: 0.0,
        gamma_up: 0.0,
        delta_r: 0.0,
        delta_cr: 0.0,
        r_down: [[[[CZERO; 2]; 2]; 2]; 2],
        r_up: [[[[CZERO; 2]; 2]; 2]; 2],
    };

    pub fn summary(&self) -> RateSummary {
        RateSummary { gamma_down: self.gamma_down, gamma_up: self.gamma_up, delta_r: self.delta_r, delta_cr: self.delta_cr }
    }
}

/// Rates with constant memory `2πG(±ω)`, zero Lamb shifts and an empty table.
pub fn markov_rates(spec: &BathSpec, omega: f64) -> RateSet {
    let tau = std::f64::consts::TAU;
    RateSet {
        gamma_down: tau * coupling_spectrum(omega, spec),
        gamma_up: tau * coupling_spectrum(-omega, spec),
        ..RateSet::ZERO
    }
}

/// `(SM − M†S)/(2i)`, the Hamiltonian part of `[Mρ, S] + [S, ρM†]`.
pub fn lamb_shift_hamiltonian(m: &PauliOperator, s: &PauliOperator) -> PauliOperator {
    (*s * *m - m.adjoint() * *s).scale(C64::new(0.0, -0.5))
}

/// Energy-basis rates from the memory operator `M` and coupling `S = λσy`.
pub fn rates_from_memory(m: &PauliOperator, frame: &EigenFrame, lambda: f64) -> RateSet {
    let s = PauliOperator::SIGMA_Y.scale(lambda);
    let mu = frame.to_energy_basis(m).0;
    let eta = frame.to_energy_basis(&s).0;
    let mut r_down = RateSet::ZERO.r_down;
    let mut r_up = RateSet::ZERO.r_up;
    for n in 0..2 {
        for k in 0..2 {
            for r in 0..2 {
                for q in 0..2 {
                    r_down[n][k][r][q] = mu[n][k] * eta[r][q];
                    r_up[n][k][r][q] = mu[k][n].conj() * eta[r][q];
                }
            }
        }
    }
    let lamb = frame.to_energy_basis(&lamb_shift_hamiltonian(m, &s)).0;
    let omega = frame.omega;
    RateSet {
        gamma_down: 2.0 * r_down[G][E][E][G].re,
        gamma_up: 2.0 * r_up[G][E][E][G].re,
        delta_r: (r_down[G][E][E][G].im + r_up[G][E][E][G].im) / omega,
        delta_cr: 2.0 * lamb[E][G].re / omega,
        r_down,
        r_up,
    }
}

fn is_rotating(n: usize, m: usize, r: usize, s: usize) -> bool {
    (n, m, r, s) == (G, E, E, G) || (n, m, r, s) == (E, G, G, E)
}

fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    *a * *b - *b * *a
}

fn lindblad(l: &Mat2, rho: &Mat2) -> Mat2 {
    let ld = l.adjoint();
    let ll = ld * *l;
    *l * *rho * ld - (ll * *rho + *rho * ll).scale(0.5.into())
}

/// `Δσz − qσx` for `H = qσz + Δσx`.
pub fn counter_rotating_operator(h: &PauliOperator) -> PauliOperator {
    PauliOperator::real(0.0, -h.c[3].re, 0.0, h.c[1].re)
}

/// The non-rotating part of the table applied to `ρ` in the energy basis.
fn non_rotating_terms(rates: &RateSet, rho: &Mat2) -> Mat2 {
    let p = &rho.0;
    let mut out = Mat2::ZERO;
    for n in 0..2 {
        for m in 0..2 {
            for r in 0..2 {
                for s in 0..2 {
                    if is_rotating(n, m, r, s) {
                        continue;
                    }
                    let dn = rates.r_down[n][m][r][s];
                    if dn != CZERO {
                        out.0[n][s] += dn * p[m][r];
                        if s == n {
                            for j in 0..2 {
                                out.0[r][j] -= dn * p[m][j];
                            }
                        }
                    }
                    let up = rates.r_up[n][m][r][s];
                    if up != CZERO {
                        out.0[r][m] += up * p[s][n];
                        if m == r {
                            for i in 0..2 {
                                out.0[i][s] -= up * p[i][n];
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `dρ/dt = −i[(1+δ_R)H + δ_CR(Δσz − qσx), ρ] + γ↓D[L]ρ + γ↑D[L†]ρ + D_CR(ρ)`;
/// `RotatingOnly` drops the δ_CR and `D_CR` terms. Accepts any operator so
/// that the generator can be tabulated on the Pauli basis.
pub fn apply_generator(
    rho: &PauliOperator,
    rates: &RateSet,
    frame: &EigenFrame,
    h: &PauliOperator,
    q: f64,
    mode: GeneratorMode,
) -> PauliOperator {
    let minus_i = C64::new(0.0, -1.0);
    let r = frame.to_energy_basis(rho);
    let h_e = frame.to_energy_basis(h);
    let l_e = Mat2([[CZERO, CZERO], [C64::from(1.0), CZERO]]);
    let mut out = commutator(&h_e.scale((1.0 + rates.delta_r).into()), &r).scale(minus_i)
        + lindblad(&l_e, &r).scale(rates.gamma_down.into())
        + lindblad(&l_e.adjoint(), &r).scale(rates.gamma_up.into());
    if mode == GeneratorMode::Full {
        let x = PauliOperator::real(0.0, -q, 0.0, h.c[1].re);
        let shift = commutator(&frame.to_energy_basis(&x).scale(rates.delta_cr.into()), &r);
        let d_cr = non_rotating_terms(rates, &r) + shift.scale(C64::i());
        out = out + shift.scale(minus_i) + d_cr;
    }
    frame.from_energy_basis(&out)
}

/// `−i[H,ρ] + MρS − SMρ + SρM† − ρM†S`, the generator written directly in
/// terms of the memory operator.
pub fn direct_generator(rho: &PauliOperator, m: &PauliOperator, s: &PauliOperator, h: &PauliOperator) -> PauliOperator {
    let md = m.adjoint();
    h.commutator(rho).scale(C64::new(0.0, -1.0)) + *m * *rho * *s - *s * *m * *rho + *s * *rho * md - *rho * md * *s
}

/// `(γ↑|ε_e⟩⟨ε_e| + γ↓|ε_g⟩⟨ε_g|)/(γ↑ + γ↓)`.
pub fn rotating_invariant_state(rates: &RateSet, frame: &EigenFrame) -> Result<DensityMatrix> {
    let total = rates.gamma_up + rates.gamma_down;
    if total == 0.0 || !total.is_finite() {
        return Err(Error::UndefinedState);
    }
    let op = frame.projector(E, E).scale(rates.gamma_up / total) + frame.projector(G, G).scale(rates.gamma_down / total);
    DensityMatrix::from_operator(op, 1e-10)
}

/// A generator tabulated as a real 4×4 matrix acting on the Pauli
/// coefficients `(c0, cx, cy, cz)` of a Hermitian operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorMatrix {
    pub m: [[f64; 4]; 4],
    /// Largest imaginary Pauli coefficient dropped while tabulating.
    pub hermiticity_defect: f64,
}

impl GeneratorMatrix {
    pub const ZERO: GeneratorMatrix = GeneratorMatrix { m: [[0.0; 4]; 4], hermiticity_defect: 0.0 };

    fn from_rows(m: [[f64; 4]; 4]) -> Self {
        GeneratorMatrix { m, hermiticity_defect: 0.0 }
    }

    pub fn build(rates: &RateSet, frame: &EigenFrame, h: &PauliOperator, q: f64, mode: GeneratorMode) -> Self {
        let basis = [PauliOperator::IDENTITY, PauliOperator::SIGMA_X, PauliOperator::SIGMA_Y, PauliOperator::SIGMA_Z];
        let mut g = [[0.0; 4]; 4];
        let mut defect = 0.0f64;
        for (j, b) in basis.iter().enumerate() {
            let out = apply_generator(b, rates, frame, h, q, mode);
            defect = defect.max(out.hermiticity_defect());
            let col = out.re();
            for i in 0..4 {
                g[i][j] = col[i];
            }
        }
        GeneratorMatrix { m: g, hermiticity_defect: defect }
    }

    pub fn apply(&self, c: &[f64; 4]) -> [f64; 4] {
        let g = &self.m;
        std::array::from_fn(|i| g[i][0] * c[0] + g[i][1] * c[1] + g[i][2] * c[2] + g[i][3] * c[3])
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> [f64; 4] {
        self.apply(&rho.operator().re())
    }

    fn mul(&self, o: &GeneratorMatrix) -> GeneratorMatrix {
        let (a, b) = (&self.m, &o.m);
        GeneratorMatrix::from_rows(std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum())))
    }

    fn norm_inf(&self) -> f64 {
        self.m.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `exp(t·G)` by scaling and squaring of a Taylor series.
    pub fn exp(&self, t: f64) -> GeneratorMatrix {
        let norm = self.norm_inf() * t.abs();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let scale = t / 2f64.powi(squarings as i32);
        let a = GeneratorMatrix::from_rows(self.m.map(|row| row.map(|x| x * scale)));
        let mut term = GeneratorMatrix::from_rows(std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 })));
        let mut sum = term;
        for k in 1..=20 {
            term = term.mul(&a);
            term.m.iter_mut().flatten().for_each(|x| *x /= k as f64);
            sum.m.iter_mut().flatten().zip(term.m.iter().flatten()).for_each(|(s, t)| *s += t);
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Mean decay rate of the traceless block, `−tr(G_vv)/3`.
    pub fn relaxation_rate(&self) -> f64 {
        -(self.m[1][1] + self.m[2][2] + self.m[3][3]) / 3.0
    }

    /// Solves `G c = 0` with `c0 = 1/2`.
    pub fn fixed_point(&self) -> Result<DensityMatrix> {
        let g = &self.m;
        let a: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| g[i + 1][j + 1]));
        let b: [f64; 3] = std::array::from_fn(|i| -0.5 * g[i + 1][0]);
        let det = det3(&a);
        if det.abs() < 1e-300 {
            return Err(Error::UndefinedState);
        }
        let x: [f64; 3] = std::array::from_fn(|k| {
            let mut ak = a;
            for i in 0..3 {
                ak[i][k] = b[i];
            }
            det3(&ak) / det
        });
        DensityMatrix::from_operator(PauliOperator::real(0.5, x[0], x[1], x[2]), 1e-8)
    }
}

fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// `lim_{t→∞} exp(tG) ρ_init`, evolving by repeated doubling of the time step
/// until `‖dρ/dt‖ < 1e-10` or `10⁴` relaxation times have elapsed.
pub fn asymptotic_state(gen: &GeneratorMatrix, rho_init: &DensityMatrix) -> Result<DensityMatrix> {
    let rate = gen.relaxation_rate();
    let residual = |c: &[f64; 4]| gen.apply(c).iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut c = rho_init.operator().re();
    let mut res = residual(&c);
    if res < 1e-10 {
        return DensityMatrix::from_operator(PauliOperator::real(c[0], c[1], c[2], c[3]), 1e-8);
    }
    if !(rate > 0.0) {
        return Err(Error::NonConvergence { residual: res });
    }
    let horizon = 1e4 / rate;
    let mut step = 0.25 / rate;
    let mut elapsed = 0.0;
    let mut prop = gen.exp(step);
    while elapsed < horizon {
        c = prop.apply(&c);
        elapsed += step;
        res = residual(&c);
        if !res.is_finite() {
            break;
        }
        if res < 1e-10 {
            return DensityMatrix::from_operator(PauliOperator::real(0.5, c[1], c[2], c[3]), 1e-8);
        }
        prop = prop.mul(&prop);
        step *= 2.0;
    }
    Err(Error::NonConvergence { residual: res })
}

/// One RK4 step of the Pauli vector with the generator at the start,
/// midpoint and end of the step, followed by hygiene: trace reset and a
/// positivity check at tolerance `1e-8`.
pub fn step_state(rho: &DensityMatrix, gens: [&GeneratorMatrix; 3], h: f64, t_next: f64) -> Result<DensityMatrix> {
    step_state_traced(rho, gens, h, t_next).map(|(r, _)| r)
}

/// [`step_state`] that also returns `|tr ρ − 1|` before the trace reset.
pub fn step_state_traced(
    rho: &DensityMatrix,
    gens: [&GeneratorMatrix; 3],
    h: f64,
    t_next: f64,
) -> Result<(DensityMatrix, f64)> {
    let c = rho.operator().re();
    let add = |a: &[f64; 4], b: &[f64; 4], s: f64| -> [f64; 4] { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = gens[0].apply(&c);
    let k2 = gens[1].apply(&add(&c, &k1, 0.5 * h));
    let k3 = gens[1].apply(&add(&c, &k2, 0.5 * h));
    let k4 = gens[2].apply(&add(&c, &k3, h));
    let next: [f64; 4] = std::array::from_fn(|i| c[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    let v = [next[1], next[2], next[3]];
    let min_eig = 0.5 - norm3(v);
    if min_eig < -1e-8 || !min_eig.is_finite() {
        return Err(Error::Positivity { stroke: String::new(), t: t_next, min_eig });
    }
    Ok((DensityMatrix::from_vector(v), (2.0 * next[0] - 1.0).abs()))
}

/// History length used by the memory convolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelWindow {
    /// Only the most recent stretch of the given duration contributes.
    Truncated(f64),
    FullHistory,
}

/// Memory convolution for one bath on a grid of spacing `hk`.
#[derive(Clone, Debug)]
pub struct MemoryKernel {
    expansion: ResidueExpansion,
    weights: HatWeights,
    truncated: bool,
}

impl MemoryKernel {
    /// `max_nodes` bounds the history length for [`KernelWindow::FullHistory`].
    pub fn new(spec: &BathSpec, hk: f64, window: KernelWindow, max_nodes: usize) -> Result<Self> {
        if !(hk > 0.0) {
            return Err(Error::param("hk", format!("must be > 0, got {hk}")));
        }
        let expansion = ResidueExpansion::new(spec, hk)?;
        let (nodes, truncated) = match window {
            KernelWindow::Truncated(w) => {
                if !(w > 0.0) {
                    return Err(Error::param("window", format!("must be > 0, got {w}")));
                }
                ((w / hk).ceil() as usize, true)
            }
            KernelWindow::FullHistory => (max_nodes.max(1), false),
        };
        let weights = expansion.hat_weights(hk, nodes);
        Ok(MemoryKernel { expansion, weights, truncated })
    }

    pub fn hk(&self) -> f64 {
        self.weights.h
    }

    pub fn expansion(&self) -> &ResidueExpansion {
        &self.expansion
    }

    /// Number of history nodes integrated over at node `n`.
    pub fn span(&self, n: usize) -> usize {
        if self.truncated {
            n.min(self.weights.window())
        } else {
            n
        }
    }

    /// Whether the history at node `n` is already clipped by the window.
    pub fn saturated(&self, n: usize) -> bool {
        self.truncated && n >= self.weights.window()
    }

    /// `Σ_m w_m a[n−m]` over the integrated span.
    pub fn convolve(&self, history: &[[f64; 3]], n: usize) -> Result<[C64; 3]> {
        if n >= history.len() {
            return Err(Error::Argument(format!("node {n} beyond history of {}", history.len())));
        }
        let last = self.span(n);
        if !self.truncated && last > self.weights.window() {
            return Err(Error::Argument(format!("history of {last} nodes exceeds kernel capacity {}", self.weights.window())));
        }
        let mut acc = [CZERO; 3];
        for m in 0..=last {
            let w = self.weights.weight(m, last);
            let a = &history[n - m];
            acc[0] += w * a[0];
            acc[1] += w * a[1];
            acc[2] += w * a[2];
        }
        Ok(acc)
    }

    /// Memory operator at node `n` of a driven segment whose propagator from
    /// the interval start is `u`: `M = O(u)·C_n`.
    pub fn drive_memory(&self, u: &Mat2, history: &[[f64; 3]], n: usize) -> Result<PauliOperator> {
        let c = self.convolve(history, n)?;
        let o = rotation_matrix(u);
        let m: [C64; 3] = std::array::from_fn(|k| c[0] * o[k][0] + c[1] * o[k][1] + c[2] * o[k][2]);
        Ok(PauliOperator::new(CZERO, m[0], m[1], m[2]))
    }

    /// Closed-form memory operator for a constant Hamiltonian.
    pub fn hold_kernel(&self, h: &PauliOperator) -> HoldKernel {
        let v = h.vector();
        let half_gap = norm3(v);
        let omega = 2.0 * half_gap;
        let axis = if half_gap > 0.0 { [v[0] / half_gap, v[1] / half_gap, v[2] / half_gap] } else { [0.0, 0.0, 1.0] };
        let sums = [self.expansion.matsubara_sum(0.0), self.expansion.matsubara_sum(omega), self.expansion.matsubara_sum(-omega)];
        let window = if self.truncated { self.weights.window() as f64 * self.weights.h } else { f64::INFINITY };
        HoldKernel { axis, omega, sums, window }
    }

    pub fn hold_memory(&self, kernel: &HoldKernel, elapsed: f64) -> PauliOperator {
        let t = elapsed.min(kernel.window);
        let e = &self.expansion;
        let p0 = e.partial_integral_with(t, 0.0, kernel.sums[0]);
        let pp = e.partial_integral_with(t, kernel.omega, kernel.sums[1]);
        let pm = e.partial_integral_with(t, -kernel.omega, kernel.sums[2]);
        let cos = (pp + pm) * 0.5;
        let sin = (pp - pm) * C64::new(0.0, -0.5);
        // e^{−iHs} σy e^{iHs} rotates ŷ about the field axis at angular rate ω
        let y = [0.0, 1.0, 0.0];
        let a = kernel.axis;
        let par = a[1];
        let cross = [a[1] * y[2] - a[2] * y[1], a[2] * y[0] - a[0] * y[2], a[0] * y[1] - a[1] * y[0]];
        let m: [C64; 3] = std::array::from_fn(|k| p0 * (par * a[k]) + cos * (y[k] - par * a[k]) + sin * cross[k]);
        PauliOperator::new(CZERO, m[0], m[1], m[2])
    }
}

/// Precomputed data for [`MemoryKernel::hold_memory`].
#[derive(Clone, Copy, Debug)]
pub struct HoldKernel {
    axis: [f64; 3],
    omega: f64,
    sums: [C64; 3],
    window: f64,
}

/// Rates at node `k` of a stroke grid whose coupling interval starts with
/// the grid.
pub fn memory_rates(
    k: usize,
    grid: &PropagatorGrid,
    kernel: &MemoryKernel,
    frame: &EigenFrame,
    lambda: f64,
) -> Result<RateSet> {
    if (grid.dt - kernel.hk()).abs() > 1e-12 * grid.dt {
        return Err(Error::Argument(format!("grid spacing {} differs from kernel spacing {}", grid.dt, kernel.hk())));
    }
    if k >= grid.len() {
        return Err(Error::Argument(format!("node {k} beyond grid of {} points", grid.len())));
    }
    let m = kernel.drive_memory(&grid.u[k], &grid.a, k)?.scale(lambda);
    Ok(rates_from_memory(&m, frame, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathLabel;
    use crate::drive::{system_hamiltonian, Direction, DriveProtocol};
    use crate::propagator::{evolve_unitaries, expm_hermitian};
    use crate::qops::{eigenframe_at, gibbs_state};
    use proptest::prelude::*;

    fn hot() -> BathSpec {
        BathSpec::new(2.0, 0.17, 0.6, 2.0, BathLabel::Hot).unwrap()
    }

    fn random_memory(seed: [f64; 6]) -> PauliOperator {
        PauliOperator::new(CZERO, C64::new(seed[0], seed[1]), C64::new(seed[2], seed[3]), C64::new(seed[4], seed[5]))
    }

    fn frame_and_h(q: f64) -> (EigenFrame, PauliOperator) {
        (eigenframe_at(q, 0.1).unwrap(), system_hamiltonian(q, 0.1))
    }

    #[test]
    fn zero_rates_give_closed_dynamics() {
        let (fr, h) = frame_and_h(0.3);
        let rho = DensityMatrix::from_vector([0.1, -0.2, 0.3]);
        let d = apply_generator(rho.operator(), &RateSet::ZERO, &fr, &h, 0.3, GeneratorMode::Full);
        let closed = h.commutator(rho.operator()).scale(C64::new(0.0, -1.0));
        assert!((d - closed).max_abs() < 1e-15);
    }

    #[test]
    fn empty_integral_gives_zero_rates() {
        let p = DriveProtocol::new(0.49, 0.78, 0.1, Direction::Compress, 10.0).unwrap();
        let grid = evolve_unitaries(&p, 0.025).unwrap();
        let kernel = MemoryKernel::new(&hot(), 0.025, KernelWindow::Truncated(60.0), 0).unwrap();
        let s = p.hamiltonian_at(0.0).unwrap();
        let fr = eigenframe_at(s.q, 0.1).unwrap();
        assert_eq!(memory_rates(0, &grid, &kernel, &fr, 1.0).unwrap(), RateSet::ZERO);
    }

    #[test]
    fn counter_rotating_shift_does_not_commute() {
        let h = system_hamiltonian(0.3, 0.1);
        let x = counter_rotating_operator(&h);
        assert!(h.commutator(&x).max_abs() > 1e-3);
        let (fr, _) = frame_and_h(0.3);
        let xe = fr.to_energy_basis(&x).0;
        assert!(xe[0][0].norm() < 1e-14 && (xe[0][1].re - fr.omega / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rotating_invariant_state_is_stationary() {
        let (fr, h) = frame_and_h(0.25);
        let rates = RateSet { gamma_down: 0.03, gamma_up: 0.004, delta_r: 0.01, ..RateSet::ZERO };
        let rho = rotating_invariant_state(&rates, &fr).unwrap();
        let d = apply_generator(rho.operator(), &rates, &fr, &h, 0.25, GeneratorMode::RotatingOnly);
        assert!(d.max_abs() < 1e-15);
        let e = rho.eigenvalues();
        assert!((e[0] + e[1] - 1.0).abs() < 1e-15);
        let sym = RateSet { gamma_down: 0.02, gamma_up: 0.02, ..RateSet::ZERO };
        let mixed = rotating_invariant_state(&sym, &fr).unwrap();
        assert!(mixed.radius() < 1e-15);
        assert!(matches!(rotating_invariant_state(&RateSet::ZERO, &fr), Err(Error::UndefinedState)));
    }

    #[test]
    fn markov_invariant_state_is_gibbs() {
        let spec = hot();
        let omega = 0.49;
        let q = crate::drive::drive_coordinate(omega, 0.1).unwrap();
        let (fr, h) = frame_and_h(q);
        let rho = rotating_invariant_state(&markov_rates(&spec, omega), &fr).unwrap();
        let gibbs = gibbs_state(&h, spec.beta).unwrap();
        assert!(rho.trace_distance(&gibbs) < 1e-12);
    }

    #[test]
    fn relaxation_with_constant_rates_matches_closed_form() {
        // populations obey ṗ_e = −Γ p_e + γ↑ with Γ = γ↑ + γ↓
        let (fr, h) = frame_and_h(0.3);
        let rates = RateSet { gamma_down: 0.05, gamma_up: 0.01, ..RateSet::ZERO };
        let g = GeneratorMatrix::build(&rates, &fr, &h, 0.3, GeneratorMode::Full);
        let mut rho = DensityMatrix::pure(fr.e_vec);
        let dt = 0.05;
        for k in 0..2000 {
            rho = step_state(&rho, [&g, &g, &g], dt, (k + 1) as f64 * dt).unwrap();
        }
        let gamma = 0.06;
        let pe_inf = 0.01 / gamma;
        let expected = pe_inf + (1.0 - pe_inf) * (-gamma * 100.0f64).exp();
        assert!((rho.population(fr.e_vec) - expected).abs() < 1e-6);
    }

    #[test]
    fn zero_generator_leaves_state() {
        let rho = DensityMatrix::from_vector([0.1, 0.2, -0.1]);
        let z = GeneratorMatrix::ZERO;
        assert_eq!(step_state(&rho, [&z, &z, &z], 0.1, 0.1).unwrap(), rho);
    }

    #[test]
    fn table_symmetries() {
        let (fr, _) = frame_and_h(0.21);
        let rates = rates_from_memory(&random_memory([0.3, -0.1, 0.05, 0.2, -0.4, 0.01]), &fr, 1.0);
        let (d, u) = (&rates.r_down, &rates.r_up);
        assert!((d[E][G][G][E] - u[G][E][E][G].conj()).norm() < 1e-12);
        assert!((d[G][E][E][G] - u[E][G][G][E].conj()).norm() < 1e-12);
        assert!((d[E][E][G][E] + u[G][G][E][G].conj()).norm() < 1e-12);
        assert!((u[E][E][E][G] + d[G][G][G][E].conj()).norm() < 1e-12);
    }

    #[test]
    fn lamb_shift_has_no_sigma_y_component_in_energy_basis() {
        let (fr, _) = frame_and_h(-0.15);
        let m = random_memory([0.2, 0.7, -0.3, 0.1, 0.5, -0.6]);
        let hl = fr.to_energy_basis(&lamb_shift_hamiltonian(&m, &PauliOperator::SIGMA_Y)).0;
        assert!(hl[0][1].im.abs() < 1e-12);
    }

    #[test]
    fn asymptotic_state_matches_fixed_point_and_invariant_state() {
        let (fr, h) = frame_and_h(0.2);
        let rates = RateSet { gamma_down: 0.04, gamma_up: 0.01, delta_r: 0.02, ..RateSet::ZERO };
        let g = GeneratorMatrix::build(&rates, &fr, &h, 0.2, GeneratorMode::RotatingOnly);
        let a = asymptotic_state(&g, &DensityMatrix::pure([1.0, 0.0])).unwrap();
        let b = asymptotic_state(&g, &DensityMatrix::from_vector([0.0, 0.3, -0.2])).unwrap();
        assert!(a.trace_distance(&b) < 1e-8);
        assert!(a.trace_distance(&rotating_invariant_state(&rates, &fr).unwrap()) < 1e-9);
        assert!(a.trace_distance(&g.fixed_point().unwrap()) < 1e-9);
    }

    #[test]
    fn asymptotic_state_reports_unstable_generator() {
        let (fr, h) = frame_and_h(0.2);
        let rates = RateSet { gamma_down: -0.04, gamma_up: -0.01, ..RateSet::ZERO };
        let g = GeneratorMatrix::build(&rates, &fr, &h, 0.2, GeneratorMode::Full);
        assert!(matches!(asymptotic_state(&g, &DensityMatrix::pure([1.0, 0.0])), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn hold_memory_matches_convolution() {
        let spec = hot();
        let h = system_hamiltonian(0.3, 0.1);
        let hk = 0.01;
        let n = 3000;
        let kernel = MemoryKernel::new(&spec, hk, KernelWindow::FullHistory, n).unwrap();
        let history: Vec<[f64; 3]> =
            (0..=n).map(|k| crate::propagator::heisenberg_sigma_y(&expm_hermitian(&h, k as f64 * hk))).collect();
        let u = expm_hermitian(&h, n as f64 * hk);
        let conv = kernel.drive_memory(&u, &history, n).unwrap();
        let exact = kernel.hold_memory(&kernel.hold_kernel(&h), n as f64 * hk);
        assert!((conv - exact).max_abs() < 1e-5 * exact.max_abs(), "{conv:?} vs {exact:?}");
    }

    #[test]
    fn slow_hold_rates_reach_markov_limit() {
        let spec = hot();
        let omega = 0.49;
        let q = crate::drive::drive_coordinate(omega, 0.1).unwrap();
        let (fr, h) = frame_and_h(q);
        let kernel = MemoryKernel::new(&spec, 0.025, KernelWindow::Truncated(200.0), 0).unwrap();
        let m = kernel.hold_memory(&kernel.hold_kernel(&h), 400.0);
        let rates = rates_from_memory(&m, &fr, 1.0);
        let markov = markov_rates(&spec, omega);
        assert!((rates.gamma_down / markov.gamma_down - 1.0).abs() < 1e-3);
        assert!((rates.gamma_up / markov.gamma_up - 1.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn explicit_form_equals_direct_form(
            seed in proptest::array::uniform6(-1.0..1.0f64),
            r in proptest::array::uniform3(-0.28..0.28f64),
            q in -0.5..0.5f64,
            lambda in prop_oneof![Just(0.0), Just(1.0)],
        ) {
            let (fr, h) = frame_and_h(q);
            let m = random_memory(seed).scale(lambda);
            let rho = DensityMatrix::from_vector(r);
            let rates = rates_from_memory(&m, &fr, lambda);
            let explicit = apply_generator(rho.operator(), &rates, &fr, &h, q, GeneratorMode::Full);
            let direct = direct_generator(rho.operator(), &m, &PauliOperator::SIGMA_Y.scale(lambda), &h);
            prop_assert!((explicit - direct).max_abs() < 1e-12);
            prop_assert!(explicit.trace().norm() < 1e-12);
            prop_assert!(explicit.is_hermitian(1e-12));
        }

        #[test]
        fn table_symmetries_hold_everywhere(seed in proptest::array::uniform6(-1.0..1.0f64), q in -0.5..0.5f64) {
            let (fr, _) = frame_and_h(q);
            let rates = rates_from_memory(&random_memory(seed), &fr, 1.0);
            let (d, u) = (&rates.r_down, &rates.r_up);
            prop_assert!((d[E][G][G][E] - u[G][E][E][G].conj()).norm() < 1e-10);
            prop_assert!((d[G][E][E][G] - u[E][G][G][E].conj()).norm() < 1e-10);
            prop_assert!((d[E][E][G][E] + u[G][G][E][G].conj()).norm() < 1e-10);
            prop_assert!((u[E][E][E][G] + d[G][G][G][E].conj()).norm() < 1e-10);
        }

        #[test]
        fn rotating_relaxation_contracts_relative_entropy(
            gd in 0.001..0.1f64, gu in 0.001..0.1f64, r in proptest::array::uniform3(-0.28..0.28f64)
        ) {
            let (fr, h) = frame_and_h(0.2);
            let rates = RateSet { gamma_down: gd, gamma_up: gu, delta_r: 0.01, ..RateSet::ZERO };
            let g = GeneratorMatrix::build(&rates, &fr, &h, 0.2, GeneratorMode::RotatingOnly);
            let fixed = rotating_invariant_state(&rates, &fr).unwrap();
            let mut rho = DensityMatrix::from_vector(r);
            let mut prev = crate::qops::relative_entropy(&rho, &fixed);
            for k in 0..200 {
                rho = step_state(&rho, [&g, &g, &g], 0.5, 0.5 * (k + 1) as f64).unwrap();
                let s = crate::qops::relative_entropy(&rho, &fixed);
                prop_assert!(s <= prev + 1e-12);
                prev = s;
            }
        }
    }
}
