//! Work, heat, power and efficiency of a recorded cycle, and closed-form
//! energetics of the four limiting cycles.

use crate::cycle::{CycleConfig, CycleRun, Sample};
use crate::drive::{drive_coordinate, system_hamiltonian, Stroke};
use crate::error::{Error, Result};
use crate::generator::RateSummary;
use crate::qops::{gibbs_state, von_neumann_entropy, DensityMatrix, PauliOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Bare,
    Effective,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Bare => "bare",
            Variant::Effective => "effective",
        }
    }
}

/// `H + Σ_α [δ_R H + δ_CR (Δσz − qσx)]` over the given baths.
pub fn effective_hamiltonian(h: &PauliOperator, q: f64, delta: f64, rates: &[RateSummary]) -> PauliOperator {
    let x = PauliOperator::real(0.0, -q, 0.0, delta);
    rates.iter().fold(*h, |acc, r| acc + h.scale(r.delta_r) + x.scale(r.delta_cr))
}

fn trace_real(a: &PauliOperator, rho: &DensityMatrix) -> f64 {
    rho.expect(a)
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

fn check_segment(samples: &[Sample], h: f64) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::Argument("segment needs at least two samples".into()));
    }
    for w in samples.windows(2) {
        if ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.max(1.0) {
            return Err(Error::Argument(format!("samples at {} and {} are not one step {h} apart", w[0].t, w[1].t)));
        }
    }
    Ok(())
}

/// `∫ tr[(dH/dt) ρ] dt` over a uniformly sampled segment: the analytic
/// derivative for the bare Hamiltonian, centered differences of the sampled
/// `H_eff` for the effective one.
pub fn average_work(samples: &[Sample], h: f64, variant: Variant) -> Result<f64> {
    check_segment(samples, h)?;
    let n = samples.len();
    let power: Vec<f64> = match variant {
        Variant::Bare => samples.iter().map(|s| trace_real(&s.dh_dt, &s.rho)).collect(),
        Variant::Effective => (0..n)
            .map(|k| {
                let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
                let d = (samples[hi].h_eff - samples[lo].h_eff).scale(1.0 / ((hi - lo) as f64 * h));
                trace_real(&d, &samples[k].rho)
            })
            .collect(),
    };
    Ok(trapezoid(&power, h))
}

/// `∫ tr[H L(ρ)] dt` (bare) or `∫ tr[H_eff L(ρ)] dt` (effective). The
/// effective integrand equals `tr[H_eff D(ρ)]` with `D` the generator minus
/// its Hamiltonian part `−i[H_eff, ρ]`.
pub fn average_heat(samples: &[Sample], h: f64, variant: Variant) -> Result<f64> {
    check_segment(samples, h)?;
    let rate: Vec<f64> = samples
        .iter()
        .map(|s| match variant {
            Variant::Bare => s.heat_rate_bare,
            Variant::Effective => s.heat_rate_eff,
        })
        .collect();
    Ok(trapezoid(&rate, h))
}

/// Work done by the jump of `H_eff` when the coupled bath changes.
pub fn switching_work(before: &Sample, after: &Sample) -> f64 {
    trace_real(&(after.h_eff - before.h_eff), &after.rho)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StrokeEnergy {
    pub heat_in: f64,
    pub work_on: f64,
}

/// Per-stroke energetics of one Hamiltonian variant and derived figures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariantLedger {
    pub strokes: [StrokeEnergy; 4],
    pub w_extract: f64,
    pub q_h: f64,
    /// `W_extract/(τ_ab + τ_cd)`.
    pub power: f64,
    /// `W_extract/T`.
    pub power_period: f64,
    /// `W_extract/Q_h`, `None` when `Q_h ≤ 0`.
    pub efficiency: Option<f64>,
    /// `|ΣW + ΣQ| / (|W_extract| + Σ|Q|)`.
    pub first_law_residual: f64,
}

impl VariantLedger {
    fn from_strokes(strokes: [StrokeEnergy; 4], drive_time: f64, period: f64) -> Self {
        let w_on: f64 = strokes.iter().map(|s| s.work_on).sum();
        let q_in: f64 = strokes.iter().map(|s| s.heat_in).sum();
        let q_abs: f64 = strokes.iter().map(|s| s.heat_in.abs()).sum();
        let w_extract = -w_on;
        let q_h: f64 = strokes.iter().map(|s| s.heat_in.max(0.0)).sum();
        let scale = w_extract.abs() + q_abs;
        VariantLedger {
            strokes,
            w_extract,
            q_h,
            power: w_extract / drive_time,
            power_period: w_extract / period,
            efficiency: if q_h > 0.0 { Some(w_extract / q_h) } else { None },
            first_law_residual: if scale > 0.0 { (w_on + q_in).abs() / scale } else { 0.0 },
        }
    }

    pub fn heat(&self, s: Stroke) -> f64 {
        self.strokes[s.index()].heat_in
    }

    pub fn work(&self, s: Stroke) -> f64 {
        self.strokes[s.index()].work_on
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLedger {
    /// Realized driven-stroke durations.
    pub tau_ab: f64,
    pub tau_cd: f64,
    pub period: f64,
    pub bare: VariantLedger,
    pub effective: VariantLedger,
}

impl EnergyLedger {
    pub fn variant(&self, v: Variant) -> &VariantLedger {
        match v {
            Variant::Bare => &self.bare,
            Variant::Effective => &self.effective,
        }
    }

    /// No positive heat intake in the bare accounting.
    pub fn not_an_engine(&self) -> bool {
        self.bare.efficiency.is_none()
    }

    /// Positive heat arrives only on a→b and d→a.
    pub fn heat_intake_is_hot(&self) -> bool {
        let b = &self.bare;
        b.heat(Stroke::Bc) <= 0.0 && b.heat(Stroke::Cd) <= 0.0
    }
}

/// Work and heat of every stroke of the reported cycle. Switching work at
/// the bath changes b and d is booked on the stroke that starts there.
pub fn ledger(run: &CycleRun) -> Result<EnergyLedger> {
    let mut bare = [StrokeEnergy::default(); 4];
    let mut eff = [StrokeEnergy::default(); 4];
    for s in Stroke::ALL {
        let rec = run.stroke(s);
        bare[s.index()] = StrokeEnergy {
            heat_in: average_heat(&rec.samples, rec.h, Variant::Bare)?,
            work_on: average_work(&rec.samples, rec.h, Variant::Bare)?,
        };
        let mut w = average_work(&rec.samples, rec.h, Variant::Effective)?;
        if matches!(s, Stroke::Bc | Stroke::Da) {
            let prev = run.stroke(Stroke::ALL[s.index() - 1]);
            w += switching_work(prev.last(), rec.first());
        }
        eff[s.index()] = StrokeEnergy { heat_in: average_heat(&rec.samples, rec.h, Variant::Effective)?, work_on: w };
    }
    let sched = &run.schedule;
    let drive_time = sched.tau_ab + sched.tau_cd;
    let period = sched.period();
    Ok(EnergyLedger {
        tau_ab: sched.tau_ab,
        tau_cd: sched.tau_cd,
        period,
        bare: VariantLedger::from_strokes(bare, drive_time, period),
        effective: VariantLedger::from_strokes(eff, drive_time, period),
    })
}

/// Speed of the compression (first letter) and expansion (second letter).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitCase {
    SlowSlow,
    FastSlow,
    SlowFast,
    FastFast,
}

impl LimitCase {
    pub const ALL: [LimitCase; 4] = [LimitCase::SlowSlow, LimitCase::FastSlow, LimitCase::SlowFast, LimitCase::FastFast];

    pub fn as_str(&self) -> &'static str {
        match self {
            LimitCase::SlowSlow => "ss",
            LimitCase::FastSlow => "fs",
            LimitCase::SlowFast => "sf",
            LimitCase::FastFast => "ff",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitingCycleReport {
    pub case: LimitCase,
    pub heat: [f64; 4],
    pub work: [f64; 4],
    pub w_extract: f64,
    pub q_h: f64,
    pub efficiency: Option<f64>,
}

/// Closed-form energetics with thermal end points `ρ_a = Gibbs(β_h, ω2)` and
/// `ρ_c = Gibbs(β_c, ω1)`. A slow driven stroke follows the instantaneous
/// Gibbs state of its bath and exchanges `T ΔS` of heat; a fast one leaves
/// the state unchanged and exchanges no heat.
pub fn limiting_cycles(config: &CycleConfig) -> Result<[LimitingCycleReport; 4]> {
    config.validate()?;
    let s = &config.schedule;
    let h1 = system_hamiltonian(drive_coordinate(s.omega_1, s.delta)?, s.delta);
    let h2 = system_hamiltonian(drive_coordinate(s.omega_2, s.delta)?, s.delta);
    let (bh, bc) = (config.hot.beta, config.cold.beta);
    let rho_a = gibbs_state(&h2, bh)?;
    let rho_c = gibbs_state(&h1, bc)?;
    let energy = |h: &PauliOperator, r: &DensityMatrix| r.expect(h);
    let report = |case: LimitCase| -> Result<LimitingCycleReport> {
        let (slow_ab, slow_cd) = match case {
            LimitCase::SlowSlow => (true, true),
            LimitCase::FastSlow => (false, true),
            LimitCase::SlowFast => (true, false),
            LimitCase::FastFast => (false, false),
        };
        let mut heat = [0.0; 4];
        let mut work = [0.0; 4];
        let rho_b = if slow_ab {
            let rho_b = gibbs_state(&h1, bh)?;
            heat[0] = (von_neumann_entropy(&rho_b) - von_neumann_entropy(&rho_a)) / bh;
            work[0] = energy(&h1, &rho_b) - energy(&h2, &rho_a) - heat[0];
            rho_b
        } else {
            work[0] = energy(&(h1 - h2), &rho_a);
            rho_a
        };
        heat[1] = energy(&h1, &rho_c) - energy(&h1, &rho_b);
        let rho_d = if slow_cd {
            let rho_d = gibbs_state(&h2, bc)?;
            heat[2] = (von_neumann_entropy(&rho_d) - von_neumann_entropy(&rho_c)) / bc;
            work[2] = energy(&h2, &rho_d) - energy(&h1, &rho_c) - heat[2];
            rho_d
        } else {
            work[2] = energy(&(h2 - h1), &rho_c);
            rho_c
        };
        heat[3] = energy(&h2, &rho_a) - energy(&h2, &rho_d);
        let w_extract = -work.iter().sum::<f64>();
        let q_h: f64 = heat.iter().map(|q| q.max(0.0)).sum();
        Ok(LimitingCycleReport {
            case,
            heat,
            work,
            w_extract,
            q_h,
            efficiency: if q_h > 0.0 { Some(w_extract / q_h) } else { None },
        })
    };
    Ok([report(LimitCase::SlowSlow)?, report(LimitCase::FastSlow)?, report(LimitCase::SlowFast)?, report(LimitCase::FastFast)?])
}

/// `1 − β_h/β_c`.
pub fn carnot_efficiency(beta_h: f64, beta_c: f64) -> f64 {
    1.0 - beta_h / beta_c
}
