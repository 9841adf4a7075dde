//! Four-stroke cycle: coupling intervals, trajectory recording, end-point
//! states, distance diagnostics and duration sweeps.

use rayon::prelude::*;

use crate::bath::{coupling_spectrum, time_scales, BathLabel, BathSpec};
use crate::drive::{Direction, DriveProtocol, HamiltonianSample, Stroke, StrokeSchedule};
use crate::error::{Error, Result};
use crate::generator::{
    asymptotic_state, rates_from_memory, step_state_traced, GeneratorMatrix,
    GeneratorMode, KernelWindow, MemoryKernel, RateSummary,
};
use crate::propagator::{evolve_unitaries, expm_hermitian, heisenberg_sigma_y, project_su2};
use crate::qops::{eigenframe_at, gibbs_state, relative_entropy, DensityMatrix, Mat2, PauliOperator};
use crate::thermo::{effective_hamiltonian, ledger, EnergyLedger};

/// Physical parameters of the engine with the reference values as defaults.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineParameters {
    pub beta_h: f64,
    pub beta_c: f64,
    /// Coupling amplitudes of the reference set `g1`.
    pub g_c: f64,
    pub g_h: f64,
    /// Multiplies both amplitudes; `√2` gives the set `g2`.
    pub g_scale: f64,
    pub omega_res: f64,
    pub f: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub delta: f64,
    /// Isochoric stroke duration in units of `τ_D`.
    pub tau_th_factor: f64,
}

impl Default for EngineParameters {
    fn default() -> Self {
        EngineParameters {
            beta_h: 2.0,
            beta_c: 5.0,
            g_c: 0.2,
            g_h: 0.17,
            g_scale: 1.0,
            omega_res: 0.6,
            f: 2.0,
            omega_1: 0.49,
            omega_2: 0.78,
            delta: 0.1,
            tau_th_factor: 6.0,
        }
    }
}

impl EngineParameters {
    pub fn hot(&self) -> Result<BathSpec> {
        BathSpec::new(self.beta_h, self.g_h * self.g_scale, self.omega_res, self.f, BathLabel::Hot)
    }

    pub fn cold(&self) -> Result<BathSpec> {
        BathSpec::new(self.beta_c, self.g_c * self.g_scale, self.omega_res, self.f, BathLabel::Cold)
    }

    /// Duration unit: the hot-bath relaxation time `1/G(ω_r)` at the
    /// unscaled amplitude `g_h`.
    pub fn tau_d(&self) -> Result<f64> {
        let spec = BathSpec::new(self.beta_h, self.g_h, self.omega_res, self.f, BathLabel::Hot)?;
        Ok(1.0 / coupling_spectrum(self.omega_res, &spec))
    }

    /// Cycle with driven strokes of the given durations (absolute time).
    pub fn cycle(&self, tau_ab: f64, tau_cd: f64) -> Result<CycleConfig> {
        let tau_th = self.tau_th_factor * self.tau_d()?;
        let cfg = CycleConfig {
            schedule: StrokeSchedule {
                tau_ab,
                tau_bc: tau_th,
                tau_cd,
                tau_da: tau_th,
                omega_1: self.omega_1,
                omega_2: self.omega_2,
                delta: self.delta,
            },
            cold: self.cold()?,
            hot: self.hot()?,
            dt_max: 0.05,
            mode: GeneratorMode::Full,
            kernel: KernelPolicy::Window,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelPolicy {
    /// History truncated to `max(10τ_C, 5τ_B)` of the coupled bath.
    Window,
    FullHistory,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleConfig {
    pub schedule: StrokeSchedule,
    pub cold: BathSpec,
    pub hot: BathSpec,
    /// Upper bound on the integrator step.
    pub dt_max: f64,
    pub mode: GeneratorMode,
    pub kernel: KernelPolicy,
}

impl CycleConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.cold.validate()?;
        self.hot.validate()?;
        if !(self.dt_max > 0.0) {
            return Err(Error::param("dt", format!("must be > 0, got {}", self.dt_max)));
        }
        Ok(())
    }

    pub fn bath(&self, label: BathLabel) -> &BathSpec {
        match label {
            BathLabel::Cold => &self.cold,
            BathLabel::Hot => &self.hot,
        }
    }

    /// Integrator steps and stroke step counts. Each bath has its own step,
    /// at most `dt_max` and a 200th of the shorter of its two strokes, chosen
    /// to divide its driven stroke exactly; the isochoric stroke is rounded to
    /// whole steps.
    pub fn time_grid(&self) -> TimeGrid {
        let s = &self.schedule;
        let step = |drive: f64, hold: f64| {
            let h0 = self.dt_max.min(drive.min(hold) / 200.0);
            drive / (drive / h0 - 1e-9).ceil()
        };
        let h_hot = step(s.tau_ab, s.tau_da);
        let h_cold = step(s.tau_cd, s.tau_bc);
        let h = |x: Stroke| if x.bath() == BathLabel::Hot { h_hot } else { h_cold };
        let steps = Stroke::ALL.map(|x| ((s.duration(x) / h(x)).round() as usize).max(1));
        TimeGrid { h_hot, h_cold, steps }
    }

    /// Memory window of one bath, `max(10τ_C, 5τ_B)`.
    pub fn window(&self, label: BathLabel) -> Result<f64> {
        let ts = time_scales(self.bath(label))?;
        Ok((10.0 * ts.tau_c).max(5.0 * ts.tau_b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    /// Integrator steps of the hot (a→b, d→a) and cold (b→c, c→d) strokes;
    /// memory kernels are sampled at half the step.
    pub h_hot: f64,
    pub h_cold: f64,
    pub steps: [usize; 4],
}

impl TimeGrid {
    pub fn step(&self, s: Stroke) -> f64 {
        match s.bath() {
            BathLabel::Hot => self.h_hot,
            BathLabel::Cold => self.h_cold,
        }
    }

    /// The schedule with durations rounded to whole steps.
    pub fn realized(&self, s: &StrokeSchedule) -> StrokeSchedule {
        let d = Stroke::ALL.map(|x| self.steps[x.index()] as f64 * self.step(x));
        StrokeSchedule { tau_ab: d[0], tau_bc: d[1], tau_cd: d[2], tau_da: d[3], ..*s }
    }
}

/// State and accounting densities at one integrator node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub omega: f64,
    pub q: f64,
    pub rho: DensityMatrix,
    /// Excited-state population in the instantaneous energy basis.
    pub p_excited: f64,
    /// `tr[Hρ]/ω`.
    pub polarization: f64,
    pub rates: RateSummary,
    pub h: PauliOperator,
    pub dh_dt: PauliOperator,
    /// `H + δ_R H + δ_CR(Δσz − qσx)` of the coupled bath.
    pub h_eff: PauliOperator,
    /// `tr[H L(ρ)]`.
    pub heat_rate_bare: f64,
    /// `tr[H_eff L(ρ)]`.
    pub heat_rate_eff: f64,
}

/// One stroke of the recorded trajectory, sampled at every integrator node
/// including both end points.
#[derive(Clone, Debug)]
pub struct StrokeRecord {
    pub cycle: usize,
    pub stroke: Stroke,
    pub h: f64,
    pub samples: Vec<Sample>,
    /// Generator at the final node, for the frozen-generator asymptotics.
    pub final_generator: GeneratorMatrix,
}

impl StrokeRecord {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    /// Samples within `[t1, t2]`; both ends must lie on the grid.
    pub fn segment(&self, t1: f64, t2: f64) -> Result<&[Sample]> {
        let t0 = self.first().t;
        let index = |t: f64| -> Result<usize> {
            let x = (t - t0) / self.h;
            let k = x.round();
            if (x - k).abs() > 1e-6 || k < 0.0 || k as usize >= self.samples.len() {
                return Err(Error::Argument(format!("time {t} is not a grid node of stroke {}", self.stroke.label())));
            }
            Ok(k as usize)
        };
        let (a, b) = (index(t1)?, index(t2)?);
        if b < a {
            return Err(Error::Argument(format!("segment end {t2} precedes start {t1}")));
        }
        Ok(&self.samples[a..=b])
    }
}

/// Worst departures from a physical state over a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hygiene {
    /// `|tr ρ − 1|` before the per-step trace reset.
    pub max_trace_drift: f64,
    /// Largest anti-Hermitian part produced by the generator.
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl Default for Hygiene {
    fn default() -> Self {
        Hygiene { max_trace_drift: 0.0, max_hermiticity_defect: 0.0, min_eigenvalue: f64::INFINITY }
    }
}

impl Hygiene {
    pub fn passes(&self) -> bool {
        self.max_trace_drift < 1e-8 && self.max_hermiticity_defect < 1e-10 && self.min_eigenvalue >= -1e-8
    }
}

/// End points of the reported cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndStates {
    pub a: DensityMatrix,
    pub b: DensityMatrix,
    pub c: DensityMatrix,
    pub d: DensityMatrix,
    /// Asymptotic states of the generators frozen at `t_b` and `t_d`.
    pub b_star: DensityMatrix,
    pub d_star: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct CycleRun {
    pub config: CycleConfig,
    pub grid: TimeGrid,
    /// Schedule with the realized (rounded) durations.
    pub schedule: StrokeSchedule,
    /// Strokes of the second cycle in order a→b, b→c, c→d, d→a.
    pub strokes: Vec<StrokeRecord>,
    pub ends: EndStates,
    /// `‖ρ(2T) − ρ(T)‖_tr`.
    pub periodicity: f64,
    /// Trace distances of `ρ_c` and `ρ_a` from the Gibbs states of their bath.
    pub thermalization_gap: [f64; 2],
    pub hygiene: Hygiene,
}

impl CycleRun {
    pub fn stroke(&self, s: Stroke) -> &StrokeRecord {
        &self.strokes[s.index()]
    }
}

struct Segment {
    cycle: usize,
    stroke: Stroke,
    steps: usize,
    proto: DriveProtocol,
}

/// Per-bath memory kernels shared by all coupling intervals of a run.
struct Kernels {
    hot: MemoryKernel,
    cold: MemoryKernel,
}

fn hamiltonian(proto: &DriveProtocol, t: f64) -> Result<HamiltonianSample> {
    proto.hamiltonian_at(t.min(proto.duration))
}

/// Integrates two cycles from the hot-bath Gibbs state at `ω2` and reports
/// the second.
pub fn run_cycle(config: &CycleConfig) -> Result<CycleRun> {
    config.validate()?;
    let grid = config.time_grid();
    let schedule = grid.realized(&config.schedule);
    schedule.validate()?;

    let segments: Vec<Segment> = (0..2)
        .flat_map(|cycle| Stroke::ALL.map(|s| (cycle, s)))
        .map(|(cycle, stroke)| Segment { cycle, stroke, steps: grid.steps[stroke.index()], proto: schedule.protocol(stroke) })
        .collect();
    let mut intervals: Vec<Vec<Segment>> = Vec::new();
    for seg in segments {
        match intervals.last_mut() {
            Some(iv) if iv[0].stroke.bath() == seg.stroke.bath() => iv.push(seg),
            _ => intervals.push(vec![seg]),
        }
    }

    let kernel_for = |label: BathLabel| -> Result<MemoryKernel> {
        let longest = intervals
            .iter()
            .filter(|iv| iv[0].stroke.bath() == label)
            .map(|iv| iv.iter().map(|s| 2 * s.steps).sum::<usize>())
            .max()
            .unwrap_or(1);
        let window = match config.kernel {
            KernelPolicy::Window => KernelWindow::Truncated(config.window(label)?),
            KernelPolicy::FullHistory => KernelWindow::FullHistory,
        };
        let hk = 0.5 * if label == BathLabel::Hot { grid.h_hot } else { grid.h_cold };
        MemoryKernel::new(config.bath(label), hk, window, longest)
    };
    let kernels = Kernels { hot: kernel_for(BathLabel::Hot)?, cold: kernel_for(BathLabel::Cold)? };

    let start = hamiltonian(&schedule.protocol(Stroke::Ab), 0.0)?;
    let mut rho = gibbs_state(&start.h, config.hot.beta)?;
    let mut hygiene = Hygiene::default();
    let mut records = Vec::new();
    let mut clock = 0.0;
    for iv in &intervals {
        let kernel = match iv[0].stroke.bath() {
            BathLabel::Hot => &kernels.hot,
            BathLabel::Cold => &kernels.cold,
        };
        let h = grid.step(iv[0].stroke);
        rho = integrate_interval(config, iv, kernel, rho, h, &mut clock, &mut records, &mut hygiene)?;
    }

    let strokes: Vec<StrokeRecord> = records.into_iter().filter(|r| r.cycle == 1).collect();
    let [ab, bc, cd, da] = [0, 1, 2, 3].map(|i| &strokes[i]);
    let b_star = asymptotic_state(&ab.final_generator, &ab.last().rho)?;
    let d_star = asymptotic_state(&cd.final_generator, &cd.last().rho)?;
    let ends = EndStates {
        a: ab.first().rho,
        b: ab.last().rho,
        c: bc.last().rho,
        d: cd.last().rho,
        b_star,
        d_star,
    };
    let periodicity = da.last().rho.trace_distance(&ends.a);
    let gibbs_c = gibbs_state(&bc.last().h, config.cold.beta)?;
    let gibbs_a = gibbs_state(&ab.first().h, config.hot.beta)?;
    let thermalization_gap = [ends.c.trace_distance(&gibbs_c), ends.a.trace_distance(&gibbs_a)];
    Ok(CycleRun { config: *config, grid, schedule, strokes, ends, periodicity, thermalization_gap, hygiene })
}

/// Propagators from the interval start and Heisenberg-picture `σy` at every
/// kernel node of the interval.
fn interval_history(segs: &[Segment], hk: f64) -> Result<(Vec<Mat2>, Vec<[f64; 3]>)> {
    let total: usize = segs.iter().map(|s| 2 * s.steps).sum();
    let mut u = Vec::with_capacity(total + 1);
    u.push(Mat2::IDENTITY);
    for seg in segs {
        let base = u[u.len() - 1];
        if seg.proto.direction == Direction::Hold {
            let h = hamiltonian(&seg.proto, 0.0)?.h;
            for i in 1..=2 * seg.steps {
                u.push(project_su2(&(expm_hermitian(&h, i as f64 * hk) * base)));
            }
        } else {
            let g = evolve_unitaries(&seg.proto, hk)?;
            if g.len() != 2 * seg.steps + 1 {
                return Err(Error::Argument(format!("stroke {} grid has {} nodes", seg.stroke.label(), g.len())));
            }
            u.extend(g.u[1..].iter().map(|x| *x * base));
        }
    }
    let a = u.iter().map(heisenberg_sigma_y).collect();
    Ok((u, a))
}

struct NodeGenerator {
    gen: GeneratorMatrix,
    rates: RateSummary,
    ham: HamiltonianSample,
}

fn integrate_interval(
    config: &CycleConfig,
    segs: &[Segment],
    kernel: &MemoryKernel,
    mut rho: DensityMatrix,
    h: f64,
    clock: &mut f64,
    records: &mut Vec<StrokeRecord>,
    hygiene: &mut Hygiene,
) -> Result<DensityMatrix> {
    let hk = 0.5 * h;
    let (u, history) = interval_history(segs, hk)?;
    let leading_hold = segs[0].proto.direction == Direction::Hold;
    let hold_nodes = if leading_hold { 2 * segs[0].steps } else { 0 };
    let hold_kernel = if leading_hold { Some(kernel.hold_kernel(&hamiltonian(&segs[0].proto, 0.0)?.h)) } else { None };
    let mut saturated: Option<(GeneratorMatrix, RateSummary)> = None;
    let mode = config.mode;

    let mut node = |j: usize, seg: &Segment, local: usize| -> Result<NodeGenerator> {
        let ham = hamiltonian(&seg.proto, local as f64 * hk)?;
        let frame = eigenframe_at(ham.q, seg.proto.delta)?;
        if let (Some(hold), true) = (&hold_kernel, j <= hold_nodes) {
            if kernel.saturated(j) {
                if let Some((gen, rates)) = saturated {
                    return Ok(NodeGenerator { gen, rates, ham });
                }
            }
            let m = kernel.hold_memory(hold, j as f64 * hk);
            let rates = rates_from_memory(&m, &frame, 1.0);
            let gen = GeneratorMatrix::build(&rates, &frame, &ham.h, ham.q, mode);
            if kernel.saturated(j) {
                saturated = Some((gen, rates.summary()));
            }
            return Ok(NodeGenerator { gen, rates: rates.summary(), ham });
        }
        let m = kernel.drive_memory(&u[j], &history, j)?;
        let rates = rates_from_memory(&m, &frame, 1.0);
        let gen = GeneratorMatrix::build(&rates, &frame, &ham.h, ham.q, mode);
        Ok(NodeGenerator { gen, rates: rates.summary(), ham })
    };

    let mut offset = 0usize;
    for seg in segs {
        let mut current = node(offset, seg, 0)?;
        let mut samples = Vec::with_capacity(seg.steps + 1);
        let t0 = *clock;
        samples.push(sample(t0, &rho, &current, mode)?);
        for k in 0..seg.steps {
            let j = offset + 2 * k;
            let mid = node(j + 1, seg, 2 * k + 1)?;
            let end = node(j + 2, seg, 2 * k + 2)?;
            hygiene.max_hermiticity_defect = hygiene
                .max_hermiticity_defect
                .max(current.gen.hermiticity_defect)
                .max(mid.gen.hermiticity_defect)
                .max(end.gen.hermiticity_defect);
            let t_next = t0 + (k + 1) as f64 * h;
            let (next, drift) = step_state_traced(&rho, [&current.gen, &mid.gen, &end.gen], h, t_next).map_err(|e| match e {
                Error::Positivity { t, min_eig, .. } => {
                    Error::Positivity { stroke: format!("{} (cycle {})", seg.stroke.label(), seg.cycle + 1), t, min_eig }
                }
                other => other,
            })?;
            rho = next;
            hygiene.max_trace_drift = hygiene.max_trace_drift.max(drift);
            hygiene.min_eigenvalue = hygiene.min_eigenvalue.min(rho.min_eigenvalue());
            current = end;
            samples.push(sample(t_next, &rho, &current, mode)?);
        }
        records.push(StrokeRecord {
            cycle: seg.cycle,
            stroke: seg.stroke,
            h,
            samples,
            final_generator: current.gen,
        });
        offset += 2 * seg.steps;
        *clock = t0 + seg.steps as f64 * h;
    }
    Ok(rho)
}

fn sample(t: f64, rho: &DensityMatrix, node: &NodeGenerator, mode: GeneratorMode) -> Result<Sample> {
    let ham = &node.ham;
    let frame = eigenframe_at(ham.q, ham.h.c[1].re)?;
    let r = &node.rates;
    let shifts = match mode {
        GeneratorMode::Full => *r,
        GeneratorMode::RotatingOnly => RateSummary { delta_cr: 0.0, ..*r },
    };
    let h_eff = effective_hamiltonian(&ham.h, ham.q, ham.h.c[1].re, &[shifts]);
    let l = node.gen.apply_state(rho);
    let tr = |a: &PauliOperator| 2.0 * (0..4).map(|i| a.c[i].re * l[i]).sum::<f64>();
    Ok(Sample {
        t,
        omega: ham.omega,
        q: ham.q,
        rho: *rho,
        p_excited: rho.population(frame.e_vec),
        polarization: rho.expect(&ham.h) / ham.omega,
        rates: *r,
        h: ham.h,
        dh_dt: ham.dh_dt,
        h_eff,
        heat_rate_bare: tr(&ham.h),
        heat_rate_eff: tr(&h_eff),
    })
}

/// The four relative entropies comparing end points with reference states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distances {
    /// `S(ρ_b′‖ρ_b*)`
    pub b_to_b_star: f64,
    /// `S(ρ_d′‖ρ_d*)`
    pub d_to_d_star: f64,
    /// `S(ρ_b′‖ρ_c)`
    pub b_to_c: f64,
    /// `S(ρ_d′‖ρ_a)`
    pub d_to_a: f64,
}

pub fn distance_diagnostics(run: &CycleRun) -> Distances {
    let e = &run.ends;
    Distances {
        b_to_b_star: relative_entropy(&e.b, &e.b_star),
        d_to_d_star: relative_entropy(&e.d, &e.d_star),
        b_to_c: relative_entropy(&e.b, &e.c),
        d_to_a: relative_entropy(&e.d, &e.a),
    }
}

/// Everything a sweep keeps from one run.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub ledger: EnergyLedger,
    pub distances: Distances,
    pub periodicity: f64,
    pub thermalization_gap: [f64; 2],
    pub hygiene: Hygiene,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    /// Requested driven-stroke durations.
    pub tau_ab: f64,
    pub tau_cd: f64,
    pub outcome: std::result::Result<SweepPoint, String>,
}

pub fn sweep_point(config: &CycleConfig) -> Result<SweepPoint> {
    let run = run_cycle(config)?;
    Ok(SweepPoint {
        ledger: ledger(&run)?,
        distances: distance_diagnostics(&run),
        periodicity: run.periodicity,
        thermalization_gap: run.thermalization_gap,
        hygiene: run.hygiene,
    })
}

/// One independent run per `(τ_ab, τ_cd)` pair, in parallel on the current
/// rayon pool. Rows come back in input order; a failing run is recorded in
/// its row and does not stop the others.
pub fn sweep(durations: &[(f64, f64)], base: &CycleConfig) -> Result<Vec<SweepRow>> {
    if durations.is_empty() {
        return Err(Error::Argument("sweep needs at least one duration pair".into()));
    }
    Ok(durations
        .par_iter()
        .enumerate()
        .map(|(index, &(tau_ab, tau_cd))| {
            let mut cfg = *base;
            cfg.schedule.tau_ab = tau_ab;
            cfg.schedule.tau_cd = tau_cd;
            SweepRow { index, tau_ab, tau_cd, outcome: sweep_point(&cfg).map_err(|e| e.to_string()) }
        })
        .collect())
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Symmetric,
    /// `τ_ab = τ_D`, `τ_cd` varied.
    FixAb,
    /// `τ_cd = τ_D`, `τ_ab` varied.
    FixCd,
}

/// Duration pairs of a sweep over `factors·τ_D`.
pub fn sweep_durations(mode: SweepMode, tau_d: f64, factors: &[f64]) -> Vec<(f64, f64)> {
    factors
        .iter()
        .map(|&x| {
            let tau = x * tau_d;
            match mode {
                SweepMode::Symmetric => (tau, tau),
                SweepMode::FixAb => (tau_d, tau),
                SweepMode::FixCd => (tau, tau_d),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::Variant;

    fn quick(tau: f64) -> CycleConfig {
        let p = EngineParameters::default();
        let td = p.tau_d().unwrap();
        p.cycle(tau * td, tau * td).unwrap()
    }

    #[test]
    fn grid_divides_driven_strokes() {
        let cfg = EngineParameters::default().cycle(3.0, 700.0).unwrap();
        let g = cfg.time_grid();
        assert!(g.h_hot <= 3.0 / 200.0 + 1e-15 && g.h_cold <= 0.05);
        assert!((g.steps[0] as f64 * g.h_hot - 3.0).abs() < 1e-12);
        assert!((g.steps[2] as f64 * g.h_cold - 700.0).abs() < 1e-9);
        let r = g.realized(&cfg.schedule);
        assert!((r.tau_bc - cfg.schedule.tau_bc).abs() <= 0.5 * g.h_cold);
    }

    #[test]
    fn reported_cycle_is_periodic_and_clean() {
        let run = run_cycle(&quick(1.0)).unwrap();
        assert_eq!(run.strokes.len(), 4);
        assert!(run.strokes.iter().all(|r| r.cycle == 1));
        assert!(run.periodicity < 1e-3, "{}", run.periodicity);
        assert!(run.thermalization_gap.iter().all(|&g| g < 1e-2));
        assert!(run.hygiene.passes(), "{:?}", run.hygiene);
        for w in run.strokes.windows(2) {
            assert_eq!(w[0].last().rho, w[1].first().rho);
            assert!((w[0].last().t - w[1].first().t).abs() < 1e-9);
        }
        let d = distance_diagnostics(&run);
        assert!(d.b_to_c > 0.0 && d.d_to_a > 0.0);
    }

    #[test]
    fn isochoric_strokes_do_no_bare_work() {
        let l = ledger(&run_cycle(&quick(1.0)).unwrap()).unwrap();
        assert_eq!(l.bare.work(Stroke::Bc), 0.0);
        assert_eq!(l.bare.work(Stroke::Da), 0.0);
        assert!(l.effective.work(Stroke::Bc) != 0.0);
    }

    #[test]
    fn segment_rejects_off_grid_times() {
        let run = run_cycle(&quick(1.0)).unwrap();
        let rec = run.stroke(Stroke::Ab);
        let (t0, h) = (rec.first().t, rec.h);
        assert_eq!(rec.segment(t0, t0 + 4.0 * h).unwrap().len(), 5);
        assert!(rec.segment(t0, t0 + 4.5 * h).is_err());
        assert!(rec.segment(t0 + 4.0 * h, t0).is_err());
        assert!(rec.segment(t0 - h, t0).is_err());
    }

    #[test]
    fn sweep_matches_single_runs_in_any_order() {
        let base = quick(1.0);
        let td = EngineParameters::default().tau_d().unwrap();
        let pairs = [(0.3 * td, 0.3 * td), (0.3 * td, 1.2 * td), (1.2 * td, 0.3 * td)];
        let rows = sweep(&pairs, &base).unwrap();
        let mut reversed: Vec<_> = pairs.to_vec();
        reversed.reverse();
        let back = sweep(&reversed, &base).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.index, i);
            assert_eq!((row.tau_ab, row.tau_cd), pairs[i]);
            let mut cfg = base;
            cfg.schedule.tau_ab = pairs[i].0;
            cfg.schedule.tau_cd = pairs[i].1;
            let single = sweep_point(&cfg).unwrap();
            assert_eq!(row.outcome.as_ref().unwrap(), &single);
            assert_eq!(back[pairs.len() - 1 - i].outcome, row.outcome);
        }
        assert!(sweep(&[], &base).is_err());
    }

    #[test]
    fn failed_point_does_not_stop_the_sweep() {
        let base = quick(1.0);
        let rows = sweep(&[(1.0, 1.0), (-1.0, 1.0)], &base).unwrap();
        assert!(rows[0].outcome.is_ok());
        assert!(rows[1].outcome.is_err());
    }

    #[test]
    fn truncated_window_matches_full_history() {
        let base = quick(0.1);
        let mut full = base;
        full.kernel = KernelPolicy::FullHistory;
        let eta = |c: &CycleConfig| ledger(&run_cycle(c).unwrap()).unwrap().variant(Variant::Bare).efficiency.unwrap();
        let (a, b) = (eta(&base), eta(&full));
        assert!((a - b).abs() < 2e-5, "{a} vs {b}");
    }

    #[test]
    fn step_refinement_changes_efficiency_little() {
        let base = quick(1.0);
        let mut fine = base;
        fine.dt_max = 0.5 * base.dt_max;
        let eta = |c: &CycleConfig| ledger(&run_cycle(c).unwrap()).unwrap().bare.efficiency.unwrap();
        let (a, b) = (eta(&base), eta(&fine));
        assert!((a - b).abs() < 5e-5, "{a} vs {b}");
    }

    #[test]
    fn log_space_ends() {
        let v = log_space(0.05, 20.0, 25);
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], 0.05);
        assert!((v[24] - 20.0).abs() < 1e-12);
        assert_eq!(log_space(1.0, 2.0, 1), vec![1.0]);
        let d = sweep_durations(SweepMode::FixAb, 2.0, &[0.5, 3.0]);
        assert_eq!(d, vec![(2.0, 1.0), (2.0, 6.0)]);
        assert_eq!(sweep_durations(SweepMode::FixCd, 2.0, &[3.0]), vec![(6.0, 2.0)]);
    }
}
