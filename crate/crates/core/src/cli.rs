//! Command implementations and CSV emission. Every CSV starts with `#`
//! lines holding the resolved configuration, then one column-header row.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bath::coupling_spectrum;
use crate::config::{PowerNorm, RunConfig};
use crate::cycle::{log_space, run_cycle, sweep_durations, SweepMode, SweepRow};
use crate::drive::Stroke;
use crate::error::{Error, Result};
use crate::generator::markov_rates;
use crate::thermo::{carnot_efficiency, ledger, limiting_cycles, EnergyLedger, VariantLedger};

pub const SPECTRUM_COLUMNS: [&str; 3] = ["omega", "G_cold", "G_hot"];

pub const RATES_COLUMNS: [&str; 9] =
    ["t", "stroke", "omega", "gamma_down", "gamma_up", "delta_r", "delta_cr", "gamma_down_markov", "gamma_up_markov"];

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "stroke", "omega", "n", "p_e", "p_g"];

pub const DISTANCE_COLUMNS: [&str; 14] = [
    "index",
    "tau_ab",
    "tau_cd",
    "tau_ab_rel",
    "tau_cd_rel",
    "S_b_bstar",
    "S_d_dstar",
    "S_b_c",
    "S_d_a",
    "periodicity",
    "gap_c",
    "gap_a",
    "min_eigenvalue",
    "status",
];

pub const ORACLE_COLUMNS: [&str; 13] =
    ["case", "Q_ab", "Q_bc", "Q_cd", "Q_da", "W_ab", "W_bc", "W_cd", "W_da", "W_extract", "Q_h", "eta", "eta_carnot"];

/// Ledger columns: durations, then the per-variant block for `bare` and
/// `effective`, then the closing flags.
pub fn ledger_columns() -> Vec<String> {
    let mut cols: Vec<String> = ["index", "tau_ab", "tau_cd", "tau_ab_rel", "tau_cd_rel"].map(String::from).into();
    for v in ["bare", "effective"] {
        for s in Stroke::ALL {
            cols.push(format!("Q_{}_{v}", s.key()));
        }
        for s in Stroke::ALL {
            cols.push(format!("W_{}_{v}", s.key()));
        }
        for name in ["W_extract", "Q_h", "P", "eta"] {
            cols.push(format!("{name}_{v}"));
        }
    }
    cols.extend(["first_law_residual", "not_an_engine", "status"].map(String::from));
    cols
}

/// 12 significant digits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.11e}")
    }
}

fn status_field(msg: &str) -> String {
    format!("error: {}", msg.replace([',', '\n', '\r'], ";"))
}

/// One CSV file ready to be written.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvFile {
    pub name: String,
    pub text: String,
}

/// Files produced by a command and the number of failed runs among them.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub files: Vec<CsvFile>,
    pub failures: usize,
    /// One-line human summary per run.
    pub summary: Vec<String>,
}

impl Output {
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        self.files
            .iter()
            .map(|f| {
                let p = dir.join(&f.name);
                std::fs::write(&p, &f.text)?;
                Ok(p)
            })
            .collect()
    }

    pub fn file(&self, name: &str) -> Option<&CsvFile> {
        self.files.iter().find(|f| f.name == name)
    }
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(cfg: &RunConfig, command: &str, columns: &[impl AsRef<str>]) -> Result<Self> {
        let mut text = format!("# qstirling {command}\n");
        for line in cfg.render().lines() {
            let _ = writeln!(text, "# {line}");
        }
        let _ = writeln!(text, "# tau_d = {}", num(cfg.engine().tau_d()?));
        let header: Vec<&str> = columns.iter().map(|c| c.as_ref()).collect();
        let _ = writeln!(text, "{}", header.join(","));
        Ok(Csv { text })
    }

    fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    fn finish(self, name: impl Into<String>) -> CsvFile {
        CsvFile { name: name.into(), text: self.text }
    }
}

/// `G_cold` and `G_hot` on 600 cell-centred frequencies in `[−1, 2]`.
pub fn spectrum(cfg: &RunConfig) -> Result<Output> {
    let e = cfg.engine();
    let (cold, hot) = (e.cold()?, e.hot()?);
    let mut csv = Csv::new(cfg, "spectrum", &SPECTRUM_COLUMNS)?;
    for k in 0..600 {
        let w = -1.0 + (k as f64 + 0.5) * 0.005;
        csv.row(&[num(w), num(coupling_spectrum(w, &cold)), num(coupling_spectrum(w, &hot))]);
    }
    let (gc, gh) = (coupling_spectrum(cfg.omega_r, &cold), coupling_spectrum(cfg.omega_r, &hot));
    Ok(Output {
        files: vec![csv.finish("spectrum.csv")],
        failures: 0,
        summary: vec![format!("G(omega_r): cold {gc:.6e}, hot {gh:.6e}, ratio {:.4}", gc / gh)],
    })
}

/// Instantaneous rates along the reported cycle of a symmetric run with
/// driven strokes of `tau·τ_D`, next to the Markovian values `2πG(±ω)`.
pub fn rates(cfg: &RunConfig, tau: f64) -> Result<Output> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Argument(format!("--tau must be a positive number, got {tau}")));
    }
    let cc = cfg.cycle(tau, tau)?;
    let run = run_cycle(&cc)?;
    let t0 = run.strokes[0].first().t;
    let mut csv = Csv::new(cfg, &format!("rates --tau {tau}"), &RATES_COLUMNS)?;
    for rec in &run.strokes {
        let spec = cc.bath(rec.stroke.bath());
        for s in &rec.samples {
            let m = markov_rates(spec, s.omega);
            let r = &s.rates;
            csv.row(&[
                num(s.t - t0),
                rec.stroke.key().into(),
                num(s.omega),
                num(r.gamma_down),
                num(r.gamma_up),
                num(r.delta_r),
                num(r.delta_cr),
                num(m.gamma_down),
                num(m.gamma_up),
            ]);
        }
    }
    Ok(Output {
        files: vec![csv.finish("rates.csv")],
        failures: 0,
        summary: vec![format!("rates: {} strokes over T = {:.6}", run.strokes.len(), run.schedule.period())],
    })
}

fn power(v: &VariantLedger, norm: PowerNorm) -> f64 {
    match norm {
        PowerNorm::Drive => v.power,
        PowerNorm::Period => v.power_period,
    }
}

fn ledger_fields(l: &EnergyLedger, norm: PowerNorm) -> Vec<String> {
    let mut out = Vec::with_capacity(32);
    for v in [&l.bare, &l.effective] {
        out.extend(Stroke::ALL.map(|s| num(v.heat(s))));
        out.extend(Stroke::ALL.map(|s| num(v.work(s))));
        out.push(num(v.w_extract));
        out.push(num(v.q_h));
        out.push(num(power(v, norm)));
        out.push(num(v.efficiency.unwrap_or(f64::NAN)));
    }
    out.push(num(l.bare.first_law_residual.max(l.effective.first_law_residual)));
    out.push(if l.not_an_engine() { "1" } else { "0" }.into());
    out
}

fn summary_line(cfg: &RunConfig, tau_d: f64, l: &EnergyLedger) -> String {
    let v = l.variant(cfg.variant);
    let eta = v.efficiency.map_or("n/a".to_string(), |e| format!("{e:.6}"));
    format!(
        "tau_ab={:.4} tau_cd={:.4} (tau_d units): eta_{}={eta} W_extract={:.6e} P={:.6e}",
        l.tau_ab / tau_d,
        l.tau_cd / tau_d,
        cfg.variant.as_str(),
        v.w_extract,
        power(&l.bare, cfg.power_norm),
    )
}

/// Trajectory, ledger and distances of a single run with the configured
/// `tau_ab`, `tau_cd`.
pub fn cycle(cfg: &RunConfig) -> Result<Output> {
    let tau_d = cfg.engine().tau_d()?;
    let cc = cfg.cycle(cfg.tau_ab, cfg.tau_cd)?;
    let run = run_cycle(&cc)?;
    let l = ledger(&run)?;
    let t0 = run.strokes[0].first().t;

    let mut traj = Csv::new(cfg, "cycle", &TRAJECTORY_COLUMNS)?;
    for rec in &run.strokes {
        for s in &rec.samples {
            traj.row(&[
                num(s.t - t0),
                rec.stroke.key().into(),
                num(s.omega),
                num(s.polarization),
                num(s.p_excited),
                num(1.0 - s.p_excited),
            ]);
        }
    }

    let row = SweepRow {
        index: 0,
        tau_ab: cc.schedule.tau_ab,
        tau_cd: cc.schedule.tau_cd,
        outcome: Ok(crate::cycle::SweepPoint {
            ledger: l,
            distances: crate::cycle::distance_diagnostics(&run),
            periodicity: run.periodicity,
            thermalization_gap: run.thermalization_gap,
            hygiene: run.hygiene,
        }),
    };
    let rows = [row];
    let mut summary = vec![summary_line(cfg, tau_d, &l)];
    if run.thermalization_gap.iter().any(|&g| g > 1e-2) {
        summary.push(format!(
            "warning: isochoric strokes leave a thermalization gap of {:.3e}; increase tau_th",
            run.thermalization_gap[0].max(run.thermalization_gap[1])
        ));
    }
    Ok(Output {
        files: vec![
            traj.finish("trajectory.csv"),
            ledger_csv(cfg, "cycle", &rows, tau_d)?.finish("cycle_ledger.csv"),
            distances_csv(cfg, "cycle", &rows, tau_d)?.finish("cycle_distances.csv"),
        ],
        failures: 0,
        summary,
    })
}

fn ledger_csv(cfg: &RunConfig, command: &str, rows: &[SweepRow], tau_d: f64) -> Result<Csv> {
    let cols = ledger_columns();
    let mut csv = Csv::new(cfg, command, &cols)?;
    for r in rows {
        let mut f = Vec::with_capacity(cols.len());
        f.push(r.index.to_string());
        match &r.outcome {
            Ok(p) => {
                let l = &p.ledger;
                f.extend([num(l.tau_ab), num(l.tau_cd), num(r.tau_ab / tau_d), num(r.tau_cd / tau_d)]);
                f.extend(ledger_fields(l, cfg.power_norm));
                f.push("ok".into());
            }
            Err(msg) => {
                f.extend([num(r.tau_ab), num(r.tau_cd), num(r.tau_ab / tau_d), num(r.tau_cd / tau_d)]);
                f.extend(std::iter::repeat("nan".to_string()).take(cols.len() - 7));
                f.push("1".into());
                f.push(status_field(msg));
            }
        }
        csv.row(&f);
    }
    Ok(csv)
}

fn distances_csv(cfg: &RunConfig, command: &str, rows: &[SweepRow], tau_d: f64) -> Result<Csv> {
    let mut csv = Csv::new(cfg, command, &DISTANCE_COLUMNS)?;
    for r in rows {
        let mut f = vec![r.index.to_string(), num(r.tau_ab), num(r.tau_cd), num(r.tau_ab / tau_d), num(r.tau_cd / tau_d)];
        match &r.outcome {
            Ok(p) => {
                let d = &p.distances;
                f.extend([d.b_to_b_star, d.d_to_d_star, d.b_to_c, d.d_to_a, p.periodicity].map(num));
                f.extend([p.thermalization_gap[0], p.thermalization_gap[1], p.hygiene.min_eigenvalue].map(num));
                f.push("ok".into());
            }
            Err(msg) => {
                f.extend(std::iter::repeat("nan".to_string()).take(8));
                f.push(status_field(msg));
            }
        }
        csv.row(&f);
    }
    Ok(csv)
}

impl SweepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepMode::Symmetric => "symmetric",
            SweepMode::FixAb => "fix-ab",
            SweepMode::FixCd => "fix-cd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(SweepMode::Symmetric),
            "fix-ab" => Ok(SweepMode::FixAb),
            "fix-cd" => Ok(SweepMode::FixCd),
            _ => Err(Error::Argument(format!("sweep mode must be symmetric, fix-ab or fix-cd, got `{s}`"))),
        }
    }
}

/// Runs the configured sweep and returns its rows in input order.
pub fn sweep_rows(cfg: &RunConfig, mode: SweepMode) -> Result<Vec<SweepRow>> {
    let tau_d = cfg.engine().tau_d()?;
    let base = cfg.cycle(cfg.tau_ab, cfg.tau_cd)?;
    let factors = log_space(cfg.sweep_min, cfg.sweep_max, cfg.sweep_points);
    let durations = sweep_durations(mode, tau_d, &factors);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    pool.install(|| crate::cycle::sweep(&durations, &base))
}

/// Ledger and distances CSVs of a duration sweep. Failed points become
/// flagged rows.
pub fn sweep(cfg: &RunConfig, mode: SweepMode) -> Result<Output> {
    let tau_d = cfg.engine().tau_d()?;
    let rows = sweep_rows(cfg, mode)?;
    sweep_output(cfg, mode, &rows, tau_d)
}

pub fn sweep_output(cfg: &RunConfig, mode: SweepMode, rows: &[SweepRow], tau_d: f64) -> Result<Output> {
    let command = format!("sweep --mode {}", mode.as_str());
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    let summary = rows
        .iter()
        .map(|r| match &r.outcome {
            Ok(p) => summary_line(cfg, tau_d, &p.ledger),
            Err(e) => format!("tau_ab={:.4} tau_cd={:.4}: failed: {e}", r.tau_ab / tau_d, r.tau_cd / tau_d),
        })
        .collect();
    Ok(Output {
        files: vec![
            ledger_csv(cfg, &command, rows, tau_d)?.finish(format!("ledger_{}.csv", mode.as_str())),
            distances_csv(cfg, &command, rows, tau_d)?.finish(format!("distances_{}.csv", mode.as_str())),
        ],
        failures,
        summary,
    })
}

/// Closed-form energetics of the four limiting cycles.
pub fn oracles(cfg: &RunConfig) -> Result<Output> {
    let cc = cfg.cycle(cfg.tau_ab, cfg.tau_cd)?;
    let carnot = carnot_efficiency(cfg.beta_h, cfg.beta_c);
    let mut csv = Csv::new(cfg, "oracles", &ORACLE_COLUMNS)?;
    let mut summary = Vec::new();
    for r in limiting_cycles(&cc)? {
        let eta = r.efficiency.unwrap_or(f64::NAN);
        let mut f = vec![r.case.as_str().to_string()];
        f.extend(r.heat.map(num));
        f.extend(r.work.map(num));
        f.extend([r.w_extract, r.q_h, eta, carnot].map(num));
        csv.row(&f);
        summary.push(format!("{}: eta={eta:.6} W_extract={:.6e}", r.case.as_str(), r.w_extract));
    }
    Ok(Output { files: vec![csv.finish("oracles.csv")], failures: 0, summary })
}

/// Reads the `#`-stripped body of a CSV into its header and rows.
pub fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().map(|h| h.split(',').map(String::from).collect()).unwrap_or_default();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

/// The resolved configuration embedded in a CSV header.
pub fn embedded_config(text: &str) -> Result<RunConfig> {
    let body: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l.strip_prefix("# "))
        .filter(|l| l.contains('=') && !l.starts_with("tau_d "))
        .map(|l| format!("{l}\n"))
        .collect();
    RunConfig::parse(&body)
}
