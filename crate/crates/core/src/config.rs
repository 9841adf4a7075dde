//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::cycle::{CycleConfig, EngineParameters, KernelPolicy};
use crate::error::{Error, Result};
use crate::generator::GeneratorMode;
use crate::thermo::Variant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingSet {
    G1,
    /// Both amplitudes scaled by `√2`.
    G2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerNorm {
    /// `W/(τ_ab + τ_cd)`
    Drive,
    /// `W/T`
    Period,
}

/// Every run parameter. Durations are in units of `τ_D`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub beta_h: f64,
    pub beta_c: f64,
    pub g_c: f64,
    pub g_h: f64,
    pub coupling_set: CouplingSet,
    pub omega_r: f64,
    pub f: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub delta: f64,
    pub tau_th: f64,
    pub tau_ab: f64,
    pub tau_cd: f64,
    pub dt: f64,
    pub mode: GeneratorMode,
    pub variant: Variant,
    pub kernel: KernelPolicy,
    pub power_norm: PowerNorm,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_points: usize,
    /// Worker threads for sweeps; 0 lets the pool decide.
    pub threads: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = EngineParameters::default();
        RunConfig {
            beta_h: p.beta_h,
            beta_c: p.beta_c,
            g_c: p.g_c,
            g_h: p.g_h,
            coupling_set: CouplingSet::G1,
            omega_r: p.omega_res,
            f: p.f,
            omega_1: p.omega_1,
            omega_2: p.omega_2,
            delta: p.delta,
            tau_th: p.tau_th_factor,
            tau_ab: 1.0,
            tau_cd: 1.0,
            dt: 0.05,
            mode: GeneratorMode::Full,
            variant: Variant::Bare,
            kernel: KernelPolicy::Window,
            power_norm: PowerNorm::Drive,
            sweep_min: 0.05,
            sweep_max: 20.0,
            sweep_points: 25,
            threads: 0,
            output_dir: PathBuf::from("."),
        }
    }
}

pub const KEYS: [&str; 23] = [
    "beta_h",
    "beta_c",
    "g_c",
    "g_h",
    "coupling_set",
    "omega_r",
    "f",
    "omega_1",
    "omega_2",
    "delta",
    "tau_th",
    "tau_ab",
    "tau_cd",
    "dt",
    "mode",
    "variant",
    "kernel",
    "power_norm",
    "sweep_min",
    "sweep_max",
    "sweep_points",
    "threads",
    "output_dir",
];

fn config_err(key: &str, msg: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), msg: msg.into() }
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value.parse().map_err(|_| config_err(key, format!("expected a number, got `{value}`")))?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(config_err(key, format!("must be a positive finite number, got {x}")));
    }
    Ok(x)
}

impl RunConfig {
    /// Parses `key = value` lines over the defaults. Blank lines and `#`
    /// comments are ignored; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(&format!("line {}", n + 1), format!("expected `key = value`, got `{line}`")))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "beta_h" => self.beta_h = positive(key, value)?,
            "beta_c" => self.beta_c = positive(key, value)?,
            "g_c" => self.g_c = positive(key, value)?,
            "g_h" => self.g_h = positive(key, value)?,
            "coupling_set" => {
                self.coupling_set = match value {
                    "g1" => CouplingSet::G1,
                    "g2" => CouplingSet::G2,
                    _ => return Err(config_err(key, format!("expected g1 or g2, got `{value}`"))),
                }
            }
            "omega_r" => self.omega_r = positive(key, value)?,
            "f" => self.f = positive(key, value)?,
            "omega_1" => self.omega_1 = positive(key, value)?,
            "omega_2" => self.omega_2 = positive(key, value)?,
            "delta" => self.delta = positive(key, value)?,
            "tau_th" => self.tau_th = positive(key, value)?,
            "tau_ab" => self.tau_ab = positive(key, value)?,
            "tau_cd" => self.tau_cd = positive(key, value)?,
            "dt" => self.dt = positive(key, value)?,
            "mode" => {
                self.mode = match value {
                    "full" => GeneratorMode::Full,
                    "rotating" => GeneratorMode::RotatingOnly,
                    _ => return Err(config_err(key, format!("expected full or rotating, got `{value}`"))),
                }
            }
            "variant" => {
                self.variant = match value {
                    "bare" => Variant::Bare,
                    "effective" => Variant::Effective,
                    _ => return Err(config_err(key, format!("expected bare or effective, got `{value}`"))),
                }
            }
            "kernel" => {
                self.kernel = match value {
                    "window" => KernelPolicy::Window,
                    "full" => KernelPolicy::FullHistory,
                    _ => return Err(config_err(key, format!("expected window or full, got `{value}`"))),
                }
            }
            "power_norm" => {
                self.power_norm = match value {
                    "drive" => PowerNorm::Drive,
                    "period" => PowerNorm::Period,
                    _ => return Err(config_err(key, format!("expected drive or period, got `{value}`"))),
                }
            }
            "sweep_min" => self.sweep_min = positive(key, value)?,
            "sweep_max" => self.sweep_max = positive(key, value)?,
            "sweep_points" => {
                self.sweep_points =
                    value.parse().map_err(|_| config_err(key, format!("expected a positive integer, got `{value}`")))?;
                if self.sweep_points == 0 {
                    return Err(config_err(key, "must be at least 1"));
                }
            }
            "threads" => {
                self.threads = value.parse().map_err(|_| config_err(key, format!("expected an integer, got `{value}`")))?
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(config_err(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(2.0 * self.delta < self.omega_1) {
            return Err(config_err("delta", format!("need 2*delta < omega_1, got delta={} omega_1={}", self.delta, self.omega_1)));
        }
        if !(self.omega_1 < self.omega_2) {
            return Err(config_err("omega_2", format!("must exceed omega_1={}, got {}", self.omega_1, self.omega_2)));
        }
        if !(self.f > 0.5) {
            return Err(config_err("f", format!("must exceed 1/2, got {}", self.f)));
        }
        if !(self.sweep_min < self.sweep_max) && self.sweep_points > 1 {
            return Err(config_err("sweep_max", format!("must exceed sweep_min={}", self.sweep_min)));
        }
        Ok(())
    }

    pub fn engine(&self) -> EngineParameters {
        EngineParameters {
            beta_h: self.beta_h,
            beta_c: self.beta_c,
            g_c: self.g_c,
            g_h: self.g_h,
            g_scale: match self.coupling_set {
                CouplingSet::G1 => 1.0,
                CouplingSet::G2 => std::f64::consts::SQRT_2,
            },
            omega_res: self.omega_r,
            f: self.f,
            omega_1: self.omega_1,
            omega_2: self.omega_2,
            delta: self.delta,
            tau_th_factor: self.tau_th,
        }
    }

    /// Cycle with driven strokes of `tau_ab·τ_D` and `tau_cd·τ_D`.
    pub fn cycle(&self, tau_ab: f64, tau_cd: f64) -> Result<CycleConfig> {
        let e = self.engine();
        let td = e.tau_d()?;
        let mut c = e.cycle(tau_ab * td, tau_cd * td)?;
        c.dt_max = self.dt;
        c.mode = self.mode;
        c.kernel = self.kernel;
        Ok(c)
    }

    fn value(&self, key: &str) -> String {
        match key {
            "beta_h" => self.beta_h.to_string(),
            "beta_c" => self.beta_c.to_string(),
            "g_c" => self.g_c.to_string(),
            "g_h" => self.g_h.to_string(),
            "coupling_set" => match self.coupling_set {
                CouplingSet::G1 => "g1",
                CouplingSet::G2 => "g2",
            }
            .into(),
            "omega_r" => self.omega_r.to_string(),
            "f" => self.f.to_string(),
            "omega_1" => self.omega_1.to_string(),
            "omega_2" => self.omega_2.to_string(),
            "delta" => self.delta.to_string(),
            "tau_th" => self.tau_th.to_string(),
            "tau_ab" => self.tau_ab.to_string(),
            "tau_cd" => self.tau_cd.to_string(),
            "dt" => self.dt.to_string(),
            "mode" => match self.mode {
                GeneratorMode::Full => "full",
                GeneratorMode::RotatingOnly => "rotating",
            }
            .into(),
            "variant" => self.variant.as_str().into(),
            "kernel" => match self.kernel {
                KernelPolicy::Window => "window",
                KernelPolicy::FullHistory => "full",
            }
            .into(),
            "power_norm" => match self.power_norm {
                PowerNorm::Drive => "drive",
                PowerNorm::Period => "period",
            }
            .into(),
            "sweep_min" => self.sweep_min.to_string(),
            "sweep_max" => self.sweep_max.to_string(),
            "sweep_points" => self.sweep_points.to_string(),
            "threads" => self.threads.to_string(),
            "output_dir" => self.output_dir.display().to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// The resolved configuration in the file format.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for k in KEYS {
            let _ = writeln!(s, "{k} = {}", self.value(k));
        }
        s
    }
}
