//! Drive protocol and stroke schedule.

use crate::bath::BathLabel;
use crate::error::{Error, Result};
use crate::qops::PauliOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stroke {
    Ab,
    Bc,
    Cd,
    Da,
}

impl Stroke {
    pub const ALL: [Stroke; 4] = [Stroke::Ab, Stroke::Bc, Stroke::Cd, Stroke::Da];

    pub fn label(&self) -> &'static str {
        match self {
            Stroke::Ab => "a->b",
            Stroke::Bc => "b->c",
            Stroke::Cd => "c->d",
            Stroke::Da => "d->a",
        }
    }

    /// Two-letter name used in CSV columns and cells.
    pub fn key(&self) -> &'static str {
        match self {
            Stroke::Ab => "ab",
            Stroke::Bc => "bc",
            Stroke::Cd => "cd",
            Stroke::Da => "da",
        }
    }

    pub fn bath(&self) -> BathLabel {
        match self {
            Stroke::Ab | Stroke::Da => BathLabel::Hot,
            Stroke::Bc | Stroke::Cd => BathLabel::Cold,
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// ω decreases from `omega_hi` to `omega_lo`.
    Compress,
    /// ω increases from `omega_lo` to `omega_hi`.
    Expand,
    /// ω fixed at `omega_lo`.
    Hold,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveProtocol {
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub delta: f64,
    pub direction: Direction,
    pub duration: f64,
}

/// Hamiltonian and its time derivative at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSample {
    pub h: PauliOperator,
    pub dh_dt: PauliOperator,
    pub q: f64,
    pub omega: f64,
}

/// `q = √(ω²/4 − Δ²)`.
pub fn drive_coordinate(omega: f64, delta: f64) -> Result<f64> {
    if !(omega / 2.0 > delta) || !(delta > 0.0) {
        return Err(Error::ProtocolViolation { omega, delta });
    }
    Ok((0.25 * omega * omega - delta * delta).sqrt())
}

/// `q σz + Δ σx`.
pub fn system_hamiltonian(q: f64, delta: f64) -> PauliOperator {
    PauliOperator::real(0.0, delta, 0.0, q)
}

impl DriveProtocol {
    pub fn new(omega_lo: f64, omega_hi: f64, delta: f64, direction: Direction, duration: f64) -> Result<Self> {
        let p = DriveProtocol { omega_lo, omega_hi, delta, direction, duration };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::param("delta", format!("must be > 0, got {}", self.delta)));
        }
        if !(2.0 * self.delta < self.omega_lo) {
            return Err(Error::ProtocolViolation { omega: self.omega_lo, delta: self.delta });
        }
        if !(self.omega_lo <= self.omega_hi) {
            return Err(Error::param("omega_hi", format!("must be >= omega_lo ({} < {})", self.omega_hi, self.omega_lo)));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::param("duration", format!("must be positive, got {}", self.duration)));
        }
        Ok(())
    }

    /// `(ω(t), dω/dt)` for local time `t ∈ [0, duration]`.
    pub fn omega_at(&self, t: f64) -> (f64, f64) {
        let rate = (self.omega_hi - self.omega_lo) / self.duration;
        match self.direction {
            Direction::Compress => (self.omega_hi - rate * t, -rate),
            Direction::Expand => (self.omega_lo + rate * t, rate),
            Direction::Hold => (self.omega_lo, 0.0),
        }
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<HamiltonianSample> {
        if !(-1e-12 * self.duration..=self.duration * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutOfDomain { t, lo: 0.0, hi: self.duration });
        }
        let (omega, omega_dot) = self.omega_at(t);
        let q = drive_coordinate(omega, self.delta)?;
        let q_dot = if omega_dot == 0.0 { 0.0 } else { omega * omega_dot / (4.0 * q) };
        Ok(HamiltonianSample {
            h: system_hamiltonian(q, self.delta),
            dh_dt: PauliOperator::real(0.0, 0.0, 0.0, q_dot),
            q,
            omega,
        })
    }
}

/// Durations and drive endpoints of the four-stroke cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrokeSchedule {
    pub tau_ab: f64,
    pub tau_bc: f64,
    pub tau_cd: f64,
    pub tau_da: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub delta: f64,
}

/// Result of [`StrokeSchedule::lookup`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrokeAt {
    pub cycle: usize,
    pub stroke: Stroke,
    pub bath: BathLabel,
    pub protocol: DriveProtocol,
    /// Time since the start of the stroke.
    pub local_t: f64,
}

impl StrokeSchedule {
    pub fn validate(&self) -> Result<()> {
        for s in Stroke::ALL {
            self.protocol(s).validate()?;
        }
        Ok(())
    }

    pub fn duration(&self, s: Stroke) -> f64 {
        match s {
            Stroke::Ab => self.tau_ab,
            Stroke::Bc => self.tau_bc,
            Stroke::Cd => self.tau_cd,
            Stroke::Da => self.tau_da,
        }
    }

    pub fn period(&self) -> f64 {
        self.tau_ab + self.tau_bc + self.tau_cd + self.tau_da
    }

    /// Start of stroke `s` within a cycle.
    pub fn offset(&self, s: Stroke) -> f64 {
        Stroke::ALL[..s.index()].iter().map(|&p| self.duration(p)).sum()
    }

    pub fn protocol(&self, s: Stroke) -> DriveProtocol {
        let (lo, direction) = match s {
            Stroke::Ab => (self.omega_1, Direction::Compress),
            Stroke::Bc => (self.omega_1, Direction::Hold),
            Stroke::Cd => (self.omega_1, Direction::Expand),
            Stroke::Da => (self.omega_2, Direction::Hold),
        };
        let hi = if direction == Direction::Hold { lo } else { self.omega_2 };
        DriveProtocol { omega_lo: lo, omega_hi: hi, delta: self.delta, direction, duration: self.duration(s) }
    }

    /// Stroke active at absolute time `t ∈ [0, 2T)`; boundaries belong to
    /// the succeeding stroke.
    pub fn lookup(&self, t: f64) -> Result<StrokeAt> {
        let period = self.period();
        if !(0.0..2.0 * period).contains(&t) {
            return Err(Error::OutOfDomain { t, lo: 0.0, hi: 2.0 * period });
        }
        let cycle = if t >= period { 1 } else { 0 };
        let mut local = t - cycle as f64 * period;
        for s in Stroke::ALL {
            let d = self.duration(s);
            if local < d || s == Stroke::Da {
                return Ok(StrokeAt { cycle, stroke: s, bath: s.bath(), protocol: self.protocol(s), local_t: local.min(d) });
            }
            local -= d;
        }
        unreachable!()
    }

    /// Coupling switch `λ(t) ∈ {0, 1}` of `bath`.
    pub fn lambda(&self, t: f64, bath: BathLabel) -> Result<f64> {
        Ok(if self.lookup(t)?.bath == bath { 1.0 } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::eigenframe_at;
    use proptest::prelude::*;

    fn schedule() -> StrokeSchedule {
        StrokeSchedule { tau_ab: 3.0, tau_bc: 5.0, tau_cd: 2.0, tau_da: 7.0, omega_1: 0.49, omega_2: 0.78, delta: 0.1 }
    }

    #[test]
    fn hold_sample() {
        let p = DriveProtocol::new(0.49, 0.49, 0.1, Direction::Hold, 10.0).unwrap();
        let s = p.hamiltonian_at(4.0).unwrap();
        assert!((s.q - (0.49f64 * 0.49 / 4.0 - 0.01).sqrt()).abs() < 1e-15);
        assert!((s.q - 0.22366).abs() < 1e-5);
        assert_eq!(s.dh_dt, PauliOperator::ZERO);
    }

    #[test]
    fn compression_endpoints_and_midpoint() {
        let p = DriveProtocol::new(0.49, 0.78, 0.1, Direction::Compress, 8.0).unwrap();
        assert!((p.hamiltonian_at(0.0).unwrap().omega - 0.78).abs() < 1e-15);
        assert!((p.hamiltonian_at(8.0).unwrap().omega - 0.49).abs() < 1e-15);
        assert!((p.hamiltonian_at(4.0).unwrap().omega - 0.635).abs() < 1e-15);
    }

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        let p = DriveProtocol::new(0.49, 0.78, 0.1, Direction::Expand, 3.0).unwrap();
        let eps = 1e-6;
        let t = 1.3;
        let fd = (p.hamiltonian_at(t + eps).unwrap().q - p.hamiltonian_at(t - eps).unwrap().q) / (2.0 * eps);
        let an = p.hamiltonian_at(t).unwrap().dh_dt.c[3].re;
        assert!((fd - an).abs() < 1e-8);
    }

    #[test]
    fn protocol_violation() {
        assert!(matches!(
            DriveProtocol::new(0.15, 0.78, 0.1, Direction::Compress, 1.0),
            Err(Error::ProtocolViolation { .. })
        ));
        assert!(drive_coordinate(0.2, 0.1).is_err());
    }

    #[test]
    fn lookup_boundaries() {
        let s = schedule();
        let at0 = s.lookup(0.0).unwrap();
        assert_eq!((at0.stroke, at0.bath, at0.protocol.direction), (Stroke::Ab, BathLabel::Hot, Direction::Compress));
        let at = s.lookup(s.tau_ab + s.tau_bc).unwrap();
        assert_eq!((at.stroke, at.bath, at.protocol.direction), (Stroke::Cd, BathLabel::Cold, Direction::Expand));
        assert_eq!(at.local_t, 0.0);
        let at_t = s.lookup(s.period()).unwrap();
        assert_eq!((at_t.cycle, at_t.stroke), (1, Stroke::Ab));
        assert!(s.lookup(2.0 * s.period()).is_err());
        assert!(s.lookup(-1e-9).is_err());
    }

    #[test]
    fn exactly_one_bath_coupled() {
        let s = schedule();
        for k in 0..340 {
            let t = k as f64 * 0.1;
            let sum = s.lambda(t, BathLabel::Hot).unwrap() + s.lambda(t, BathLabel::Cold).unwrap();
            assert_eq!(sum, 1.0);
        }
    }

    #[test]
    fn cycle_is_continuous_and_closed() {
        let s = schedule();
        let mut prev = s.protocol(Stroke::Ab).omega_at(0.0).0;
        assert_eq!(prev, 0.78);
        for st in Stroke::ALL {
            let p = s.protocol(st);
            assert!((p.omega_at(0.0).0 - prev).abs() < 1e-15, "jump entering {}", st.label());
            prev = p.omega_at(p.duration).0;
        }
        assert!((prev - 0.78).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn gap_matches_commanded_ramp(frac in 0.0..=1.0f64, dur in 0.01..1000.0f64, delta in 0.01..0.24f64) {
            let p = DriveProtocol::new(0.49, 0.78, delta, Direction::Compress, dur).unwrap();
            let s = p.hamiltonian_at(frac * dur).unwrap();
            let commanded = p.omega_at(frac * dur).0;
            prop_assert!((2.0 * s.q.hypot(delta) - commanded).abs() < 1e-12);
            let fr = eigenframe_at(s.q, delta).unwrap();
            prop_assert!((fr.omega - commanded).abs() < 1e-12);
        }
    }
}
