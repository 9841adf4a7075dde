//! Unitary propagator of the driven system and the rotated coupling operator.

use num_complex::Complex64 as C64;

use crate::drive::{Direction, DriveProtocol};
use crate::error::{Error, Result};
use crate::qops::{Mat2, PauliOperator};

/// Tolerated departure from unitarity before projection.
pub const UNITARITY_TOL: f64 = 1e-8;

/// `exp(−iHt)` for a Hermitian two-level `H`.
pub fn expm_hermitian(h: &PauliOperator, t: f64) -> Mat2 {
    let v = h.vector();
    let r = crate::qops::norm3(v);
    let phase = C64::from_polar(1.0, -h.c[0].re * t);
    let (s, c) = (r * t).sin_cos();
    let k = if r > 0.0 { s / r } else { t };
    let gen = PauliOperator::real(c, 0.0, 0.0, 0.0) - PauliOperator::from_vector(v).scale(C64::new(0.0, k));
    gen.to_matrix().scale(phase)
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &Mat2) -> f64 {
    (u.adjoint() * *u - Mat2::IDENTITY).max_abs()
}

/// Nearest element of SU(2) in the `[[a, −b*], [b, a*]]` parametrization.
pub fn project_su2(u: &Mat2) -> Mat2 {
    let m = &u.0;
    let a = (m[0][0] + m[1][1].conj()) * 0.5;
    let b = (m[1][0] - m[0][1].conj()) * 0.5;
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    Mat2([[a, -b.conj()], [b, a.conj()]])
}

/// One classic RK4 step of `dU/dt = −iH(t)U` given `H` at the start, midpoint
/// and end of the step, followed by projection onto SU(2).
pub fn rk4_unitary_step(u: &Mat2, h0: &PauliOperator, hm: &PauliOperator, h1: &PauliOperator, dt: f64) -> Result<Mat2> {
    let mi = C64::new(0.0, -1.0);
    let f = |h: &PauliOperator, x: &Mat2| (h.to_matrix() * *x).scale(mi);
    let k1 = f(h0, u);
    let k2 = f(hm, &(*u + k1.scale((0.5 * dt).into())));
    let k3 = f(hm, &(*u + k2.scale((0.5 * dt).into())));
    let k4 = f(h1, &(*u + k3.scale(dt.into())));
    let next = *u + (k1 + k2.scale(2.0.into()) + k3.scale(2.0.into()) + k4).scale((dt / 6.0).into());
    let drift = unitarity_defect(&next);
    if drift > UNITARITY_TOL {
        return Err(Error::UnitarityDrift { drift });
    }
    Ok(project_su2(&next))
}

/// `O_ki = ½ tr[σ_k U σ_i U†]`, the SO(3) image of `U`.
pub fn rotation_matrix(u: &Mat2) -> [[f64; 3]; 3] {
    let basis = [PauliOperator::SIGMA_X, PauliOperator::SIGMA_Y, PauliOperator::SIGMA_Z];
    let ud = u.adjoint();
    let mut o = [[0.0; 3]; 3];
    for i in 0..3 {
        let rotated = PauliOperator::from_matrix(&(*u * basis[i].to_matrix() * ud));
        let v = rotated.vector();
        for k in 0..3 {
            o[k][i] = v[k];
        }
    }
    o
}

/// Pauli vector of `U† σy U`.
pub fn heisenberg_sigma_y(u: &Mat2) -> [f64; 3] {
    rotation_matrix(u)[1]
}

/// Propagators `U(t_k, t_start)` for one stroke and the cached operators
/// `A(τ_k) = U(τ_k)† σy U(τ_k)`.
#[derive(Clone, Debug)]
pub struct PropagatorGrid {
    pub dt: f64,
    pub u: Vec<Mat2>,
    pub a: Vec<[f64; 3]>,
}

/// Integrates the stroke's propagator on a grid of `round(duration/dt)` steps.
/// Hold strokes use the exact exponential.
pub fn evolve_unitaries(proto: &DriveProtocol, dt: f64) -> Result<PropagatorGrid> {
    proto.validate()?;
    if !(dt > 0.0) {
        return Err(Error::param("dt", format!("must be > 0, got {dt}")));
    }
    let n = ((proto.duration / dt).round() as usize).max(1);
    let h = proto.duration / n as f64;
    let mut u = Vec::with_capacity(n + 1);
    u.push(Mat2::IDENTITY);
    if proto.direction == Direction::Hold {
        let ham = proto.hamiltonian_at(0.0)?.h;
        let step = expm_hermitian(&ham, h);
        for k in 0..n {
            u.push(project_su2(&(step * u[k])));
        }
    } else {
        let ham = |t: f64| proto.hamiltonian_at(t.min(proto.duration)).map(|s| s.h);
        for k in 0..n {
            let t = k as f64 * h;
            let next = rk4_unitary_step(&u[k], &ham(t)?, &ham(t + 0.5 * h)?, &ham(t + h)?, h)?;
            u.push(next);
        }
    }
    let a = u.iter().map(heisenberg_sigma_y).collect();
    Ok(PropagatorGrid { dt: h, u, a })
}

impl PropagatorGrid {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `U(t_k, τ_j) = U(t_k) U(τ_j)†`.
    pub fn propagator_between(&self, k: usize, j: usize) -> Result<Mat2> {
        self.check(k, j)?;
        Ok(self.u[k] * self.u[j].adjoint())
    }

    /// `S̃(t_k, τ_j) = U(t_k) A(τ_j) U(t_k)†`.
    pub fn two_time_op(&self, k: usize, j: usize) -> Result<PauliOperator> {
        self.check(k, j)?;
        let a = PauliOperator::from_vector(self.a[j]).to_matrix();
        Ok(PauliOperator::from_matrix(&(self.u[k] * a * self.u[k].adjoint())))
    }

    fn check(&self, k: usize, j: usize) -> Result<()> {
        if k >= self.u.len() {
            return Err(Error::Argument(format!("index {k} beyond grid of {} points", self.u.len())));
        }
        if j > k {
            return Err(Error::Argument(format!("tau index {j} is later than t index {k}")));
        }
        Ok(())
    }
}
