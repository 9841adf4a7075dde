//! Two-level operator algebra.
//!
//! Operators are stored as four complex coefficients on the Pauli basis
//! `{I, σx, σy, σz}`. The computational basis is ordered `(|e⟩, |g⟩)` with
//! `σz|e⟩ = +|e⟩`. Energies are in units of the reference scale ω0 = 1.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Plain 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `|u⟩⟨v|` for real vectors.
    pub fn outer(u: [f64; 2], v: [f64; 2]) -> Mat2 {
        Mat2([
            [C64::from(u[0] * v[0]), C64::from(u[0] * v[1])],
            [C64::from(u[1] * v[0]), C64::from(u[1] * v[1])],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

/// A 2×2 operator written as `c0·I + cx·σx + cy·σy + cz·σz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliOperator {
    pub c: [C64; 4],
}

impl PauliOperator {
    pub const ZERO: PauliOperator = PauliOperator { c: [ZERO; 4] };
    pub const IDENTITY: PauliOperator = PauliOperator { c: [ONE, ZERO, ZERO, ZERO] };
    pub const SIGMA_X: PauliOperator = PauliOperator { c: [ZERO, ONE, ZERO, ZERO] };
    pub const SIGMA_Y: PauliOperator = PauliOperator { c: [ZERO, ZERO, ONE, ZERO] };
    pub const SIGMA_Z: PauliOperator = PauliOperator { c: [ZERO, ZERO, ZERO, ONE] };

    pub fn new(c0: C64, cx: C64, cy: C64, cz: C64) -> Self {
        PauliOperator { c: [c0, cx, cy, cz] }
    }

    pub fn real(c0: f64, cx: f64, cy: f64, cz: f64) -> Self {
        PauliOperator { c: [c0.into(), cx.into(), cy.into(), cz.into()] }
    }

    /// Traceless Hermitian operator `v·σ`.
    pub fn from_vector(v: [f64; 3]) -> Self {
        Self::real(0.0, v[0], v[1], v[2])
    }

    pub fn from_matrix(m: &Mat2) -> Self {
        let m = &m.0;
        let half = 0.5;
        PauliOperator {
            c: [
                (m[0][0] + m[1][1]) * half,
                (m[0][1] + m[1][0]) * half,
                (m[0][1] - m[1][0]) * I * half,
                (m[0][0] - m[1][1]) * half,
            ],
        }
    }

    pub fn to_matrix(&self) -> Mat2 {
        let [c0, cx, cy, cz] = self.c;
        Mat2([[c0 + cz, cx - I * cy], [cx + I * cy, c0 - cz]])
    }

    pub fn adjoint(&self) -> Self {
        PauliOperator { c: self.c.map(|z| z.conj()) }
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        let s = s.into();
        PauliOperator { c: self.c.map(|z| z * s) }
    }

    pub fn trace(&self) -> C64 {
        self.c[0] * 2.0
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Largest imaginary part among the coefficients; zero for Hermitian operators.
    pub fn hermiticity_defect(&self) -> f64 {
        self.c.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn re(&self) -> [f64; 4] {
        self.c.map(|z| z.re)
    }

    /// Real parts of `(cx, cy, cz)`.
    pub fn vector(&self) -> [f64; 3] {
        [self.c[1].re, self.c[2].re, self.c[3].re]
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `tr[self · other]`.
    pub fn trace_product(&self, other: &Self) -> C64 {
        (self.c[0] * other.c[0]
            + self.c[1] * other.c[1]
            + self.c[2] * other.c[2]
            + self.c[3] * other.c[3])
            * 2.0
    }
}

impl Add for PauliOperator {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        PauliOperator { c: std::array::from_fn(|i| self.c[i] + o.c[i]) }
    }
}

impl Sub for PauliOperator {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        PauliOperator { c: std::array::from_fn(|i| self.c[i] - o.c[i]) }
    }
}

impl Neg for PauliOperator {
    type Output = Self;
    fn neg(self) -> Self {
        PauliOperator { c: self.c.map(|z| -z) }
    }
}

impl Mul for PauliOperator {
    type Output = Self;
    // (a0 + a·σ)(b0 + b·σ) = a0 b0 + a·b + (a0 b + b0 a + i a×b)·σ
    fn mul(self, o: Self) -> Self {
        let [a0, ax, ay, az] = self.c;
        let [b0, bx, by, bz] = o.c;
        PauliOperator {
            c: [
                a0 * b0 + ax * bx + ay * by + az * bz,
                a0 * bx + b0 * ax + I * (ay * bz - az * by),
                a0 * by + b0 * ay + I * (az * bx - ax * bz),
                a0 * bz + b0 * az + I * (ax * by - ay * bx),
            ],
        }
    }
}

/// Unit-trace Hermitian positive-semidefinite state, `ρ = I/2 + r·σ`
/// with `|r| ≤ 1/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(PauliOperator);

impl DensityMatrix {
    pub const MAXIMALLY_MIXED: DensityMatrix = DensityMatrix(PauliOperator {
        c: [C64 { re: 0.5, im: 0.0 }, ZERO, ZERO, ZERO],
    });

    /// State with Pauli vector `r` (`ρ = I/2 + r·σ`).
    pub fn from_vector(r: [f64; 3]) -> Self {
        DensityMatrix(PauliOperator::real(0.5, r[0], r[1], r[2]))
    }

    /// Validates trace, Hermiticity and positivity to `tol`.
    pub fn from_operator(op: PauliOperator, tol: f64) -> Result<Self> {
        if !op.is_hermitian(tol) {
            return Err(Error::NotHermitian(op.hermiticity_defect()));
        }
        if (op.c[0].re - 0.5).abs() > tol {
            return Err(Error::param("rho", format!("trace {} != 1", 2.0 * op.c[0].re)));
        }
        let rho = DensityMatrix(PauliOperator::real(0.5, op.c[1].re, op.c[2].re, op.c[3].re));
        if rho.min_eigenvalue() < -tol {
            return Err(Error::param("rho", format!("negative eigenvalue {}", rho.min_eigenvalue())));
        }
        Ok(rho)
    }

    /// Pure state `|ψ⟩⟨ψ|` for a real normalized vector.
    pub fn pure(psi: [f64; 2]) -> Self {
        DensityMatrix(PauliOperator::from_matrix(&Mat2::outer(psi, psi)))
    }

    pub fn operator(&self) -> &PauliOperator {
        &self.0
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0.vector()
    }

    pub fn radius(&self) -> f64 {
        norm3(self.vector())
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let r = self.radius();
        [0.5 + r, 0.5 - r]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        0.5 - self.radius()
    }

    /// `tr[A ρ]` for a Hermitian observable.
    pub fn expect(&self, a: &PauliOperator) -> f64 {
        a.trace_product(&self.0).re
    }

    /// Population `⟨v|ρ|v⟩` of a real normalized vector.
    pub fn population(&self, v: [f64; 2]) -> f64 {
        let m = self.0.to_matrix().0;
        (m[0][0].re * v[0] * v[0] + 2.0 * m[0][1].re * v[0] * v[1] + m[1][1].re * v[1] * v[1])
            .clamp(0.0, 1.0)
    }

    /// Half the trace norm of `ρ1 − ρ2`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let (a, b) = (self.vector(), other.vector());
        norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
    }
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Instantaneous eigenstructure of `H = q σz + Δ σx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenFrame {
    pub theta: f64,
    pub omega: f64,
    pub e_vec: [f64; 2],
    pub g_vec: [f64; 2],
    /// Transition operator `|ε_g⟩⟨ε_e|`.
    pub lowering: PauliOperator,
}

impl EigenFrame {
    pub fn vectors(&self) -> [[f64; 2]; 2] {
        [self.e_vec, self.g_vec]
    }

    /// `E_nm = |ε_n⟩⟨ε_m|` with index 0 = e, 1 = g.
    pub fn projector(&self, n: usize, m: usize) -> PauliOperator {
        let v = self.vectors();
        PauliOperator::from_matrix(&Mat2::outer(v[n], v[m]))
    }

    /// Matrix elements `⟨ε_n|A|ε_m⟩`.
    pub fn to_energy_basis(&self, a: &PauliOperator) -> Mat2 {
        let m = a.to_matrix();
        let v = self.vectors();
        let mut out = Mat2::ZERO;
        for n in 0..2 {
            for k in 0..2 {
                let mut acc = ZERO;
                for i in 0..2 {
                    for j in 0..2 {
                        acc += m.0[i][j] * (v[n][i] * v[k][j]);
                    }
                }
                out.0[n][k] = acc;
            }
        }
        out
    }

    /// Inverse of [`EigenFrame::to_energy_basis`].
    pub fn from_energy_basis(&self, a: &Mat2) -> PauliOperator {
        let v = self.vectors();
        let mut lab = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for n in 0..2 {
                    for k in 0..2 {
                        acc += a.0[n][k] * (v[n][i] * v[k][j]);
                    }
                }
                lab.0[i][j] = acc;
            }
        }
        PauliOperator::from_matrix(&lab)
    }
}

/// Eigenframe of `q σz + Δ σx`: θ = ½·arccot(q/Δ), ω = 2√(q²+Δ²).
pub fn eigenframe_at(q: f64, delta: f64) -> Result<EigenFrame> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", format!("must be > 0, got {delta}")));
    }
    if !q.is_finite() {
        return Err(Error::param("q", "must be finite"));
    }
    // arccot(x) ∈ (0, π) for Δ > 0
    let theta = 0.5 * delta.atan2(q);
    let (s, c) = theta.sin_cos();
    let e_vec = [c, s];
    let g_vec = [s, -c];
    let omega = 2.0 * q.hypot(delta);
    let lowering = PauliOperator::from_matrix(&Mat2::outer(g_vec, e_vec));
    Ok(EigenFrame { theta, omega, e_vec, g_vec, lowering })
}

/// Thermal state `exp(−βH)/Z` of a Hermitian two-level Hamiltonian.
pub fn gibbs_state(h: &PauliOperator, beta: f64) -> Result<DensityMatrix> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::NotHermitian(h.hermiticity_defect()));
    }
    if !(beta > 0.0) {
        return Err(Error::param("beta", format!("must be > 0, got {beta}")));
    }
    let v = h.vector();
    let half_gap = norm3(v);
    if half_gap == 0.0 {
        return Ok(DensityMatrix::MAXIMALLY_MIXED);
    }
    // exp(−β h·σ) ∝ I − tanh(β|h|) ĥ·σ
    let k = -0.5 * (beta * half_gap).tanh() / half_gap;
    Ok(DensityMatrix::from_vector([k * v[0], k * v[1], k * v[2]]))
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Von Neumann entropy with natural logarithm.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let [a, b] = rho.eigenvalues();
    (-(xlogx(a) + xlogx(b))).max(0.0)
}

/// `S(ρ1‖ρ2) = tr[ρ1 ln ρ1] − tr[ρ1 ln ρ2]`; `+∞` when the support of ρ1
/// is not contained in that of ρ2.
pub fn relative_entropy(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    let r2 = rho2.vector();
    let rad = norm3(r2);
    let neg_tr_log = if rad < 1e-300 {
        // ρ2 = I/2
        std::f64::consts::LN_2
    } else {
        let axis = [r2[0] / rad, r2[1] / rad, r2[2] / rad];
        let r1 = rho1.vector();
        // populations of ρ1 along the eigenvectors of ρ2
        let proj = r1[0] * axis[0] + r1[1] * axis[1] + r1[2] * axis[2];
        let p_hi = (0.5 + proj).clamp(0.0, 1.0);
        let p_lo = (0.5 - proj).clamp(0.0, 1.0);
        let l_hi = 0.5 + rad;
        let l_lo = 0.5 - rad;
        let mut acc = 0.0;
        for (p, l) in [(p_hi, l_hi), (p_lo, l_lo)] {
            if p > 1e-15 {
                if l <= 0.0 {
                    return f64::INFINITY;
                }
                acc -= p * l.ln();
            }
        }
        acc
    };
    (neg_tr_log - von_neumann_entropy(rho1)).max(0.0)
}

/// `(S(ρ1), S(ρ1‖ρ2))`.
pub fn entropy_functionals(rho1: &DensityMatrix, rho2: &DensityMatrix) -> (f64, f64) {
    (von_neumann_entropy(rho1), relative_entropy(rho1, rho2))
}

/// `n = tr[Hρ]/ω`, in `[−1/2, 1/2]` for a Hamiltonian with splitting ω.
pub fn polarization(rho: &DensityMatrix, h: &PauliOperator, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::param("omega", format!("must be > 0, got {omega}")));
    }
    Ok(rho.expect(h) / omega)
}
