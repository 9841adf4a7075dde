use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operator is not Hermitian (max imaginary coefficient {0:.3e})")]
    NotHermitian(f64),

    #[error("time {t} outside of domain [{lo}, {hi})")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("drive protocol violates 2*delta < omega(t): omega={omega}, delta={delta}")]
    ProtocolViolation { omega: f64, delta: f64 },

    #[error("unitarity drift {drift:.3e} exceeds tolerance; reduce the step size")]
    UnitarityDrift { drift: f64 },

    #[error("correlation quadrature not converged: relative change {change:.3e} on refinement at t={t}")]
    Quadrature { t: f64, change: f64 },

    #[error("positivity breach in stroke {stroke} at t={t}: min eigenvalue {min_eig:.3e}")]
    Positivity { stroke: String, t: f64, min_eig: f64 },

    #[error("asymptotic state did not converge: residual {residual:.3e}")]
    NonConvergence { residual: f64 },

    #[error("invariant state undefined: total rate gamma_up + gamma_down = 0")]
    UndefinedState,

    #[error("argument error: {0}")]
    Argument(String),

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
