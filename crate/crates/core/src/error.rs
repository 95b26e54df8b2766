use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {name} = {value} outside admissible domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("gradient catastrophe is not generic: |f_L'''(u_c)| = {fl3:e}")]
    NonGeneric { fl3: f64 },

    #[error("maximizer search for -6 u0' did not bracket an interior maximum")]
    NoInteriorMax,

    #[error("characteristic relation has {roots} roots at x = {x}, t = {t}")]
    Multivalued { x: f64, t: f64, roots: usize },

    #[error("no characteristic root at x = {x}, t = {t}")]
    NoRoot { x: f64, t: f64 },

    #[error("6t + f_L'(u) = {denominator:e} is too close to the catastrophe")]
    NearCatastrophe { denominator: f64 },

    #[error("time {t} is not after the catastrophe time {t_c}")]
    BeforeCatastrophe { t: f64, t_c: f64 },

    #[error("time {t} is at or beyond the admissible window end {t_max}")]
    WindowExceeded { t: f64, t_max: f64 },

    #[error("Newton iteration did not converge within {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("damped Newton diverged for the Painleve II boundary value problem (residual {residual:e})")]
    NewtonDiverged { residual: f64 },

    #[error("Painleve II residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    #[error("s = {s} outside tabulated range [{lo}, {hi}]")]
    OutOfTable { s: f64, lo: f64, hi: f64 },

    #[error("Hastings-McLeod value q({s}) = {q:e} is not positive")]
    QNonPositive { s: f64, q: f64 },

    #[error("simulation produced a non-finite value at t = {t}")]
    Instability { t: f64 },

    #[error("spectral tail energy fraction {fraction:e} at t = {t} exceeds {limit:e}")]
    UnderResolved { t: f64, fraction: f64, limit: f64 },

    #[error("no oscillation onset found in the scan range")]
    NoOnset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// Validation failures are caller mistakes (bad arguments, out-of-range
    /// times); everything else is a numerical solver failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::OutOfDomain { .. }
                | Error::BeforeCatastrophe { .. }
                | Error::WindowExceeded { .. }
                | Error::OutOfTable { .. }
                | Error::InvalidConfig(_)
                | Error::NonGeneric { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
