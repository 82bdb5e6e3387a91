use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the model, solvers and sweep runners.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument violated its domain constraint.
    #[error("parameter domain violation: {0}")]
    ParameterDomain(String),

    /// The requested area spectral efficiency is at or above the
    /// interference-limited ceiling for the given density; no transmit
    /// power can reach it. Values are in bits/s/Hz/m².
    #[error(
        "infeasible ASE target {target:.6e} bits/s/Hz/m^2: the interference-limited \
         ceiling at this density is {limit:.6e}"
    )]
    InfeasibleAse { target: f64, limit: f64 },

    /// No positive CUE spectral efficiency survives in the dense-network
    /// limit at the requested ASE.
    #[error(
        "no positive CUE SE in the dense-network limit: interference fraction \
         {kappa_inf:.6} >= 1"
    )]
    NoPositiveLimit { kappa_inf: f64 },

    /// A sweep specification is malformed.
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    /// Every grid point of a sweep is infeasible.
    #[error("infeasible sweep: {0}")]
    InfeasibleGrid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-parseable category name, stable across releases.
    pub fn category(&self) -> &'static str {
        match self {
            Error::ParameterDomain(_) => "domain",
            Error::InfeasibleAse { .. } => "infeasible",
            Error::NoPositiveLimit { .. } => "infeasible",
            Error::InvalidSweep(_) => "sweep",
            Error::InfeasibleGrid(_) => "infeasible",
            Error::Io(_) => "io",
        }
    }
}
