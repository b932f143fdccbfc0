//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters for which no supported solution family exists.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Feature deliberately not implemented (e.g. the dilation term in the propagator).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{what} = {value} outside [{min}, {max}]")]
    Range {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A formula has a pole at the requested point.
    #[error("pole in {what} at t = {t}")]
    Pole { what: &'static str, t: f64 },

    /// The characteristic amplitude mu(t) vanishes: the solution has a caustic.
    #[error("focal point (caustic) at t = {t}")]
    FocalPoint { t: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A verification could not reach a trustworthy estimate.
    #[error("diagnostics: {0}")]
    Diagnostics(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("degenerate norm: reference field has zero L2 norm")]
    DegenerateNorm,

    #[error("reparameterization error: {0}")]
    Reparameterization(String),

    #[error("classical trajectory undefined: beta vanishes near t = {t}")]
    TrajectoryUndefined { t: f64 },

    /// Kernel integrals divide by mu0'(s); they cannot be continued past its zero.
    #[error("integrability failure: mu0' vanishes at s = {t}")]
    Integrability { t: f64 },

    #[error("unknown scenario `{name}`; catalog: {catalog}")]
    UnknownScenario { name: String, catalog: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("scenario `{name}`: {source}")]
    InScenario { name: String, source: Box<Error> },
}

impl Error {
    /// True for errors caused by numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NumericalFailure(_)
                | Error::Diagnostics(_)
                | Error::Resolution(_)
                | Error::FocalPoint { .. }
                | Error::Pole { .. }
                | Error::Integrability { .. }
                | Error::TrajectoryUndefined { .. }
                | Error::DegenerateNorm
                | Error::Reparameterization(_)
        )
    }
}

impl Error {
    /// The underlying error with scenario context removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::InScenario { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn in_scenario(self, name: &str) -> Error {
        match self {
            e @ Error::InScenario { .. } => e,
            e => Error::InScenario {
                name: name.to_string(),
                source: Box::new(e),
            },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_finite(what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite, got {x}")))
    }
}
