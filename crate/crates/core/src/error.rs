use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs that are missing, conflicting or out of their allowed range.
    #[error("configuration error in `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    /// A time or count outside the domain of the operation.
    #[error("{what} = {value:e} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    /// The bound δ is too small to reach the target in the given time.
    #[error(
        "infeasible bound: δ = {delta:e} m must exceed 4d/(ω0²tf²) = {delta_min:e} m to make c_1 real"
    )]
    Infeasible { delta: f64, delta_min: f64 },

    /// The bound δ is never reached by the unconstrained optimum.
    #[error("bound never active: δ = {delta:e} m exceeds δ0 = {delta0:e} m, use UnboundedOptimal")]
    BoundInactive { delta: f64, delta0: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The wavepacket reached the edge of the simulation window.
    #[error("window overflow at t = {t:e} s: {space}-space edge probability {probability:e}")]
    WindowOverflow {
        t: f64,
        space: &'static str,
        probability: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }

    /// Physics-level rejection, as opposed to a malformed input or a numerical breakdown.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::BoundInactive { .. })
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::WindowOverflow { .. })
    }
}
