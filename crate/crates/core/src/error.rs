use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instrument arm z={arm} has no observations")]
    EmptyArm { arm: u8 },

    #[error("all regressor values are equal within arm z={arm}")]
    DegenerateX { arm: u8 },

    #[error("x={x} lies outside the support of X|Z={arm}")]
    XOutOfSupport { x: f64, arm: u8 },

    #[error("x={x} is outside the domain of the {direction} transport")]
    DomainError { x: f64, direction: &'static str },

    #[error("orbit from x={x} did not terminate after {cap} iterations (do the arm CDFs touch?)")]
    NonTermination { x: f64, cap: usize },

    #[error("iterate {n} of the orbit from x={x} does not exist")]
    OrbitRange { x: f64, n: i32 },

    #[error("pair ({n}, {m}) is not a member of the concavity index set")]
    NotInPiC { n: i32, m: i32 },

    #[error("quantile level e={e} must lie strictly inside (0, 1)")]
    EOutOfRange { e: f64 },

    #[error("invalid DGP specification: {0}")]
    InvalidSpec(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("maintained assumptions rejected: {0}")]
    AssumptionViolated(String),

    #[error("bounds cross at x={x}: lower={lower} exceeds upper={upper}")]
    BoundsCrossed { x: f64, lower: f64, upper: f64 },

    #[error("model has outcome atoms; use the weakly-monotone (G) bounds instead")]
    RequiresContinuousOutcome,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures that signal a violated identifying assumption
    /// rather than bad input or a numerical breakdown.
    pub fn is_assumption_violation(&self) -> bool {
        matches!(
            self,
            Error::AssumptionViolated(_) | Error::BoundsCrossed { .. }
        )
    }

    /// True for numerical breakdowns (non-terminating orbits and the like).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonTermination { .. } | Error::OrbitRange { .. })
    }
}
