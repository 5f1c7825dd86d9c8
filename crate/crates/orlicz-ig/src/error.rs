//! Crate-wide error type.
//!
//! Domain verdicts (a function that is not in the space, a cumulant outside
//! its proper domain) are ordinary variants here, not panics: callers such as
//! the CLI map them to a dedicated exit code.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A field and an integrator (or another field) disagree on the ambient
    /// dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A density weight came out negative at a probe point.
    #[error("negative density {value:.6e} at probe point {at:?}")]
    NegativeWeight { at: Vec<f64>, value: f64 },

    /// A density must be strictly positive for logarithmic charts.
    #[error("density is not strictly positive: {value:.6e} at {at:?}")]
    NonpositiveDensity { at: Vec<f64>, value: f64 },

    /// The expression tree contains an atom with no weak derivative.
    #[error("field has no gradient: the tree contains a non-differentiable atom")]
    MissingGradient,

    /// The right derivative of a Young function failed a monotonicity probe.
    #[error("phi is not strictly increasing near u = {at:.6e}")]
    NotIncreasing { at: f64 },

    /// The Luxemburg integral diverged at every probed scale.
    #[error("not in the Orlicz space L^{phi}: the gauge integral diverges at every probed scale")]
    NotInOrliczSpace { phi: String },

    /// A moment integral of the moment norm diverged.
    #[error("moment of order 2k = {order} diverges: not sub-exponential at that order")]
    DivergentMoment { order: usize },

    /// log E[e^u] diverged: u is outside the proper domain of the cumulant.
    #[error("outside the proper domain of the cumulant: E[exp(u)] diverges")]
    OutsideDomain,

    /// A statistic that must be centered was not.
    #[error("statistic is not centered: E[u] = {mean:.6e} (opt into auto-centering to recenter)")]
    NotCentered { mean: f64 },

    /// A finite space was given a nonpositive atom weight.
    #[error("finite-space atom {index} has nonpositive weight {weight:.6e}")]
    NonpositiveAtom { index: usize, weight: f64 },

    /// Finite-space weights must sum to one.
    #[error("finite-space weights sum to {sum:.17e}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    /// The composition rule requires an activation with bounded derivative.
    #[error("activation `{0}` has an unbounded (or non-functional) derivative; the chain rule check requires a Lipschitz activation")]
    NotLipschitz(String),

    /// An unknown field or Young-function preset name.
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    /// A field expression failed to parse.
    #[error("malformed field expression: {0}")]
    MalformedExpression(String),

    /// A structurally invalid argument (bad grid, empty family, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for verdicts about the mathematical domain (as opposed to usage
    /// errors). The CLI exits with code 2 on these and code 1 otherwise.
    pub fn is_domain_verdict(&self) -> bool {
        matches!(
            self,
            Error::NegativeWeight { .. }
                | Error::NonpositiveDensity { .. }
                | Error::MissingGradient
                | Error::NotIncreasing { .. }
                | Error::NotInOrliczSpace { .. }
                | Error::DivergentMoment { .. }
                | Error::OutsideDomain
                | Error::NotCentered { .. }
                | Error::NonpositiveAtom { .. }
                | Error::WeightsNotNormalized { .. }
                | Error::NotLipschitz(_)
        )
    }

    /// Short machine-readable tag used when a verdict is serialized.
    pub fn slug(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NegativeWeight { .. } => "negative-weight",
            Error::NonpositiveDensity { .. } => "nonpositive-density",
            Error::MissingGradient => "missing-gradient",
            Error::NotIncreasing { .. } => "not-increasing",
            Error::NotInOrliczSpace { .. } => "not-in-orlicz-space",
            Error::DivergentMoment { .. } => "divergent-moment",
            Error::OutsideDomain => "outside-domain",
            Error::NotCentered { .. } => "not-centered",
            Error::NonpositiveAtom { .. } => "nonpositive-atom",
            Error::WeightsNotNormalized { .. } => "weights-not-normalized",
            Error::NotLipschitz(_) => "not-lipschitz",
            Error::UnknownPreset(_) => "unknown-preset",
            Error::MalformedExpression(_) => "malformed-expression",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Io(_) => "io-error",
            Error::Json(_) => "json-error",
        }
    }
}
