use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the geometry engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("jet order {0} is not supported (expected 1, 2 or 3)")]
    InvalidOrder(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error in `{op}`: operand value {value} at point {point:?}")]
    Domain {
        op: &'static str,
        value: f64,
        point: Vec<f64>,
    },

    #[error("singular metric at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("degenerate plane: the two vectors are linearly dependent")]
    DegeneratePlane,

    #[error("form degree {degree} exceeds dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("interior product is not defined on degree-0 forms")]
    InteriorOfScalar,

    #[error("rank-deficient differential at {point:?} (smallest singular value {sigma_min:e})")]
    RankDeficient { point: Vec<f64>, sigma_min: f64 },

    #[error("point {point:?} is not umbilical (residual {residual:e} > tolerance {tolerance:e})")]
    NotUmbilical {
        point: Vec<f64>,
        residual: f64,
        tolerance: f64,
    },

    #[error("ambient metric `{0}` is not flagged Einstein")]
    NotEinstein(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("load-time validation failed: {0}")]
    Validation(String),
}

impl GeomError {
    /// Attach the evaluation point to errors that carry one but were raised
    /// without knowing it (jet arithmetic has no notion of the chart point).
    pub fn at_point(self, x: &[f64]) -> Self {
        match self {
            GeomError::Domain { op, value, point } if point.is_empty() => GeomError::Domain {
                op,
                value,
                point: x.to_vec(),
            },
            GeomError::SingularMetric { point } if point.is_empty() => {
                GeomError::SingularMetric { point: x.to_vec() }
            }
            other => other,
        }
    }
}

pub type Result<T, E = GeomError> = core::result::Result<T, E>;
