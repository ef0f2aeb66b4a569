//! Error type shared by the whole crate.

use thiserror::Error;

/// Failure modes of the estimation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An auxiliary column has zero spread and cannot be standardized.
    #[error("degenerate auxiliary variable: column {0} is constant")]
    DegenerateColumn(usize),

    /// The population has no rows, or too few for the requested operation.
    #[error("population must contain at least {min} rows, got {got}")]
    PopulationTooSmall { min: usize, got: usize },

    /// A row or coefficient vector has the wrong dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Two paired slices disagree in length.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// The index coefficient is not a unit vector.
    #[error("index coefficient must have unit norm, got {0}")]
    NonUnitTheta(f64),

    /// The free coordinates of theta left the open upper hemisphere chart.
    #[error("coefficient outside the upper-hemisphere chart: |theta_-d| >= 1")]
    OutsideChart,

    /// Requested sample size exceeds the population size.
    #[error("sample size {n} exceeds population size {population}")]
    SampleTooLarge { n: usize, population: usize },

    /// A Poisson inclusion probability is outside (0, 1].
    #[error("inclusion probability for unit {0} must lie in (0, 1]")]
    InvalidInclusion(usize),

    /// Exhaustive enumeration would exceed the support-size cap.
    #[error("design support is too large to enumerate: C({population}, {n}) > {limit}")]
    EnumerationTooLarge {
        population: usize,
        n: usize,
        limit: u64,
    },

    /// Weighted normal equations for the spline coefficients are singular.
    #[error("insufficient data per knot span: singular normal equations")]
    SingularNormalEquations,

    /// Sample is too small to identify the spline coefficients.
    #[error("sample of size {n} cannot identify {dim} spline coefficients; reduce the knot cap")]
    TooFewObservations { n: usize, dim: usize },

    /// The regression design matrix is rank deficient.
    #[error("design matrix is rank deficient")]
    RankDeficient,

    /// A joint inclusion probability needed by the variance estimator is zero.
    #[error("joint inclusion probability is zero for sampled pair ({0}, {1})")]
    JointInclusionZero(usize, usize),

    /// A sampled unit has no response attached.
    #[error("missing response for sampled id {0:?}")]
    MissingResponse(String),

    /// A data file failed to parse; `line` is 1-based and counts the header.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// A configuration file or flag combination is invalid.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Too many Monte Carlo replicates failed to produce an estimate.
    #[error(
        "{excluded} of {total} replicates excluded (limit is 5%); first failure: {first}"
    )]
    TooManyExclusions {
        excluded: usize,
        total: usize,
        first: String,
    },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
