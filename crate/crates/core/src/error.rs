use alloc::string::String;

/// Errors raised by scheme construction, the DE engine and the audits.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The DE population cannot supply three distinct donors plus a target.
    #[error("population size {0} is too small, at least 4 individuals are required")]
    PopulationTooSmall(usize),
    /// A problem dimension of zero was requested.
    #[error("problem dimension must be at least 1")]
    ZeroDimension,
    /// Inconsistent engine settings.
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
    /// Two vectors that must agree in length do not.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch {
        /// Required length.
        expected: usize,
        /// Supplied length.
        actual: usize,
    },
    /// Reinjection asked to replace as many or more individuals than exist.
    #[error("cannot reinject {count} individuals into a population of {population}")]
    ReinjectionTooLarge {
        /// Requested replacement count.
        count: usize,
        /// Population size.
        population: usize,
    },
    /// Stencil offsets must be pairwise distinct.
    #[error("duplicate stencil offset {0}")]
    DuplicateOffset(i32),
    /// A stencil template that cannot be built.
    #[error("invalid stencil template: {0}")]
    InvalidTemplate(String),
    /// Order-condition machinery only goes up to order 5.
    #[error("order {0} is not supported (valid range 1..=5)")]
    UnsupportedOrder(usize),
    /// The stage count cannot reach the requested order.
    #[error("a {stage}-stage explicit scheme cannot reach order {order}")]
    InadmissibleStageOrder {
        /// Number of stages.
        stage: usize,
        /// Requested order.
        order: usize,
    },
    /// Stage count out of range.
    #[error("stage count must be at least 1")]
    ZeroStage,
    /// Step sizes must be positive and finite.
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    /// Multistep integration needs a starter of at least the scheme's order.
    #[error("a {k}-step Adams-Bashforth scheme needs a starter tableau")]
    MissingStarter {
        /// Step count.
        k: usize,
    },
    /// Scheme and reference cannot be combined in a sweep.
    #[error("incompatible scheme and reference: {0}")]
    Incompatible(String),
    /// A step-size ladder that is empty or not strictly decreasing.
    #[error("invalid step-size ladder: {0}")]
    InvalidLadder(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
