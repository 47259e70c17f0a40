//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Stage of a conjugated evaluation, for domain-escape reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// i-th application of the inner function (1-based).
    Inner(u32),
    /// Evaluation of the truncated series between inner and outer passes.
    Series,
    /// i-th application of the outer function (1-based).
    Outer(u32),
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Inner(i) => write!(f, "inner step {i}"),
            Stage::Series => write!(f, "series evaluation"),
            Stage::Outer(i) => write!(f, "outer step {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("series must have at least one coefficient")]
    EmptySeries,
    #[error("cannot truncate an order-{order} series to order {requested}")]
    BadTruncation { requested: usize, order: usize },
    #[error("map series of order {order} too short for requested order {requested}")]
    MapOrderTooSmall { requested: usize, order: usize },
    #[error("leading coefficient is zero; map is degenerate")]
    DegenerateMap,
    #[error("map multiplier {multiplier} is not 1; use the numeric solver")]
    NotParabolic { multiplier: f64 },
    #[error("operation requires a hyperbolic map (multiplier > 0 and != 1)")]
    ExpectedHyperbolic,
    #[error("map is the identity through the requested order; no t-scale exists")]
    IdentityMap,
    #[error("unsupported multiplier {0}: the real flow a1^t is undefined")]
    UnsupportedMultiplier(f64),
    #[error("resonant pivot {pivot:e} at order {order}")]
    Resonance { order: usize, pivot: f64 },
    #[error("unknown map '{0}'")]
    UnknownMap(String),
    #[error("lambda {0} outside (0, 4]")]
    LambdaOutOfRange(f64),
    #[error("map '{0}' takes no lambda parameter")]
    LambdaNotApplicable(String),
    #[error("logistic map requires a lambda parameter")]
    MissingLambda,
    #[error("pole encountered at {0}")]
    Pole(f64),
    #[error("{what} {value} outside domain")]
    OutsideDomain { what: &'static str, value: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("domain escape at step {step} (value {value}): {source}")]
    Step {
        step: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("domain escape at {stage} (value {value}): {source}")]
    ConjugationStage {
        stage: Stage,
        value: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("map has no closed-form flow")]
    NoExactFlow,
    #[error("numeric flow solved at t = {expected}, requested t = {got}")]
    FlowModeMismatch { expected: f64, got: f64 },
    #[error("operation requires an exact-polynomial flow")]
    ExactModeOnly,
    #[error("x_t(x) = 0 at x = {x}, t = {t}: relative quantity undefined")]
    DegeneratePoint { x: f64, t: f64 },
    #[error("target {0} outside the reachable window of the series inverse")]
    WindowError(f64),
    #[error("expansion singular at x = {0}")]
    SingularPoint(f64),
    #[error("velocity series has no usable leading term (need order >= 2)")]
    BadVelocity,
    #[error("inverse refinement failed for y = {0}")]
    InverseRefinement(f64),
}
