use thiserror::Error;

pub type Result<T> = std::result::Result<T, HyperError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (supported: 1..=8)")]
    UnsupportedDimension(usize),

    #[error("{name} = {value} is outside its admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point lies outside the domain (distance {distance:e})")]
    OutsideDomain { distance: f64 },

    #[error("a compact set must be non-empty")]
    EmptySet,

    #[error("certified Lipschitz bound {lip} exceeds 1; map is not nonexpansive")]
    NotNonexpansive { lip: f64 },

    #[error("map is not a strict contraction (certified Lipschitz bound {lip})")]
    NotStrictContraction { lip: f64 },

    #[error("stored certified Lipschitz bound {stored} disagrees with recomputed {computed}")]
    LipschitzMismatch { stored: f64, computed: f64 },

    #[error("point is not a fixed point (gap {gap:e})")]
    NotFixedPoint { gap: f64 },

    #[error("point is a fixed point (gap {gap:e}); the construction needs a positive gap")]
    IsFixedPoint { gap: f64 },

    #[error("invalid map node: {0}")]
    InvalidNode(String),

    #[error("domain mismatch between maps")]
    DomainMismatch,

    #[error("no admissible point at the requested distance inside the domain")]
    NoAdmissiblePoint,

    #[error("bisection did not reach the target distance (residual {residual:e})")]
    BisectionFailed { residual: f64 },

    #[error("chain constant sigma_{step} = {sigma:e} is below the resolvable floor {floor:e}")]
    ChainTooFine { step: usize, sigma: f64, floor: f64 },

    #[error("chain report failed verification: {0}")]
    Unverified(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn check_range(name: &'static str, value: f64, ok: bool, range: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(HyperError::OutOfRange { name, value, range })
    }
}
