use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("value `{value}` is not in the domain of attribute `{attribute}`")]
    ValueOutsideDomain { attribute: String, value: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("attribute `{attribute}` has duplicate domain value `{value}`")]
    DuplicateValue { attribute: String, value: String },
    #[error("attribute `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("tuple has {found} values, schema has {expected} attributes")]
    ArityMismatch { expected: usize, found: usize },
    #[error("attribute `{0}` appears in more than one constraint set")]
    OverlappingAttributes(String),
    #[error("constraint has an empty X or Y set")]
    EmptyConstraintSide,
    #[error("constraint does not cover every attribute; use the lifted repair path")]
    Unsaturated,
    #[error("marginals carry different total mass ({source_mass} vs {target_mass})")]
    MarginalMismatch { source_mass: f64, target_mass: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("support of size {size} exceeds the limit of {limit} for exact mode")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid cost entry at ({row}, {col}): {value}")]
    InvalidCost { row: usize, col: usize, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("source tuple `{0}` has zero mass in the plan")]
    ZeroMassSource(String),
    #[error("tuple `{0}` is outside the cleaner's source support")]
    OutsideSupport(String),
    #[error("sample set is empty")]
    EmptySamples,
    #[error("group `{0}` has no records")]
    MissingGroup(String),
    #[error("group `{0}` has no positive records")]
    NoPositives(String),
    #[error("group `{0}` has no negative records")]
    NoNegatives(String),
    #[error("score {0} is outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("record id mismatch: {0}")]
    IdMismatch(String),
    #[error("no deterministic map satisfies the constraint")]
    NoFeasibleMap,
    #[error("schemas differ")]
    SchemaMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
