use thiserror::Error;

#[derive(Debug, Error)]
pub enum HdxError {
    #[error("facets must all have the same cardinality: expected {expected} vertices, found {found}")]
    MixedFacetDimensions { expected: usize, found: usize },

    #[error("facet weights must be strictly positive, got {0}")]
    NonPositiveWeight(f64),

    #[error("duplicate facet {0:?}")]
    DuplicateFacet(Vec<usize>),

    #[error("facet weight list length {weights} does not match facet count {facets}")]
    WeightCountMismatch { facets: usize, weights: usize },

    #[error("no facets given")]
    EmptyComplex,

    #[error("simplex {0:?} is not in the complex")]
    SimplexNotInComplex(Vec<usize>),

    #[error("dimension {k} out of range {lo}..={hi}")]
    DimensionOutOfRange { k: isize, lo: isize, hi: isize },

    #[error("cochain degree mismatch: {0} vs {1}")]
    DegreeMismatch(isize, isize),

    #[error("vertex sets must be pairwise disjoint")]
    OverlappingSets,

    #[error("complex has no partition into sides")]
    NotPartite,

    #[error("partition is invalid: {0}")]
    InvalidPartition(String),

    #[error("operator is not self-adjoint: symmetrized defect {defect:e} exceeds {tol:e}")]
    NotSelfAdjoint { defect: f64, tol: f64 },

    #[error("eigensolver residual {residual:e} exceeds tolerance {tol:e}")]
    EigenResidual { residual: f64, tol: f64 },

    #[error("enumeration budget exceeded: {needed} states > budget {budget}; raise HDX_BUDGET or use sampling mode")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("exact overlap search supports dimensions 1 and 2, got {0}")]
    OverlapDimension(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HdxError>;
