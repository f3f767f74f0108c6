use thiserror::Error;

use crate::diagram::ValidationReport;
use crate::linalg::KernelTooLarge;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("diagram has {n} nodes; automorphism search is limited to {max}")]
    TooManyNodes { n: usize, max: usize },
    #[error("automorphism group exceeds {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("permutation {0} is not a diagram automorphism")]
    NotAutomorphism(String),
    #[error("permutation {0} is not an involution")]
    NotInvolution(String),
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("not a nice diagram: {0}")]
    NotNice(ValidationReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("node {node} out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("repeated index in e^{{{0}}}")]
    RepeatedIndex(String),
    #[error("parameter `{0}` has no value; substitute a rational first")]
    UnboundParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("zero structure constant on {0}")]
    ZeroCoefficient(String),
    #[error("Jacobi identity fails: {0}")]
    Jacobi(String),
    #[error("bracket [e_{i},e_{j}] has several components")]
    NotNiceBasis { i: usize, j: usize },
    #[error("node sets must partition 1..={0}")]
    BadSplit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvatureError {
    #[error("metric is degenerate")]
    Degenerate,
    #[error("metric restricted to the derived algebra is degenerate")]
    DegenerateDerived,
    #[error("metric has size {got}, algebra has dimension {n}")]
    DimensionMismatch { got: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EinsteinError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    KernelTooLarge(#[from] KernelTooLarge),
    #[error("more than {cap} sign patterns to enumerate")]
    OrthantCap { cap: usize },
    #[error("sign vector violates the sign condition")]
    InconsistentSigns,
    #[error("metric has a zero entry")]
    ZeroMetricEntry,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("set is not closed under complement")]
    NotComplementClosed,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{entry}: {msg}")]
    Entry { entry: String, msg: String },
    #[error("{entry}: {source}")]
    Einstein {
        entry: String,
        #[source]
        source: EinsteinError,
    },
}
