use thiserror::Error;

use crate::ambient::Violation;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the geometry, search and checking layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("rank deficient input: numerical rank {rank} < {count} vectors")]
    RankDeficient { rank: usize, count: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown curvature term index {0} (expected one of 1, 2, 3, 4, 51, 52, 6)")]
    BadIndex(u32),

    #[error("kappa = 1 makes the divided R5 coefficients singular")]
    SingularKappa,

    #[error("ambient point violates structure identities: {}", describe(.0))]
    InvalidAmbient(Vec<Violation>),

    #[error("frame is not C-totally real ({condition} fails, max residual {residual:e})")]
    NotCTotallyReal { condition: &'static str, residual: f64 },

    #[error("bad frame: {0}")]
    BadFrame(String),

    #[error("second fundamental form for normal {normal} is not symmetric (residual {residual:e})")]
    AsymmetricSigma { normal: usize, residual: f64 },

    #[error("vector is not tangent to the submanifold (normal residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("bad subspace dimension: expected {expected}, found {found}")]
    BadDimension { expected: String, found: usize },

    #[error("vector does not lie in the subspace (residual {residual:e})")]
    VectorNotInSubspace { residual: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("tuple {dims:?} is not admissible for n = {n}")]
    TupleNotInS { dims: Vec<usize>, n: usize },

    #[error("k = {k} outside 2..={n}")]
    BadK { k: usize, n: usize },

    #[error("check requires n >= {required}, got n = {n}")]
    DimensionTooSmall { n: usize, required: usize },

    #[error("bad plane: {0}")]
    BadPlane(String),

    #[error("bad subspace tuple: {0}")]
    BadTuple(String),

    #[error("instance is not in Sasakian mode: {0}")]
    NotSasakianMode(String),

    #[error("lemma hypothesis violated (residual {residual:e})")]
    HypothesisViolated { residual: f64 },

    #[error("bad generator spec: {0}")]
    BadSpec(String),

    #[error("n = {n} exceeds m = {m}; a C-totally real submanifold needs n <= m")]
    DimensionTooLarge { n: usize, m: usize },

    #[error("umbilical shape operator incompatible with A_xi constraint: {0}")]
    IncompatibleXiConstraint(String),

    #[error("block {block} of normal {normal} has trace {trace}, expected {expected}")]
    TraceMismatch {
        normal: usize,
        block: usize,
        trace: f64,
        expected: f64,
    },

    #[error("n = {n} too large for brute-force oracle (max {max})")]
    TooLarge { n: usize, max: usize },
}

fn describe(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("{} (residual {:e})", x.identity, x.residual))
        .collect::<Vec<_>>()
        .join(", ")
}
