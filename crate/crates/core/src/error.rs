use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have positive dimensions and equal-length rows")]
    MalformedMatrix,
    #[error("the zero vector has no primitive direction")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("face is not a facet of the polytope")]
    NotAFacet,
    #[error("factor needs h >= 1 and multiplicity >= 1 (got h = {h}, mult = {mult})")]
    InvalidFactor { h: u64, mult: u64 },
    #[error("j0 = {j0} is out of range 1..={n}")]
    IndexOutOfRange { j0: usize, n: usize },
    #[error("invalid point configuration: {0}")]
    InvalidConfiguration(String),
    #[error("parameter vector mixes exact and floating-point entries")]
    MixedParameterModes,
    #[error("unknown catalog system `{0}`")]
    UnknownCatalog(String),
    #[error("catalog system `{id}`: {reason}")]
    CatalogBinding { id: String, reason: String },
    #[error("radius {radius} does not clear the singularity at modulus {modulus}")]
    RadiusInsideSingularity { radius: f64, modulus: f64 },
    #[error("integration failed after {steps} steps at angle {angle}: {reason}")]
    Integration {
        steps: usize,
        angle: f64,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
