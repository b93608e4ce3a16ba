use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported manifold: {0}")]
    UnsupportedManifold(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("framing is degenerate at {point:?} (|det| = {det:e})")]
    DegenerateFraming { point: Vec<f64>, det: f64 },
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("need at least {needed} sample points, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("operation requires dimension {expected}, got {got}")]
    UnsupportedDimension { expected: usize, got: usize },
    #[error("map is not invertible: {0}")]
    NotInvertible(String),
    #[error("matrix has a complex eigenvalue pair (imaginary part {0:e})")]
    NotRealDiagonalizable(f64),
    #[error("not partially hyperbolic: {0}")]
    NotPartiallyHyperbolic(String),
    #[error("bracket [X_{i},X_{j}] is not proportional to X_{k} (residual {residual:e})")]
    NotProportional {
        i: usize,
        j: usize,
        k: usize,
        residual: f64,
    },
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(f64),
    #[error("structure tensor violates the Jacobi identity (residual {0:e})")]
    NotALieAlgebra(f64),
    #[error("algebra {0} admits no partially hyperbolic affine automorphism; structure constants are inconsistent")]
    ExcludedAlgebra(String),
    #[error("structure tensor matches none of the unimodular three-dimensional algebras")]
    UnrecognizedAlgebra,
    #[error("system is not autonomous (max deviation {0:e})")]
    NotAutonomous(f64),
    #[error("lattice is not preserved: {0}")]
    LatticeNotPreserved(String),
    #[error("monodromy is not hyperbolic (trace {0})")]
    NotHyperbolicMonodromy(i64),
    #[error("gluing map does not commute with the base map (defect {0:e})")]
    NotCommuting(f64),
    #[error("graph transform failed to contract after {iterations} iterations (last delta {last_delta:e})")]
    NotContracting { iterations: usize, last_delta: f64 },
    #[error("need at least 4 usable dyadic scales, got {0}")]
    InsufficientResolution(usize),
    #[error("circle map lift is not a diffeomorphism: {0}")]
    NotADiffeomorphism(String),
    #[error("map does not preserve the fibers (defect {0:e})")]
    NotFiberPreserving(f64),
    #[error("rotation profile is not a local diffeomorphism (min |alpha'| = {0:e})")]
    NotLocalDiffeo(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("analysis `{0}` is not present in the report")]
    NotInReport(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
