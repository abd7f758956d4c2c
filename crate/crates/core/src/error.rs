use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector does not define a projective point")]
    ZeroVector,
    #[error("zero matrix does not define a projective class")]
    ZeroMatrix,
    #[error("matrix is not invertible")]
    Singular,
    #[error("points are not collinear (rank {rank})")]
    NotCollinear { rank: usize },
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("eigenvalue routine did not converge")]
    EigenFailure,
    #[error("map is not proximal")]
    NotProximal,
    #[error("point lies in the kernel")]
    InKernel,
    #[error("composite endomorphism vanishes")]
    ZeroComposite,
    #[error("powers did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("sequence has not converged (tail spread {0:.3e})")]
    NotConverged(f64),
    #[error("limit has rank {0} > 1")]
    RankTooHigh(usize),
    #[error("image of the limit lies in its kernel")]
    NotTransverse,
    #[error("point lies on the hyperplane at infinity of the chart")]
    ChartOverflow,
    #[error("point is not in the interior of the domain")]
    NotInterior,
    #[error("points coincide")]
    CoincidentPoints,
    #[error("point is not on the boundary of the domain")]
    NotBoundary,
    #[error("map does not preserve the domain: {0}")]
    NotAutomorphism(String),
    #[error("map does not fix every vertex of the simplex")]
    NotVertexFixing,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("domain has an empty automorphism catalog")]
    EmptyCatalog,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl GeomError {
    /// Errors caused by the caller's input rather than by a numerical failure.
    pub fn is_user_error(&self) -> bool {
        !matches!(
            self,
            GeomError::EigenFailure | GeomError::NoConvergence(_) | GeomError::NotConverged(_)
        )
    }
}
