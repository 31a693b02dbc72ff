use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("transformation is singular or ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("quadratic forms are not simultaneously diagonalizable; polyhedrality of the multiplier set is unknown")]
    NotSimultaneouslyDiagonalizable,

    #[error("no multiplier with a positive definite Lagrangian Hessian was found")]
    NoInteriorPoint,

    #[error("guard exceeded: {what} is {value}, limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("point is not in the projected SDP epigraph (violation {0:e})")]
    NotInDsdp(f64),

    #[error("missing assumption: {0}")]
    MissingAssumption(String),

    #[error(
        "no descent direction on face {active_rows:?}: dim V(F) = {dim_v}, \
         affine dimension of b over the face = {b_aff_dim}"
    )]
    NoDescentDirection {
        active_rows: Vec<usize>,
        dim_v: usize,
        b_aff_dim: usize,
    },

    #[error("homogeneous constraints are infeasible within the box")]
    InfeasibleBox,

    #[error("no feasible point found in the box")]
    NoFeasiblePoint,

    #[error("linear program failed: {0}")]
    Lp(String),
}
