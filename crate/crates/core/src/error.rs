use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    Dimension(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("frame is rank deficient (rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("frame columns are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("subspace is not Lagrangian (isotropy defect {0:.3e})")]
    NotLagrangian(f64),

    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not symmetric (defect {0:.3e})")]
    NotSymmetric(f64),

    #[error("operands live in different symplectic spaces")]
    SpaceMismatch,

    #[error("matrix logarithm hit the branch cut at -1")]
    BranchCut,

    #[error("path is not transversal to the reference complement near t = {0}")]
    NotTransversal(f64),

    #[error("crossing at t = {t} is not regular (signature {positive}+{negative} on a {dim}-dimensional kernel)")]
    DegenerateCrossing {
        t: f64,
        positive: usize,
        negative: usize,
        dim: usize,
    },

    #[error("window around t = {0} contains another crossing")]
    CrossingNotIsolated(f64),

    #[error("refinement budget of {0} evaluations exhausted")]
    RefinementBudget(usize),

    #[error("refinement stalled at t = {0}: the path looks discontinuous")]
    Discontinuous(f64),

    #[error("spectral window edge {0} is an eigenvalue")]
    WindowEdge(f64),

    #[error("root isolation failed near {0}")]
    RootIsolation(f64),

    #[error("invalid model problem: {0}")]
    InvalidProblem(String),

    #[error("invalid input: {0}")]
    Spec(String),

    #[error("{stage}: {source}")]
    Stage { stage: String, source: Box<Error> },
}

impl Error {
    pub fn in_stage(self, stage: impl Into<String>) -> Error {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
