use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("column {0} is already basic")]
    NotNonbasic(usize),
    #[error("unbounded along entering column {entering}")]
    Unbounded { entering: usize },
    #[error("infeasible: phase-one optimum {residual:e} exceeds feasibility tolerance")]
    Infeasible { residual: f64 },
    #[error("artificial variable stuck at zero level in row {row} with no swap column")]
    DegenerateArtificialStall { row: usize },
    #[error("phase one hit its iteration cap")]
    PhaseOneIterLimit,
    #[error("empty action set")]
    EmptyActionSet,
    #[error("episode has zero length")]
    ZeroLengthEpisode,
    #[error("node is terminal")]
    AlreadyTerminal,
    #[error("node already expanded")]
    AlreadyExpanded,
    #[error("every child of the node is forbidden")]
    AllChildrenForbidden,
    #[error("replayed path is invalid at step {step}: {reason}")]
    InvalidPath { step: usize, reason: String },
    #[error("basis graph exceeds {limit} nodes")]
    GraphTooLarge { limit: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
