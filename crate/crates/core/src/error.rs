use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("diagram is not primitive: {0}")]
    NotPrimitive(String),
    #[error("diagram is not properly ordered: {0}")]
    NotProperlyOrdered(String),
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("target level {target} is below current level {current}")]
    LevelBelowCurrent { current: usize, target: usize },
    #[error("empty set")]
    EmptySet,
    #[error("point prefix too short and tail unspecified")]
    UnderspecifiedPoint,
    #[error("level {0} exceeds the supported depth of the diagram")]
    DepthExceeded(usize),
    #[error("pinning impossible: {0}")]
    PinningImpossible(String),
    #[error("resolution mismatch: {0}")]
    ResolutionMismatch(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unsupported diagram: {0}")]
    UnsupportedDiagram(String),
    #[error("unsupported cone: {0}")]
    UnsupportedCone(String),
    #[error("difference of indicators is not a coboundary")]
    NotCoboundary,
    #[error("measure gap missing: {0}")]
    MeasureGapMissing(String),
    #[error("not infinitesimal: {0}")]
    NotInfinitesimal(String),
    #[error("exhaustiveness witness required for this direction")]
    ExhaustivenessRequired,
    #[error("invalid epimorphism: {0}")]
    InvalidEpimorphism(String),
    #[error("stage {stage} failed in {step}: {detail}")]
    StageFailure { stage: usize, step: String, detail: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
