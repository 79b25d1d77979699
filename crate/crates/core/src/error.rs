use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational literal `{0}` (expected `p` or `p/q`, non-negative)")]
pub struct ParseRationalError(pub String);

/// Failures of the graph-level operations (analysis and transforms).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TcaError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("graph is not absolute-labeled")]
    NotAbsolute,
    #[error("graph is not relative-labeled")]
    NotRelative,
    #[error("graph is cyclic; unfold it first")]
    Cyclic,
    #[error("graph is not simplified: node `{0}` is dated before its preceding after node")]
    NotSimplified(String),
    #[error("node `{0}` is reached from anchors with different dates")]
    AmbiguousBase(String),
    #[error("cycle through {0:?} advances no time")]
    ZenoCycle(Vec<String>),
    #[error("after node `{after}` precedes before node `{before}` that cannot be met")]
    ImpossibleConstraints { after: String, before: String },
    #[error("no choice given for task {task} at occurrence {occurrence:?}")]
    UnresolvedChoice { task: usize, occurrence: Vec<String> },
    #[error("choice for task {task} at {occurrence:?} names arc `{arc}` which does not leave that node")]
    BadChoice {
        task: usize,
        occurrence: Vec<String>,
        arc: String,
    },
    #[error("graph is malformed: {0}")]
    Malformed(String),
    #[error("choice oracle: {0}")]
    Oracle(String),
    #[error("cyclic task `{0}` needs a finite horizon")]
    UnboundedHorizon(String),
}

/// Errors reading or writing the JSON file formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
}
