use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the command line front end to pick an
/// exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Input,
    Pipeline,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("format mismatch: {rejected} of {total} rows are malformed (first bad lines: {sample_lines:?})")]
    FormatMismatch {
        rejected: usize,
        total: usize,
        sample_lines: Vec<usize>,
    },
    #[error("location registry is empty")]
    EmptyRegistry,
    #[error("no assignments to build a graph from")]
    NoAssignments,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("graph has zero total weight")]
    ZeroWeight,
    #[error("partition covers {got} vertices but the graph has {expected}")]
    PartitionSize { expected: usize, got: usize },
    #[error("partitions are defined on different ground sets ({0} vs {1} elements)")]
    GroundSetMismatch(usize, usize),
    #[error("only {0} locations survive filtering, at least 3 are required")]
    TooFewLocations(usize),
    #[error("bipartition requires at least 2 communities")]
    SingleCommunity,
    #[error("{0} communities exceed the exhaustive bipartition limit of 25")]
    TooManyCommunities(usize),
    #[error("degenerate seed set: {0}")]
    DegenerateSeeds(String),
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            // configuration problems keep their own classification
            Error::Config(_) => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// Name of the pipeline stage that failed, if any.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Io { .. } | Error::Input(_) | Error::FormatMismatch { .. } => ErrorKind::Input,
            Error::Stage { source, .. } => match source.kind() {
                ErrorKind::Input => ErrorKind::Input,
                _ => ErrorKind::Pipeline,
            },
            _ => ErrorKind::Pipeline,
        }
    }
}
