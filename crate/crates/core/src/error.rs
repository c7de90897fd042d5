use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("graph: {0}")]
    Graph(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("motif spec: {0}")]
    Motif(#[from] MotifSpecError),

    #[error("motif adjacency: {0}")]
    Adjacency(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("vocabulary is empty after applying min_count = {min_count}")]
    EmptyVocabulary { min_count: u64 },

    #[error("embeddings: {0}")]
    Embedding(String),

    #[error("evaluation: {0}")]
    Eval(String),

    #[error("missing upstream artifact: {}", .0.display())]
    MissingArtifact(PathBuf),

    #[error("[stage {stage}] {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Wraps the error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage: stage.to_string(),
                source: Box::new(e),
            },
        }
    }
}

/// Errors raised while parsing or validating a motif pattern.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotifSpecError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("missing `{0}` section")]
    MissingSection(&'static str),
    #[error("motif has {0} nodes; supported sizes are 2 to 5")]
    Size(usize),
    #[error("slot {0} declared twice")]
    DuplicateSlot(u32),
    #[error("edge references undeclared slot {0}")]
    UnknownSlot(u32),
    #[error("self-loop on slot {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0}->{1}")]
    DuplicateEdge(u32, u32),
    #[error("pattern is not weakly connected")]
    Disconnected,
    #[error("node type `{0}` does not occur in the graph")]
    UnknownType(String),
}
