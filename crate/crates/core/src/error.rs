use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read corpus at {path}: {source}")]
    CorpusAccess {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no documentation files under {root} match {patterns:?}")]
    EmptyCorpus { root: PathBuf, patterns: Vec<String> },

    #[error("invalid rule set: {0}")]
    Rules(String),

    #[error("node id collision: `{id}` declared as `{first}` and `{second}`")]
    IdCollision {
        id: String,
        first: String,
        second: String,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("{unscored} of {total} nodes could not be scored")]
    ScoringFailed { unscored: usize, total: usize },

    #[error("no trajectory of at least {min_len} nodes was found")]
    EmptySearch { min_len: usize },

    #[error("template `{template}` has unbound placeholder `{placeholder}`")]
    Template {
        template: String,
        placeholder: String,
    },

    #[error("generation stalled for {seed_type} seeds: {skipped} of the last {window} attempts were rejected")]
    Stall {
        seed_type: String,
        skipped: usize,
        window: usize,
    },

    #[error("provider error: {0}")]
    Provider(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage `{stage}` requires the output of `{requires}` ({missing})")]
    MissingDependency {
        stage: String,
        requires: String,
        missing: PathBuf,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CorpusAccess { .. } => "corpus_access",
            Error::EmptyCorpus { .. } => "empty_corpus",
            Error::Rules(_) => "rules",
            Error::IdCollision { .. } => "id_collision",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::UnknownNode(_) => "unknown_node",
            Error::Precondition(_) => "precondition",
            Error::Domain(_) => "domain",
            Error::ScoringFailed { .. } => "scoring_failed",
            Error::EmptySearch { .. } => "empty_search",
            Error::Template { .. } => "template",
            Error::Stall { .. } => "stall",
            Error::Provider(_) => "provider",
            Error::Config(_) => "config",
            Error::MissingDependency { .. } => "dependency",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }

    /// Process exit status for the CLI: 2 usage, 3 dependency, 4 stall or
    /// shortfall, 5 I/O, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Rules(_) | Error::Template { .. } => 2,
            Error::MissingDependency { .. } => 3,
            Error::Stall { .. } | Error::ScoringFailed { .. } => 4,
            Error::Io { .. } | Error::CorpusAccess { .. } | Error::Json { .. } => 5,
            _ => 1,
        }
    }
}
