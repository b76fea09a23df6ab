//! Turn a corpus of framework API documentation into an API knowledge graph,
//! pick unfamiliar single- and multi-API seeds with uncertainty-guided tree
//! search, and synthesize a deduplicated question/code instruction dataset.
//!
//! The pipeline runs in stages, each reading and writing JSON snapshots:
//!
//! 1. [`ingest`] scans the documentation tree and extracts code and text records.
//! 2. [`graph`] builds the knowledge graph (containment and type-reference edges).
//! 3. [`scoring`] attaches an information-content score to every container node.
//! 4. [`search`] runs UCB1 tree search from every container and keeps the
//!    highest-scoring paths.
//! 5. [`seeds`] and [`synth`] turn graph data into prompts and question/code tuples.
//! 6. [`postproc`] removes near-duplicates, refills quotas and exports training records.
//!
//! [`pipeline`] wires the stages together; the `kgsynth` binary is a thin
//! front-end over it.

pub mod error;
pub mod graph;
pub mod ingest;
pub mod llm;
pub mod pipeline;
pub mod postproc;
pub mod scoring;
pub mod search;
pub mod seeds;
pub mod snapshot;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{ApiEdge, ApiGraph, ApiNode, NodeKind, Relation};
pub use search::{SearchConfig, Trajectory};
pub use seeds::{SeedBundle, SeedType};
pub use synth::QuestionCodeTuple;



