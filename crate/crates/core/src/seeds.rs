//! Seed bundles: the graph facts a prompt is built from.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{non_leaf_nodes, subtree_info, ApiGraph, InfoBundle};
use crate::search::{sample_path_nodes, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedType {
    Single,
    Multi,
}

impl SeedType {
    pub fn as_str(self) -> &'static str {
        match self {
            SeedType::Single => "single",
            SeedType::Multi => "multi",
        }
    }
}

impl fmt::Display for SeedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which harvested path a multi-API bundle was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub trajectory_index: usize,
    pub trajectory: Vec<String>,
    pub cumulative_reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedBundle {
    pub seed_type: SeedType,
    pub target_nodes: Vec<String>,
    /// One subtree per target, in target order.
    pub entries: Vec<InfoBundle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl SeedBundle {
    pub fn target_names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.node.name.as_str()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.target_nodes.len();
        let ok = match self.seed_type {
            SeedType::Single => n == 1,
            SeedType::Multi => (2..=3).contains(&n),
        };
        if !ok || self.entries.len() != n {
            return Err(Error::Precondition(format!(
                "{} bundle has {n} targets and {} entries",
                self.seed_type,
                self.entries.len()
            )));
        }
        Ok(())
    }
}

/// One single-API bundle per container node, in id order.
pub fn single_api_seeds(graph: &ApiGraph) -> Result<Vec<SeedBundle>> {
    non_leaf_nodes(graph)
        .into_iter()
        .map(|id| {
            let entry = subtree_info(graph, &id)?;
            Ok(SeedBundle {
                seed_type: SeedType::Single,
                target_nodes: vec![id],
                entries: vec![entry],
                provenance: None,
            })
        })
        .collect()
}

/// Bundles per path so that `paths` paths cover `multi_quota`.
pub fn per_path_for_quota(multi_quota: usize, paths: usize) -> usize {
    if paths == 0 {
        0
    } else {
        multi_quota.div_ceil(paths)
    }
}

/// `per_path` multi-API bundles from each harvested path, each drawing two
/// or three of the path's nodes.
pub fn multi_api_seeds<R: Rng + ?Sized>(
    graph: &ApiGraph,
    tops: &[Trajectory],
    per_path: usize,
    rng: &mut R,
) -> Result<(Vec<SeedBundle>, Vec<String>)> {
    if tops.is_empty() {
        return Err(Error::Precondition("no trajectories to draw multi-API seeds from".into()));
    }
    let mut bundles = Vec::new();
    let mut diagnostics = Vec::new();
    for (i, t) in tops.iter().enumerate() {
        if t.len() < 2 {
            diagnostics.push(format!("trajectory {i} from `{}` has fewer than 2 nodes; skipped", t.root));
            continue;
        }
        for _ in 0..per_path {
            let targets = sample_path_nodes(t, rng)?;
            let entries = targets
                .iter()
                .map(|id| subtree_info(graph, id))
                .collect::<Result<Vec<_>>>()?;
            bundles.push(SeedBundle {
                seed_type: SeedType::Multi,
                target_nodes: targets,
                entries,
                provenance: Some(Provenance {
                    trajectory_index: i,
                    trajectory: t.nodes.clone(),
                    cumulative_reward: t.cumulative_reward,
                }),
            });
        }
    }
    Ok((bundles, diagnostics))
}
