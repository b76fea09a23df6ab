//! UCB1 Monte Carlo tree search over container nodes.
//!
//! Every container is used once as the search root. An iteration descends by
//! UCB1 until it reaches a node with unexpanded successors (or a dead end),
//! expands one successor at random, finishes the path with a random walk
//! over not-yet-visited successors, and backs the path's summed node reward
//! up the tree. Every simulated path is kept as a [`Trajectory`]; the best
//! distinct ones across all roots are harvested at the end.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ApiGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub exploration_c: f64,
    pub iterations_per_root: usize,
    pub top_k: usize,
    pub rng_seed: u64,
    pub min_path_len: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exploration_c: std::f64::consts::SQRT_2,
            iterations_per_root: 100,
            top_k: 5,
            rng_seed: 0,
            min_path_len: 2,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.exploration_c.is_finite() && self.exploration_c > 0.0) {
            return Err(Error::Config(format!(
                "exploration_c must be positive, got {}",
                self.exploration_c
            )));
        }
        if self.iterations_per_root == 0 {
            return Err(Error::Config("iterations_per_root must be at least 1".into()));
        }
        if self.top_k == 0 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        if self.min_path_len < 2 {
            return Err(Error::Config("min_path_len must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchNodeStats {
    pub node: String,
    pub visits: u64,
    pub total_reward: f64,
}

impl SearchNodeStats {
    pub fn new(node: impl Into<String>) -> Self {
        SearchNodeStats {
            node: node.into(),
            visits: 0,
            total_reward: 0.0,
        }
    }

    /// Q(n) = W(n) / N(n); zero before the first visit.
    pub fn mean_reward(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.total_reward / self.visits as f64
        }
    }
}

/// UCB1 score of a child; `n_total` is the parent's visit count.
pub fn ucb1(stats: &SearchNodeStats, n_total: u64, c: f64) -> Result<f64> {
    if n_total < 1 {
        return Err(Error::Domain("UCB1 needs a parent visit count of at least 1".into()));
    }
    if stats.visits == 0 {
        return Ok(f64::INFINITY);
    }
    let n = stats.visits as f64;
    Ok(stats.mean_reward() + c * ((n_total as f64).ln() / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub nodes: Vec<String>,
    pub cumulative_reward: f64,
    pub root: String,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn node_set(&self) -> Vec<&str> {
        let mut set: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        set.sort_unstable();
        set
    }
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub stats: SearchNodeStats,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    space_index: usize,
}

/// Arena of search-tree nodes; index 0 is the root.
#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<TreeNode>,
}

impl SearchTree {
    pub fn new(root: impl Into<String>) -> Self {
        Self::with_index(root.into(), usize::MAX)
    }

    fn with_index(root: String, space_index: usize) -> Self {
        SearchTree {
            nodes: vec![TreeNode {
                stats: SearchNodeStats::new(root),
                parent: None,
                children: Vec::new(),
                space_index,
            }],
        }
    }

    pub fn add_child(&mut self, parent: usize, node: impl Into<String>) -> usize {
        self.add_indexed_child(parent, node.into(), usize::MAX)
    }

    fn add_indexed_child(&mut self, parent: usize, node: String, space_index: usize) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(TreeNode {
            stats: SearchNodeStats::new(node),
            parent: Some(parent),
            children: Vec::new(),
            space_index,
        });
        self.nodes[parent].children.push(idx);
        idx
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, idx: usize) -> &TreeNode {
        &self.nodes[idx]
    }

    pub fn stats(&self, idx: usize) -> &SearchNodeStats {
        &self.nodes[idx].stats
    }
}

/// N += 1 and W += reward on every tree node of `path`.
pub fn backup(tree: &mut SearchTree, path: &[usize], reward: f64) {
    for &idx in path {
        let stats = &mut tree.nodes[idx].stats;
        stats.visits += 1;
        stats.total_reward += reward;
    }
}

/// Container nodes, their search successors and rewards, indexed densely.
///
/// Successors of a container are its container children plus containers it
/// shares a REFERENCES edge with, in either direction.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    successors: Vec<Vec<usize>>,
    rewards: Vec<f64>,
    pub diagnostics: Vec<String>,
}

impl SearchSpace {
    pub fn new(graph: &ApiGraph) -> Self {
        let ids: Vec<String> = crate::graph::non_leaf_nodes(graph);
        let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let mut diagnostics = Vec::new();
        let mut successors = Vec::with_capacity(ids.len());
        let mut rewards = Vec::with_capacity(ids.len());
        for id in &ids {
            let mut succ: Vec<usize> = graph
                .children(id)
                .iter()
                .chain(graph.references_from(id))
                .chain(graph.references_to(id))
                .filter_map(|n| index.get(n).copied())
                .collect();
            succ.sort_unstable();
            succ.dedup();
            successors.push(succ);
            let node = graph.node(id).expect("container exists");
            rewards.push(match node.ue_score {
                Some(s) => s,
                None => {
                    diagnostics.push(format!("`{id}` has no ue_score; using reward 0"));
                    0.0
                }
            });
        }
        SearchSpace {
            ids,
            index,
            successors,
            rewards,
            diagnostics,
        }
    }

    pub fn roots(&self) -> &[String] {
        &self.ids
    }

    pub fn successors(&self, id: &str) -> Vec<&str> {
        self.index
            .get(id)
            .map(|&i| self.successors[i].iter().map(|&s| self.ids[s].as_str()).collect())
            .unwrap_or_default()
    }

    pub fn reward(&self, id: &str) -> Option<f64> {
        self.index.get(id).map(|&i| self.rewards[i])
    }
}

/// One completed iteration: the tree nodes that were backed up and the
/// full simulated path.
#[derive(Debug, Clone)]
pub struct Iteration {
    pub tree_path: Vec<usize>,
    pub trajectory: Trajectory,
}

/// Search state for a single root.
pub struct Mcts<'s> {
    space: &'s SearchSpace,
    root: usize,
    exploration_c: f64,
    rng: ChaCha8Rng,
    tree: SearchTree,
    on_path: Vec<bool>,
}

impl<'s> Mcts<'s> {
    pub fn new(space: &'s SearchSpace, root: &str, exploration_c: f64, seed: u64) -> Result<Self> {
        let &root_idx = space
            .index
            .get(root)
            .ok_or_else(|| Error::Precondition(format!("`{root}` is not a container node")))?;
        Ok(Mcts {
            space,
            root: root_idx,
            exploration_c,
            rng: ChaCha8Rng::seed_from_u64(seed),
            tree: SearchTree::with_index(root.to_string(), root_idx),
            on_path: vec![false; space.ids.len()],
        })
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn has_successors(&self) -> bool {
        !self.space.successors[self.root].is_empty()
    }

    fn select_child(&self, parent: usize) -> usize {
        let n_total = self.tree.nodes[parent].stats.visits.max(1);
        let mut best = None;
        let mut best_score = f64::NEG_INFINITY;
        for &child in &self.tree.nodes[parent].children {
            let score = ucb1(&self.tree.nodes[child].stats, n_total, self.exploration_c)
                .expect("n_total >= 1");
            if best.is_none() || score > best_score {
                best = Some(child);
                best_score = score;
            }
        }
        best.expect("caller checked children")
    }

    pub fn iterate(&mut self) -> Iteration {
        self.on_path.iter_mut().for_each(|v| *v = false);
        let mut cur = 0;
        self.on_path[self.root] = true;
        let mut tree_path = vec![0];

        // Selection, then expansion of one unexpanded successor.
        loop {
            let node = self.tree.nodes[cur].space_index;
            let unexpanded: Vec<usize> = self.space.successors[node]
                .iter()
                .copied()
                .filter(|&s| {
                    !self.on_path[s]
                        && !self.tree.nodes[cur]
                            .children
                            .iter()
                            .any(|&c| self.tree.nodes[c].space_index == s)
                })
                .collect();
            if !unexpanded.is_empty() {
                let pick = unexpanded[self.rng.random_range(0..unexpanded.len())];
                let child = self
                    .tree
                    .add_indexed_child(cur, self.space.ids[pick].clone(), pick);
                self.on_path[pick] = true;
                tree_path.push(child);
                break;
            }
            if self.tree.nodes[cur].children.is_empty() {
                break;
            }
            cur = self.select_child(cur);
            self.on_path[self.tree.nodes[cur].space_index] = true;
            tree_path.push(cur);
        }

        // Simulation: random walk over successors not yet on the path.
        let mut path: Vec<usize> = tree_path.iter().map(|&t| self.tree.nodes[t].space_index).collect();
        let mut last = *path.last().expect("path starts at root");
        loop {
            let open: Vec<usize> = self.space.successors[last]
                .iter()
                .copied()
                .filter(|&s| !self.on_path[s])
                .collect();
            if open.is_empty() {
                break;
            }
            last = open[self.rng.random_range(0..open.len())];
            self.on_path[last] = true;
            path.push(last);
        }

        let reward: f64 = path.iter().map(|&i| self.space.rewards[i]).sum();
        backup(&mut self.tree, &tree_path, reward);
        Iteration {
            tree_path,
            trajectory: Trajectory {
                nodes: path.iter().map(|&i| self.space.ids[i].clone()).collect(),
                cumulative_reward: reward,
                root: self.space.ids[self.root].clone(),
            },
        }
    }
}

/// All simulated paths from one root. A root without successors yields none.
pub fn run_mcts_from_root(graph: &ApiGraph, root: &str, config: &SearchConfig) -> Result<Vec<Trajectory>> {
    config.validate()?;
    let node = graph.get(root)?;
    if !node.kind.is_container() {
        return Err(Error::Precondition(format!("`{root}` is a leaf")));
    }
    let space = SearchSpace::new(graph);
    search_root(&space, root, config, config.rng_seed)
}

fn search_root(space: &SearchSpace, root: &str, config: &SearchConfig, seed: u64) -> Result<Vec<Trajectory>> {
    let mut mcts = Mcts::new(space, root, config.exploration_c, seed)?;
    if !mcts.has_successors() {
        tracing::debug!(root, "root has no successors; skipped");
        return Ok(Vec::new());
    }
    Ok((0..config.iterations_per_root)
        .map(|_| mcts.iterate().trajectory)
        .collect())
}

/// Per-root seed: the base seed mixed with the root's position.
pub fn derive_seed(base: u64, root_index: usize) -> u64 {
    let mut z = base ^ (root_index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Default)]
pub struct SearchOutcome {
    /// Every simulated path, grouped by root in root order.
    pub trajectories: Vec<Trajectory>,
    pub skipped_roots: Vec<String>,
    pub diagnostics: Vec<String>,
}

/// Search from every container (roots in parallel, each with its own seed).
pub fn search_all_roots(graph: &ApiGraph, config: &SearchConfig, jobs: usize) -> Result<SearchOutcome> {
    config.validate()?;
    let space = SearchSpace::new(graph);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let per_root: Vec<Result<Vec<Trajectory>>> = pool.install(|| {
        space
            .ids
            .par_iter()
            .enumerate()
            .map(|(i, root)| search_root(&space, root, config, derive_seed(config.rng_seed, i)))
            .collect()
    });
    let mut outcome = SearchOutcome {
        diagnostics: space.diagnostics.clone(),
        ..Default::default()
    };
    for (root, result) in space.ids.iter().zip(per_root) {
        let paths = result?;
        if paths.is_empty() {
            outcome.skipped_roots.push(root.clone());
        }
        outcome.trajectories.extend(paths);
    }
    Ok(outcome)
}

fn by_reward_then_ids(a: &Trajectory, b: &Trajectory) -> Ordering {
    b.cumulative_reward
        .total_cmp(&a.cumulative_reward)
        .then_with(|| a.nodes.cmp(&b.nodes))
}

/// Best `top_k` distinct (by node set) paths of at least `min_path_len` nodes.
pub fn harvest_top_paths(all: &[Trajectory], config: &SearchConfig) -> Result<Vec<Trajectory>> {
    let mut best: BTreeMap<Vec<&str>, &Trajectory> = BTreeMap::new();
    for t in all.iter().filter(|t| t.len() >= config.min_path_len) {
        best.entry(t.node_set())
            .and_modify(|cur| {
                if by_reward_then_ids(t, cur) == Ordering::Less {
                    *cur = t;
                }
            })
            .or_insert(t);
    }
    if best.is_empty() {
        return Err(Error::EmptySearch {
            min_len: config.min_path_len,
        });
    }
    let mut top: Vec<Trajectory> = best.into_values().cloned().collect();
    top.sort_by(by_reward_then_ids);
    top.truncate(config.top_k);
    Ok(top)
}

/// Two or three distinct nodes of a trajectory, kept in path order.
pub fn sample_path_nodes<R: Rng + ?Sized>(t: &Trajectory, rng: &mut R) -> Result<Vec<String>> {
    let n = t.nodes.len();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "trajectory from `{}` has {n} node(s); need at least 2",
            t.root
        )));
    }
    let k = if n == 2 { 2 } else { rng.random_range(2..=3) };
    let mut picked = index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| t.nodes[i].clone()).collect())
}
