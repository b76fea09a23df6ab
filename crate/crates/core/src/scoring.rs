//! Unfamiliarity scores for container nodes.
//!
//! Every (container, child) pair is a membership fact. A provider estimates
//! the probability that the child belongs to the container; the fact's
//! information content is `-log2 p` bits, and the node's score is the mean
//! over its facts.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{non_leaf_nodes, ApiGraph, ApiNode};
use crate::llm::{content_hash, ChatClient, JsonCache, RetryPolicy};

/// Probability floor; keeps `-log2 p` finite.
pub const P_MIN: f64 = 1e-6;

pub const HAS_MEMBER: &str = "has_member";

/// `-log2(max(p, P_MIN))` in bits.
pub fn information_content(p: f64) -> Result<f64> {
    information_content_with_floor(p, P_MIN)
}

pub fn information_content_with_floor(p: f64, p_min: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} is outside [0, 1]")));
    }
    // -log2(1) is -0.0; report +0.
    Ok((-p.max(p_min).log2()).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactTriple {
    pub u: String,
    pub rho: String,
    pub v: String,
    pub probability: f64,
    pub information_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScore {
    pub node: String,
    pub facts: Vec<FactTriple>,
    pub ue_score: f64,
}

pub trait ProbabilityProvider: Send + Sync {
    /// Distinguishes cache entries of different providers.
    fn id(&self) -> String;

    /// Probability in [0, 1] that `v_name` is a member of the entity described by `u_context`.
    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64>;
}

impl<P: ProbabilityProvider + ?Sized> ProbabilityProvider for Arc<P> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64> {
        (**self).estimate(u_context, v_name)
    }
}

impl<P: ProbabilityProvider + ?Sized> ProbabilityProvider for Box<P> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64> {
        (**self).estimate(u_context, v_name)
    }
}

impl<P: ProbabilityProvider + ?Sized> ProbabilityProvider for &P {
    fn id(&self) -> String {
        (**self).id()
    }

    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64> {
        (**self).estimate(u_context, v_name)
    }
}

/// Context string a provider sees for a head entity, e.g. `class util.ArrayList`.
pub fn head_context(node: &ApiNode) -> String {
    format!("{} {}", node.kind.as_str(), node.id)
}

/// Offline provider for tests and mock runs.
#[derive(Debug, Clone, PartialEq)]
pub enum MockProvider {
    Constant(f64),
    /// Uniform in (0, 1], derived from a hash of the seed and the inputs.
    Seeded(u64),
}

impl ProbabilityProvider for MockProvider {
    fn id(&self) -> String {
        match self {
            MockProvider::Constant(p) => format!("mock-constant-{p}"),
            MockProvider::Seeded(s) => format!("mock-seeded-{s}"),
        }
    }

    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64> {
        match *self {
            MockProvider::Constant(p) => Ok(p),
            MockProvider::Seeded(seed) => {
                let h = content_hash(&[&seed.to_string(), u_context, v_name]);
                let bits = u64::from_str_radix(&h[..16], 16).expect("hex");
                Ok(((bits >> 11) as f64 + 1.0) / (1u64 << 53) as f64)
            }
        }
    }
}

/// Provider backed by a closure.
pub struct FnProvider<F> {
    pub name: String,
    pub f: F,
}

impl<F> ProbabilityProvider for FnProvider<F>
where
    F: Fn(&str, &str) -> Result<f64> + Send + Sync,
{
    fn id(&self) -> String {
        self.name.clone()
    }

    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64> {
        (self.f)(u_context, v_name)
    }
}

/// Wraps a provider with the `ue-cache.json` map.
pub struct CachedProvider<P> {
    inner: P,
    cache: Arc<JsonCache<f64>>,
}

impl<P: ProbabilityProvider> CachedProvider<P> {
    pub fn new(inner: P, cache: Arc<JsonCache<f64>>) -> Self {
        CachedProvider { inner, cache }
    }

    pub fn key(&self, u_context: &str, v_name: &str) -> String {
        content_hash(&[u_context, v_name, &self.inner.id()])
    }
}

impl<P: ProbabilityProvider> ProbabilityProvider for CachedProvider<P> {
    fn id(&self) -> String {
        self.inner.id()
    }

    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64> {
        let key = self.key(u_context, v_name);
        if let Some(p) = self.cache.get(&key) {
            return Ok(p);
        }
        let p = self.inner.estimate(u_context, v_name)?;
        self.cache.insert(key, p);
        Ok(p)
    }
}

/// Yes/No question; probability is the normalized mass of "yes" among the
/// first token's top alternatives.
pub struct LogprobProvider {
    pub client: ChatClient,
    pub framework: String,
}

impl LogprobProvider {
    pub fn prompt(&self, u_context: &str, v_name: &str) -> String {
        format!(
            "Does {u_context} in {} have a member named {v_name}? Answer Yes or No.",
            self.framework
        )
    }
}

/// Probability of an affirmative first token from its top alternatives.
pub fn yes_probability(alternatives: &[crate::llm::TokenAlternative]) -> Result<f64> {
    let mut yes = 0.0;
    let mut no = 0.0;
    for alt in alternatives {
        let token = alt.token.trim().to_ascii_lowercase();
        let mass = alt.logprob.exp();
        match token.as_str() {
            "yes" => yes += mass,
            "no" => no += mass,
            _ => {}
        }
    }
    if yes + no <= 0.0 {
        return Err(Error::Provider("no Yes/No token among the top alternatives".into()));
    }
    Ok(yes / (yes + no))
}

impl ProbabilityProvider for LogprobProvider {
    fn id(&self) -> String {
        format!("logprob:{}", self.client.model())
    }

    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64> {
        let reply = self.client.chat(&self.prompt(u_context, v_name), 0.0, 1, Some(10))?;
        yes_probability(&reply.first_token_alternatives)
    }
}

/// Ask for a member listing `samples` times; probability is the fraction of
/// listings that name the member.
pub struct SamplingProvider {
    pub client: ChatClient,
    pub framework: String,
    pub samples: usize,
}

/// Whether `name` appears as a whole identifier in `text`.
pub fn mentions_identifier(text: &str, name: &str) -> bool {
    crate::graph::type_identifiers(text).any(|t| t == name)
}

impl ProbabilityProvider for SamplingProvider {
    fn id(&self) -> String {
        format!("sampling{}:{}", self.samples, self.client.model())
    }

    fn estimate(&self, u_context: &str, v_name: &str) -> Result<f64> {
        let prompt = format!(
            "List the members of {u_context} in {}. Answer with one member name per line.",
            self.framework
        );
        let samples = self.samples.max(1);
        let mut hits = 0;
        for _ in 0..samples {
            let reply = self.client.chat(&prompt, 1.0, 256, None)?;
            if mentions_identifier(&reply.text, v_name) {
                hits += 1;
            }
        }
        Ok(hits as f64 / samples as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreOptions {
    pub retry: RetryPolicy,
    /// Provider calls in flight.
    pub jobs: usize,
    pub p_min: f64,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            retry: RetryPolicy::default(),
            jobs: 4,
            p_min: P_MIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unscored {
    pub node: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreReport {
    pub scores: Vec<NodeScore>,
    pub unscored: Vec<Unscored>,
}

/// Score one container without touching the graph.
pub fn compute_node_score(
    graph: &ApiGraph,
    id: &str,
    provider: &dyn ProbabilityProvider,
    options: &ScoreOptions,
) -> Result<NodeScore> {
    let node = graph.get(id)?;
    if !node.kind.is_container() {
        return Err(Error::Precondition(format!(
            "`{id}` is a {} and has no membership facts",
            node.kind.as_str()
        )));
    }
    let context = head_context(node);
    let mut facts = Vec::new();
    for child in graph.children(id) {
        let child_node = graph.get(child)?;
        let p = options.retry.run(|_| {
            let p = provider.estimate(&context, &child_node.name)?;
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::Provider(format!("provider returned {p}")));
            }
            Ok(p)
        })?;
        let clamped = p.max(options.p_min);
        facts.push(FactTriple {
            u: id.to_string(),
            rho: HAS_MEMBER.to_string(),
            v: child.clone(),
            probability: clamped,
            information_bits: information_content_with_floor(p, options.p_min)?,
        });
    }
    let ue_score = if facts.is_empty() {
        0.0
    } else {
        facts.iter().map(|f| f.information_bits).sum::<f64>() / facts.len() as f64
    };
    Ok(NodeScore {
        node: id.to_string(),
        facts,
        ue_score,
    })
}

/// Score one container and store the result on the node.
pub fn score_node(graph: &mut ApiGraph, id: &str, provider: &dyn ProbabilityProvider) -> Result<NodeScore> {
    let score = compute_node_score(graph, id, provider, &ScoreOptions::default())?;
    graph.set_ue_score(id, Some(score.ue_score))?;
    Ok(score)
}

/// Score every container, then write all results back in one step.
/// Fails only when more than half of the containers end up unscored.
pub fn score_all(
    graph: &mut ApiGraph,
    provider: &dyn ProbabilityProvider,
    options: &ScoreOptions,
) -> Result<ScoreReport> {
    let ids = non_leaf_nodes(graph);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let shared: &ApiGraph = graph;
    let results: Vec<(String, Result<NodeScore>)> = pool.install(|| {
        ids.par_iter()
            .map(|id| (id.clone(), compute_node_score(shared, id, provider, options)))
            .collect()
    });

    let mut report = ScoreReport::default();
    for (id, result) in results {
        match result {
            Ok(score) => {
                graph.set_ue_score(&id, Some(score.ue_score))?;
                report.scores.push(score);
            }
            Err(e) => {
                tracing::warn!(node = %id, error = %e, "node left unscored");
                graph.set_ue_score(&id, None)?;
                report.unscored.push(Unscored {
                    node: id,
                    reason: e.to_string(),
                });
            }
        }
    }
    let total = ids.len();
    if report.unscored.len() * 2 > total {
        return Err(Error::ScoringFailed {
            unscored: report.unscored.len(),
            total,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ApiEdge, NodeKind};
    use std::collections::HashMap;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn class_with(children: &[&str]) -> ApiGraph {
        let mut nodes = vec![ApiNode::new("C", NodeKind::Class, "class C")];
        let mut edges = Vec::new();
        for c in children {
            let id = format!("C.{c}");
            nodes.push(ApiNode::new(&id, NodeKind::Method, format!("{c}()")));
            edges.push(ApiEdge::contains("C", &id));
        }
        ApiGraph::new(nodes, edges).unwrap()
    }

    fn table(entries: &[(&str, f64)]) -> FnProvider<impl Fn(&str, &str) -> Result<f64>> {
        let map: HashMap<String, f64> = entries.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        FnProvider {
            name: "table".into(),
            f: move |_: &str, v: &str| Ok(map[v]),
        }
    }

    #[test]
    fn information_content_examples() {
        assert_eq!(information_content(1.0).unwrap(), 0.0);
        assert_eq!(information_content(0.5).unwrap(), 1.0);
        let clamped = information_content(0.0).unwrap();
        assert!((clamped - 19.931568569324174).abs() < 1e-12);
        assert!(information_content(1.5).is_err());
        assert!(information_content(-0.1).is_err());
        assert!(information_content(f64::NAN).is_err());
    }

    #[test]
    fn node_score_is_mean_of_bits() {
        let mut g = class_with(&["a", "b"]);
        let s = score_node(&mut g, "C", &table(&[("a", 1.0), ("b", 0.25)])).unwrap();
        let bits: Vec<_> = s.facts.iter().map(|f| f.information_bits).collect();
        assert_eq!(bits, [0.0, 2.0]);
        assert_eq!(s.ue_score, 1.0);
        assert_eq!(g.node("C").unwrap().ue_score, Some(1.0));
        assert!(s.facts.iter().all(|f| f.rho == HAS_MEMBER && f.u == "C"));
    }

    #[test]
    fn childless_node_scores_zero() {
        let mut g = ApiGraph::new(vec![ApiNode::new("I", NodeKind::Interface, "interface I")], vec![]).unwrap();
        let s = score_node(&mut g, "I", &MockProvider::Constant(0.3)).unwrap();
        assert!(s.facts.is_empty());
        assert_eq!(s.ue_score, 0.0);
    }

    #[test]
    fn equal_probabilities_give_equal_mean() {
        for n in 1..6 {
            let names: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let mut g = class_with(&refs);
            let s = score_node(&mut g, "C", &MockProvider::Constant(0.5)).unwrap();
            assert_eq!(s.ue_score, 1.0);
        }
    }

    #[test]
    fn leaf_is_a_precondition_error() {
        let mut g = class_with(&["a"]);
        let err = score_node(&mut g, "C.a", &MockProvider::Constant(0.5)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn failing_provider_marks_node_unscored_and_run_continues() {
        let nodes = vec![
            ApiNode::new("A", NodeKind::Class, "class A"),
            ApiNode::new("A.x", NodeKind::Method, "x()"),
            ApiNode::new("B", NodeKind::Class, "class B"),
            ApiNode::new("B.y", NodeKind::Method, "y()"),
            ApiNode::new("C", NodeKind::Class, "class C"),
        ];
        let edges = vec![ApiEdge::contains("A", "A.x"), ApiEdge::contains("B", "B.y")];
        let mut g = ApiGraph::new(nodes, edges).unwrap();
        let calls = AtomicUsize::new(0);
        let provider = FnProvider {
            name: "flaky".into(),
            f: |ctx: &str, _: &str| {
                calls.fetch_add(1, Ordering::SeqCst);
                if ctx.ends_with(" A") {
                    Err(Error::Provider("down".into()))
                } else {
                    Ok(0.5)
                }
            },
        };
        let opts = ScoreOptions {
            retry: RetryPolicy::immediate(3),
            ..Default::default()
        };
        let report = score_all(&mut g, &provider, &opts).unwrap();
        assert_eq!(report.unscored.len(), 1);
        assert_eq!(report.unscored[0].node, "A");
        assert_eq!(report.scores.len(), 2);
        assert_eq!(g.node("A").unwrap().ue_score, None);
        assert_eq!(g.node("B").unwrap().ue_score, Some(1.0));
        // three attempts for A, one call for B
        assert_eq!(calls.load(Ordering::SeqCst), 4);
    }

    #[test]
    fn majority_failure_fails_the_run() {
        let mut g = class_with(&["a"]);
        let provider = FnProvider {
            name: "down".into(),
            f: |_: &str, _: &str| Err(Error::Provider("down".into())),
        };
        let opts = ScoreOptions {
            retry: RetryPolicy::immediate(1),
            ..Default::default()
        };
        let err = score_all(&mut g, &provider, &opts).unwrap_err();
        assert!(matches!(err, Error::ScoringFailed { unscored: 1, total: 1 }));
    }

    #[test]
    fn score_all_covers_containers() {
        let nodes = vec![
            ApiNode::new("n", NodeKind::Namespace, "namespace n"),
            ApiNode::new("n.A", NodeKind::Class, "class A"),
            ApiNode::new("n.A.f", NodeKind::Method, "f()"),
            ApiNode::new("n.B", NodeKind::Enum, "enum B"),
            ApiNode::new("n.B.X", NodeKind::Property, "X"),
        ];
        let edges = vec![
            ApiEdge::contains("n", "n.A"),
            ApiEdge::contains("n", "n.B"),
            ApiEdge::contains("n.A", "n.A.f"),
            ApiEdge::contains("n.B", "n.B.X"),
        ];
        let mut g = ApiGraph::new(nodes, edges).unwrap();
        let report = score_all(&mut g, &MockProvider::Constant(0.5), &ScoreOptions::default()).unwrap();
        let ids: Vec<_> = report.scores.iter().map(|s| s.node.as_str()).collect();
        assert_eq!(ids, ["n", "n.A", "n.B"]);
        assert!(report.scores.iter().all(|s| s.ue_score == 1.0));

        let mut empty = ApiGraph::empty();
        let r = score_all(&mut empty, &MockProvider::Constant(0.5), &ScoreOptions::default()).unwrap();
        assert!(r.scores.is_empty());
    }

    #[test]
    fn mixed_mock_scores() {
        let nodes = vec![
            ApiNode::new("P", NodeKind::Class, "class P"),
            ApiNode::new("P.a", NodeKind::Method, "a()"),
            ApiNode::new("P.b", NodeKind::Method, "b()"),
            ApiNode::new("Q", NodeKind::Class, "class Q"),
            ApiNode::new("Q.c", NodeKind::Method, "c()"),
        ];
        let edges = vec![
            ApiEdge::contains("P", "P.a"),
            ApiEdge::contains("P", "P.b"),
            ApiEdge::contains("Q", "Q.c"),
        ];
        let mut g = ApiGraph::new(nodes, edges).unwrap();
        let provider = FnProvider {
            name: "mixed".into(),
            f: |ctx: &str, _: &str| Ok(if ctx.ends_with(" P") { 1.0 } else { 0.25 }),
        };
        let report = score_all(&mut g, &provider, &ScoreOptions::default()).unwrap();
        let scores: Vec<_> = report.scores.iter().map(|s| s.ue_score).collect();
        assert_eq!(scores, [0.0, 2.0]);
    }

    #[test]
    fn cache_serves_repeat_calls() {
        let calls = AtomicUsize::new(0);
        let inner = FnProvider {
            name: "counting".into(),
            f: |_: &str, _: &str| {
                calls.fetch_add(1, Ordering::SeqCst);
                Ok(0.5)
            },
        };
        let cache = Arc::new(JsonCache::new());
        let cached = CachedProvider::new(inner, cache.clone());
        assert_eq!(cached.estimate("class X", "y").unwrap(), 0.5);
        assert_eq!(cached.estimate("class X", "y").unwrap(), 0.5);
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn seeded_mock_is_deterministic_and_in_range() {
        let m = MockProvider::Seeded(7);
        let a = m.estimate("class X", "y").unwrap();
        assert_eq!(a, m.estimate("class X", "y").unwrap());
        assert!(a > 0.0 && a <= 1.0);
        assert_ne!(a, MockProvider::Seeded(8).estimate("class X", "y").unwrap());
    }

    #[test]
    fn yes_mass_normalization() {
        use crate::llm::TokenAlternative;
        let alts = [
            TokenAlternative { token: "Yes".into(), logprob: (0.6f64).ln() },
            TokenAlternative { token: " no".into(), logprob: (0.2f64).ln() },
            TokenAlternative { token: "Maybe".into(), logprob: (0.2f64).ln() },
        ];
        assert!((yes_probability(&alts).unwrap() - 0.75).abs() < 1e-12);
        assert!(yes_probability(&alts[2..]).is_err());
    }

    #[test]
    fn identifier_mentions_are_whole_words() {
        assert!(mentions_identifier("add\nremove\n", "add"));
        assert!(!mentions_identifier("addAll\n", "add"));
    }
}
