//! Question and code synthesis from seed bundles.
//!
//! A question prompt is rendered from a bundle's API entries; the answer is
//! validated (it must name a target API) and fed into the code prompt
//! together with full metadata for every target and its members. Bundles are
//! reused round-robin until each seed type's quota of validated tuples is met.

mod mock;
mod template;

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{subtree_info, ApiGraph, InfoBundle, InfoEntry};
use crate::llm::{content_hash, ChatClient, JsonCache, RetryPolicy};
use crate::scoring::mentions_identifier;
use crate::seeds::{SeedBundle, SeedType};

pub use mock::{MockGenerator, MockMode};
pub use template::{PromptTemplate, TemplateName, Templates, PLACEHOLDERS};

/// Line in the rendered constraints that lists the target API names.
pub const TARGETS_PREFIX: &str = "Target APIs:";

pub const MAX_ATTEMPTS: u32 = 3;
pub const BASE_TEMPERATURE: f64 = 0.7;
pub const MAX_TEMPERATURE: f64 = 1.0;

pub trait GeneratorClient: Send + Sync {
    fn model_id(&self) -> String;
    fn complete(&self, prompt: &str, temperature: f64, max_tokens: u32) -> Result<String>;
}

macro_rules! forward_generator {
    ($ptr:ident) => {
        impl<G: GeneratorClient + ?Sized> GeneratorClient for $ptr<G> {
            fn model_id(&self) -> String {
                (**self).model_id()
            }

            fn complete(&self, prompt: &str, temperature: f64, max_tokens: u32) -> Result<String> {
                (**self).complete(prompt, temperature, max_tokens)
            }
        }
    };
}

forward_generator!(Arc);
forward_generator!(Box);

/// Chat-completion endpoint with retries.
pub struct LiveGenerator {
    pub client: ChatClient,
    pub retry: RetryPolicy,
}

impl GeneratorClient for LiveGenerator {
    fn model_id(&self) -> String {
        self.client.model().to_string()
    }

    fn complete(&self, prompt: &str, temperature: f64, max_tokens: u32) -> Result<String> {
        self.retry
            .run(|_| self.client.chat(prompt, temperature, max_tokens, None))
            .map(|r| r.text)
    }
}

/// Serves repeated (prompt, temperature) pairs from `gen-cache.json`.
pub struct CachedGenerator<G> {
    inner: G,
    cache: Arc<JsonCache<String>>,
    calls: AtomicUsize,
}

impl<G: GeneratorClient> CachedGenerator<G> {
    pub fn new(inner: G, cache: Arc<JsonCache<String>>) -> Self {
        CachedGenerator {
            inner,
            cache,
            calls: AtomicUsize::new(0),
        }
    }

    /// Calls that reached the wrapped client.
    pub fn upstream_calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn key(&self, prompt: &str, temperature: f64) -> String {
        format!("{}@{temperature:.3}", content_hash(&[prompt, &self.inner.model_id()]))
    }
}

impl<G: GeneratorClient> GeneratorClient for CachedGenerator<G> {
    fn model_id(&self) -> String {
        self.inner.model_id()
    }

    fn complete(&self, prompt: &str, temperature: f64, max_tokens: u32) -> Result<String> {
        let key = self.key(prompt, temperature);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit);
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        let text = self.inner.complete(prompt, temperature, max_tokens)?;
        self.cache.insert(key, text.clone());
        Ok(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenMeta {
    pub model: String,
    pub temperature: f64,
    pub question_prompt_hash: String,
    pub code_prompt_hash: String,
    pub bundle_index: usize,
    pub reuse_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionCodeTuple {
    pub question: String,
    pub code: String,
    pub api_nodes: Vec<String>,
    pub seed_type: SeedType,
    pub gen_meta: GenMeta,
}

/// Which generation job, and which retry, a prompt is for. Distinct jobs get
/// distinct prompts even when their bundles have the same targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Variation {
    pub job: usize,
    pub attempt: u32,
}

/// Temperature for the n-th reuse of a bundle.
pub fn reuse_temperature(reuse: usize) -> f64 {
    let t = BASE_TEMPERATURE + 0.1 * reuse as f64;
    // one decimal place keeps cache keys stable
    ((t.min(MAX_TEMPERATURE)) * 10.0).round() / 10.0
}

fn write_params(out: &mut String, entry: &InfoEntry) {
    if !entry.parameters.is_empty() {
        out.push_str("Parameters:\n");
        for p in &entry.parameters {
            let _ = writeln!(out, "- {} ({}): {}", p.name, p.type_text, p.description);
        }
    }
    if let Some(r) = &entry.returns {
        let _ = writeln!(out, "Returns: {} - {}", r.type_text, r.description);
    }
}

fn write_head(out: &mut String, entry: &InfoEntry) {
    let _ = writeln!(out, "### {} ({})", entry.id, entry.kind.as_str());
    let _ = writeln!(out, "Signature: {}", entry.signature);
    if !entry.description.is_empty() {
        let _ = writeln!(out, "Description: {}", entry.description);
    }
    if entry.deprecated {
        out.push_str("Deprecated: yes\n");
    }
}

/// Target signature and semantics, then each member's signature and description.
pub fn format_api_entries(entries: &[InfoBundle]) -> String {
    let mut out = String::new();
    for (i, bundle) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_head(&mut out, &bundle.node);
        write_params(&mut out, &bundle.node);
        if !bundle.children.is_empty() {
            out.push_str("Members:\n");
            for c in &bundle.children {
                let dep = if c.deprecated { " [deprecated]" } else { "" };
                if c.description.is_empty() {
                    let _ = writeln!(out, "- {}{dep}", c.signature);
                } else {
                    let _ = writeln!(out, "- {}{dep}: {}", c.signature, c.description);
                }
            }
        }
    }
    out.trim_end().to_string()
}

/// Full metadata for every target and every member of each target.
pub fn format_fine_grained(entries: &[InfoBundle]) -> String {
    let mut out = String::new();
    for (i, bundle) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for entry in bundle.entries() {
            write_head(&mut out, entry);
            write_params(&mut out, entry);
            if let Some(v) = &entry.since_version {
                let _ = writeln!(out, "Since: {v}");
            }
        }
    }
    out.trim_end().to_string()
}

fn variation_line(v: Variation) -> String {
    let mut line = String::new();
    if v.job > 0 {
        let _ = write!(
            line,
            "Variation {}: pick a scenario that differs from earlier variations.",
            v.job
        );
    }
    if v.attempt > 0 {
        if !line.is_empty() {
            line.push(' ');
        }
        let _ = write!(line, "Attempt {}: name the target APIs explicitly.", v.attempt + 1);
    }
    line
}

fn question_constraints(bundle: &SeedBundle, v: Variation) -> String {
    let names = bundle.target_names();
    let mut out = format!("{TARGETS_PREFIX} {}\n", names.join(", "));
    match bundle.seed_type {
        SeedType::Single => {
            let _ = writeln!(out, "The question must center on using {}.", names[0]);
        }
        SeedType::Multi => {
            let _ = writeln!(
                out,
                "The question must require using all of these APIs jointly in one solution: {}.",
                names.join(", ")
            );
        }
    }
    let line = variation_line(v);
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
    out.trim_end().to_string()
}

fn code_constraints(bundle: &SeedBundle, v: Variation) -> String {
    let names = bundle.target_names();
    let mut out = format!(
        "{TARGETS_PREFIX} {}\nThe solution must use every one of these APIs: {}.",
        names.join(", "),
        names.join(", ")
    );
    if v.attempt > 0 {
        let _ = write!(out, "\nAttempt {}: reference each target API by name.", v.attempt + 1);
    }
    out
}

pub fn render_question_prompt(
    templates: &Templates,
    framework: &str,
    bundle: &SeedBundle,
    variation: Variation,
) -> Result<String> {
    let mut b = BTreeMap::new();
    b.insert("framework", framework.to_string());
    b.insert("api_entries", format_api_entries(&bundle.entries));
    b.insert("constraints", question_constraints(bundle, variation));
    templates.question.render(&b)
}

pub fn render_code_prompt(
    templates: &Templates,
    framework: &str,
    question: &str,
    bundle: &SeedBundle,
    graph: &ApiGraph,
    variation: Variation,
) -> Result<String> {
    let fresh: Vec<InfoBundle> = bundle
        .target_nodes
        .iter()
        .map(|id| subtree_info(graph, id))
        .collect::<Result<_>>()?;
    let mut b = BTreeMap::new();
    b.insert("framework", framework.to_string());
    b.insert("question", question.to_string());
    b.insert("fine_grained_info", format_fine_grained(&fresh));
    b.insert("constraints", code_constraints(bundle, variation));
    templates.code.render(&b)
}

/// Everything the generation steps need besides the bundle itself.
pub struct SynthContext<'a> {
    pub graph: &'a ApiGraph,
    pub templates: &'a Templates,
    pub framework: &'a str,
    pub client: &'a dyn GeneratorClient,
    pub max_tokens: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub text: String,
    pub prompt_hash: String,
}

/// First candidate naming at least one target API, within [`MAX_ATTEMPTS`].
/// `Ok(None)` means every attempt failed validation.
pub fn generate_question(
    ctx: &SynthContext<'_>,
    bundle: &SeedBundle,
    temperature: f64,
    job: usize,
) -> Result<Option<Generated>> {
    let names = bundle.target_names();
    for attempt in 0..MAX_ATTEMPTS {
        let prompt = render_question_prompt(ctx.templates, ctx.framework, bundle, Variation { job, attempt })?;
        let text = ctx.client.complete(&prompt, temperature, ctx.max_tokens)?;
        let text = text.trim();
        if !text.is_empty() && names.iter().any(|n| mentions_identifier(text, n)) {
            return Ok(Some(Generated {
                text: text.to_string(),
                prompt_hash: content_hash(&[&prompt]),
            }));
        }
    }
    Ok(None)
}

/// Code answer referencing every target API, within [`MAX_ATTEMPTS`].
pub fn generate_code(
    ctx: &SynthContext<'_>,
    question: &str,
    bundle: &SeedBundle,
    temperature: f64,
    job: usize,
) -> Result<Option<Generated>> {
    if question.trim().is_empty() {
        return Err(Error::Precondition("code generation needs a question".into()));
    }
    let names = bundle.target_names();
    for attempt in 0..MAX_ATTEMPTS {
        let prompt = render_code_prompt(
            ctx.templates,
            ctx.framework,
            question,
            bundle,
            ctx.graph,
            Variation { job, attempt },
        )?;
        let text = ctx.client.complete(&prompt, temperature, ctx.max_tokens)?;
        let text = text.trim();
        if !text.is_empty() && names.iter().all(|n| mentions_identifier(text, n)) {
            return Ok(Some(Generated {
                text: text.to_string(),
                prompt_hash: content_hash(&[&prompt]),
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quotas {
    pub single: usize,
    pub multi: usize,
}

impl Quotas {
    pub fn get(&self, t: SeedType) -> usize {
        match t {
            SeedType::Single => self.single,
            SeedType::Multi => self.multi,
        }
    }

    pub fn total(&self) -> usize {
        self.single + self.multi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    pub jobs: usize,
    /// Attempts considered by the stall check.
    pub stall_window: usize,
    /// Abort when more than this fraction of the window was skipped.
    pub stall_ratio_millis: usize,
    pub max_tokens: u32,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            jobs: 4,
            stall_window: 50,
            stall_ratio_millis: 900,
            max_tokens: 1024,
        }
    }
}

enum Outcome {
    Tuple(QuestionCodeTuple),
    Skipped(String),
}

/// Round-robin generator over a fixed set of bundles. Job `j` of a seed
/// type uses bundle `j % n` at reuse `j / n`, so results depend only on the
/// job number, never on scheduling.
pub struct Synthesizer<'a> {
    ctx: SynthContext<'a>,
    single: Vec<&'a SeedBundle>,
    multi: Vec<&'a SeedBundle>,
    next_job: [usize; 2],
    recent: [VecDeque<bool>; 2],
    options: SynthOptions,
    pool: rayon::ThreadPool,
    diagnostics: Mutex<Vec<String>>,
}

fn slot(t: SeedType) -> usize {
    match t {
        SeedType::Single => 0,
        SeedType::Multi => 1,
    }
}

impl<'a> Synthesizer<'a> {
    pub fn new(ctx: SynthContext<'a>, bundles: &'a [SeedBundle], options: SynthOptions) -> Result<Self> {
        for b in bundles {
            b.validate()?;
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Synthesizer {
            single: bundles.iter().filter(|b| b.seed_type == SeedType::Single).collect(),
            multi: bundles.iter().filter(|b| b.seed_type == SeedType::Multi).collect(),
            ctx,
            next_job: [0, 0],
            recent: [VecDeque::new(), VecDeque::new()],
            options,
            pool,
            diagnostics: Mutex::new(Vec::new()),
        })
    }

    /// Continue a seed type's round-robin at job `next`, e.g. after an
    /// earlier run already consumed jobs `0..next`.
    pub fn resume_at(&mut self, t: SeedType, next: usize) {
        let s = slot(t);
        self.next_job[s] = self.next_job[s].max(next);
    }

    /// Job number a tuple was produced by.
    pub fn job_of(&self, tuple: &QuestionCodeTuple) -> usize {
        tuple.gen_meta.reuse_index * self.bundles(tuple.seed_type).len() + tuple.gen_meta.bundle_index
    }

    pub fn bundle_count(&self, t: SeedType) -> usize {
        self.bundles(t).len()
    }

    pub fn diagnostics(&self) -> Vec<String> {
        self.diagnostics.lock().expect("diagnostics lock").clone()
    }

    fn bundles(&self, t: SeedType) -> &[&'a SeedBundle] {
        match t {
            SeedType::Single => &self.single,
            SeedType::Multi => &self.multi,
        }
    }

    fn run_job(&self, t: SeedType, job: usize) -> Result<Outcome> {
        let bundles = self.bundles(t);
        let bundle_index = job % bundles.len();
        let reuse = job / bundles.len();
        let bundle = bundles[bundle_index];
        let temperature = reuse_temperature(reuse);
        let Some(q) = generate_question(&self.ctx, bundle, temperature, job)? else {
            return Ok(Outcome::Skipped(format!(
                "{t} bundle {bundle_index} reuse {reuse}: no question named a target API after {MAX_ATTEMPTS} attempts"
            )));
        };
        let Some(c) = generate_code(&self.ctx, &q.text, bundle, temperature, job)? else {
            return Ok(Outcome::Skipped(format!(
                "{t} bundle {bundle_index} reuse {reuse}: no code referenced every target API after {MAX_ATTEMPTS} attempts"
            )));
        };
        Ok(Outcome::Tuple(QuestionCodeTuple {
            question: q.text,
            code: c.text,
            api_nodes: bundle.target_nodes.clone(),
            seed_type: t,
            gen_meta: GenMeta {
                model: self.ctx.client.model_id(),
                temperature,
                question_prompt_hash: q.prompt_hash,
                code_prompt_hash: c.prompt_hash,
                bundle_index,
                reuse_index: reuse,
            },
        }))
    }

    /// Produce `count` more validated tuples of one seed type, continuing
    /// the round-robin where the previous call stopped.
    pub fn generate(&mut self, t: SeedType, count: usize) -> Result<Vec<QuestionCodeTuple>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        if self.bundles(t).is_empty() {
            return Err(Error::Stall {
                seed_type: t.to_string(),
                skipped: 0,
                window: 0,
            });
        }
        let s = slot(t);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let start = self.next_job[s];
            let wave = count - out.len();
            self.next_job[s] += wave;
            let this = &*self;
            let results: Vec<Result<Outcome>> = self
                .pool
                .install(|| (start..start + wave).into_par_iter().map(|j| this.run_job(t, j)).collect());
            let mut flags = Vec::with_capacity(wave);
            for r in results {
                match r? {
                    Outcome::Tuple(tuple) => {
                        flags.push(false);
                        out.push(tuple);
                    }
                    Outcome::Skipped(msg) => {
                        flags.push(true);
                        self.diagnostics.lock().expect("diagnostics lock").push(msg);
                    }
                }
            }
            let window = self.options.stall_window.max(1);
            let recent = &mut self.recent[s];
            for f in flags {
                recent.push_back(f);
                if recent.len() > window {
                    recent.pop_front();
                }
            }
            let skipped = recent.iter().filter(|&&f| f).count();
            if recent.len() == window && skipped * 1000 > window * self.options.stall_ratio_millis {
                return Err(Error::Stall {
                    seed_type: t.to_string(),
                    skipped,
                    window,
                });
            }
        }
        Ok(out)
    }
}

/// Meet both quotas; output ordered by (seed type, bundle index, reuse index).
pub fn synthesize_dataset(synth: &mut Synthesizer<'_>, quotas: Quotas) -> Result<Vec<QuestionCodeTuple>> {
    let mut out = synth.generate(SeedType::Single, quotas.single)?;
    out.extend(synth.generate(SeedType::Multi, quotas.multi)?);
    out.sort_by_key(|t| (t.seed_type, t.gen_meta.bundle_index, t.gen_meta.reuse_index));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ApiEdge, ApiNode, NodeKind};
    use crate::seeds::single_api_seeds;

    fn graph() -> ApiGraph {
        let mut list = ApiNode::new("util.ArrayList", NodeKind::Class, "declare class ArrayList<T>");
        list.description = "A linear container.".into();
        let mut add = ApiNode::new("util.ArrayList.add", NodeKind::Method, "add(element: T): boolean;");
        add.description = "Appends an element.".into();
        ApiGraph::new(
            vec![
                ApiNode::new("util", NodeKind::Namespace, "declare namespace util"),
                list,
                add,
                ApiNode::new("util.ArrayList.remove", NodeKind::Method, "remove(element: T): boolean;"),
                ApiNode::new("util.Empty", NodeKind::Interface, "interface Empty"),
            ],
            vec![
                ApiEdge::contains("util", "util.ArrayList"),
                ApiEdge::contains("util", "util.Empty"),
                ApiEdge::contains("util.ArrayList", "util.ArrayList.add"),
                ApiEdge::contains("util.ArrayList", "util.ArrayList.remove"),
            ],
        )
        .unwrap()
    }

    fn multi(g: &ApiGraph, ids: &[&str]) -> SeedBundle {
        SeedBundle {
            seed_type: SeedType::Multi,
            target_nodes: ids.iter().map(|s| s.to_string()).collect(),
            entries: ids.iter().map(|id| subtree_info(g, id).unwrap()).collect(),
            provenance: None,
        }
    }

    fn ctx<'a>(g: &'a ApiGraph, t: &'a Templates, client: &'a dyn GeneratorClient) -> SynthContext<'a> {
        SynthContext {
            graph: g,
            templates: t,
            framework: "HarmonyOS",
            client,
            max_tokens: 512,
        }
    }

    #[test]
    fn single_prompt_mentions_signature_once() {
        let g = graph();
        let seeds = single_api_seeds(&g).unwrap();
        let list = seeds.iter().find(|s| s.target_nodes[0] == "util.ArrayList").unwrap();
        let p = render_question_prompt(&Templates::default(), "HarmonyOS", list, Variation::default()).unwrap();
        assert_eq!(p.matches("declare class ArrayList<T>").count(), 1);
        assert!(p.contains("add(element: T): boolean;"));
        assert!(p.contains("Target APIs: ArrayList"));
        assert!(!p.contains('{'), "unrendered placeholder in {p}");
    }

    #[test]
    fn multi_prompt_lists_all_targets_with_joint_instruction() {
        let g = graph();
        let b = multi(&g, &["util", "util.ArrayList", "util.Empty"]);
        let p = render_question_prompt(&Templates::default(), "HarmonyOS", &b, Variation::default()).unwrap();
        for sig in ["declare namespace util", "declare class ArrayList<T>", "interface Empty"] {
            assert!(p.contains(&format!("Signature: {sig}")));
        }
        assert!(p.contains("jointly"));
    }

    #[test]
    fn childless_bundle_has_only_own_entry() {
        let g = graph();
        let seeds = single_api_seeds(&g).unwrap();
        let empty = seeds.iter().find(|s| s.target_nodes[0] == "util.Empty").unwrap();
        let entries = format_api_entries(&empty.entries);
        assert_eq!(entries.matches("### ").count(), 1);
        assert!(!entries.contains("Members:"));
    }

    #[test]
    fn mock_question_accepted_first_try() {
        let g = graph();
        let t = Templates::default();
        let client = CachedGenerator::new(MockGenerator::new(1), Arc::new(JsonCache::new()));
        let seeds = single_api_seeds(&g).unwrap();
        let q = generate_question(&ctx(&g, &t, &client), &seeds[0], 0.7, 0).unwrap().unwrap();
        assert!(q.text.contains("util"));
        assert_eq!(client.upstream_calls(), 1);
    }

    #[test]
    fn nameless_mock_exhausts_retries() {
        let g = graph();
        let t = Templates::default();
        let client = CachedGenerator::new(
            MockGenerator::with_mode(1, MockMode::NoApiNames),
            Arc::new(JsonCache::new()),
        );
        let seeds = single_api_seeds(&g).unwrap();
        let q = generate_question(&ctx(&g, &t, &client), &seeds[0], 0.7, 0).unwrap();
        assert!(q.is_none());
        assert_eq!(client.upstream_calls(), 3);
    }

    #[test]
    fn warm_cache_replays_question() {
        let g = graph();
        let t = Templates::default();
        let client = CachedGenerator::new(MockGenerator::new(9), Arc::new(JsonCache::new()));
        let seeds = single_api_seeds(&g).unwrap();
        let c = ctx(&g, &t, &client);
        let a = generate_question(&c, &seeds[1], 0.8, 1).unwrap().unwrap();
        let b = generate_question(&c, &seeds[1], 0.8, 1).unwrap().unwrap();
        assert_eq!(a, b);
        assert_eq!(client.upstream_calls(), 1);
    }

    #[test]
    fn code_prompt_carries_every_child_signature() {
        let g = graph();
        let seeds = single_api_seeds(&g).unwrap();
        let list = seeds.iter().find(|s| s.target_nodes[0] == "util.ArrayList").unwrap();
        let p = render_code_prompt(
            &Templates::default(),
            "HarmonyOS",
            "How do I use ArrayList?",
            list,
            &g,
            Variation::default(),
        )
        .unwrap();
        for child in g.children("util.ArrayList") {
            assert!(p.contains(&g.node(child).unwrap().signature));
        }
        assert!(p.contains("Appends an element."));
    }

    #[test]
    fn multi_code_references_all_targets() {
        let g = graph();
        let t = Templates::default();
        let client = MockGenerator::new(2);
        let b = multi(&g, &["util", "util.ArrayList", "util.Empty"]);
        let c = ctx(&g, &t, &client);
        let q = generate_question(&c, &b, 0.7, 0).unwrap().unwrap();
        let code = generate_code(&c, &q.text, &b, 0.7, 0).unwrap().unwrap();
        for n in ["util", "ArrayList", "Empty"] {
            assert!(mentions_identifier(&code.text, n), "{n} missing in {}", code.text);
        }
        assert!(code.text.starts_with("```"));
    }

    #[test]
    fn round_robin_reuses_bundles() {
        let g = graph();
        let t = Templates::default();
        let client = MockGenerator::new(3);
        let seeds: Vec<_> = single_api_seeds(&g).unwrap().into_iter().take(2).collect();
        let mut s = Synthesizer::new(ctx(&g, &t, &client), &seeds, SynthOptions::default()).unwrap();
        let out = synthesize_dataset(&mut s, Quotas { single: 3, multi: 0 }).unwrap();
        assert_eq!(out.len(), 3);
        let keys: Vec<_> = out.iter().map(|t| (t.gen_meta.bundle_index, t.gen_meta.reuse_index)).collect();
        assert_eq!(keys, [(0, 0), (0, 1), (1, 0)]);
        assert_eq!(out[1].gen_meta.temperature, 0.8);
        assert!(out.iter().all(|t| t.api_nodes == seeds[t.gen_meta.bundle_index].target_nodes));
    }

    #[test]
    fn zero_quotas_give_nothing() {
        let g = graph();
        let t = Templates::default();
        let client = MockGenerator::new(3);
        let seeds = single_api_seeds(&g).unwrap();
        let mut s = Synthesizer::new(ctx(&g, &t, &client), &seeds, SynthOptions::default()).unwrap();
        assert!(synthesize_dataset(&mut s, Quotas { single: 0, multi: 0 }).unwrap().is_empty());
    }

    #[test]
    fn hopeless_generator_stalls() {
        let g = graph();
        let t = Templates::default();
        let client = MockGenerator::with_mode(3, MockMode::NoApiNames);
        let seeds = single_api_seeds(&g).unwrap();
        let opts = SynthOptions {
            stall_window: 10,
            ..Default::default()
        };
        let mut s = Synthesizer::new(ctx(&g, &t, &client), &seeds, opts).unwrap();
        let err = synthesize_dataset(&mut s, Quotas { single: 5, multi: 0 }).unwrap_err();
        assert!(matches!(err, Error::Stall { .. }));
        assert!(!s.diagnostics().is_empty());
    }

    #[test]
    fn output_is_independent_of_parallelism() {
        let g = graph();
        let t = Templates::default();
        let client = MockGenerator::new(4);
        let seeds = single_api_seeds(&g).unwrap();
        let run = |jobs| {
            let opts = SynthOptions { jobs, ..Default::default() };
            let mut s = Synthesizer::new(ctx(&g, &t, &client), &seeds, opts).unwrap();
            synthesize_dataset(&mut s, Quotas { single: 9, multi: 0 }).unwrap()
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn temperature_schedule() {
        assert_eq!(reuse_temperature(0), 0.7);
        assert_eq!(reuse_temperature(2), 0.9);
        assert_eq!(reuse_temperature(3), 1.0);
        assert_eq!(reuse_temperature(40), 1.0);
    }
}
