//! Stage orchestration. Stages communicate only through snapshot files in
//! the output directory, so any stage can be rerun on its own once its
//! inputs exist.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, ApiGraph, NodeKind, Relation};
use crate::ingest::{extract_corpus, rules::RuleSet, scan_corpus, Extracted};
use crate::llm::{ChatClient, EndpointConfig, JsonCache, RetryPolicy};
use crate::postproc::{
    regenerate_to_size, standardize, BenchmarkEntry, Deduper, PostprocReport, TrainingRecord, DEFAULT_MAX_ROUNDS,
    DEFAULT_THRESHOLD,
};
use crate::scoring::{
    score_all, CachedProvider, LogprobProvider, MockProvider, ProbabilityProvider, SamplingProvider, ScoreOptions,
};
use crate::search::{derive_seed, harvest_top_paths, search_all_roots, SearchConfig, Trajectory};
use crate::seeds::{multi_api_seeds, per_path_for_quota, single_api_seeds, SeedBundle, SeedType};
use crate::snapshot::{read_json, write_json, write_lines};
use crate::synth::{
    synthesize_dataset, CachedGenerator, GeneratorClient, LiveGenerator, MockGenerator, QuestionCodeTuple, Quotas,
    SynthContext, SynthOptions, Synthesizer, Templates,
};

pub mod files {
    pub const EXTRACTED: &str = "extracted.json";
    pub const INGEST_DIAGNOSTICS: &str = "ingest-diagnostics.log";
    pub const GRAPH: &str = "graph.json";
    pub const GRAPH_DIAGNOSTICS: &str = "graph-diagnostics.log";
    pub const UE_CACHE: &str = "ue-cache.json";
    pub const SCORE_REPORT: &str = "score-report.json";
    pub const TRAJECTORIES: &str = "trajectories.json";
    pub const SEARCH_DIAGNOSTICS: &str = "search-diagnostics.log";
    pub const SEEDS: &str = "seeds.json";
    pub const RAW_DATASET: &str = "raw_dataset.json";
    pub const GEN_CACHE: &str = "gen-cache.json";
    pub const SYNTH_DIAGNOSTICS: &str = "synth-diagnostics.log";
    pub const DEDUPED: &str = "deduped.json";
    pub const POSTPROC_REPORT: &str = "postproc-report.json";
    pub const DATASET: &str = "dataset.json";
    pub const REJECTS: &str = "rejects.json";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Logprob,
    Sampling,
    Mock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Live,
    Mock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuotaConfig {
    pub single: usize,
    pub multi: usize,
}

impl From<QuotaConfig> for Quotas {
    fn from(q: QuotaConfig) -> Self {
        Quotas {
            single: q.single,
            multi: q.multi,
        }
    }
}

/// Everything a run needs. Field names match the TOML config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus_root: PathBuf,
    pub include_patterns: Vec<String>,
    pub search: SearchConfig,
    pub quotas: QuotaConfig,
    pub dedup_threshold: f64,
    pub provider: ProviderKind,
    pub generator: GeneratorKind,
    pub out_dir: PathBuf,
    /// Framework name used in prompts.
    pub framework: String,
    /// Extraction rules; the bundled set when absent.
    pub rules: Option<PathBuf>,
    /// Directory with `question_gen.txt` and `code_gen.txt`.
    pub prompts_dir: Option<PathBuf>,
    pub benchmark: Option<PathBuf>,
    pub max_rounds: usize,
    pub jobs: usize,
    /// Samples per fact for the sampling provider.
    pub samples: usize,
    pub stall_window: usize,
    pub max_tokens: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus_root: PathBuf::from("docs"),
            include_patterns: vec!["**/*.md".into()],
            search: SearchConfig::default(),
            quotas: QuotaConfig {
                single: 6400,
                multi: 1600,
            },
            dedup_threshold: DEFAULT_THRESHOLD,
            provider: ProviderKind::Logprob,
            generator: GeneratorKind::Live,
            out_dir: PathBuf::from("out"),
            framework: "HarmonyOS".into(),
            rules: None,
            prompts_dir: None,
            benchmark: None,
            max_rounds: DEFAULT_MAX_ROUNDS,
            jobs: 4,
            samples: 10,
            stall_window: 50,
            max_tokens: 1024,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dedup_threshold > 0.0 && self.dedup_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "dedup_threshold {} outside (0, 1]",
                self.dedup_threshold
            )));
        }
        if self.include_patterns.is_empty() {
            return Err(Error::Config("include_patterns is empty".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        self.search.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Ingest,
    BuildGraph,
    Score,
    Search,
    Seeds,
    Synth,
    Dedup,
    Export,
    Stats,
    RunAll,
}

impl Stage {
    /// Every stage `run-all` executes, in order.
    pub const SEQUENCE: [Stage; 9] = [
        Stage::Ingest,
        Stage::BuildGraph,
        Stage::Score,
        Stage::Search,
        Stage::Seeds,
        Stage::Synth,
        Stage::Dedup,
        Stage::Export,
        Stage::Stats,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::BuildGraph => "build-graph",
            Stage::Score => "score",
            Stage::Search => "search",
            Stage::Seeds => "seeds",
            Stage::Synth => "synth",
            Stage::Dedup => "dedup",
            Stage::Export => "export",
            Stage::Stats => "stats",
            Stage::RunAll => "run-all",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::SEQUENCE
            .into_iter()
            .chain([Stage::RunAll])
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage `{s}`")))
    }
}

/// Dataset and graph counts printed by `stats`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub records: usize,
    pub single: usize,
    pub multi: usize,
    /// `single:multi`.
    pub ratio: String,
    pub nodes_by_kind: BTreeMap<String, usize>,
    pub contains_edges: usize,
    pub references_edges: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageReport {
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
    /// A quota could not be met; artifacts were still written.
    pub shortfall: bool,
    pub stats: Option<Stats>,
}

impl StageReport {
    fn merge(&mut self, other: StageReport) {
        self.messages.extend(other.messages);
        self.warnings.extend(other.warnings);
        self.shortfall |= other.shortfall;
        if other.stats.is_some() {
            self.stats = other.stats;
        }
    }

    fn warn(&mut self, msg: String) {
        tracing::warn!("{msg}");
        self.warnings.push(msg);
    }
}

fn require(cfg: &PipelineConfig, stage: Stage, file: &str, producer: Stage) -> Result<PathBuf> {
    let path = cfg.path(file);
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::MissingDependency {
            stage: stage.to_string(),
            requires: producer.to_string(),
            missing: path,
        })
    }
}

/// Run one stage (or all of them) against `cfg.out_dir`.
pub fn run_stage(stage: Stage, cfg: &PipelineConfig) -> Result<StageReport> {
    cfg.validate()?;
    if stage == Stage::RunAll {
        let mut report = StageReport::default();
        for s in Stage::SEQUENCE {
            report.merge(run_stage(s, cfg)?);
        }
        return Ok(report);
    }
    tracing::info!(stage = %stage, "stage started");
    let started = Instant::now();
    let report = match stage {
        Stage::Ingest => ingest(cfg),
        Stage::BuildGraph => build(cfg),
        Stage::Score => score(cfg),
        Stage::Search => search(cfg),
        Stage::Seeds => seeds(cfg),
        Stage::Synth => synth(cfg),
        Stage::Dedup => dedup(cfg),
        Stage::Export => export(cfg),
        Stage::Stats => stats(cfg),
        Stage::RunAll => unreachable!(),
    }?;
    tracing::info!(stage = %stage, elapsed_ms = started.elapsed().as_millis() as u64, "stage finished");
    Ok(report)
}

fn ingest(cfg: &PipelineConfig) -> Result<StageReport> {
    let rules = match &cfg.rules {
        Some(path) => RuleSet::from_file(path)?,
        None => RuleSet::default(),
    };
    let files = scan_corpus(&cfg.corpus_root, &cfg.include_patterns)?;
    let (extracted, diagnostics) = extract_corpus(&files, &rules)?;
    write_json(&cfg.path(files::EXTRACTED), &extracted)?;
    let lines: Vec<String> = diagnostics.iter().map(|d| d.to_string()).collect();
    write_lines(&cfg.path(files::INGEST_DIAGNOSTICS), &lines)?;
    Ok(StageReport {
        messages: vec![format!(
            "ingest: {} files, {} code records, {} text records, {} diagnostics",
            files.len(),
            extracted.code_info.len(),
            extracted.text_info.len(),
            lines.len()
        )],
        ..Default::default()
    })
}

fn build(cfg: &PipelineConfig) -> Result<StageReport> {
    let src = require(cfg, Stage::BuildGraph, files::EXTRACTED, Stage::Ingest)?;
    let extracted: Extracted = read_json(&src)?;
    let built = build_graph(&extracted.code_info, &extracted.text_info)?;
    built.graph.save(&cfg.path(files::GRAPH))?;
    write_lines(&cfg.path(files::GRAPH_DIAGNOSTICS), &built.diagnostics)?;
    let g = &built.graph;
    Ok(StageReport {
        messages: vec![format!(
            "build-graph: {} nodes, {} CONTAINS, {} REFERENCES",
            g.len(),
            g.count_edges(Relation::Contains),
            g.count_edges(Relation::References)
        )],
        ..Default::default()
    })
}

fn endpoint_client() -> Result<ChatClient> {
    Ok(ChatClient::new(EndpointConfig::from_env()?))
}

fn provider(cfg: &PipelineConfig) -> Result<Box<dyn ProbabilityProvider>> {
    Ok(match cfg.provider {
        ProviderKind::Mock => Box::new(MockProvider::Seeded(cfg.search.rng_seed)),
        ProviderKind::Logprob => Box::new(LogprobProvider {
            client: endpoint_client()?,
            framework: cfg.framework.clone(),
        }),
        ProviderKind::Sampling => Box::new(SamplingProvider {
            client: endpoint_client()?,
            framework: cfg.framework.clone(),
            samples: cfg.samples,
        }),
    })
}

fn score(cfg: &PipelineConfig) -> Result<StageReport> {
    let src = require(cfg, Stage::Score, files::GRAPH, Stage::BuildGraph)?;
    let mut graph = ApiGraph::load(&src)?;
    let cache_path = cfg.path(files::UE_CACHE);
    let cache = Arc::new(JsonCache::load_or_default(&cache_path)?);
    let cached = CachedProvider::new(provider(cfg)?, cache.clone());
    let options = ScoreOptions {
        jobs: cfg.jobs,
        retry: match cfg.provider {
            ProviderKind::Mock => RetryPolicy::immediate(1),
            _ => RetryPolicy::default(),
        },
        ..Default::default()
    };
    let result = score_all(&mut graph, &cached, &options);
    cache.save(&cache_path)?;
    let report = result?;
    graph.save(&cfg.path(files::GRAPH))?;
    write_json(&cfg.path(files::SCORE_REPORT), &report)?;
    let mut out = StageReport {
        messages: vec![format!(
            "score: {} containers scored, {} unscored",
            report.scores.len(),
            report.unscored.len()
        )],
        ..Default::default()
    };
    for u in &report.unscored {
        out.warn(format!("node {} unscored: {}", u.node, u.reason));
    }
    Ok(out)
}

fn search(cfg: &PipelineConfig) -> Result<StageReport> {
    require(cfg, Stage::Search, files::SCORE_REPORT, Stage::Score)?;
    let src = require(cfg, Stage::Search, files::GRAPH, Stage::BuildGraph)?;
    let graph = ApiGraph::load(&src)?;
    let outcome = search_all_roots(&graph, &cfg.search, cfg.jobs)?;
    let mut report = StageReport::default();
    let tops = match harvest_top_paths(&outcome.trajectories, &cfg.search) {
        Ok(t) => t,
        Err(e @ Error::EmptySearch { .. }) => {
            report.warn(format!("{e}; multi-API seeds will be skipped"));
            Vec::new()
        }
        Err(e) => return Err(e),
    };
    write_json(&cfg.path(files::TRAJECTORIES), &tops)?;
    let mut diag = outcome.diagnostics.clone();
    diag.extend(outcome.skipped_roots.iter().map(|r| format!("root {r}: no successors, skipped")));
    write_lines(&cfg.path(files::SEARCH_DIAGNOSTICS), &diag)?;
    report.messages.push(format!(
        "search: {} paths simulated, {} kept",
        outcome.trajectories.len(),
        tops.len()
    ));
    Ok(report)
}

/// Seed used for drawing multi-API bundles; distinct from per-root search seeds.
const SEEDS_STREAM: usize = usize::MAX;

fn seeds(cfg: &PipelineConfig) -> Result<StageReport> {
    require(cfg, Stage::Seeds, files::SCORE_REPORT, Stage::Score)?;
    let graph = ApiGraph::load(&require(cfg, Stage::Seeds, files::GRAPH, Stage::BuildGraph)?)?;
    let tops: Vec<Trajectory> = read_json(&require(cfg, Stage::Seeds, files::TRAJECTORIES, Stage::Search)?)?;
    let mut report = StageReport::default();
    let mut bundles = single_api_seeds(&graph)?;
    let singles = bundles.len();
    let mut multis = 0;
    if !tops.is_empty() && cfg.quotas.multi > 0 {
        let per_path = per_path_for_quota(cfg.quotas.multi, tops.len());
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.search.rng_seed, SEEDS_STREAM));
        let (multi, diags) = multi_api_seeds(&graph, &tops, per_path, &mut rng)?;
        for d in diags {
            report.warn(d);
        }
        multis = multi.len();
        bundles.extend(multi);
    }
    write_json(&cfg.path(files::SEEDS), &bundles)?;
    report
        .messages
        .push(format!("seeds: {singles} single-API, {multis} multi-API bundles"));
    Ok(report)
}

fn generator(cfg: &PipelineConfig) -> Result<Box<dyn GeneratorClient>> {
    Ok(match cfg.generator {
        GeneratorKind::Mock => Box::new(MockGenerator::new(cfg.search.rng_seed)),
        GeneratorKind::Live => Box::new(LiveGenerator {
            client: endpoint_client()?,
            retry: RetryPolicy::default(),
        }),
    })
}

fn templates(cfg: &PipelineConfig) -> Result<Templates> {
    match &cfg.prompts_dir {
        Some(dir) => Templates::load_dir(dir),
        None => Ok(Templates::default()),
    }
}

/// Quotas actually pursued: a seed type without bundles gets none.
fn effective_quotas(cfg: &PipelineConfig, bundles: &[SeedBundle], report: &mut StageReport) -> Quotas {
    let mut q: Quotas = cfg.quotas.into();
    for (t, slot) in [(SeedType::Single, &mut q.single), (SeedType::Multi, &mut q.multi)] {
        if *slot > 0 && !bundles.iter().any(|b| b.seed_type == t) {
            report.warn(format!("no {t} seed bundles; dropping the {t} quota of {slot}"));
            *slot = 0;
        }
    }
    q
}

struct SynthInputs {
    graph: ApiGraph,
    bundles: Vec<SeedBundle>,
    templates: Templates,
    cache: Arc<JsonCache<String>>,
}

fn synth_inputs(cfg: &PipelineConfig, stage: Stage) -> Result<SynthInputs> {
    let graph = ApiGraph::load(&require(cfg, stage, files::GRAPH, Stage::BuildGraph)?)?;
    let bundles: Vec<SeedBundle> = read_json(&require(cfg, stage, files::SEEDS, Stage::Seeds)?)?;
    Ok(SynthInputs {
        graph,
        bundles,
        templates: templates(cfg)?,
        cache: Arc::new(JsonCache::load_or_default(&cfg.path(files::GEN_CACHE))?),
    })
}

fn synth_options(cfg: &PipelineConfig) -> SynthOptions {
    SynthOptions {
        jobs: cfg.jobs,
        stall_window: cfg.stall_window,
        max_tokens: cfg.max_tokens,
        ..Default::default()
    }
}

fn synth(cfg: &PipelineConfig) -> Result<StageReport> {
    let inputs = synth_inputs(cfg, Stage::Synth)?;
    let mut report = StageReport::default();
    let quotas = effective_quotas(cfg, &inputs.bundles, &mut report);
    let client = CachedGenerator::new(generator(cfg)?, inputs.cache.clone());
    let ctx = SynthContext {
        graph: &inputs.graph,
        templates: &inputs.templates,
        framework: &cfg.framework,
        client: &client,
        max_tokens: cfg.max_tokens,
    };
    let mut synthesizer = Synthesizer::new(ctx, &inputs.bundles, synth_options(cfg))?;
    let result = synthesize_dataset(&mut synthesizer, quotas);
    write_lines(&cfg.path(files::SYNTH_DIAGNOSTICS), &synthesizer.diagnostics())?;
    inputs.cache.save(&cfg.path(files::GEN_CACHE))?;
    let tuples = result?;
    write_json(&cfg.path(files::RAW_DATASET), &tuples)?;
    report.messages.push(format!(
        "synth: {} tuples, {} generator calls",
        tuples.len(),
        client.upstream_calls()
    ));
    Ok(report)
}

fn dedup(cfg: &PipelineConfig) -> Result<StageReport> {
    let raw: Vec<QuestionCodeTuple> = read_json(&require(cfg, Stage::Dedup, files::RAW_DATASET, Stage::Synth)?)?;
    let inputs = synth_inputs(cfg, Stage::Dedup)?;
    let benchmark: Vec<BenchmarkEntry> = match &cfg.benchmark {
        Some(path) => read_json(path)?,
        None => Vec::new(),
    };
    let mut report = StageReport::default();
    let quotas = effective_quotas(cfg, &inputs.bundles, &mut report);
    let client = CachedGenerator::new(generator(cfg)?, inputs.cache.clone());
    let ctx = SynthContext {
        graph: &inputs.graph,
        templates: &inputs.templates,
        framework: &cfg.framework,
        client: &client,
        max_tokens: cfg.max_tokens,
    };
    let mut synthesizer = Synthesizer::new(ctx, &inputs.bundles, synth_options(cfg))?;
    for t in [SeedType::Single, SeedType::Multi] {
        let next = raw
            .iter()
            .filter(|x| x.seed_type == t)
            .map(|x| synthesizer.job_of(x) + 1)
            .max()
            .unwrap_or(0);
        synthesizer.resume_at(t, next);
    }

    let offered_initial = raw.len();
    let mut deduper = Deduper::new(cfg.dedup_threshold, &benchmark)?;
    let kept = deduper.offer(raw);
    let kept_initial = kept.len();
    let result = regenerate_to_size(&mut deduper, kept, quotas, &mut synthesizer, cfg.max_rounds);
    inputs.cache.save(&cfg.path(files::GEN_CACHE))?;
    let refilled = result?;

    let similarity = deduper.into_report();
    let count = |t: SeedType| refilled.tuples.iter().filter(|x| x.seed_type == t).count();
    let post = PostprocReport {
        offered: offered_initial,
        kept: kept_initial,
        removed_within_dataset: similarity.pairs.len(),
        removed_benchmark: similarity.benchmark_hits.len(),
        regeneration_rounds: refilled.rounds,
        single: count(SeedType::Single),
        multi: count(SeedType::Multi),
        shortfalls: refilled.shortfalls.clone(),
        similarity,
    };
    write_json(&cfg.path(files::DEDUPED), &refilled.tuples)?;
    write_json(&cfg.path(files::POSTPROC_REPORT), &post)?;
    for s in &refilled.shortfalls {
        report.warn(format!("{} quota short: {} of {} ({})", s.seed_type, s.got, s.wanted, s.reason));
    }
    report.shortfall = !refilled.shortfalls.is_empty();
    report.messages.push(format!(
        "dedup: {} of {} kept, {} removed as near-duplicates, {} as benchmark matches, {} regeneration rounds",
        kept_initial, offered_initial, post.removed_within_dataset, post.removed_benchmark, post.regeneration_rounds
    ));
    Ok(report)
}

fn export(cfg: &PipelineConfig) -> Result<StageReport> {
    let tuples: Vec<QuestionCodeTuple> = read_json(&require(cfg, Stage::Export, files::DEDUPED, Stage::Dedup)?)?;
    let (records, rejects) = standardize(&tuples);
    write_json(&cfg.path(files::DATASET), &records)?;
    write_json(&cfg.path(files::REJECTS), &rejects)?;
    let mut report = StageReport {
        messages: vec![format!("export: {} records, {} rejected", records.len(), rejects.len())],
        ..Default::default()
    };
    if !rejects.is_empty() {
        report.warn(format!("{} tuples failed validation; see {}", rejects.len(), files::REJECTS));
    }
    Ok(report)
}

pub fn compute_stats(records: &[TrainingRecord], graph: &ApiGraph) -> Stats {
    let single = records.iter().filter(|r| r.meta.seed_type == SeedType::Single).count();
    let multi = records.len() - single;
    let mut nodes_by_kind: BTreeMap<String, usize> = NodeKind::ALL.iter().map(|k| (k.as_str().to_string(), 0)).collect();
    for n in graph.nodes() {
        *nodes_by_kind.entry(n.kind.as_str().to_string()).or_default() += 1;
    }
    Stats {
        records: records.len(),
        single,
        multi,
        ratio: format!("{single}:{multi}"),
        nodes_by_kind,
        contains_edges: graph.count_edges(Relation::Contains),
        references_edges: graph.count_edges(Relation::References),
    }
}

fn stats(cfg: &PipelineConfig) -> Result<StageReport> {
    let records: Vec<TrainingRecord> = read_json(&require(cfg, Stage::Stats, files::DATASET, Stage::Export)?)?;
    let graph = ApiGraph::load(&require(cfg, Stage::Stats, files::GRAPH, Stage::BuildGraph)?)?;
    let stats = compute_stats(&records, &graph);
    let kinds: Vec<String> = stats.nodes_by_kind.iter().map(|(k, v)| format!("{k}={v}")).collect();
    Ok(StageReport {
        messages: vec![
            format!("records: {} (single:multi = {})", stats.records, stats.ratio),
            format!("nodes: {}", kinds.join(" ")),
            format!(
                "edges: CONTAINS={} REFERENCES={}",
                stats.contains_edges, stats.references_edges
            ),
        ],
        stats: Some(stats),
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = PipelineConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(PipelineConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = PipelineConfig::from_toml_str(
            "corpus_root = \"fixtures\"\nprovider = \"mock\"\n[quotas]\nsingle = 64\nmulti = 16\n[search]\ntop_k = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.quotas, QuotaConfig { single: 64, multi: 16 });
        assert_eq!(cfg.search.top_k, 3);
        assert_eq!(cfg.search.iterations_per_root, SearchConfig::default().iterations_per_root);
        assert_eq!(cfg.provider, ProviderKind::Mock);
    }

    #[test]
    fn bad_config_is_a_usage_error() {
        for text in ["dedup_threshold = 0.0", "nonsense = 1", "provider = \"oracle\""] {
            let err = PipelineConfig::from_toml_str(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}");
        }
    }

    #[test]
    fn stage_names_parse() {
        for s in Stage::SEQUENCE {
            assert_eq!(s.as_str().parse::<Stage>().unwrap(), s);
        }
        assert_eq!("run-all".parse::<Stage>().unwrap(), Stage::RunAll);
        assert!("publish".parse::<Stage>().is_err());
    }

    #[test]
    fn search_without_score_names_score() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            out_dir: dir.path().to_path_buf(),
            ..Default::default()
        };
        let err = run_stage(Stage::Search, &cfg).unwrap_err();
        match &err {
            Error::MissingDependency { requires, .. } => assert_eq!(requires, "score"),
            other => panic!("unexpected {other}"),
        }
        assert_eq!(err.exit_code(), 3);
    }
}
