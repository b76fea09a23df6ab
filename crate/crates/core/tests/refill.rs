mod common;

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use kgsynth::graph::ApiGraph;
use kgsynth::pipeline::{files, run_stage, Stage};
use kgsynth::postproc::{regenerate_to_size, standardize, Deduper, TrainingRecord};
use kgsynth::synth::{
    synthesize_dataset, GeneratorClient, MockGenerator, Quotas, SynthContext, SynthOptions, Synthesizer, Templates,
};
use kgsynth::{Result, SeedBundle, SeedType};

fn seeded(dir: &Path) -> (ApiGraph, Vec<SeedBundle>) {
    let cfg = common::mock_config(dir, 24, 6);
    for stage in [Stage::Ingest, Stage::BuildGraph, Stage::Score, Stage::Search, Stage::Seeds] {
        run_stage(stage, &cfg).unwrap();
    }
    let graph = ApiGraph::load(&dir.join(files::GRAPH)).unwrap();
    let bundles = serde_json::from_slice(&std::fs::read(dir.join(files::SEEDS)).unwrap()).unwrap();
    (graph, bundles)
}

struct Counting<G> {
    inner: G,
    calls: AtomicUsize,
}

impl<G: GeneratorClient> GeneratorClient for Counting<G> {
    fn model_id(&self) -> String {
        self.inner.model_id()
    }

    fn complete(&self, prompt: &str, temperature: f64, max_tokens: u32) -> Result<String> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.complete(prompt, temperature, max_tokens)
    }
}

/// Valid but identical answers for one API.
struct Parrot(String);

impl GeneratorClient for Parrot {
    fn model_id(&self) -> String {
        "parrot".into()
    }

    fn complete(&self, prompt: &str, _: f64, _: u32) -> Result<String> {
        Ok(if prompt.lines().any(|l| l.trim() == "Question:") {
            format!("```ts\nconst x = {};\n```", self.0)
        } else {
            format!("How do I use {}?", self.0)
        })
    }
}

fn synth<'a>(
    graph: &'a ApiGraph,
    templates: &'a Templates,
    client: &'a dyn GeneratorClient,
    bundles: &'a [SeedBundle],
) -> Synthesizer<'a> {
    let ctx = SynthContext {
        graph,
        templates,
        framework: "HarmonyOS",
        client,
        max_tokens: 512,
    };
    Synthesizer::new(ctx, bundles, SynthOptions::default()).unwrap()
}

#[test]
fn removed_tuples_are_replaced() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, bundles) = seeded(dir.path());
    let templates = Templates::default();
    let client = Counting {
        inner: MockGenerator::new(3),
        calls: AtomicUsize::new(0),
    };
    let mut s = synth(&graph, &templates, &client, &bundles);
    let quotas = Quotas { single: 24, multi: 6 };
    let raw = synthesize_dataset(&mut s, quotas).unwrap();
    let mut deduper = Deduper::new(0.85, &[]).unwrap();
    let mut kept = deduper.offer(raw);
    assert_eq!(kept.len(), 30);

    // Nothing missing: no generator calls, no rounds.
    let before = client.calls.load(Ordering::SeqCst);
    let full = regenerate_to_size(&mut deduper, kept.clone(), quotas, &mut s, 10).unwrap();
    assert_eq!((full.rounds, full.tuples.len()), (0, 30));
    assert_eq!(client.calls.load(Ordering::SeqCst), before);

    // Drop two singles; one round brings the count back.
    let drop: Vec<usize> = kept
        .iter()
        .enumerate()
        .filter(|(_, (_, t))| t.seed_type == SeedType::Single)
        .map(|(i, _)| i)
        .take(2)
        .collect();
    for i in drop.into_iter().rev() {
        kept.remove(i);
    }
    let refilled = regenerate_to_size(&mut deduper, kept, quotas, &mut s, 10).unwrap();
    assert!(refilled.shortfalls.is_empty());
    assert_eq!(refilled.rounds, 1);
    assert_eq!(refilled.tuples.iter().filter(|t| t.seed_type == SeedType::Single).count(), 24);
    assert!(client.calls.load(Ordering::SeqCst) > before);
}

#[test]
fn endless_duplicates_end_in_a_shortfall() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, bundles) = seeded(dir.path());
    let one: Vec<SeedBundle> = bundles.into_iter().filter(|b| b.seed_type == SeedType::Single).take(1).collect();
    let name = one[0].target_names()[0].to_string();
    let templates = Templates::default();
    let client = Parrot(name);
    let mut s = synth(&graph, &templates, &client, &one);
    let quotas = Quotas { single: 3, multi: 0 };
    let raw = synthesize_dataset(&mut s, quotas).unwrap();
    let mut deduper = Deduper::new(0.85, &[]).unwrap();
    let kept = deduper.offer(raw);
    assert_eq!(kept.len(), 1);
    let refilled = regenerate_to_size(&mut deduper, kept, quotas, &mut s, 10).unwrap();
    assert_eq!(refilled.rounds, 10);
    assert_eq!(refilled.tuples.len(), 1);
    let short = &refilled.shortfalls[0];
    assert_eq!((short.seed_type, short.wanted, short.got), (SeedType::Single, 3, 1));
}

#[test]
fn standardized_records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, bundles) = seeded(dir.path());
    let templates = Templates::default();
    let client = MockGenerator::new(5);
    let mut s = synth(&graph, &templates, &client, &bundles);
    let mut tuples = synthesize_dataset(&mut s, Quotas { single: 8, multi: 4 }).unwrap();
    tuples[2].question = "   ".into();
    let (records, rejects) = standardize(&tuples);
    assert_eq!((records.len(), rejects.len()), (11, 1));
    assert_eq!(rejects[0].index, 2);
    let json = serde_json::to_string(&records).unwrap();
    let back: Vec<TrainingRecord> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, records);
    assert!(back.iter().all(|r| r.validate().is_ok() && r.input.is_empty()));
    let first_multi = back.iter().position(|r| r.meta.seed_type == SeedType::Multi).unwrap();
    assert!(back[first_multi..].iter().all(|r| r.meta.seed_type == SeedType::Multi));
}
