//! Generate question/code tuples from seed bundles with the offline
//! generator, then print one single-API and one multi-API example.
//!
//! Runs the pipeline up to seeds in a temporary directory first.

use kgsynth::graph::ApiGraph;
use kgsynth::pipeline::{files, run_stage, GeneratorKind, PipelineConfig, ProviderKind, Stage};
use kgsynth::snapshot::read_json;
use kgsynth::synth::{synthesize_dataset, MockGenerator, Quotas, SynthContext, SynthOptions, Synthesizer, Templates};
use kgsynth::{SeedBundle, SeedType};

fn main() -> kgsynth::Result<()> {
    let out = tempfile::tempdir().expect("temporary directory");
    let cfg = PipelineConfig {
        corpus_root: concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/corpus").into(),
        out_dir: out.path().to_path_buf(),
        provider: ProviderKind::Mock,
        generator: GeneratorKind::Mock,
        ..Default::default()
    };
    for stage in [Stage::Ingest, Stage::BuildGraph, Stage::Score, Stage::Search, Stage::Seeds] {
        run_stage(stage, &cfg)?;
    }
    let graph = ApiGraph::load(&cfg.path(files::GRAPH))?;
    let bundles: Vec<SeedBundle> = read_json(&cfg.path(files::SEEDS))?;

    let templates = Templates::default();
    let client = MockGenerator::new(1);
    let ctx = SynthContext {
        graph: &graph,
        templates: &templates,
        framework: "HarmonyOS",
        client: &client,
        max_tokens: 1024,
    };
    let mut synth = Synthesizer::new(ctx, &bundles, SynthOptions::default())?;
    let tuples = synthesize_dataset(&mut synth, Quotas { single: 8, multi: 2 })?;

    for kind in [SeedType::Single, SeedType::Multi] {
        let t = tuples.iter().find(|t| t.seed_type == kind).expect("quota > 0");
        println!("== {kind} {:?} (temperature {})", t.api_nodes, t.gen_meta.temperature);
        println!("{}\n\n{}\n", t.question, t.code);
    }
    println!("{} tuples", tuples.len());
    Ok(())
}
