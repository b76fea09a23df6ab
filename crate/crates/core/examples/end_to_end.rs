//! The whole pipeline offline: ingest through export, then stats.
//!
//! cargo run --release --example end_to_end [out_dir]

use kgsynth::pipeline::{run_stage, GeneratorKind, PipelineConfig, ProviderKind, QuotaConfig, Stage};

fn main() -> kgsynth::Result<()> {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| "out-example".into());
    let cfg = PipelineConfig {
        corpus_root: concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/corpus").into(),
        benchmark: Some(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/benchmark.json").into()),
        out_dir: out_dir.into(),
        provider: ProviderKind::Mock,
        generator: GeneratorKind::Mock,
        quotas: QuotaConfig { single: 640, multi: 160 },
        ..Default::default()
    };
    let report = run_stage(Stage::RunAll, &cfg)?;
    for line in report.messages.iter().chain(&report.warnings) {
        println!("{line}");
    }
    println!("snapshots in {}", cfg.out_dir.display());
    Ok(())
}
