use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kgsynth::pipeline::{run_stage, GeneratorKind, PipelineConfig, ProviderKind, Stage};
use kgsynth::Error;

#[derive(Parser)]
#[command(name = "kgsynth", version, about = "Build an API knowledge graph from docs and synthesize instruction data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Extract code and text records from the documentation corpus.
    Ingest,
    /// Build graph.json from extracted.json.
    BuildGraph,
    /// Attach uncertainty scores to container nodes.
    Score,
    /// Tree search from every container; keep the best paths.
    Search,
    /// Assemble single- and multi-API seed bundles.
    Seeds,
    /// Generate question/code tuples.
    Synth,
    /// Remove near-duplicates and refill quotas.
    Dedup,
    /// Write dataset.json in training format.
    Export,
    /// Print dataset and graph counts.
    Stats,
    /// Every stage in order.
    RunAll,
}

impl From<Command> for Stage {
    fn from(c: Command) -> Stage {
        match c {
            Command::Ingest => Stage::Ingest,
            Command::BuildGraph => Stage::BuildGraph,
            Command::Score => Stage::Score,
            Command::Search => Stage::Search,
            Command::Seeds => Stage::Seeds,
            Command::Synth => Stage::Synth,
            Command::Dedup => Stage::Dedup,
            Command::Export => Stage::Export,
            Command::Stats => Stage::Stats,
            Command::RunAll => Stage::RunAll,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderArg {
    Logprob,
    Sampling,
    Mock,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Live,
    Mock,
}

#[derive(Args)]
struct Overrides {
    /// TOML config file; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    iterations: Option<usize>,
    #[arg(long, global = true)]
    exploration_c: Option<f64>,
    #[arg(long, global = true)]
    top_k: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long, global = true)]
    benchmark: Option<PathBuf>,
    #[arg(long, global = true)]
    max_rounds: Option<usize>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    quota_single: Option<usize>,
    #[arg(long, global = true)]
    quota_multi: Option<usize>,
    #[arg(long, global = true, value_enum)]
    provider: Option<ProviderArg>,
    #[arg(long, global = true, value_enum)]
    generator: Option<GeneratorArg>,
    /// Print `tracing` logs at this level (e.g. info, debug).
    #[arg(long, global = true, default_value = "info")]
    log: String,
}

impl Overrides {
    fn config(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$($field).+ = v; })*
            };
        }
        set!(
            out_dir => out_dir,
            corpus => corpus_root,
            iterations => search.iterations_per_root,
            exploration_c => search.exploration_c,
            top_k => search.top_k,
            seed => search.rng_seed,
            threshold => dedup_threshold,
            max_rounds => max_rounds,
            jobs => jobs,
            quota_single => quotas.single,
            quota_multi => quotas.multi,
        );
        if let Some(b) = &self.benchmark {
            cfg.benchmark = Some(b.clone());
        }
        if let Some(p) = self.provider {
            cfg.provider = match p {
                ProviderArg::Logprob => ProviderKind::Logprob,
                ProviderArg::Sampling => ProviderKind::Sampling,
                ProviderArg::Mock => ProviderKind::Mock,
            };
        }
        if let Some(g) = self.generator {
            cfg.generator = match g {
                GeneratorArg::Live => GeneratorKind::Live,
                GeneratorArg::Mock => GeneratorKind::Mock,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn error_record(stage: Stage, e: &Error) -> String {
    serde_json::json!({
        "status": "error",
        "stage": stage.as_str(),
        "kind": e.kind(),
        "exit_code": e.exit_code(),
        "message": e.to_string(),
    })
    .to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::new(&cli.opts.log))
        .with_writer(std::io::stderr)
        .init();
    let stage: Stage = cli.command.into();
    let result = cli.opts.config().and_then(|cfg| run_stage(stage, &cfg));
    match result {
        Ok(report) => {
            for line in &report.messages {
                println!("{line}");
            }
            if report.shortfall {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", error_record(stage, &e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
