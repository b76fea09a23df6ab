//! Score container nodes by how surprising their members are.
//!
//! Uses a toy provider that finds short member names predictable. Plug in
//! `LogprobProvider` or `SamplingProvider` to score against a real model.

use std::path::Path;

use kgsynth::graph::build_graph;
use kgsynth::ingest::rules::RuleSet;
use kgsynth::ingest::{extract_corpus, scan_corpus};
use kgsynth::scoring::{score_all, FnProvider, ScoreOptions};

fn main() -> kgsynth::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let files = scan_corpus(&root, &["**/*.md".into()])?;
    let (extracted, _) = extract_corpus(&files, &RuleSet::default())?;
    let mut graph = build_graph(&extracted.code_info, &extracted.text_info)?.graph;

    let provider = FnProvider {
        name: "name-length".into(),
        f: |_context: &str, member: &str| Ok(1.0 / member.len().max(1) as f64),
    };
    let report = score_all(&mut graph, &provider, &ScoreOptions::default())?;

    let mut scores = report.scores;
    scores.sort_by(|a, b| b.ue_score.total_cmp(&a.ue_score));
    for s in &scores {
        println!("{:>6.3} bits  {} ({} facts)", s.ue_score, s.node, s.facts.len());
    }
    Ok(())
}
