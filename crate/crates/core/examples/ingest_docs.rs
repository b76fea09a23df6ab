//! Parse the bundled markdown corpus into code and text records.
//!
//! cargo run --example ingest_docs [corpus_dir]

use std::path::PathBuf;

use kgsynth::ingest::rules::RuleSet;
use kgsynth::ingest::{extract_corpus, scan_corpus};

fn main() -> kgsynth::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus"));
    let files = scan_corpus(&root, &["**/*.md".into()])?;
    let (extracted, diagnostics) = extract_corpus(&files, &RuleSet::default())?;

    for record in &extracted.code_info {
        let indent = "  ".repeat(record.nesting_depth);
        println!("{indent}{}  [{}]", record.declaration_text, record.source_id);
    }
    println!(
        "\n{} files, {} declarations, {} text blocks",
        files.len(),
        extracted.code_info.len(),
        extracted.text_info.len()
    );
    for d in diagnostics {
        println!("warning: {d}");
    }
    Ok(())
}
