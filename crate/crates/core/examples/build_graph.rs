//! Build the API knowledge graph and print its containment forest.

use std::path::Path;

use kgsynth::graph::{build_graph, ApiGraph};
use kgsynth::ingest::rules::RuleSet;
use kgsynth::ingest::{extract_corpus, scan_corpus};
use kgsynth::Relation;

fn print_tree(graph: &ApiGraph, id: &str, depth: usize) {
    let node = graph.node(id).expect("known id");
    let refs = graph.references_from(id);
    let suffix = if refs.is_empty() {
        String::new()
    } else {
        format!("  -> {}", refs.join(", "))
    };
    println!("{}{} {}{suffix}", "  ".repeat(depth), node.kind.as_str(), node.id);
    for child in graph.children(id) {
        print_tree(graph, child, depth + 1);
    }
}

fn main() -> kgsynth::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let files = scan_corpus(&root, &["**/*.md".into()])?;
    let (extracted, _) = extract_corpus(&files, &RuleSet::default())?;
    let built = build_graph(&extracted.code_info, &extracted.text_info)?;
    let graph = built.graph;

    for id in graph.roots() {
        print_tree(&graph, id, 0);
    }
    println!(
        "\n{} nodes, {} CONTAINS, {} REFERENCES",
        graph.len(),
        graph.count_edges(Relation::Contains),
        graph.count_edges(Relation::References)
    );
    for d in built.diagnostics {
        println!("note: {d}");
    }
    Ok(())
}
