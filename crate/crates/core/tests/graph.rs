mod common;

use kgsynth::graph::{build_graph, ApiGraph, NodeKind, Relation};
use kgsynth::ingest::rules::RuleSet;
use kgsynth::ingest::{extract_corpus, scan_corpus};

fn fixture_graph() -> (ApiGraph, Vec<String>) {
    let files = scan_corpus(&common::fixtures().join("corpus"), &["**/*.md".into()]).unwrap();
    let sources: Vec<&str> = files.iter().map(|f| f.source_id.as_str()).collect();
    assert_eq!(sources, ["data/preferences.md", "net.md", "util.md"]);
    let (ex, diags) = extract_corpus(&files, &RuleSet::default()).unwrap();
    let diags = diags.iter().map(|d| format!("{}:{}", d.path, d.line)).collect();
    (build_graph(&ex.code_info, &ex.text_info).unwrap().graph, diags)
}

#[test]
fn stray_declaration_outside_a_fence_is_reported() {
    let (_, diags) = fixture_graph();
    assert_eq!(diags, ["data/preferences.md:74"]);
}

#[test]
fn overloads_get_distinct_ids() {
    let (g, _) = fixture_graph();
    let first = g.get("preferences.Preferences.get#1").unwrap();
    let second = g.get("preferences.Preferences.get#2").unwrap();
    assert_eq!(first.kind, NodeKind::Method);
    assert_eq!(second.since_version.as_deref(), Some("10"));
    assert_eq!(g.parent("preferences.Preferences.get#2"), Some("preferences.Preferences"));
    assert!(g.get("preferences.Preferences.flush").unwrap().deprecated);
}

#[test]
fn references_follow_type_annotations() {
    let (g, _) = fixture_graph();
    assert_eq!(g.references_from("preferences.Preferences"), ["preferences.Options", "util.ArrayList"]);
    assert!(g.references_to("util.SortOrder").contains(&"util.Comparator".to_string()));
    for e in g.edges().iter().filter(|e| e.relation == Relation::References) {
        assert!(g.get(&e.to).unwrap().kind.is_type(), "{e:?}");
    }
}

#[test]
fn snapshot_round_trips() {
    let (g, _) = fixture_graph();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graph.json");
    g.save(&path).unwrap();
    let back = ApiGraph::load(&path).unwrap();
    assert_eq!(back.to_snapshot(), g.to_snapshot());
}
