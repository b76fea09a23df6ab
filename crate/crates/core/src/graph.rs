//! The API knowledge graph: one node per declared entity, `CONTAINS` edges
//! from nesting and `REFERENCES` edges from parameter/return type mentions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{CodeInfoRecord, KindHint, Parameter, Returns, TextInfoRecord};
use crate::snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Module,
    Namespace,
    Class,
    Interface,
    Enum,
    Method,
    Property,
}

impl NodeKind {
    pub const ALL: [NodeKind; 7] = [
        NodeKind::Module,
        NodeKind::Namespace,
        NodeKind::Class,
        NodeKind::Interface,
        NodeKind::Enum,
        NodeKind::Method,
        NodeKind::Property,
    ];

    /// Containers are the non-leaf kinds: the units of seed selection and search.
    pub fn is_container(self) -> bool {
        !matches!(self, NodeKind::Method | NodeKind::Property)
    }

    /// Kinds a type annotation can name.
    pub fn is_type(self) -> bool {
        matches!(self, NodeKind::Class | NodeKind::Interface | NodeKind::Enum)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Module => "module",
            NodeKind::Namespace => "namespace",
            NodeKind::Class => "class",
            NodeKind::Interface => "interface",
            NodeKind::Enum => "enum",
            NodeKind::Method => "method",
            NodeKind::Property => "property",
        }
    }

    fn from_hint(hint: KindHint) -> Option<Self> {
        Some(match hint {
            KindHint::Module => NodeKind::Module,
            KindHint::Namespace => NodeKind::Namespace,
            KindHint::Class => NodeKind::Class,
            KindHint::Interface => NodeKind::Interface,
            KindHint::Enum => NodeKind::Enum,
            KindHint::Method => NodeKind::Method,
            KindHint::Property => NodeKind::Property,
            KindHint::Unknown => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiNode {
    pub id: String,
    pub name: String,
    pub kind: NodeKind,
    pub signature: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub parameters: Vec<Parameter>,
    #[serde(default)]
    pub returns: Option<Returns>,
    #[serde(default)]
    pub since_version: Option<String>,
    #[serde(default)]
    pub deprecated: bool,
    /// Mean information content (bits) of the node's membership facts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ue_score: Option<f64>,
}

impl ApiNode {
    pub fn new(id: impl Into<String>, kind: NodeKind, signature: impl Into<String>) -> Self {
        let id = id.into();
        let name = id
            .rsplit('.')
            .next()
            .unwrap_or(&id)
            .split('#')
            .next()
            .unwrap_or_default()
            .to_string();
        ApiNode {
            id,
            name,
            kind,
            signature: signature.into(),
            description: String::new(),
            parameters: Vec::new(),
            returns: None,
            since_version: None,
            deprecated: false,
            ue_score: None,
        }
    }

    /// Type annotations from the parameter table and the returns row.
    pub fn type_texts(&self) -> impl Iterator<Item = &str> {
        self.parameters
            .iter()
            .map(|p| p.type_text.as_str())
            .chain(self.returns.iter().map(|r| r.type_text.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "CONTAINS")]
    Contains,
    #[serde(rename = "REFERENCES")]
    References,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ApiEdge {
    pub from: String,
    pub to: String,
    pub relation: Relation,
}

impl ApiEdge {
    pub fn contains(from: &str, to: &str) -> Self {
        ApiEdge {
            from: from.into(),
            to: to.into(),
            relation: Relation::Contains,
        }
    }

    pub fn references(from: &str, to: &str) -> Self {
        ApiEdge {
            from: from.into(),
            to: to.into(),
            relation: Relation::References,
        }
    }
}

/// On-disk shape of `graph.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSnapshot {
    pub nodes: Vec<ApiNode>,
    pub edges: Vec<ApiEdge>,
}

/// Immutable once built; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiGraph {
    nodes: BTreeMap<String, ApiNode>,
    edges: Vec<ApiEdge>,
    children: HashMap<String, Vec<String>>,
    parent: HashMap<String, String>,
    refs_out: HashMap<String, Vec<String>>,
    refs_in: HashMap<String, Vec<String>>,
}

impl ApiGraph {
    /// Validate and index nodes and edges.
    pub fn new(nodes: Vec<ApiNode>, edges: Vec<ApiEdge>) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        for node in nodes {
            if let Some(ue) = node.ue_score {
                if !(ue.is_finite() && ue >= 0.0) {
                    return Err(Error::InvalidGraph(format!("node `{}` has ue_score {ue}", node.id)));
                }
            }
            if let Some(prev) = by_id.insert(node.id.clone(), node) {
                return Err(Error::InvalidGraph(format!("duplicate node id `{}`", prev.id)));
            }
        }

        let edges: Vec<ApiEdge> = edges.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut children: HashMap<String, Vec<String>> = HashMap::new();
        let mut parent: HashMap<String, String> = HashMap::new();
        let mut refs_out: HashMap<String, Vec<String>> = HashMap::new();
        let mut refs_in: HashMap<String, Vec<String>> = HashMap::new();
        for edge in &edges {
            for end in [&edge.from, &edge.to] {
                if !by_id.contains_key(end) {
                    return Err(Error::InvalidGraph(format!("edge endpoint `{end}` is not a node")));
                }
            }
            if edge.from == edge.to {
                return Err(Error::InvalidGraph(format!("self edge on `{}`", edge.from)));
            }
            match edge.relation {
                Relation::Contains => {
                    if let Some(p) = parent.insert(edge.to.clone(), edge.from.clone()) {
                        return Err(Error::InvalidGraph(format!(
                            "`{}` has two CONTAINS parents (`{p}`, `{}`)",
                            edge.to, edge.from
                        )));
                    }
                    children.entry(edge.from.clone()).or_default().push(edge.to.clone());
                }
                Relation::References => {
                    refs_out.entry(edge.from.clone()).or_default().push(edge.to.clone());
                    refs_in.entry(edge.to.clone()).or_default().push(edge.from.clone());
                }
            }
        }
        for list in children.values_mut().chain(refs_out.values_mut()).chain(refs_in.values_mut()) {
            list.sort();
        }

        // Every CONTAINS chain has to end at a root.
        for id in by_id.keys() {
            let mut cur = id;
            let mut steps = 0;
            while let Some(p) = parent.get(cur) {
                steps += 1;
                if steps > by_id.len() {
                    return Err(Error::InvalidGraph(format!("CONTAINS cycle through `{id}`")));
                }
                cur = p;
            }
        }

        Ok(ApiGraph {
            nodes: by_id,
            edges,
            children,
            parent,
            refs_out,
            refs_in,
        })
    }

    pub fn empty() -> Self {
        ApiGraph::new(Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&ApiNode> {
        self.nodes.get(id)
    }

    pub fn get(&self, id: &str) -> Result<&ApiNode> {
        self.nodes.get(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &ApiNode> {
        self.nodes.values()
    }

    /// Edges sorted by (from, to, relation).
    pub fn edges(&self) -> &[ApiEdge] {
        &self.edges
    }

    pub fn count_edges(&self, relation: Relation) -> usize {
        self.edges.iter().filter(|e| e.relation == relation).count()
    }

    /// CONTAINS children in id order.
    pub fn children(&self, id: &str) -> &[String] {
        self.children.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parent(&self, id: &str) -> Option<&str> {
        self.parent.get(id).map(String::as_str)
    }

    pub fn references_from(&self, id: &str) -> &[String] {
        self.refs_out.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn references_to(&self, id: &str) -> &[String] {
        self.refs_in.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Ids with no CONTAINS parent, in id order.
    pub fn roots(&self) -> Vec<&str> {
        self.nodes
            .keys()
            .filter(|id| !self.parent.contains_key(*id))
            .map(String::as_str)
            .collect()
    }

    /// True when `a` and `b` share an edge (CONTAINS a→b or b→a, REFERENCES either way).
    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        self.parent(b) == Some(a)
            || self.parent(a) == Some(b)
            || self.references_from(a).iter().any(|x| x == b)
            || self.references_from(b).iter().any(|x| x == a)
    }

    pub fn set_ue_score(&mut self, id: &str, score: Option<f64>) -> Result<()> {
        let node = self
            .nodes
            .get_mut(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
        node.ue_score = score;
        Ok(())
    }

    pub fn to_snapshot(&self) -> GraphSnapshot {
        GraphSnapshot {
            nodes: self.nodes.values().cloned().collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn from_snapshot(snapshot: GraphSnapshot) -> Result<Self> {
        ApiGraph::new(snapshot.nodes, snapshot.edges)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        snapshot::write_json(path, &self.to_snapshot())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_snapshot(snapshot::read_json(path)?)
    }
}

/// Container ids (module/namespace/class/interface/enum), in id order.
pub fn non_leaf_nodes(graph: &ApiGraph) -> Vec<String> {
    graph
        .nodes()
        .filter(|n| n.kind.is_container())
        .map(|n| n.id.clone())
        .collect()
}

/// Code and semantic information for one node, copied verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoEntry {
    pub id: String,
    pub name: String,
    pub kind: NodeKind,
    pub signature: String,
    pub description: String,
    pub parameters: Vec<Parameter>,
    pub returns: Option<Returns>,
    pub since_version: Option<String>,
    pub deprecated: bool,
}

impl From<&ApiNode> for InfoEntry {
    fn from(n: &ApiNode) -> Self {
        InfoEntry {
            id: n.id.clone(),
            name: n.name.clone(),
            kind: n.kind,
            signature: n.signature.clone(),
            description: n.description.clone(),
            parameters: n.parameters.clone(),
            returns: n.returns.clone(),
            since_version: n.since_version.clone(),
            deprecated: n.deprecated,
        }
    }
}

/// A node followed by its CONTAINS children.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoBundle {
    pub node: InfoEntry,
    pub children: Vec<InfoEntry>,
}

impl InfoBundle {
    pub fn len(&self) -> usize {
        1 + self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> impl Iterator<Item = &InfoEntry> {
        std::iter::once(&self.node).chain(self.children.iter())
    }
}

pub fn subtree_info(graph: &ApiGraph, id: &str) -> Result<InfoBundle> {
    let node = graph.get(id)?;
    let children = graph
        .children(id)
        .iter()
        .map(|c| InfoEntry::from(graph.get(c).expect("indexed child exists")))
        .collect();
    Ok(InfoBundle {
        node: InfoEntry::from(node),
        children,
    })
}

static CONTAINER_NAME: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:namespace|module|class|interface|enum)\s+([A-Za-z_$][\w$]*)").unwrap()
});
static MEMBER_NAME: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^\s*(?:(?:export|declare|default|static|async|function|public|protected|private|abstract|readonly|const|let|get|set)\s+)*([A-Za-z_$][\w$]*)",
    )
    .unwrap()
});
static IDENT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[A-Za-z_$][\w$]*").unwrap());

/// Entity name from a declaration line.
pub fn declaration_name(text: &str, kind: NodeKind) -> Option<String> {
    let re = if kind.is_container() { &CONTAINER_NAME } else { &MEMBER_NAME };
    re.captures(text).map(|c| c[1].to_string())
}

/// Declaration text without a trailing scope opener.
pub fn signature_of(text: &str) -> String {
    text.trim().trim_end_matches('{').trim_end().to_string()
}

/// Identifiers mentioned in a type annotation.
pub fn type_identifiers(type_text: &str) -> impl Iterator<Item = &str> {
    IDENT.find_iter(type_text).map(|m| m.as_str())
}

/// Compare dotted numeric versions; absent sorts lowest.
fn version_key(v: Option<&str>) -> Vec<u64> {
    match v {
        None => Vec::new(),
        Some(s) => s.split('.').map(|p| p.trim().parse().unwrap_or(0)).collect(),
    }
}

#[derive(Debug)]
pub struct GraphBuild {
    pub graph: ApiGraph,
    pub diagnostics: Vec<String>,
}

struct Decl<'a> {
    record: &'a CodeInfoRecord,
    kind: NodeKind,
    name: String,
    signature: String,
    base_id: String,
    parent: Option<usize>,
}

pub fn build_graph(code_info: &[CodeInfoRecord], text_info: &[TextInfoRecord]) -> Result<GraphBuild> {
    let mut diagnostics = Vec::new();

    // Pass 1: qualified base ids from the nesting structure of each file.
    let mut decls: Vec<Decl> = Vec::with_capacity(code_info.len());
    let mut stack: Vec<Option<usize>> = Vec::new();
    let mut current_source: Option<&str> = None;
    for record in code_info {
        if current_source != Some(record.source_id.as_str()) {
            current_source = Some(record.source_id.as_str());
            stack.clear();
        }
        if record.nesting_depth > stack.len() {
            return Err(Error::InvalidGraph(format!(
                "{}#{}: nesting depth {} skips a level",
                record.source_id, record.ordinal, record.nesting_depth
            )));
        }
        stack.truncate(record.nesting_depth);
        let parent = stack.iter().rev().find_map(|s| *s);

        let Some(kind) = NodeKind::from_hint(record.kind_hint) else {
            diagnostics.push(format!(
                "{}#{}: skipped declaration of unknown kind `{}`",
                record.source_id, record.ordinal, record.declaration_text
            ));
            stack.push(None);
            continue;
        };
        let Some(name) = declaration_name(&record.declaration_text, kind) else {
            diagnostics.push(format!(
                "{}#{}: no entity name in `{}`",
                record.source_id, record.ordinal, record.declaration_text
            ));
            stack.push(None);
            continue;
        };
        let base_id = match parent {
            Some(p) => format!("{}.{}", decls[p].base_id, name),
            None => name.clone(),
        };
        stack.push(Some(decls.len()));
        decls.push(Decl {
            record,
            kind,
            signature: signature_of(&record.declaration_text),
            name,
            base_id,
            parent,
        });
    }

    // Pass 2: merge identical redeclarations, suffix method overloads.
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, d) in decls.iter().enumerate() {
        groups.entry(d.base_id.as_str()).or_default().push(i);
    }
    let mut final_id: Vec<String> = vec![String::new(); decls.len()];
    for (base, members) in &groups {
        let first = &decls[members[0]];
        let mut distinct: Vec<usize> = Vec::new();
        for &m in members {
            let d = &decls[m];
            match distinct
                .iter()
                .find(|&&k| decls[k].signature == d.signature && decls[k].kind == d.kind)
            {
                Some(&k) => {
                    if k != m {
                        diagnostics.push(format!(
                            "{}#{}: merged duplicate declaration of `{base}`",
                            d.record.source_id, d.record.ordinal
                        ));
                    }
                    final_id[m] = k.to_string();
                }
                None => {
                    distinct.push(m);
                    final_id[m] = m.to_string();
                }
            }
        }
        if distinct.len() > 1 {
            if let Some(&other) = distinct.iter().find(|&&k| decls[k].kind != NodeKind::Method) {
                let other = if other == distinct[0] { distinct[1] } else { other };
                return Err(Error::IdCollision {
                    id: base.to_string(),
                    first: first.signature.clone(),
                    second: decls[other].signature.clone(),
                });
            }
        }
        let suffixed = distinct.len() > 1;
        let ids: HashMap<usize, String> = distinct
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                let id = if suffixed {
                    format!("{base}#{}", k + 1)
                } else {
                    base.to_string()
                };
                (m, id)
            })
            .collect();
        for &m in members {
            let canonical: usize = final_id[m].parse().expect("index");
            final_id[m] = ids[&canonical].clone();
        }
    }

    // Nodes from the first occurrence of each final id.
    let mut nodes: BTreeMap<String, ApiNode> = BTreeMap::new();
    let mut contains: BTreeSet<(String, String)> = BTreeSet::new();
    let mut record_to_id: HashMap<(&str, usize), &str> = HashMap::new();
    for (i, d) in decls.iter().enumerate() {
        let id = &final_id[i];
        record_to_id.insert((d.record.source_id.as_str(), d.record.ordinal), id.as_str());
        nodes.entry(id.clone()).or_insert_with(|| {
            let mut n = ApiNode::new(id.clone(), d.kind, d.signature.clone());
            n.name = d.name.clone();
            n
        });
        if let Some(p) = d.parent {
            contains.insert((final_id[p].clone(), id.clone()));
        }
    }

    // Text metadata: keep the newest since_version, later position on ties.
    let mut chosen: HashMap<&str, &TextInfoRecord> = HashMap::new();
    for text in text_info {
        let Some(&id) = record_to_id.get(&(text.source_id.as_str(), text.attached_to)) else {
            diagnostics.push(format!(
                "{}: text record attached to missing declaration #{}",
                text.source_id, text.attached_to
            ));
            continue;
        };
        let replace = match chosen.get(id) {
            None => true,
            Some(prev) => {
                version_key(text.since_version.as_deref()) >= version_key(prev.since_version.as_deref())
            }
        };
        if replace {
            chosen.insert(id, text);
        }
    }
    for (id, text) in chosen {
        let node = nodes.get_mut(id).expect("attached id exists");
        node.description = text.description.clone();
        node.parameters = text.parameters.clone();
        node.returns = text.returns.clone();
        node.since_version = text.since_version.clone();
        node.deprecated = text.deprecated;
    }

    // REFERENCES: a node's parameter/return types naming a class, interface or enum.
    let mut type_index: HashMap<&str, Vec<&str>> = HashMap::new();
    for n in nodes.values().filter(|n| n.kind.is_type()) {
        type_index.entry(n.name.as_str()).or_default().push(n.id.as_str());
    }
    let mut references: BTreeSet<(String, String)> = BTreeSet::new();
    for n in nodes.values() {
        for type_text in n.type_texts() {
            for ident in type_identifiers(type_text) {
                for &target in type_index.get(ident).map(Vec::as_slice).unwrap_or(&[]) {
                    if target != n.id {
                        references.insert((n.id.clone(), target.to_string()));
                    }
                }
            }
        }
    }

    let edges = contains
        .into_iter()
        .map(|(f, t)| ApiEdge::contains(&f, &t))
        .chain(references.into_iter().map(|(f, t)| ApiEdge::references(&f, &t)))
        .collect();
    let graph = ApiGraph::new(nodes.into_values().collect(), edges)?;
    Ok(GraphBuild { graph, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{extract_records, RawDocFile, RuleSet};

    fn build(docs: &[(&str, &str)]) -> GraphBuild {
        let rules = RuleSet::default();
        let mut code = Vec::new();
        let mut text = Vec::new();
        for (name, body) in docs {
            let ex = extract_records(&RawDocFile::from_text(name, body), &rules).unwrap();
            code.extend(ex.code_info);
            text.extend(ex.text_info);
        }
        build_graph(&code, &text).unwrap()
    }

    #[test]
    fn class_with_two_methods() {
        let g = build(&[(
            "a.md",
            "```ts\ndeclare class Stack {\n  push(x: number): void;\n  pop(): number;\n}\n```\n",
        )])
        .graph;
        assert_eq!(g.len(), 3);
        assert_eq!(g.count_edges(Relation::Contains), 2);
        assert_eq!(g.roots(), ["Stack"]);
        assert_eq!(g.children("Stack"), ["Stack.pop", "Stack.push"]);
    }

    #[test]
    fn method_returning_other_type_references_it() {
        let doc = "```ts\ndeclare class A {\n  make(): B;\n```\nBuilds a B.\n\n\
                   | Type | Description |\n|---|---|\n| B | new B |\n\n\
                   ```ts\n}\ndeclare class B {\n}\n```\n";
        let g = build(&[("a.md", doc)]).graph;
        assert_eq!(g.references_from("A.make"), ["B"]);
        assert_eq!(g.references_to("B"), ["A.make"]);
        assert_eq!(g.count_edges(Relation::References), 1);
    }

    #[test]
    fn overloads_get_ordinal_suffixes() {
        let g = build(&[(
            "a.md",
            "```ts\ndeclare class C {\n  f(a: number): void;\n  f(a: string): void;\n}\n```\n",
        )])
        .graph;
        assert!(g.node("C.f#1").is_some());
        assert_eq!(g.node("C.f#2").unwrap().signature, "f(a: string): void;");
        assert_eq!(g.node("C.f#2").unwrap().name, "f");
    }

    #[test]
    fn identical_redeclarations_merge() {
        let doc = "```ts\ndeclare namespace util {\n}\n```\n";
        let b = build(&[("a.md", doc), ("b.md", doc)]);
        assert_eq!(b.graph.len(), 1);
        assert_eq!(b.diagnostics.len(), 1);
    }

    #[test]
    fn conflicting_containers_collide() {
        let rules = RuleSet::default();
        let mut code = Vec::new();
        for (name, body) in [
            ("a.md", "```ts\ndeclare class X {\n}\n```\n"),
            ("b.md", "```ts\ndeclare interface X {\n}\n```\n"),
        ] {
            code.extend(extract_records(&RawDocFile::from_text(name, body), &rules).unwrap().code_info);
        }
        let err = build_graph(&code, &[]).unwrap_err();
        assert!(matches!(err, Error::IdCollision { .. }));
    }

    #[test]
    fn newest_version_wins() {
        let doc = "```ts\nfoo(): void;\n```\nOld.\nSince: 9\n\n## again\nNewest.\nSince: 11\n\n## again\nMiddle.\nSince: 10\n";
        let g = build(&[("a.md", doc)]).graph;
        let n = g.node("foo").unwrap();
        assert_eq!(n.description, "Newest.");
        assert_eq!(n.since_version.as_deref(), Some("11"));
    }

    #[test]
    fn version_ties_go_to_later_position() {
        let doc = "```ts\nfoo(): void;\n```\nFirst.\n\n## again\nSecond.\n";
        let g = build(&[("a.md", doc)]).graph;
        assert_eq!(g.node("foo").unwrap().description, "Second.");
    }

    #[test]
    fn dangling_text_is_skipped() {
        let text = TextInfoRecord {
            source_id: "a.md".into(),
            attached_to: 7,
            description: "x".into(),
            parameters: vec![],
            returns: None,
            since_version: None,
            deprecated: false,
        };
        let b = build_graph(&[], &[text]).unwrap();
        assert!(b.graph.is_empty());
        assert_eq!(b.diagnostics.len(), 1);
    }

    #[test]
    fn non_leaf_listing() {
        let g = build(&[(
            "a.md",
            "```ts\ndeclare namespace a {\n  class X {\n  }\n}\ndeclare namespace b {\n  class Y {\n  }\n}\n```\n",
        )])
        .graph;
        assert_eq!(non_leaf_nodes(&g), ["a", "a.X", "b", "b.Y"]);
        assert!(non_leaf_nodes(&ApiGraph::empty()).is_empty());
    }

    #[test]
    fn subtree_bundle_order() {
        let g = build(&[(
            "a.md",
            "```ts\ndeclare class L {\n  remove(i: number): void;\n  add(x: number): void;\n}\n```\n",
        )])
        .graph;
        let b = subtree_info(&g, "L").unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.node.id, "L");
        let kids: Vec<_> = b.children.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(kids, ["L.add", "L.remove"]);
        let leaf = subtree_info(&g, "L.add").unwrap();
        assert_eq!(leaf.len(), 1);
        assert!(matches!(subtree_info(&g, "nope"), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn deprecated_child_visible_in_bundle() {
        let doc = "```ts\ndeclare class L {\n  old(): void;\n```\nOld api.\nDeprecated\n```ts\n}\n```\n";
        let g = build(&[("a.md", doc)]).graph;
        let b = subtree_info(&g, "L").unwrap();
        assert!(b.children[0].deprecated);
    }

    #[test]
    fn graph_rejects_two_parents_and_cycles() {
        let nodes = vec![
            ApiNode::new("a", NodeKind::Class, "class a"),
            ApiNode::new("b", NodeKind::Class, "class b"),
            ApiNode::new("c", NodeKind::Method, "c()"),
        ];
        let two_parents = vec![ApiEdge::contains("a", "c"), ApiEdge::contains("b", "c")];
        assert!(ApiGraph::new(nodes.clone(), two_parents).is_err());
        let cycle = vec![ApiEdge::contains("a", "b"), ApiEdge::contains("b", "a")];
        assert!(ApiGraph::new(nodes.clone(), cycle).is_err());
        let selfie = vec![ApiEdge::references("a", "a")];
        assert!(ApiGraph::new(nodes.clone(), selfie).is_err());
        let dangling = vec![ApiEdge::contains("a", "zzz")];
        assert!(ApiGraph::new(nodes, dangling).is_err());
    }

    #[test]
    fn snapshot_omits_absent_score() {
        let mut g = ApiGraph::new(vec![ApiNode::new("a", NodeKind::Class, "class a")], vec![]).unwrap();
        let json = serde_json::to_string(&g.to_snapshot()).unwrap();
        assert!(!json.contains("ue_score"));
        g.set_ue_score("a", Some(1.5)).unwrap();
        let json = serde_json::to_string(&g.to_snapshot()).unwrap();
        assert!(json.contains("\"ue_score\":1.5"));
        let back = ApiGraph::from_snapshot(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
