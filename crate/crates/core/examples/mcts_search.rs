//! Tree search for high-uncertainty API paths on a small hand-made graph.

use kgsynth::search::{harvest_top_paths, sample_path_nodes, search_all_roots};
use kgsynth::{ApiEdge, ApiGraph, ApiNode, NodeKind, SearchConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn node(id: &str, kind: NodeKind, ue: f64) -> ApiNode {
    let mut n = ApiNode::new(id, kind, format!("{} {id}", kind.as_str()));
    n.ue_score = Some(ue);
    n
}

fn main() -> kgsynth::Result<()> {
    let graph = ApiGraph::new(
        vec![
            node("media", NodeKind::Namespace, 1.2),
            node("media.Player", NodeKind::Class, 4.5),
            node("media.PlayerState", NodeKind::Enum, 2.0),
            node("media.Source", NodeKind::Interface, 3.1),
            node("fs", NodeKind::Namespace, 0.8),
            node("fs.File", NodeKind::Class, 3.7),
        ],
        vec![
            ApiEdge::contains("media", "media.Player"),
            ApiEdge::contains("media", "media.PlayerState"),
            ApiEdge::contains("media", "media.Source"),
            ApiEdge::contains("fs", "fs.File"),
            ApiEdge::references("media.Player", "media.PlayerState"),
            ApiEdge::references("media.Source", "fs.File"),
        ],
    )?;

    let config = SearchConfig {
        iterations_per_root: 200,
        rng_seed: 42,
        ..Default::default()
    };
    let outcome = search_all_roots(&graph, &config, 2)?;
    println!("{} simulated paths", outcome.trajectories.len());

    let top = harvest_top_paths(&outcome.trajectories, &config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for t in &top {
        let picked = sample_path_nodes(t, &mut rng)?;
        println!("{:>6.2}  {}  sample: {}", t.cumulative_reward, t.nodes.join(" > "), picked.join(", "));
    }
    Ok(())
}
