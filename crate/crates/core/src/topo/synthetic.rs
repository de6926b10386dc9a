//! Seeded generator for small connected test topologies: a random
//! spanning tree plus extra links, each link expanded into two directed
//! edges like an undirected Zoo topology.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

use super::TopologyRecord;

/// Generates a connected topology with `nodes` nodes and
/// `nodes - 1 + extra_links` undirected links. Deterministic in `seed`.
pub fn random_connected(
    name: impl Into<String>,
    nodes: usize,
    extra_links: usize,
    seed: u64,
) -> TopologyRecord {
    assert!(nodes >= 2, "need at least two nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new();
    let ids: Vec<_> = (0..nodes)
        .map(|i| g.add_node(Some(&format!("v{i}"))).unwrap())
        .collect();

    let mut linked: std::collections::BTreeSet<(usize, usize)> = std::collections::BTreeSet::new();
    let add_link = |g: &mut Graph, a: usize, b: usize| {
        g.add_edge(ids[a], ids[b]).unwrap();
        g.add_edge(ids[b], ids[a]).unwrap();
    };

    // Random spanning tree: attach each node to a random earlier one.
    for i in 1..nodes {
        let parent = rng.gen_range(0..i);
        linked.insert((parent.min(i), parent.max(i)));
        add_link(&mut g, parent, i);
    }

    let mut added = 0;
    let mut attempts = 0;
    while added < extra_links && attempts < extra_links * 50 + 100 {
        attempts += 1;
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if linked.contains(&key) {
            continue;
        }
        linked.insert(key);
        add_link(&mut g, key.0, key.1);
        added += 1;
    }

    let links = linked.len();
    TopologyRecord::new(name, g, links)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic() {
        let a = random_connected("t", 10, 5, 42);
        let b = random_connected("t", 10, 5, 42);
        assert_eq!(a.graph.edge_count(), b.graph.edge_count());
        for e in a.graph.edge_ids() {
            assert_eq!(a.graph.endpoints(e).unwrap(), b.graph.endpoints(e).unwrap());
        }
    }

    #[test]
    fn generated_topologies_are_connected() {
        for seed in 0..20 {
            let rec = random_connected("t", 8, 3, seed);
            assert!(rec.connected, "seed {seed} produced a disconnected graph");
            assert_eq!(rec.graph.edge_count(), rec.links * 2);
        }
    }
}
