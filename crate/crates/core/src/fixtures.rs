//! Canonical small graphs and random graph generators.
//!
//! `toy10` is a stand-in for the ten-node example with one strong community:
//! a 5-clique on nodes 1..=5, a path 6-7-8-9-10, and the two attachment edges
//! 1-6 and 2-7. [`check_toy10`] verifies the properties the example relies on.

use rand::Rng;

use crate::community::{spectral_bipartition, Partition};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, ShiftOperator, SignVector};
use crate::spectral::decompose;

/// Fixture names understood by [`by_name`].
pub const NAMES: [&str; 4] = ["toy10", "k3", "barbell6", "planted-hub"];

fn from_labeled(edges: &[(u32, u32)]) -> Graph {
    let mut b = GraphBuilder::new();
    for &(i, j) in edges {
        b.add_edge(i.to_string(), j.to_string(), 1.0)
            .expect("fixture edges are valid");
    }
    b.build().expect("fixture graphs are non-empty")
}

/// Triangle on nodes 1, 2, 3.
pub fn k3() -> Graph {
    from_labeled(&[(1, 2), (1, 3), (2, 3)])
}

/// Two triangles {1,2,3} and {4,5,6} joined by the bridge 3-4.
pub fn barbell6() -> Graph {
    from_labeled(&[(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6), (3, 4)])
}

/// Star with one hub (node 1) and `n - 1` leaves.
pub fn star(n: u32) -> Graph {
    let edges: Vec<_> = (2..=n).map(|leaf| (1, leaf)).collect();
    from_labeled(&edges)
}

pub fn toy10() -> Graph {
    let mut edges = Vec::new();
    for i in 1..=5 {
        for j in (i + 1)..=5 {
            edges.push((i, j));
        }
    }
    edges.extend([(6, 7), (7, 8), (8, 9), (9, 10), (1, 6), (2, 7)]);
    from_labeled(&edges)
}

/// Clique `{1..5}` against the weak side `{6..10}`.
pub fn toy10_partition() -> Partition {
    Partition::new((0..10).map(|i| usize::from(i >= 5)).collect()).expect("two communities")
}

/// Verifies the structural claims `toy10` is meant to reproduce.
pub fn check_toy10(g: &Graph) -> Result<()> {
    let fail = |msg: &str| Err(Error::Data(format!("toy10 invariant violated: {msg}")));
    if g.node_count() != 10 {
        return fail("node count");
    }
    let clique = (0..5).all(|i| (0..5).all(|j| i == j || g.weight(i, j) > 0.0));
    if !clique {
        return fail("nodes 1..5 do not form a clique");
    }
    if g.components().iter().any(|&c| c != 0) {
        return fail("graph is disconnected");
    }
    let planted = SignVector::from_membership(&[
        true, true, true, true, true, false, false, false, false, false,
    ]);
    let q = decompose(&ShiftOperator::modularity(g))?;
    if !spectral_bipartition(&q)?.same_split(&planted) {
        return fail("leading modularity eigenvector does not split the clique");
    }
    Ok(())
}

/// Community 0 = {1..5} as a clique plus a hub (node 6) whose edges all
/// leave its community {6, 7, 8, 9}; the rest of community 1 is a path.
pub fn planted_hub() -> (Graph, Partition) {
    let mut edges = Vec::new();
    for i in 1..=5 {
        for j in (i + 1)..=5 {
            edges.push((i, j));
        }
    }
    edges.extend([(6, 1), (6, 2), (6, 3), (7, 8), (8, 9), (9, 7), (7, 4)]);
    let g = from_labeled(&edges);
    let p = Partition::new((0..9).map(|i| usize::from(i >= 5)).collect())
        .expect("two communities");
    (g, p)
}

/// Fixture graph and, where one exists, its reference partition.
pub fn by_name(name: &str) -> Result<(Graph, Option<Partition>)> {
    match name {
        "toy10" => Ok((toy10(), Some(toy10_partition()))),
        "k3" => Ok((k3(), None)),
        "barbell6" => {
            let p = Partition::new(vec![0, 0, 0, 1, 1, 1]).expect("two communities");
            Ok((barbell6(), Some(p)))
        }
        "planted-hub" => {
            let (g, p) = planted_hub();
            Ok((g, Some(p)))
        }
        other => Err(Error::Config(format!(
            "unknown fixture `{other}` (expected one of {})",
            NAMES.join(", ")
        ))),
    }
}

/// Erdős–Rényi graph with uniform `(0.5, 1.5)` weights. An edge `0-1` is
/// added if the draw came out empty so the total weight stays positive.
pub fn random_weighted<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    assert!(n >= 2, "need at least two nodes");
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.5..1.5)));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1, 1.0));
    }
    Graph::from_index_edges(n, &edges).expect("generated edges are valid")
}

/// Planted-partition graph: `sizes[c]` nodes per block, within-block edge
/// probability `p_in`, between-block `p_out`, unit weights.
pub fn planted_partition<R: Rng + ?Sized>(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> (Graph, Partition) {
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect();
    let n = labels.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1, 1.0));
    }
    let g = Graph::from_index_edges(n, &edges).expect("generated edges are valid");
    let p = Partition::new(labels).expect("blocks are non-empty");
    (g, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn toy10_satisfies_its_invariants() {
        let g = toy10();
        assert_eq!(g.edge_count(), 16);
        check_toy10(&g).unwrap();
    }

    #[test]
    fn other_fixtures_have_expected_shape() {
        assert_eq!(k3().edge_count(), 3);
        assert_eq!(barbell6().edge_count(), 7);
        let (g, p) = planted_hub();
        assert_eq!(g.node_count(), p.len());
        assert!(by_name("nope").is_err());
        for name in NAMES {
            let (g, p) = by_name(name).unwrap();
            if let Some(p) = p {
                assert_eq!(p.len(), g.node_count());
            }
        }
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let a = random_weighted(30, 0.2, &mut ChaCha8Rng::seed_from_u64(3));
        let b = random_weighted(30, 0.2, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a.content_hash(), b.content_hash());
        let (g, p) = planted_partition(&[10, 12], 0.5, 0.05, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(g.node_count(), 22);
        assert_eq!(p.community_count(), 2);
    }
}
