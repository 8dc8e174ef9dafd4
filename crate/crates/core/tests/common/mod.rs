//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use modgsp::graph::Graph;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weighted graph with `n` in `lo..=hi`.
pub fn random_graph(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Graph {
    let n = rng.random_range(lo..=hi);
    let p = rng.random_range(0.05..0.6);
    modgsp::fixtures::random_weighted(n, p, rng)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn dense_adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for (i, j, w) in g.edges() {
        a[(i, j)] += w;
        if i != j {
            a[(j, i)] += w;
        }
    }
    a
}

/// Row sums of the dense adjacency.
pub fn dense_degrees(a: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(a.nrows(), a.row_iter().map(|r| r.sum()))
}

pub fn dense_laplacian(a: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_diagonal(&dense_degrees(a)) - a
}

pub fn dense_modularity(a: &DMatrix<f64>) -> DMatrix<f64> {
    let k = dense_degrees(a);
    let two_m = k.sum();
    a - &k * k.transpose() / two_m
}

/// Ascending eigenvalues from nalgebra's solver.
pub fn dense_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
