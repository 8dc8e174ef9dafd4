//! Laplacian and modularity spectra of the ten-node toy graph, the two sign
//! splits they induce, and the adjacency/modularity interlacing check.
//!
//! ```bash
//! cargo run --example spectrum
//! ```

use modgsp::community::{cut_size, spectral_bipartition};
use modgsp::graph::modularity_index;
use modgsp::spectral::interlaces;
use modgsp::{decompose, fixtures, ShiftOperator};

fn main() -> modgsp::Result<()> {
    let g = fixtures::toy10();
    let l = decompose(&ShiftOperator::laplacian(&g))?;
    let q = decompose(&ShiftOperator::modularity(&g))?;
    let a = decompose(&ShiftOperator::adjacency(&g))?;

    println!("{} nodes, {} edges", g.node_count(), g.edge_count());
    println!("  k   lambda_L   lambda_Q");
    for k in 0..g.node_count() {
        println!("{k:>3} {:>10.4} {:>10.4}", l.eigenvalue(k), q.eigenvalue(k));
    }
    let (pos, zero, neg) = q.sign_counts();
    println!("modularity eigenvalues: {pos} positive, {zero} zero, {neg} negative");

    for (name, basis) in [("modularity", &q), ("fiedler", &l)] {
        let s = spectral_bipartition(basis)?;
        let side: Vec<&str> = (0..g.node_count())
            .filter(|&i| s.values()[i] > 0.0)
            .map(|i| g.node_id(i))
            .collect();
        println!(
            "{name:>10} split: {{{}}} cut {:.1} modularity {:.4}",
            side.join(", "),
            cut_size(&g, &s)?,
            modularity_index(&g, &s)?
        );
    }

    let tol = 1e-9;
    println!("A interlaces Q: {}", interlaces(a.eigenvalues(), q.eigenvalues(), tol));
    Ok(())
}
