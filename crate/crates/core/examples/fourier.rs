//! Graph Fourier transform on every shift operator: energy is preserved and
//! the inverse transform recovers the signal.
//!
//! ```bash
//! cargo run --example fourier
//! ```

use modgsp::spectral::extreme_eigenvalues;
use modgsp::{decompose, fixtures, gft, igft, GraphSignal, ShiftKind, ShiftOperator};

fn main() -> modgsp::Result<()> {
    let (g, _) = fixtures::planted_hub();
    let x = GraphSignal::new(g.degrees().to_vec())?.standardized()?;
    let (lmin, lmax) = extreme_eigenvalues(&ShiftOperator::modularity(&g))?;
    println!("modularity spectrum spans [{lmin:.4}, {lmax:.4}]");

    let ops = [
        ShiftOperator::adjacency(&g),
        ShiftOperator::laplacian(&g),
        ShiftOperator::modularity(&g),
        ShiftOperator::modularity_plus(&g, lmax),
        ShiftOperator::modularity_minus(&g, lmin),
    ];
    for op in &ops {
        let basis = decompose(op)?;
        let xh = gft(&basis, x.values())?;
        let back = igft(&basis, &xh)?;
        let err = x
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let lead: Vec<String> = xh.values().iter().take(3).map(|v| format!("{v:+.3}")).collect();
        println!(
            "{:<18} |x| {:.6} |x^| {:.6} round trip {err:.1e} leading [{}]",
            op.kind().to_string(),
            x.norm(),
            xh.norm(),
            lead.join(" ")
        );
    }
    assert_eq!(ops[3].kind(), ShiftKind::ModularityPlus);
    Ok(())
}
