//! Tikhonov denoising with Laplacian and shifted modularity regularizers,
//! each tuned by an oracle sweep over the regularization weight.
//!
//! ```bash
//! cargo run --example denoising
//! ```

use modgsp::denoise::default_mu_grid;
use modgsp::experiments::denoise_study;
use modgsp::{decompose, fixtures, GraphSignal, ShiftOperator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> modgsp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (g, p) = fixtures::planted_partition(&[25, 25, 25, 25], 0.3, 0.03, &mut rng);
    let x = GraphSignal::new(p.labels().iter().map(|&c| c as f64).collect())?.standardized()?;

    let q = ShiftOperator::modularity(&g);
    let qb = decompose(&q)?;
    let bases = [
        decompose(&ShiftOperator::laplacian(&g))?,
        qb.shifted(modgsp::ShiftKind::ModularityPlus, qb.max_eigenvalue())?,
        qb.shifted(modgsp::ShiftKind::ModularityMinus, qb.min_eigenvalue())?,
    ];
    let refs: Vec<_> = bases.iter().collect();
    let levels = denoise_study(&refs, x.values(), &[0.01, 0.25, 1.0], &default_mu_grid(), 7)?;
    for level in &levels {
        println!("sigma2 = {}", level.sigma2);
        for s in &level.sweeps {
            println!(
                "  {:<18} best mu {:>9.4} rms {:.5}",
                s.regularizer.to_string(),
                s.best_mu,
                s.best_rms
            );
        }
    }
    Ok(())
}
