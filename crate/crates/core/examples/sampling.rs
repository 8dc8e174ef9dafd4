//! Bandlimited sampling and reconstruction with Laplacian and modularity
//! bases on a planted-partition graph, compared by a paired t-test.
//!
//! ```bash
//! cargo run --example sampling
//! ```

use modgsp::experiments::{sampling_comparison, Bases, SamplingParams};
use modgsp::sampling::{reconstruct, sample, select_sampling_set, BandlimitingOperator, DEFAULT_RANK_TOL};
use modgsp::{decompose, fixtures, GraphSignal, ShiftOperator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> modgsp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (g, _) = fixtures::planted_partition(&[40, 40, 40], 0.25, 0.02, &mut rng);
    let bases = Bases {
        laplacian: decompose(&ShiftOperator::laplacian(&g))?,
        modularity: decompose(&ShiftOperator::modularity(&g))?,
    };

    // a noiseless bandlimited signal is recovered exactly
    let b = BandlimitingOperator::leading(&bases.modularity, 10)?;
    let coeffs: Vec<f64> = (0..10).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let x = b.synthesize(&coeffs)?;
    let set = select_sampling_set(&b, 15)?;
    let rec = reconstruct(&b, &set, &sample(&set, x.values())?, DEFAULT_RANK_TOL)?;
    let err = x
        .values()
        .iter()
        .zip(rec.signal.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("bandlimited signal from {} of {} nodes: max error {err:.2e}", set.len(), g.node_count());

    let signal = GraphSignal::new(g.degrees().to_vec())?.standardized()?;
    let params = SamplingParams {
        bandwidth: 20,
        m: 40,
        sigma2: 0.01,
        ..SamplingParams::default()
    };
    let cmp = sampling_comparison(&g, &bases, signal.values(), &params, 3)?;
    for run in [&cmp.laplacian, &cmp.modularity] {
        println!(
            "{:<10} mean degree {:>6.2} mse {:.4} +/- {:.4} rank {}/{}",
            run.operator.to_string(),
            run.mean_degree,
            run.mse_mean,
            run.mse_std,
            run.effective_rank,
            run.bandwidth
        );
    }
    println!(
        "paired t = {:.3}, p = {:.3e}, shared sampled nodes {}",
        cmp.t_test.t_statistic, cmp.t_test.p_value, cmp.shared_nodes
    );
    Ok(())
}
