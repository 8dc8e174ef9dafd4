//! Surrogate significance tests: which nodes carry more signal than random
//! sign flips of its modular, anti-modular or full spectrum allow.
//!
//! ```bash
//! cargo run --release --example surrogates
//! ```

use modgsp::experiments::{surrogate_study, Bases};
use modgsp::surrogate::{SurrogateConfig, SurrogateMode};
use modgsp::{decompose, fixtures, GraphSignal, ShiftOperator};

fn main() -> modgsp::Result<()> {
    let (g, p) = fixtures::planted_hub();
    let bases = Bases {
        laplacian: decompose(&ShiftOperator::laplacian(&g))?,
        modularity: decompose(&ShiftOperator::modularity(&g))?,
    };
    let x = GraphSignal::new(g.degrees().to_vec())?.standardized()?;
    let modes = [
        SurrogateMode::ModularOnly,
        SurrogateMode::AntiModularOnly,
        SurrogateMode::AllModularity,
        SurrogateMode::AllLaplacian,
    ];
    let cfg = SurrogateConfig {
        count: 2000,
        seed: 1,
        alpha: 0.2,
        ..SurrogateConfig::default()
    };
    for out in surrogate_study(&g, &bases, x.values(), Some(&p), &modes, &cfg)? {
        let min_p = out.result.p_values.iter().copied().fold(1.0, f64::min);
        println!(
            "{:<18} threshold {:.4} min p {:.4} significant {:?}",
            out.mode.to_string(),
            out.result.threshold,
            min_p,
            out.significant_nodes
        );
    }
    Ok(())
}
