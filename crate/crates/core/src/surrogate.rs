//! Sign-randomized spectral surrogates and node-level tests against them.
//!
//! A surrogate keeps every spectral magnitude `|x̂_i|` and draws a random
//! sign for a chosen subset of components, so it preserves `‖x‖₂` and the
//! quadratic form of the basis operator. Surrogates are evaluated as
//! `x − 2 Σ_{i flipped} x̂_i u_i`, which equals `U C x̂` and returns `x`
//! unchanged when nothing is flipped.
//!
//! Realization `r` draws its signs from a ChaCha8 stream seeded with the
//! master seed and stream id `r`, so results do not depend on how the
//! realizations are split across threads.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::{Graph, GraphSignal, ShiftKind};
use crate::spectral::{gft, SpectralBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateMode {
    /// Every Laplacian component.
    AllLaplacian,
    /// Every modularity component.
    AllModularity,
    /// Modularity components with `λ > τ`.
    ModularOnly,
    /// Modularity components with `λ < −τ`.
    AntiModularOnly,
}

impl SurrogateMode {
    pub const ALL: [SurrogateMode; 4] = [
        SurrogateMode::AllLaplacian,
        SurrogateMode::AllModularity,
        SurrogateMode::ModularOnly,
        SurrogateMode::AntiModularOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SurrogateMode::AllLaplacian => "all-laplacian",
            SurrogateMode::AllModularity => "all-modularity",
            SurrogateMode::ModularOnly => "modular-only",
            SurrogateMode::AntiModularOnly => "anti-modular-only",
        }
    }

    pub fn basis_kind(self) -> ShiftKind {
        match self {
            SurrogateMode::AllLaplacian => ShiftKind::Laplacian,
            _ => ShiftKind::Modularity,
        }
    }
}

impl fmt::Display for SurrogateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurrogateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all-laplacian" | "laplacian" => Ok(SurrogateMode::AllLaplacian),
            "all-modularity" | "modularity" => Ok(SurrogateMode::AllModularity),
            "modular-only" | "modular" => Ok(SurrogateMode::ModularOnly),
            "anti-modular-only" | "antimodular-only" | "antimodular" | "anti-modular" => {
                Ok(SurrogateMode::AntiModularOnly)
            }
            other => Err(Error::Config(format!("unknown surrogate mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Correction {
    Bonferroni,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateConfig {
    pub mode: SurrogateMode,
    pub count: usize,
    pub seed: u64,
    pub alpha: f64,
    pub correction: Correction,
    /// Test for values that are either higher or lower than expected.
    pub two_sided: bool,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig {
            mode: SurrogateMode::AllModularity,
            count: 10_000,
            seed: 0,
            alpha: 0.05,
            correction: Correction::Bonferroni,
            two_sided: false,
        }
    }
}

impl SurrogateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config("surrogate count must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }

    pub fn threshold(&self, n: usize) -> f64 {
        match self.correction {
            Correction::Bonferroni => self.alpha / n as f64,
            Correction::None => self.alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateTestResult {
    pub p_values: Vec<f64>,
    pub significant: Vec<bool>,
    pub threshold: f64,
    pub realizations_used: usize,
}

impl SurrogateTestResult {
    pub fn significant_count(&self) -> usize {
        self.significant.iter().filter(|&&s| s).count()
    }

    pub fn significant_nodes(&self) -> Vec<usize> {
        (0..self.significant.len()).filter(|&i| self.significant[i]).collect()
    }
}

/// Components of `basis` whose sign is randomized under `mode`.
pub fn flippable_components(basis: &SpectralBasis, mode: SurrogateMode) -> Result<Vec<usize>> {
    if basis.kind() != mode.basis_kind() {
        return Err(Error::Config(format!(
            "{mode} surrogates need a {} basis, got {}",
            mode.basis_kind(),
            basis.kind()
        )));
    }
    let tau = basis.zero_tolerance();
    let keep = |l: f64| match mode {
        SurrogateMode::AllLaplacian | SurrogateMode::AllModularity => true,
        SurrogateMode::ModularOnly => l > tau,
        SurrogateMode::AntiModularOnly => l < -tau,
    };
    Ok((0..basis.dim()).filter(|&i| keep(basis.eigenvalue(i))).collect())
}

/// Signal `U C x̂` for an explicit diagonal `C` with entries `±1`.
pub fn surrogate_with_signs(basis: &SpectralBasis, x: &[f64], signs: &[f64]) -> Result<GraphSignal> {
    check_len(basis.dim(), signs.len())?;
    if signs.iter().any(|&c| c != 1.0 && c != -1.0) {
        return Err(Error::InvalidParameter("sign entries must be ±1".into()));
    }
    let flipped: Vec<usize> = (0..signs.len()).filter(|&i| signs[i] < 0.0).collect();
    let xh = gft(basis, x)?;
    Ok(GraphSignal::from_raw(flip_components(basis, x, xh.values(), &flipped)))
}

fn flip_components(basis: &SpectralBasis, x: &[f64], xh: &[f64], flipped: &[usize]) -> Vec<f64> {
    let mut out = x.to_vec();
    for &i in flipped {
        let c = 2.0 * xh[i];
        for (o, u) in out.iter_mut().zip(basis.eigenvector(i)) {
            *o -= c * u;
        }
    }
    out
}

fn draw_flips<R: Rng + ?Sized>(components: &[usize], rng: &mut R) -> Vec<usize> {
    components.iter().copied().filter(|_| rng.random::<bool>()).collect()
}

/// One surrogate of `x` under `mode`, each eligible sign uniform on `±1`.
pub fn generate_surrogate<R: Rng + ?Sized>(
    basis: &SpectralBasis,
    x: &[f64],
    mode: SurrogateMode,
    rng: &mut R,
) -> Result<GraphSignal> {
    let components = flippable_components(basis, mode)?;
    let xh = gft(basis, x)?;
    let flipped = draw_flips(&components, rng);
    Ok(GraphSignal::from_raw(flip_components(basis, x, xh.values(), &flipped)))
}

/// Random stream used for realization `r` under master seed `seed`.
pub fn realization_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

#[derive(Debug, Clone, Default)]
struct Exceedances {
    upper: Vec<u32>,
    lower: Vec<u32>,
}

impl Exceedances {
    fn new(n: usize) -> Self {
        Exceedances {
            upper: vec![0; n],
            lower: vec![0; n],
        }
    }

    fn record(&mut self, x: &[f64], surrogate: impl Iterator<Item = f64>) {
        for (i, s) in surrogate.enumerate() {
            self.upper[i] += (s >= x[i]) as u32;
            self.lower[i] += (s <= x[i]) as u32;
        }
    }

    fn merge(mut self, other: Exceedances) -> Exceedances {
        if self.upper.is_empty() {
            return other;
        }
        for (a, b) in self.upper.iter_mut().zip(other.upper) {
            *a += b;
        }
        for (a, b) in self.lower.iter_mut().zip(other.lower) {
            *a += b;
        }
        self
    }

    fn into_result(self, count: usize, cfg: &SurrogateConfig, n: usize) -> SurrogateTestResult {
        let denom = 1.0 + count as f64;
        let p_values: Vec<f64> = self
            .upper
            .iter()
            .zip(&self.lower)
            .map(|(&up, &lo)| {
                let p_up = (1.0 + up as f64) / denom;
                if cfg.two_sided {
                    let p_lo = (1.0 + lo as f64) / denom;
                    (2.0 * p_up.min(p_lo)).min(1.0)
                } else {
                    p_up
                }
            })
            .collect();
        let threshold = cfg.threshold(n);
        let significant = p_values.iter().map(|&p| p < threshold).collect();
        SurrogateTestResult {
            p_values,
            significant,
            threshold,
            realizations_used: count,
        }
    }
}

const BATCH: usize = 128;

/// Per-node test of whether `x` is higher than its surrogates under
/// `cfg.mode`, with the add-one p-value `(1 + #{x_surr ≥ x}) / (1 + count)`.
pub fn surrogate_test(
    basis: &SpectralBasis,
    x: &[f64],
    cfg: &SurrogateConfig,
) -> Result<SurrogateTestResult> {
    cfg.validate()?;
    let n = basis.dim();
    check_len(n, x.len())?;
    let components = flippable_components(basis, cfg.mode)?;
    let xh = gft(basis, x)?;
    let xh = xh.values();

    let batches: Vec<(usize, usize)> = (0..cfg.count)
        .step_by(BATCH)
        .map(|start| (start, (start + BATCH).min(cfg.count)))
        .collect();
    let counts = batches
        .par_iter()
        .map(|&(start, end)| {
            let width = end - start;
            // column j holds −2 x̂_i for the components flipped in realization start + j
            let mut delta = DMatrix::<f64>::zeros(n, width);
            for j in 0..width {
                let mut rng = realization_rng(cfg.seed, (start + j) as u64);
                for i in draw_flips(&components, &mut rng) {
                    delta[(i, j)] = -2.0 * xh[i];
                }
            }
            let shifts = basis.eigenvectors() * delta;
            let mut acc = Exceedances::new(n);
            for j in 0..width {
                acc.record(x, x.iter().zip(shifts.column(j).iter()).map(|(a, d)| a + d));
            }
            acc
        })
        .reduce(Exceedances::default, Exceedances::merge);
    Ok(counts.into_result(cfg.count, cfg, n))
}

/// Same test against an explicit list of surrogates.
pub fn test_against_surrogates(
    x: &[f64],
    surrogates: &[GraphSignal],
    cfg: &SurrogateConfig,
) -> Result<SurrogateTestResult> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::Config(format!("alpha {} outside (0, 1)", cfg.alpha)));
    }
    if surrogates.is_empty() {
        return Err(Error::Config("no surrogates supplied".into()));
    }
    let mut acc = Exceedances::new(x.len());
    for s in surrogates {
        check_len(x.len(), s.len())?;
        acc.record(x, s.iter().copied());
    }
    Ok(acc.into_result(surrogates.len(), cfg, x.len()))
}

/// CSV with header `node_id,value,p_value,significant`.
pub fn write_test_csv(
    path: &Path,
    graph: &Graph,
    x: &[f64],
    result: &SurrogateTestResult,
) -> Result<()> {
    check_len(graph.node_count(), x.len())?;
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| Error::Data(format!("{}: {e}", path.display()));
    w.write_record(["node_id", "value", "p_value", "significant"]).map_err(io)?;
    for (i, &xi) in x.iter().enumerate() {
        w.write_record([
            graph.node_id(i).to_string(),
            xi.to_string(),
            result.p_values[i].to_string(),
            result.significant[i].to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
