//! End-to-end studies on a (graph, signal, partition) triple: the four
//! community-aware filters, Laplacian versus modularity sampling, surrogate
//! testing in every mode, and the denoising comparison.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::community::{split_degrees, z_scores, Partition};
use crate::denoise::{oracle_select, OracleSweep};
use crate::error::{check_len, Error, Result};
use crate::filters::{
    apply_window, passband_window, resolve_passband, within_community_variability, FilterSpec,
    PassbandKind, PassbandSpec,
};
use crate::graph::{Graph, GraphSignal, ShiftKind};
use crate::sampling::{
    reconstruct, sample, select_sampling_set, BandlimitingOperator, SamplingSet, DEFAULT_RANK_TOL,
};
use crate::spectral::SpectralBasis;
use crate::stats::{mean, paired_t_test, population_std, PairedTTest};
use crate::surrogate::{surrogate_test, SurrogateConfig, SurrogateMode, SurrogateTestResult};

/// i.i.d. `N(0, σ²)` noise from a seeded stream.
pub fn gaussian_noise(n: usize, sigma2: f64, seed: u64, stream: u64) -> Result<Vec<f64>> {
    let normal = Normal::new(0.0, sigma2.sqrt())
        .map_err(|e| Error::InvalidParameter(format!("noise variance {sigma2}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Laplacian and modularity bases of one graph.
pub struct Bases {
    pub laplacian: SpectralBasis,
    pub modularity: SpectralBasis,
}

impl Bases {
    pub fn get(&self, kind: ShiftKind) -> Result<&SpectralBasis> {
        match kind {
            ShiftKind::Laplacian => Ok(&self.laplacian),
            ShiftKind::Modularity => Ok(&self.modularity),
            other => Err(Error::Config(format!("no {other} basis in this study"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterOutcome {
    pub filter: String,
    pub operator: ShiftKind,
    pub band: PassbandSpec,
    pub delta_c: Option<f64>,
    #[serde(skip)]
    pub output: GraphSignal,
}

/// Resolves `spec` on the appropriate basis and filters `x`.
pub fn run_filter(
    bases: &Bases,
    spec: FilterSpec,
    explicit_kind: ShiftKind,
    x: &[f64],
    partition: Option<&Partition>,
) -> Result<FilterOutcome> {
    let (basis, band) = match spec {
        FilterSpec::Named(kind) => {
            let basis = bases.get(kind.basis_kind().unwrap_or(explicit_kind))?;
            let band = match kind {
                PassbandKind::Smooth | PassbandKind::NonSmooth => {
                    resolve_passband(basis, kind, Some(&bases.modularity))?
                }
                _ => resolve_passband(basis, kind, None)?,
            };
            (basis, band)
        }
        FilterSpec::Band {
            first,
            last,
            weighting,
        } => (bases.get(explicit_kind)?, PassbandSpec::explicit(first, last, weighting)),
    };
    let window = passband_window(basis, &band)?;
    let output = apply_window(basis, &window, x)?;
    let delta_c = partition
        .map(|p| within_community_variability(&output, p))
        .transpose()?;
    Ok(FilterOutcome {
        filter: spec.to_string(),
        operator: basis.kind(),
        band,
        delta_c,
        output,
    })
}

/// The modular, anti-modular, smooth and non-smooth filters of `x`.
pub fn filter_study(bases: &Bases, x: &[f64], partition: Option<&Partition>) -> Result<Vec<FilterOutcome>> {
    FilterSpec::NAMED
        .iter()
        .map(|&spec| run_filter(bases, spec, ShiftKind::Modularity, x, partition))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingParams {
    pub bandwidth: usize,
    pub m: usize,
    pub sigma2: f64,
    pub rank_tol: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            bandwidth: 200,
            m: 500,
            sigma2: 0.01,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingRun {
    pub operator: ShiftKind,
    pub bandwidth: usize,
    pub m: usize,
    #[serde(skip)]
    pub set: SamplingSet,
    pub mean_degree: f64,
    pub degree_std: f64,
    pub effective_rank: usize,
    pub underdetermined: bool,
    pub mse_per_node: Vec<f64>,
    pub mse_mean: f64,
    pub mse_std: f64,
    #[serde(skip)]
    pub reconstruction: GraphSignal,
}

/// Samples the noisy `y` on the optimal set for the leading `bandwidth`
/// components of `basis` and scores the reconstruction against `truth`.
pub fn sampling_run(
    graph: &Graph,
    basis: &SpectralBasis,
    y: &[f64],
    truth: &[f64],
    params: &SamplingParams,
) -> Result<SamplingRun> {
    check_len(graph.node_count(), y.len())?;
    check_len(graph.node_count(), truth.len())?;
    let b = BandlimitingOperator::leading(basis, params.bandwidth)?;
    let set = select_sampling_set(&b, params.m)?;
    let rec = reconstruct(&b, &set, &sample(&set, y)?, params.rank_tol)?;
    if rec.underdetermined() {
        log::warn!(
            "{} reconstruction is underdetermined: rank {} < bandwidth {}",
            basis.kind(),
            rec.effective_rank,
            rec.bandwidth
        );
    }
    let degrees: Vec<f64> = set.nodes().iter().map(|&i| graph.degree(i)).collect();
    let sq: Vec<f64> = rec.signal.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).collect();
    Ok(SamplingRun {
        operator: basis.kind(),
        bandwidth: params.bandwidth,
        m: params.m,
        mean_degree: mean(&degrees),
        degree_std: population_std(&degrees),
        effective_rank: rec.effective_rank,
        underdetermined: rec.underdetermined(),
        mse_mean: mean(&sq),
        mse_std: population_std(&sq),
        mse_per_node: sq,
        set,
        reconstruction: rec.signal,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingComparison {
    pub laplacian: SamplingRun,
    pub modularity: SamplingRun,
    /// Paired over nodes, modularity errors minus Laplacian errors.
    pub t_test: PairedTTest,
    pub shared_nodes: usize,
    pub seed: u64,
    pub sigma2: f64,
}

/// Both pipelines on the same noise realization.
pub fn sampling_comparison(
    graph: &Graph,
    bases: &Bases,
    x: &[f64],
    params: &SamplingParams,
    seed: u64,
) -> Result<SamplingComparison> {
    let noise = gaussian_noise(x.len(), params.sigma2, seed, 0)?;
    let y = add(x, &noise);
    let laplacian = sampling_run(graph, &bases.laplacian, &y, x, params)?;
    let modularity = sampling_run(graph, &bases.modularity, &y, x, params)?;
    let t_test = paired_t_test(&modularity.mse_per_node, &laplacian.mse_per_node)?;
    let l_nodes: std::collections::HashSet<usize> = laplacian.set.nodes().iter().copied().collect();
    let shared_nodes = modularity.set.nodes().iter().filter(|i| l_nodes.contains(i)).count();
    Ok(SamplingComparison {
        laplacian,
        modularity,
        t_test,
        shared_nodes,
        seed,
        sigma2: params.sigma2,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RoleSummary {
    pub z_in_mean: Option<f64>,
    pub z_in_std: Option<f64>,
    pub z_out_mean: Option<f64>,
    pub z_out_std: Option<f64>,
}

/// Mean and spread of the defined z-scores of `nodes`.
pub fn role_summary(graph: &Graph, partition: &Partition, nodes: &[usize]) -> Result<RoleSummary> {
    let z = z_scores(graph, partition)?;
    let pick = |v: &[Option<f64>]| -> Vec<f64> { nodes.iter().filter_map(|&i| v[i]).collect() };
    let stats = |v: Vec<f64>| {
        if v.is_empty() {
            (None, None)
        } else {
            (Some(mean(&v)), Some(population_std(&v)))
        }
    };
    let (z_in_mean, z_in_std) = stats(pick(&z.z_in));
    let (z_out_mean, z_out_std) = stats(pick(&z.z_out));
    Ok(RoleSummary {
        z_in_mean,
        z_in_std,
        z_out_mean,
        z_out_std,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SurrogateOutcome {
    pub mode: SurrogateMode,
    pub significant: usize,
    pub significant_nodes: Vec<String>,
    pub roles: Option<RoleSummary>,
    #[serde(skip)]
    pub result: SurrogateTestResult,
}

/// Surrogate test of `x` under each of `modes`.
pub fn surrogate_study(
    graph: &Graph,
    bases: &Bases,
    x: &[f64],
    partition: Option<&Partition>,
    modes: &[SurrogateMode],
    base: &SurrogateConfig,
) -> Result<Vec<SurrogateOutcome>> {
    modes
        .iter()
        .map(|&mode| {
            let cfg = SurrogateConfig { mode, ..base.clone() };
            let result = surrogate_test(bases.get(mode.basis_kind())?, x, &cfg)?;
            let nodes = result.significant_nodes();
            let roles = partition.map(|p| role_summary(graph, p, &nodes)).transpose()?;
            Ok(SurrogateOutcome {
                mode,
                significant: nodes.len(),
                significant_nodes: nodes.iter().map(|&i| graph.node_id(i).to_string()).collect(),
                roles,
                result,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DenoiseLevel {
    pub sigma2: f64,
    pub sweeps: Vec<OracleSweep>,
}

impl DenoiseLevel {
    pub fn best_rms(&self, kind: ShiftKind) -> Option<f64> {
        self.sweeps.iter().find(|s| s.regularizer == kind).map(|s| s.best_rms)
    }
}

/// For each noise level, corrupts the unit-norm `x` once and sweeps every
/// regularizer's `μ` grid against the clean signal.
pub fn denoise_study(
    bases: &[&SpectralBasis],
    x: &[f64],
    sigma2: &[f64],
    grid: &[f64],
    seed: u64,
) -> Result<Vec<DenoiseLevel>> {
    let truth = GraphSignal::new(x.to_vec())?.unit_norm()?;
    sigma2
        .iter()
        .enumerate()
        .map(|(k, &s2)| {
            let noise = gaussian_noise(truth.len(), s2, seed, k as u64)?;
            let y = add(&truth, &noise);
            let sweeps = bases
                .iter()
                .map(|b| oracle_select(b, &y, &truth, grid))
                .collect::<Result<Vec<_>>>()?;
            Ok(DenoiseLevel { sigma2: s2, sweeps })
        })
        .collect()
}

/// `(k_in, k_out, z_in, z_out)` for one node.
pub type RoleRow = (f64, f64, Option<f64>, Option<f64>);

/// Per-node role scores.
pub fn role_table(graph: &Graph, partition: &Partition) -> Result<Vec<RoleRow>> {
    let (kin, kout) = split_degrees(graph, partition)?;
    let z = z_scores(graph, partition)?;
    Ok((0..graph.node_count())
        .map(|i| (kin[i], kout[i], z.z_in[i], z.z_out[i]))
        .collect())
}
