//! The `modgsp` command line.
//!
//! Every command resolves its configuration in the order defaults, config
//! file (`--config`, JSON), command-line flags, and writes the resolved
//! configuration next to its results.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::community::{spectral_bipartition, Partition};
use crate::denoise::{default_mu_grid, log_grid, REGULARIZERS};
use crate::error::{Error, Result};
use crate::experiments::{
    denoise_study, gaussian_noise, role_table, run_filter, sampling_comparison, sampling_run,
    surrogate_study, Bases, SamplingParams, SamplingRun,
};
use crate::filters::FilterSpec;
use crate::fixtures;
use crate::graph::{null_model_row_sums, quadratic_form, Graph, GraphSignal, ShiftKind, ShiftOperator};
use crate::io;
use crate::openflights::{load_openflights, IngestOptions};
use crate::sampling::DEFAULT_RANK_TOL;
use crate::spectral::{decompose, interlaces, SpectralBasis};
use crate::surrogate::{write_test_csv, Correction, SurrogateConfig, SurrogateMode};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub graph: Option<PathBuf>,
    pub signal: Option<PathBuf>,
    pub partition: Option<PathBuf>,
    pub fixture: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Operators whose spectra are exported besides `L` and `Q`.
    pub extra_operators: Vec<ShiftKind>,
    pub interlacing_tol: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            extra_operators: Vec::new(),
            interlacing_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub filters: Vec<String>,
    /// Operator for `band:` filters.
    pub operator: ShiftKind,
    /// Nodes whose values are reported individually.
    pub nodes: Vec<String>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            filters: FilterSpec::NAMED.iter().map(|f| f.to_string()).collect(),
            operator: ShiftKind::Modularity,
            nodes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub operator: ShiftKind,
    pub compare: bool,
    pub bandwidth: usize,
    pub m: usize,
    pub sigma2: f64,
    pub rank_tol: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        let p = SamplingParams::default();
        SampleConfig {
            operator: ShiftKind::Modularity,
            compare: false,
            bandwidth: p.bandwidth,
            m: p.m,
            sigma2: p.sigma2,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

impl SampleConfig {
    fn params(&self) -> SamplingParams {
        SamplingParams {
            bandwidth: self.bandwidth,
            m: self.m,
            sigma2: self.sigma2,
            rank_tol: self.rank_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateSection {
    pub modes: Vec<SurrogateMode>,
    pub count: usize,
    pub alpha: f64,
    pub correction: Correction,
    pub two_sided: bool,
}

impl Default for SurrogateSection {
    fn default() -> Self {
        let d = SurrogateConfig::default();
        SurrogateSection {
            modes: SurrogateMode::ALL.to_vec(),
            count: d.count,
            alpha: d.alpha,
            correction: d.correction,
            two_sided: d.two_sided,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl MuGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite()) || self.count == 0 {
            return Err(Error::Config(format!(
                "mu grid needs 0 < min <= max and count >= 1, got {}:{}:{}",
                self.min, self.max, self.count
            )));
        }
        Ok(log_grid(self.min, self.max, self.count))
    }
}

impl std::str::FromStr for MuGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("mu grid `{s}` is not lo:hi:count"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(MuGrid {
            min: parts[0].parse().map_err(|_| bad())?,
            max: parts[1].parse().map_err(|_| bad())?,
            count: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

impl Default for MuGrid {
    fn default() -> Self {
        let g = default_mu_grid();
        MuGrid {
            min: g[0],
            max: g[g.len() - 1],
            count: g.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenoiseConfig {
    pub sigma2: Vec<f64>,
    pub regularizers: Vec<ShiftKind>,
    pub mu_grid: MuGrid,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        DenoiseConfig {
            sigma2: vec![0.01, 0.25, 1.0],
            regularizers: REGULARIZERS.to_vec(),
            mu_grid: MuGrid::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub dir: Option<PathBuf>,
    pub options: IngestOptions,
}

/// Parameters of every command; each run uses its own section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub inputs: InputConfig,
    pub spectrum: SpectrumConfig,
    pub filter: FilterConfig,
    pub sample: SampleConfig,
    pub surrogate: SurrogateSection,
    pub denoise: DenoiseConfig,
    pub ingest: IngestConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            out_dir: PathBuf::from("out"),
            cache_dir: None,
            inputs: InputConfig::default(),
            spectrum: SpectrumConfig::default(),
            filter: FilterConfig::default(),
            sample: SampleConfig::default(),
            surrogate: SurrogateSection::default(),
            denoise: DenoiseConfig::default(),
            ingest: IngestConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Parser)]
#[command(name = "modgsp", version, about = "Graph signal processing with the modularity matrix")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Directory for cached eigendecompositions.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct InputArgs {
    /// Edge list `src,dst[,weight]`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Signal `node_id,value`; defaults to the standardized degree.
    #[arg(long)]
    pub signal: Option<PathBuf>,
    /// Partition `node_id,community_id`.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Built-in graph instead of `--graph`.
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Laplacian and modularity spectra, cross quadratic forms, null-model row sums.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        /// Additional operator spectra to export.
        #[arg(long = "operator")]
        operators: Vec<String>,
    },
    /// Community-aware spectral filtering.
    Filter {
        #[command(flatten)]
        input: InputArgs,
        /// modular | antimodular | smooth | nonsmooth | band:N1:N2:flat | band:N1:N2:absweighted
        #[arg(long = "filter")]
        filters: Vec<String>,
        /// Operator for band filters.
        #[arg(long)]
        operator: Option<String>,
        /// Node whose filtered values are reported.
        #[arg(long = "node")]
        nodes: Vec<String>,
    },
    /// Optimal sampling set and reconstruction of a noisy signal.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        bandwidth: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        rank_tol: Option<f64>,
        /// Run the Laplacian and modularity pipelines and compare them.
        #[arg(long)]
        compare: bool,
    },
    /// Node-wise surrogate testing.
    Surrogate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long = "mode")]
        modes: Vec<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        two_sided: bool,
        /// Compare p-values to alpha instead of alpha / N.
        #[arg(long)]
        no_correction: bool,
    },
    /// Regularized denoising with oracle choice of mu.
    Denoise {
        #[command(flatten)]
        input: InputArgs,
        /// Noise variances, comma separated.
        #[arg(long, value_delimiter = ',')]
        sigma2: Vec<f64>,
        /// Regularizers, comma separated.
        #[arg(long, value_delimiter = ',')]
        regularizers: Vec<String>,
        /// Log-spaced grid `lo:hi:count`.
        #[arg(long)]
        mu_grid: Option<String>,
    },
    /// Builds the airport graph from `airports.dat` and `routes.dat`.
    IngestOpenflights {
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Keep nodes outside the largest connected component.
        #[arg(long)]
        keep_all_components: bool,
        /// Fail on airports without a continent instead of dropping them.
        #[arg(long)]
        strict_continents: bool,
    },
    /// Writes a built-in graph as edge list and partition files.
    Fixture {
        /// Fixture name or `all`.
        name: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Filter { .. } => "filter",
            Command::Sample { .. } => "sample",
            Command::Surrogate { .. } => "surrogate",
            Command::Denoise { .. } => "denoise",
            Command::IngestOpenflights { .. } => "ingest-openflights",
            Command::Fixture { .. } => "fixture",
        }
    }
}

fn merge_inputs(cfg: &mut InputConfig, a: &InputArgs) {
    if a.graph.is_some() {
        cfg.graph = a.graph.clone();
        cfg.fixture = None;
    }
    if a.fixture.is_some() {
        cfg.fixture = a.fixture.clone();
        cfg.graph = None;
    }
    if a.signal.is_some() {
        cfg.signal = a.signal.clone();
    }
    if a.partition.is_some() {
        cfg.partition = a.partition.clone();
    }
}

fn parse_all<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>> {
    items.iter().map(|s| s.parse()).collect()
}

/// Applies the command's flags on top of `cfg`.
pub fn resolve(cli: &Cli, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    match &cli.command {
        Command::Spectrum { input, operators } => {
            merge_inputs(&mut cfg.inputs, input);
            if !operators.is_empty() {
                cfg.spectrum.extra_operators = parse_all(operators)?;
            }
        }
        Command::Filter {
            input,
            filters,
            operator,
            nodes,
        } => {
            merge_inputs(&mut cfg.inputs, input);
            if !filters.is_empty() {
                cfg.filter.filters = filters.clone();
            }
            if let Some(op) = operator {
                cfg.filter.operator = op.parse()?;
            }
            if !nodes.is_empty() {
                cfg.filter.nodes = nodes.clone();
            }
        }
        Command::Sample {
            input,
            operator,
            bandwidth,
            m,
            sigma2,
            rank_tol,
            compare,
        } => {
            merge_inputs(&mut cfg.inputs, input);
            let s = &mut cfg.sample;
            if let Some(op) = operator {
                s.operator = op.parse()?;
            }
            s.bandwidth = bandwidth.unwrap_or(s.bandwidth);
            s.m = m.unwrap_or(s.m);
            s.sigma2 = sigma2.unwrap_or(s.sigma2);
            s.rank_tol = rank_tol.unwrap_or(s.rank_tol);
            s.compare |= *compare;
        }
        Command::Surrogate {
            input,
            modes,
            count,
            alpha,
            two_sided,
            no_correction,
        } => {
            merge_inputs(&mut cfg.inputs, input);
            let s = &mut cfg.surrogate;
            if !modes.is_empty() {
                s.modes = parse_all(modes)?;
            }
            s.count = count.unwrap_or(s.count);
            s.alpha = alpha.unwrap_or(s.alpha);
            s.two_sided |= *two_sided;
            if *no_correction {
                s.correction = Correction::None;
            }
        }
        Command::Denoise {
            input,
            sigma2,
            regularizers,
            mu_grid,
        } => {
            merge_inputs(&mut cfg.inputs, input);
            let d = &mut cfg.denoise;
            if !sigma2.is_empty() {
                d.sigma2 = sigma2.clone();
            }
            if !regularizers.is_empty() {
                d.regularizers = parse_all(regularizers)?;
            }
            if let Some(g) = mu_grid {
                d.mu_grid = g.parse()?;
            }
        }
        Command::IngestOpenflights {
            dir,
            keep_all_components,
            strict_continents,
        } => {
            if dir.is_some() {
                cfg.ingest.dir = dir.clone();
            }
            if *keep_all_components {
                cfg.ingest.options.restrict_to_largest_component = false;
            }
            if *strict_continents {
                cfg.ingest.options.drop_unmappable_continent = false;
            }
        }
        Command::Fixture { .. } => {}
    }
    Ok(cfg)
}

/// Graph, signal and optional partition named by the inputs.
pub struct Inputs {
    pub graph: Graph,
    pub signal: GraphSignal,
    pub partition: Option<Partition>,
}

pub fn load_inputs(cfg: &InputConfig) -> Result<Inputs> {
    let (graph, fixture_partition) = match (&cfg.graph, &cfg.fixture) {
        (Some(path), _) => (io::read_edge_list(path)?, None),
        (None, Some(name)) => fixtures::by_name(name)?,
        (None, None) => return Err(Error::Config("no input graph: pass --graph or --fixture".into())),
    };
    let signal = match &cfg.signal {
        Some(path) => io::read_signal(path, &graph)?,
        None => GraphSignal::new(graph.degrees().to_vec())?
            .standardized()
            .unwrap_or_else(|_| GraphSignal::zeros(graph.node_count())),
    };
    let partition = match &cfg.partition {
        Some(path) => Some(io::read_partition(path, &graph)?),
        None => fixture_partition,
    };
    Ok(Inputs {
        graph,
        signal,
        partition,
    })
}

/// Eigendecompositions stored as `<hash16>-<kind>.bin` under a directory.
pub struct EigenCache {
    dir: Option<PathBuf>,
}

impl EigenCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        EigenCache { dir }
    }

    pub fn path(&self, graph: &Graph, kind: ShiftKind) -> Option<PathBuf> {
        let hash = graph.content_hash();
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}-{}.bin", &hash[..16], kind.name())))
    }

    fn compute(graph: &Graph, kind: ShiftKind) -> Result<SpectralBasis> {
        let op = match kind {
            ShiftKind::Adjacency => ShiftOperator::adjacency(graph),
            ShiftKind::Laplacian => ShiftOperator::laplacian(graph),
            _ => ShiftOperator::modularity(graph),
        };
        decompose(&op)
    }

    /// Basis of `kind`; `Q⁺` and `Q⁻` are derived from the modularity basis.
    pub fn basis(&self, graph: &Graph, kind: ShiftKind) -> Result<SpectralBasis> {
        if matches!(kind, ShiftKind::ModularityPlus | ShiftKind::ModularityMinus) {
            let q = self.basis(graph, ShiftKind::Modularity)?;
            let c = if kind == ShiftKind::ModularityPlus {
                q.max_eigenvalue()
            } else {
                q.min_eigenvalue()
            };
            return q.shifted(kind, c);
        }
        let Some(path) = self.path(graph, kind) else {
            return Self::compute(graph, kind);
        };
        if path.exists() {
            match SpectralBasis::read_binary(&path) {
                Ok(b) if b.kind() == kind && b.dim() == graph.node_count() => {
                    log::debug!("loaded {kind} basis from {}", path.display());
                    return Ok(b);
                }
                Ok(_) => log::warn!("ignoring mismatched cache file {}", path.display()),
                Err(e) => log::warn!("ignoring unreadable cache file: {e}"),
            }
        }
        let b = Self::compute(graph, kind)?;
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        b.write_binary(&path)?;
        Ok(b)
    }

    pub fn bases(&self, graph: &Graph) -> Result<Bases> {
        Ok(Bases {
            laplacian: self.basis(graph, ShiftKind::Laplacian)?,
            modularity: self.basis(graph, ShiftKind::Modularity)?,
        })
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn report(cfg: &ExperimentConfig, command: &str, results: serde_json::Value) -> serde_json::Value {
    json!({ "command": command, "config": cfg, "results": results })
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cmd_spectrum(cfg: &ExperimentConfig, cache: &EigenCache, out: &Path) -> Result<()> {
    let inputs = load_inputs(&cfg.inputs)?;
    let g = &inputs.graph;
    let bases = cache.bases(g)?;
    let (l, q) = (&bases.laplacian, &bases.modularity);
    l.write_eigenvalues_csv(&out.join("eigenvalues_laplacian.csv"))?;
    q.write_eigenvalues_csv(&out.join("eigenvalues_modularity.csv"))?;
    for &kind in &cfg.spectrum.extra_operators {
        if kind != ShiftKind::Laplacian && kind != ShiftKind::Modularity {
            cache
                .basis(g, kind)?
                .write_eigenvalues_csv(&out.join(format!("eigenvalues_{}.csv", kind.name())))?;
        }
    }

    let (lop, qop) = (ShiftOperator::laplacian(g), ShiftOperator::modularity(g));
    let mut cross = String::from("index,lambda_laplacian,lambda_modularity,q_laplacian_of_u_modularity,q_modularity_of_u_laplacian\n");
    for i in 0..g.node_count() {
        let ql = quadratic_form(&lop, q.eigenvector(i))?;
        let qq = quadratic_form(&qop, l.eigenvector(i))?;
        cross.push_str(&format!("{},{},{},{},{}\n", i + 1, l.eigenvalue(i), q.eigenvalue(i), ql, qq));
    }
    write_text(&out.join("cross_forms.csv"), &cross)?;

    let sums = null_model_row_sums(g);
    let mut rows = String::from("node_id,degree,null_model_row_sum\n");
    let mut max_dev = 0f64;
    for (i, &sum) in sums.iter().enumerate() {
        max_dev = max_dev.max((sum - g.degree(i)).abs());
        rows.push_str(&format!("{},{},{}\n", g.node_id(i), g.degree(i), sum));
    }
    write_text(&out.join("null_model_row_sums.csv"), &rows)?;

    let a = cache.basis(g, ShiftKind::Adjacency)?;
    let tol = cfg.spectrum.interlacing_tol * a.spectral_radius().max(1.0);
    let (pos, zero, neg) = q.sign_counts();
    let (_, l_zero, _) = l.sign_counts();
    let split = spectral_bipartition(q)?;
    let plus: Vec<&str> = (0..g.node_count())
        .filter(|&i| split.values()[i] > 0.0)
        .map(|i| g.node_id(i))
        .collect();
    let results = json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "total_weight": g.total_weight(),
        "graph_hash": g.content_hash(),
        "modularity_sign_counts": { "positive": pos, "zero": zero, "negative": neg },
        "laplacian_zero_eigenvalues": l_zero,
        "interlacing_holds": interlaces(a.eigenvalues(), q.eigenvalues(), tol),
        "null_model_row_sum_max_deviation": max_dev,
        "modularity_leading_positive_side": plus,
        "max_residual_laplacian": l.max_residual(&lop)?,
        "max_residual_modularity": q.max_residual(&qop)?,
    });
    io::write_json(&out.join("spectrum.json"), &report(cfg, "spectrum", results))
}

fn cmd_filter(cfg: &ExperimentConfig, cache: &EigenCache, out: &Path) -> Result<()> {
    let inputs = load_inputs(&cfg.inputs)?;
    let g = &inputs.graph;
    let specs: Vec<FilterSpec> = parse_all(&cfg.filter.filters)?;
    let nodes: Vec<usize> = cfg
        .filter
        .nodes
        .iter()
        .map(|id| g.index_of(id).ok_or_else(|| Error::Data(format!("node `{id}` is not in the graph"))))
        .collect::<Result<_>>()?;
    let bases = cache.bases(g)?;
    let x = inputs.signal.values();
    let mut outcomes = Vec::new();
    for spec in specs {
        let o = run_filter(&bases, spec, cfg.filter.operator, x, inputs.partition.as_ref())?;
        io::write_signal(&out.join(format!("filtered_{}.csv", spec.label())), g, &o.output)?;
        let picked: serde_json::Map<String, serde_json::Value> = nodes
            .iter()
            .map(|&i| (g.node_id(i).to_string(), json!(o.output[i])))
            .collect();
        outcomes.push(json!({ "outcome": o, "nodes": picked }));
    }
    let original_delta = inputs
        .partition
        .as_ref()
        .map(|p| crate::filters::within_community_variability(x, p))
        .transpose()?;
    if let Some(p) = &inputs.partition {
        let mut rows = String::from("node_id,community_id,value,k_in,k_out,z_in,z_out\n");
        for (i, (kin, kout, zin, zout)) in role_table(g, p)?.into_iter().enumerate() {
            rows.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                g.node_id(i),
                p.name(p.label(i)),
                x[i],
                kin,
                kout,
                opt_num(zin),
                opt_num(zout)
            ));
        }
        write_text(&out.join("roles.csv"), &rows)?;
    }
    let signal_nodes: serde_json::Map<String, serde_json::Value> =
        nodes.iter().map(|&i| (g.node_id(i).to_string(), json!(x[i]))).collect();
    let results = json!({
        "delta_c_input": original_delta,
        "input_nodes": signal_nodes,
        "filters": outcomes,
    });
    io::write_json(&out.join("filter.json"), &report(cfg, "filter", results))
}

fn write_sampling_set(path: &Path, g: &Graph, run: &SamplingRun) -> Result<()> {
    let norms = run.set.column_norms();
    let mut rows = String::from("rank,node_id,column_norm\n");
    for (k, &i) in run.set.nodes().iter().enumerate() {
        let norm = norms.map(|c| c[k].to_string()).unwrap_or_default();
        rows.push_str(&format!("{},{},{}\n", k + 1, g.node_id(i), norm));
    }
    write_text(path, &rows)
}

fn sample_summary(g: &Graph, run: &SamplingRun) -> serde_json::Value {
    let ids: Vec<&str> = run.set.nodes().iter().map(|&i| g.node_id(i)).collect();
    json!({ "run": run, "sampling_set": ids })
}

fn cmd_sample(cfg: &ExperimentConfig, cache: &EigenCache, out: &Path) -> Result<()> {
    let inputs = load_inputs(&cfg.inputs)?;
    let g = &inputs.graph;
    let x = inputs.signal.values();
    let params = cfg.sample.params();
    let results = if cfg.sample.compare {
        let bases = cache.bases(g)?;
        let cmp = sampling_comparison(g, &bases, x, &params, cfg.seed)?;
        for run in [&cmp.laplacian, &cmp.modularity] {
            let name = run.operator.name();
            write_sampling_set(&out.join(format!("sampling_set_{name}.csv")), g, run)?;
            io::write_signal(&out.join(format!("reconstruction_{name}.csv")), g, &run.reconstruction)?;
        }
        json!({
            "seed": cfg.seed,
            "sigma2": params.sigma2,
            "laplacian": sample_summary(g, &cmp.laplacian),
            "modularity": sample_summary(g, &cmp.modularity),
            "t_test": cmp.t_test,
            "p_value": cmp.t_test.p_value,
            "shared_nodes": cmp.shared_nodes,
        })
    } else {
        let basis = cache.basis(g, cfg.sample.operator)?;
        let noise = gaussian_noise(x.len(), params.sigma2, cfg.seed, 0)?;
        let y: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| a + b).collect();
        let run = sampling_run(g, &basis, &y, x, &params)?;
        let name = run.operator.name();
        write_sampling_set(&out.join(format!("sampling_set_{name}.csv")), g, &run)?;
        io::write_signal(&out.join(format!("reconstruction_{name}.csv")), g, &run.reconstruction)?;
        json!({
            "seed": cfg.seed,
            "sigma2": params.sigma2,
            name: sample_summary(g, &run),
        })
    };
    io::write_json(&out.join("sample.json"), &report(cfg, "sample", results))
}

fn cmd_surrogate(cfg: &ExperimentConfig, cache: &EigenCache, out: &Path) -> Result<()> {
    let inputs = load_inputs(&cfg.inputs)?;
    let g = &inputs.graph;
    let x = inputs.signal.values();
    let s = &cfg.surrogate;
    let base = SurrogateConfig {
        mode: SurrogateMode::AllModularity,
        count: s.count,
        seed: cfg.seed,
        alpha: s.alpha,
        correction: s.correction,
        two_sided: s.two_sided,
    };
    base.validate()?;
    let bases = cache.bases(g)?;
    let outcomes = surrogate_study(g, &bases, x, inputs.partition.as_ref(), &s.modes, &base)?;
    for o in &outcomes {
        write_test_csv(&out.join(format!("surrogate_{}.csv", o.mode.name())), g, x, &o.result)?;
    }
    let summary: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "mode": o.mode,
                "significant": o.significant,
                "significant_nodes": o.significant_nodes,
                "threshold": o.result.threshold,
                "realizations": o.result.realizations_used,
                "roles": o.roles,
            })
        })
        .collect();
    let results = json!({ "seed": cfg.seed, "nodes": g.node_count(), "modes": summary });
    io::write_json(&out.join("surrogate.json"), &report(cfg, "surrogate", results))
}

fn cmd_denoise(cfg: &ExperimentConfig, cache: &EigenCache, out: &Path) -> Result<()> {
    let inputs = load_inputs(&cfg.inputs)?;
    let g = &inputs.graph;
    let d = &cfg.denoise;
    if d.regularizers.is_empty() || d.sigma2.is_empty() {
        return Err(Error::Config("denoise needs at least one regularizer and one noise level".into()));
    }
    if let Some(bad) = d.regularizers.iter().find(|k| !REGULARIZERS.contains(k)) {
        return Err(Error::Config(format!("{bad} is not a valid regularizer")));
    }
    let grid = d.mu_grid.values()?;
    let bases: Vec<SpectralBasis> = d
        .regularizers
        .iter()
        .map(|&k| cache.basis(g, k))
        .collect::<Result<_>>()?;
    let refs: Vec<&SpectralBasis> = bases.iter().collect();
    let levels = denoise_study(&refs, inputs.signal.values(), &d.sigma2, &grid, cfg.seed)?;
    let mut summary = Vec::new();
    for (k, level) in levels.iter().enumerate() {
        let mut per = Vec::new();
        for sweep in &level.sweeps {
            let mut rows = String::from("mu,rms\n");
            for (mu, r) in sweep.mu_grid.iter().zip(&sweep.per_mu_rms) {
                rows.push_str(&format!("{mu},{r}\n"));
            }
            write_text(&out.join(format!("denoise_{}_{k}.csv", sweep.regularizer.name())), &rows)?;
            per.push(json!({
                "regularizer": sweep.regularizer,
                "best_mu": sweep.best_mu,
                "best_rms": sweep.best_rms,
            }));
        }
        let mut ranking: Vec<_> = level.sweeps.iter().map(|s| (s.best_rms, s.regularizer)).collect();
        ranking.sort_by(|a, b| a.0.total_cmp(&b.0));
        let best = ranking[0].0;
        let worst = ranking[ranking.len() - 1].0;
        summary.push(json!({
            "sigma2": level.sigma2,
            "sweeps": per,
            "ranking": ranking.iter().map(|r| r.1).collect::<Vec<_>>(),
            "worst_to_best_ratio": worst / best,
        }));
    }
    let results = json!({ "seed": cfg.seed, "levels": summary });
    io::write_json(&out.join("denoise.json"), &report(cfg, "denoise", results))
}

fn cmd_ingest(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let dir = cfg
        .ingest
        .dir
        .as_ref()
        .ok_or_else(|| Error::Config("ingest-openflights needs --dir".into()))?;
    let data = load_openflights(dir, cfg.ingest.options)?;
    let g = &data.graph;
    io::write_edge_list(&out.join("edges.csv"), g)?;
    io::write_signal(&out.join("signal.csv"), g, &data.signal)?;
    io::write_signal(&out.join("endpoint_counts.csv"), g, &data.endpoint_counts)?;
    io::write_partition(&out.join("partition.csv"), g, &data.partition)?;
    let path = out.join("airports.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let err = |e: csv::Error| Error::Data(format!("{}: {e}", path.display()));
    w.write_record(["node_id", "airport_id", "name", "city", "country", "continent", "latitude", "longitude", "degree", "endpoint_count"])
        .map_err(err)?;
    for (i, a) in data.airports.iter().enumerate() {
        let p = &data.partition;
        w.write_record([
            g.node_id(i).to_string(),
            a.airport_id.to_string(),
            a.name.clone(),
            a.city.clone(),
            a.country.clone(),
            p.name(p.label(i)).to_string(),
            a.latitude.to_string(),
            a.longitude.to_string(),
            g.degree(i).to_string(),
            data.endpoint_counts[i].to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    let results = serde_json::to_value(&data.report).map_err(|e| Error::Data(e.to_string()))?;
    io::write_json(&out.join("ingest.json"), &report(cfg, "ingest-openflights", results))
}

fn cmd_fixture(name: &str, out: &Path) -> Result<()> {
    let names: Vec<&str> = if name == "all" {
        fixtures::NAMES.to_vec()
    } else {
        vec![name]
    };
    for name in names {
        let (g, p) = fixtures::by_name(name)?;
        io::write_edge_list(&out.join(format!("{name}.csv")), &g)?;
        if let Some(p) = p {
            io::write_partition(&out.join(format!("{name}_partition.csv")), &g, &p)?;
        }
    }
    Ok(())
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let base = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = resolve(cli, base)?;
    let out = cfg.out_dir.clone();
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let cache = EigenCache::new(cfg.cache_dir.clone());
    log::info!("{} -> {}", cli.command.name(), out.display());
    match &cli.command {
        Command::Spectrum { .. } => cmd_spectrum(&cfg, &cache, &out),
        Command::Filter { .. } => cmd_filter(&cfg, &cache, &out),
        Command::Sample { .. } => cmd_sample(&cfg, &cache, &out),
        Command::Surrogate { .. } => cmd_surrogate(&cfg, &cache, &out),
        Command::Denoise { .. } => cmd_denoise(&cfg, &cache, &out),
        Command::IngestOpenflights { .. } => cmd_ingest(&cfg, &out),
        Command::Fixture { name } => cmd_fixture(name, &out),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
