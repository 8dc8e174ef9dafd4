//! Undirected weighted graphs and the shift operators defined on them.
//!
//! A [`Graph`] stores its adjacency in compressed sparse row form together
//! with the degree vector `k` and the total edge weight `M = Σ k_i / 2`.
//! Every [`ShiftOperator`] is applied matrix-free: the modularity matrix
//! `Q = A - k kᵀ / 2M` is never materialized, its product is evaluated as
//! `A x - (kᵀx / 2M) k` in `O(M' + N)` time.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{check_len, Error, Result};

/// Undirected graph with positive edge weights and no self-loops.
///
/// Nodes are indexed densely `0..n`. Each node carries an external id
/// (the label used in files); indices follow the canonical ordering of the
/// ids, numeric when every id parses as an integer, lexicographic otherwise.
#[derive(Debug, Clone)]
pub struct Graph {
    node_ids: Vec<String>,
    index: HashMap<String, usize>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_weight: f64,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from dense indices. Node ids become `"0"`, `"1"`, ...
    pub fn from_index_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Graph> {
        let mut builder = GraphBuilder::new();
        for i in 0..n {
            builder.add_node(i.to_string());
        }
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            builder.add_edge(i.to_string(), j.to_string(), w)?;
        }
        builder.build()
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    /// Number of distinct undirected edges (`M'`).
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Total edge weight `M`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn node_id(&self, i: usize) -> &str {
        &self.node_ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Neighbors of `i` with edge weights, ascending by index.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Edge weight `a_ij`, zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.targets[range.clone()].binary_search(&j) {
            Ok(pos) => self.weights[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Edges `(i, j, w)` with `i < j`, sorted by `(i, j)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&(j, _)| j > i)
                .map(move |(j, w)| (i, j, w))
        })
    }

    /// Sparse product `A x`.
    pub fn adjacency_mul(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(i).map(|(j, w)| w * x[j]).sum();
        }
    }

    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Connected-component label per node; labels are ordered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for (v, _) in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Node indices of the largest connected component (ties: lowest label).
    pub fn largest_component(&self) -> Vec<usize> {
        let labels = self.components();
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; count];
        for &l in &labels {
            sizes[l] += 1;
        }
        let best = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map_or(0, |(l, _)| l);
        (0..labels.len()).filter(|&i| labels[i] == best).collect()
    }

    /// Induced subgraph on `keep` (indices into this graph).
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Graph> {
        let mut builder = GraphBuilder::new();
        let mut kept = vec![false; self.node_count()];
        for &i in keep {
            kept[i] = true;
            builder.add_node(self.node_ids[i].clone());
        }
        for (i, j, w) in self.edges() {
            if kept[i] && kept[j] {
                builder.add_edge(self.node_ids[i].clone(), self.node_ids[j].clone(), w)?;
            }
        }
        builder.build()
    }

    /// SHA-256 over the canonical edge list, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.node_count().to_le_bytes());
        for id in &self.node_ids {
            hasher.update(id.as_bytes());
            hasher.update([0u8]);
        }
        for (i, j, w) in self.edges() {
            hasher.update(i.to_le_bytes());
            hasher.update(j.to_le_bytes());
            hasher.update(w.to_bits().to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }

    /// Heap bytes held by the graph's buffers (ids excluded).
    pub fn numeric_heap_bytes(&self) -> usize {
        self.offsets.capacity() * std::mem::size_of::<usize>()
            + self.targets.capacity() * std::mem::size_of::<usize>()
            + self.weights.capacity() * std::mem::size_of::<f64>()
            + self.degrees.capacity() * std::mem::size_of::<f64>()
    }
}

/// Accumulates edges by external id. Duplicate edges are summed.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: Vec<String>,
    lookup: HashMap<String, usize>,
    edges: HashMap<(usize, usize), f64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, id: String) -> usize {
        if let Some(&i) = self.lookup.get(&id) {
            return i;
        }
        let i = self.ids.len();
        self.lookup.insert(id.clone(), i);
        self.ids.push(id);
        i
    }

    /// Registers a node without edges.
    pub fn add_node(&mut self, id: impl Into<String>) -> &mut Self {
        self.intern(id.into());
        self
    }

    pub fn add_edge(
        &mut self,
        a: impl Into<String>,
        b: impl Into<String>,
        weight: f64,
    ) -> Result<&mut Self> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidGraph(format!(
                "edge {a}-{b} has non-positive weight {weight}"
            )));
        }
        let (i, j) = (self.intern(a), self.intern(b));
        *self.edges.entry((i.min(j), i.max(j))).or_insert(0.0) += weight;
        Ok(self)
    }

    pub fn build(self) -> Result<Graph> {
        let n = self.ids.len();
        let mut order: Vec<usize> = (0..n).collect();
        let numeric: Option<Vec<i64>> = self.ids.iter().map(|s| s.parse().ok()).collect();
        match &numeric {
            Some(vals) => order.sort_by_key(|&i| vals[i]),
            None => order.sort_by(|&a, &b| self.ids[a].cmp(&self.ids[b])),
        }
        let mut rank = vec![0usize; n];
        for (r, &old) in order.iter().enumerate() {
            rank[old] = r;
        }

        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(i, j), &w) in &self.edges {
            let (ri, rj) = (rank[i], rank[j]);
            adjacency[ri].push((rj, w));
            adjacency[rj].push((ri, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * self.edges.len());
        let mut weights = Vec::with_capacity(2 * self.edges.len());
        let mut degrees = Vec::with_capacity(n);
        offsets.push(0);
        for row in &mut adjacency {
            row.sort_by_key(|e| e.0);
            // Summation in index order keeps degrees independent of hash order.
            degrees.push(row.iter().map(|&(_, w)| w).sum());
            for &(j, w) in row.iter() {
                targets.push(j);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let total_weight = degrees.iter().sum::<f64>() / 2.0;
        if !(total_weight > 0.0) {
            return Err(Error::InvalidGraph(
                "total edge weight must be positive".into(),
            ));
        }

        let node_ids: Vec<String> = order.iter().map(|&i| self.ids[i].clone()).collect();
        let index = node_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        Ok(Graph {
            node_ids,
            index,
            offsets,
            targets,
            weights,
            degrees,
            total_weight,
            edge_count: self.edges.len(),
        })
    }
}

/// Real-valued signal on the nodes of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphSignal(Vec<f64>);

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "signal entry {i} is not finite"
            )));
        }
        Ok(GraphSignal(values))
    }

    pub fn zeros(n: usize) -> Self {
        GraphSignal(vec![0.0; n])
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        GraphSignal(values)
    }

    /// Checks that the signal can live on `graph`.
    pub fn check_on(&self, graph: &Graph) -> Result<()> {
        check_len(graph.node_count(), self.0.len())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    /// Removes the mean and scales to unit population variance.
    pub fn standardized(&self) -> Result<GraphSignal> {
        let mean = self.mean();
        let var = self.0.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.0.len() as f64;
        if !(var > 0.0) {
            return Err(Error::Data("cannot standardize a constant signal".into()));
        }
        let sd = var.sqrt();
        Ok(GraphSignal(self.0.iter().map(|v| (v - mean) / sd).collect()))
    }

    pub fn unit_norm(&self) -> Result<GraphSignal> {
        let norm = self.norm();
        if !(norm > 0.0) {
            return Err(Error::Data("cannot normalize a zero signal".into()));
        }
        Ok(GraphSignal(self.0.iter().map(|v| v / norm).collect()))
    }
}

impl Deref for GraphSignal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<GraphSignal> for Vec<f64> {
    fn from(s: GraphSignal) -> Vec<f64> {
        s.0
    }
}

/// Selector for the symmetric operators used as graph shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    Adjacency,
    Laplacian,
    Modularity,
    /// `λ_max(Q) I - Q`
    ModularityPlus,
    /// `Q - λ_min(Q) I`
    ModularityMinus,
}

impl ShiftKind {
    pub const ALL: [ShiftKind; 5] = [
        ShiftKind::Adjacency,
        ShiftKind::Laplacian,
        ShiftKind::Modularity,
        ShiftKind::ModularityPlus,
        ShiftKind::ModularityMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShiftKind::Adjacency => "adjacency",
            ShiftKind::Laplacian => "laplacian",
            ShiftKind::Modularity => "modularity",
            ShiftKind::ModularityPlus => "modularity-plus",
            ShiftKind::ModularityMinus => "modularity-minus",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            ShiftKind::Adjacency => 0,
            ShiftKind::Laplacian => 1,
            ShiftKind::Modularity => 2,
            ShiftKind::ModularityPlus => 3,
            ShiftKind::ModularityMinus => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<ShiftKind> {
        ShiftKind::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn needs_shift_constant(self) -> bool {
        matches!(self, ShiftKind::ModularityPlus | ShiftKind::ModularityMinus)
    }
}

impl fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "adjacency" => Ok(ShiftKind::Adjacency),
            "l" | "laplacian" => Ok(ShiftKind::Laplacian),
            "q" | "modularity" => Ok(ShiftKind::Modularity),
            "q+" | "modplus" | "modularity-plus" => Ok(ShiftKind::ModularityPlus),
            "q-" | "modminus" | "modularity-minus" => Ok(ShiftKind::ModularityMinus),
            other => Err(Error::Config(format!("unknown operator `{other}`"))),
        }
    }
}

/// A shift operator bound to a graph.
///
/// The `±` variants need the extreme eigenvalue of `Q` as shift constant;
/// see [`crate::spectral::extreme_eigenvalues`].
#[derive(Debug, Clone, Copy)]
pub struct ShiftOperator<'g> {
    kind: ShiftKind,
    graph: &'g Graph,
    shift_constant: Option<f64>,
}

impl<'g> ShiftOperator<'g> {
    pub fn new(graph: &'g Graph, kind: ShiftKind) -> Self {
        ShiftOperator {
            kind,
            graph,
            shift_constant: None,
        }
    }

    pub fn adjacency(graph: &'g Graph) -> Self {
        Self::new(graph, ShiftKind::Adjacency)
    }

    pub fn laplacian(graph: &'g Graph) -> Self {
        Self::new(graph, ShiftKind::Laplacian)
    }

    pub fn modularity(graph: &'g Graph) -> Self {
        Self::new(graph, ShiftKind::Modularity)
    }

    /// `Q⁺ = λ_max I - Q` with a known `λ_max`.
    pub fn modularity_plus(graph: &'g Graph, lambda_max: f64) -> Self {
        Self::new(graph, ShiftKind::ModularityPlus).with_shift_constant(lambda_max)
    }

    /// `Q⁻ = Q - λ_min I` with a known `λ_min`.
    pub fn modularity_minus(graph: &'g Graph, lambda_min: f64) -> Self {
        Self::new(graph, ShiftKind::ModularityMinus).with_shift_constant(lambda_min)
    }

    pub fn with_shift_constant(mut self, c: f64) -> Self {
        self.shift_constant = Some(c);
        self
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn shift_constant(&self) -> Option<f64> {
        self.shift_constant
    }

    pub fn dim(&self) -> usize {
        self.graph.node_count()
    }

    fn constant(&self) -> Result<f64> {
        if !self.kind.needs_shift_constant() {
            return Ok(0.0);
        }
        self.shift_constant.ok_or_else(|| {
            Error::Config(format!("{} operator has no shift constant", self.kind))
        })
    }

    /// Writes `S x` into `out` without allocating.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let g = self.graph;
        check_len(g.node_count(), x.len())?;
        check_len(g.node_count(), out.len())?;
        let c = self.constant()?;
        g.adjacency_mul(x, out);
        match self.kind {
            ShiftKind::Adjacency => {}
            ShiftKind::Laplacian => {
                for ((o, &k), &xi) in out.iter_mut().zip(g.degrees()).zip(x) {
                    *o = k * xi - *o;
                }
            }
            ShiftKind::Modularity | ShiftKind::ModularityPlus | ShiftKind::ModularityMinus => {
                let scale = dot(g.degrees(), x) / (2.0 * g.total_weight());
                for (o, &k) in out.iter_mut().zip(g.degrees()) {
                    *o -= scale * k;
                }
                match self.kind {
                    ShiftKind::ModularityPlus => {
                        for (o, &xi) in out.iter_mut().zip(x) {
                            *o = c * xi - *o;
                        }
                    }
                    ShiftKind::ModularityMinus => {
                        for (o, &xi) in out.iter_mut().zip(x) {
                            *o -= c * xi;
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<GraphSignal> {
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out)?;
        Ok(GraphSignal::from_raw(out))
    }

    /// `xᵀ S x`.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        let sx = self.apply(x)?;
        Ok(dot(x, &sx))
    }

    /// Dense `n × n` matrix of the operator. Only for decomposition and tests.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let g = self.graph;
        let n = g.node_count();
        let c = self.constant()?;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (i, j, w) in g.edges() {
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
        match self.kind {
            ShiftKind::Adjacency => {}
            ShiftKind::Laplacian => {
                m.neg_mut();
                for i in 0..n {
                    m[(i, i)] += g.degree(i);
                }
            }
            _ => {
                let two_m = 2.0 * g.total_weight();
                let k = g.degrees();
                for j in 0..n {
                    for i in 0..n {
                        m[(i, j)] -= k[i] * k[j] / two_m;
                    }
                }
                match self.kind {
                    ShiftKind::ModularityPlus => {
                        m.neg_mut();
                        for i in 0..n {
                            m[(i, i)] += c;
                        }
                    }
                    ShiftKind::ModularityMinus => {
                        for i in 0..n {
                            m[(i, i)] -= c;
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(m)
    }
}

/// `S x` for the given operator.
pub fn apply_shift(op: &ShiftOperator<'_>, x: &[f64]) -> Result<GraphSignal> {
    op.apply(x)
}

/// `xᵀ S x` for the given operator.
pub fn quadratic_form(op: &ShiftOperator<'_>, x: &[f64]) -> Result<f64> {
    op.quadratic_form(x)
}

/// Two-way split encoded as a vector of `±1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignVector(Vec<f64>);

impl SignVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidPartition(format!(
                "entry {i} is {} (expected ±1)",
                values[i]
            )));
        }
        Ok(SignVector(values))
    }

    pub fn from_membership(in_first: &[bool]) -> Self {
        SignVector(
            in_first
                .iter()
                .map(|&b| if b { 1.0 } else { -1.0 })
                .collect(),
        )
    }

    pub fn ones(n: usize) -> Self {
        SignVector(vec![1.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when both vectors describe the same split, up to global sign.
    pub fn same_split(&self, other: &SignVector) -> bool {
        self.0.len() == other.0.len()
            && (self.0 == other.0 || self.0.iter().zip(&other.0).all(|(a, b)| *a == -*b))
    }
}

/// Modularity of a bipartition, `¼ sᵀ Q s`.
pub fn modularity_index(graph: &Graph, s: &SignVector) -> Result<f64> {
    Ok(0.25 * ShiftOperator::modularity(graph).quadratic_form(s.values())?)
}

/// Configuration-model expected weight `k_i k_j / 2M`.
pub fn null_model_edge(graph: &Graph, i: usize, j: usize) -> Result<f64> {
    let n = graph.node_count();
    if i >= n || j >= n {
        return Err(Error::InvalidParameter(format!(
            "node index out of range ({i}, {j}) for {n} nodes"
        )));
    }
    Ok(graph.degree(i) * graph.degree(j) / (2.0 * graph.total_weight()))
}

/// Row sums of the null model, `Σ_j k_i k_j / 2M`, evaluated in `O(N)`.
pub fn null_model_row_sums(graph: &Graph) -> Vec<f64> {
    let total: f64 = graph.degrees().iter().sum();
    let two_m = 2.0 * graph.total_weight();
    graph.degrees().iter().map(|k| k * total / two_m).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orders ids the way [`GraphBuilder`] assigns indices.
pub fn compare_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn k3_modularity_kills_constant() {
        let g = fixtures::k3();
        let y = ShiftOperator::modularity(&g).apply(&[1.0; 3]).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn k3_laplacian_of_unit_vector() {
        let g = fixtures::k3();
        let y = ShiftOperator::laplacian(&g).apply(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(y.values(), &[2.0, -1.0, -1.0]);
    }

    #[test]
    fn k3_quadratic_forms() {
        let g = fixtures::k3();
        let l = ShiftOperator::laplacian(&g);
        assert!(close(l.quadratic_form(&[1.0; 3]).unwrap(), 0.0, 1e-15));
        let q = ShiftOperator::modularity(&g);
        assert!(close(q.quadratic_form(&[1.0, 1.0, -1.0]).unwrap(), -8.0 / 3.0, 1e-14));
    }

    #[test]
    fn k3_modularity_index() {
        let g = fixtures::k3();
        let s = SignVector::new(vec![1.0, 1.0, -1.0]).unwrap();
        assert!(close(modularity_index(&g, &s).unwrap(), -2.0 / 3.0, 1e-14));
        assert!(close(modularity_index(&g, &SignVector::ones(3)).unwrap(), 0.0, 1e-15));
    }

    #[test]
    fn barbell_split_has_positive_modularity() {
        let g = fixtures::barbell6();
        let s = SignVector::new(vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0]).unwrap();
        assert!(modularity_index(&g, &s).unwrap() > 0.0);
    }

    #[test]
    fn sign_vector_rejects_other_values() {
        assert!(matches!(
            SignVector::new(vec![1.0, 0.0]),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn null_model_examples() {
        let g = fixtures::k3();
        assert!(close(null_model_edge(&g, 0, 2).unwrap(), 2.0 / 3.0, 1e-15));
        let star = fixtures::star(4);
        assert!(close(null_model_edge(&star, 0, 1).unwrap(), 0.5, 1e-15));
        assert!(null_model_edge(&star, 0, 4).is_err());
        let toy = fixtures::toy10();
        for (i, sum) in null_model_row_sums(&toy).iter().enumerate() {
            let brute: f64 = (0..10).map(|j| null_model_edge(&toy, i, j).unwrap()).sum();
            assert!(close(*sum, toy.degree(i), 1e-12));
            assert!(close(brute, toy.degree(i), 1e-12));
        }
    }

    #[test]
    fn shifted_kinds_require_constant() {
        let g = fixtures::k3();
        let op = ShiftOperator::new(&g, ShiftKind::ModularityPlus);
        assert!(matches!(op.quadratic_form(&[1.0; 3]), Err(Error::Config(_))));
        assert!(op.with_shift_constant(0.0).quadratic_form(&[1.0; 3]).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = fixtures::k3();
        let err = ShiftOperator::laplacian(&g).apply(&[1.0; 4]).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 3, got: 4 }));
    }

    #[test]
    fn duplicate_edges_sum_and_self_loops_fail() {
        let mut b = GraphBuilder::new();
        b.add_edge("a", "b", 1.0).unwrap();
        b.add_edge("b", "a", 2.5).unwrap();
        assert!(b.add_edge("c", "c", 1.0).is_err());
        assert!(b.add_edge("a", "c", 0.0).is_err());
        let g = b.build().unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), 3.5);
        assert_eq!(g.total_weight(), 3.5);
    }

    #[test]
    fn empty_graph_is_rejected_but_isolated_nodes_are_fine() {
        let mut b = GraphBuilder::new();
        b.add_node("x");
        assert!(matches!(b.build(), Err(Error::InvalidGraph(_))));

        let mut b = GraphBuilder::new();
        b.add_node("z").add_edge("x", "y", 1.0).unwrap();
        let g = b.build().unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degree(g.index_of("z").unwrap()), 0.0);
        let y = ShiftOperator::modularity(&g).apply(&[1.0; 3]).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn ids_sort_numerically_when_possible() {
        let mut b = GraphBuilder::new();
        b.add_edge("10", "9", 1.0).unwrap();
        b.add_edge("2", "10", 1.0).unwrap();
        let g = b.build().unwrap();
        assert_eq!(g.node_ids(), &["2", "9", "10"]);
        let mut b = GraphBuilder::new();
        b.add_edge("JFK", "ATL", 1.0).unwrap();
        assert_eq!(b.build().unwrap().node_ids(), &["ATL", "JFK"]);
    }

    #[test]
    fn components_and_subgraph() {
        let g = Graph::from_index_edges(5, &[(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap();
        assert_eq!(g.components(), vec![0, 0, 1, 1, 1]);
        assert_eq!(g.largest_component(), vec![2, 3, 4]);
        let sub = g.induced_subgraph(&g.largest_component()).unwrap();
        assert_eq!(sub.node_ids(), &["2", "3", "4"]);
        assert_eq!(sub.edge_count(), 2);
    }

    #[test]
    fn hash_is_stable_across_insertion_order() {
        let mut a = GraphBuilder::new();
        a.add_edge("1", "2", 1.0).unwrap().add_edge("2", "3", 2.0).unwrap();
        let mut b = GraphBuilder::new();
        b.add_edge("3", "2", 2.0).unwrap().add_edge("2", "1", 1.0).unwrap();
        assert_eq!(
            a.build().unwrap().content_hash(),
            b.build().unwrap().content_hash()
        );
    }

    #[test]
    fn shift_kind_parsing() {
        assert_eq!("Q+".parse::<ShiftKind>().unwrap(), ShiftKind::ModularityPlus);
        assert_eq!("laplacian".parse::<ShiftKind>().unwrap(), ShiftKind::Laplacian);
        assert!("foo".parse::<ShiftKind>().is_err());
        for k in ShiftKind::ALL {
            assert_eq!(ShiftKind::from_code(k.code()), Some(k));
            assert_eq!(k.name().parse::<ShiftKind>().unwrap(), k);
        }
    }

    #[test]
    fn standardize_and_normalize() {
        let s = GraphSignal::new(vec![1.0, 2.0, 3.0, 6.0]).unwrap();
        let z = s.standardized().unwrap();
        assert!(z.mean().abs() < 1e-15);
        let var: f64 = z.iter().map(|v| v * v).sum::<f64>() / 4.0;
        assert!(close(var, 1.0, 1e-14));
        assert!(close(s.unit_norm().unwrap().norm(), 1.0, 1e-15));
        assert!(GraphSignal::new(vec![f64::NAN]).is_err());
        assert!(GraphSignal::new(vec![2.0, 2.0]).unwrap().standardized().is_err());
    }
}
