//! Full symmetric eigendecomposition of shift operators and the graph
//! Fourier transform.
//!
//! Ordering conventions:
//!
//! | operator            | order of `λ`                                  |
//! |---------------------|-----------------------------------------------|
//! | Laplacian           | ascending                                     |
//! | Modularity, Adjacency | descending                                  |
//! | `Q⁺`, `Q⁻`          | ascending, eigenvectors inherited from `Q`    |
//!
//! Each eigenvector is signed so that its entry of largest magnitude is
//! positive (first such index on ties).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::{GraphSignal, ShiftKind, ShiftOperator};

const MAGIC: &[u8; 8] = b"MGSPSPEC";
const FORMAT_VERSION: u32 = 1;

/// Residual tolerance per eigenpair, relative to the spectral radius.
pub const RESIDUAL_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralOrdering {
    Ascending,
    Descending,
}

impl SpectralOrdering {
    pub fn for_kind(kind: ShiftKind) -> Self {
        match kind {
            ShiftKind::Modularity | ShiftKind::Adjacency => SpectralOrdering::Descending,
            _ => SpectralOrdering::Ascending,
        }
    }
}

/// Orthonormal eigenbasis `U` with eigenvalues `Λ` such that `S = U Λ Uᵀ`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    eigenvectors: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    kind: ShiftKind,
    ordering: SpectralOrdering,
}

impl SpectralBasis {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn ordering(&self) -> SpectralOrdering {
        self.ordering
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    /// Column `i` of `U`.
    pub fn eigenvector(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.eigenvectors.as_slice()[i * n..(i + 1) * n]
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Zero threshold `τ = 1e-9 · max|λ|` used by band and mask selection.
    pub fn zero_tolerance(&self) -> f64 {
        1e-9 * self.spectral_radius()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Counts of strictly positive, zero, and strictly negative eigenvalues.
    pub fn sign_counts(&self) -> (usize, usize, usize) {
        let tau = self.zero_tolerance();
        let pos = self.eigenvalues.iter().filter(|&&v| v > tau).count();
        let neg = self.eigenvalues.iter().filter(|&&v| v < -tau).count();
        (pos, self.dim() - pos - neg, neg)
    }

    /// Basis of `Q⁺` or `Q⁻` from a modularity basis and the shift constant.
    pub fn shifted(&self, kind: ShiftKind, constant: f64) -> Result<SpectralBasis> {
        if self.kind != ShiftKind::Modularity {
            return Err(Error::Config(format!(
                "shifted bases derive from a modularity basis, not {}",
                self.kind
            )));
        }
        let transformed: Vec<f64> = match kind {
            ShiftKind::ModularityPlus => self.eigenvalues.iter().map(|l| constant - l).collect(),
            ShiftKind::ModularityMinus => self.eigenvalues.iter().map(|l| l - constant).collect(),
            other => {
                return Err(Error::Config(format!("{other} is not a shifted modularity kind")))
            }
        };
        let (eigenvalues, eigenvectors) =
            reorder(&transformed, &self.eigenvectors, SpectralOrdering::Ascending);
        Ok(SpectralBasis {
            eigenvectors,
            eigenvalues,
            kind,
            ordering: SpectralOrdering::Ascending,
        })
    }

    /// `U Λ Uᵀ`, dense.
    pub fn recompose(&self) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= self.eigenvalues[j];
        }
        &scaled * self.eigenvectors.transpose()
    }

    /// Largest eigenpair residual `‖S u_i - λ_i u_i‖` against `op`.
    pub fn max_residual(&self, op: &ShiftOperator<'_>) -> Result<f64> {
        let n = self.dim();
        check_len(op.dim(), n)?;
        let mut su = vec![0.0; n];
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let u = self.eigenvector(i);
            op.apply_into(u, &mut su)?;
            let lambda = self.eigenvalues[i];
            let r = su
                .iter()
                .zip(u)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        Ok(worst)
    }

    /// Writes the binary cache format: magic, version, kind, ordering, `n`,
    /// eigenvalues, then `U` column-major, all little-endian.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io)?;
        let ordering = match self.ordering {
            SpectralOrdering::Ascending => 0u8,
            SpectralOrdering::Descending => 1u8,
        };
        w.write_all(&[self.kind.code(), ordering, 0, 0]).map_err(io)?;
        w.write_all(&(self.dim() as u64).to_le_bytes()).map_err(io)?;
        for v in self.eigenvalues.iter().chain(self.eigenvectors.as_slice()) {
            w.write_all(&v.to_le_bytes()).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_binary(path: &Path) -> Result<SpectralBasis> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let bad = |msg: &str| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: msg.to_string(),
        };
        let mut header = [0u8; 24];
        r.read_exact(&mut header).map_err(|_| bad("truncated header"))?;
        if &header[..8] != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(bad("unsupported version"));
        }
        let kind = ShiftKind::from_code(header[12]).ok_or_else(|| bad("unknown operator kind"))?;
        let ordering = match header[13] {
            0 => SpectralOrdering::Ascending,
            1 => SpectralOrdering::Descending,
            _ => return Err(bad("unknown ordering")),
        };
        let n = u64::from_le_bytes(header[16..24].try_into().expect("8 bytes")) as usize;
        let mut read_f64s = |count: usize| -> Result<Vec<f64>> {
            let mut buf = vec![0u8; count * 8];
            r.read_exact(&mut buf).map_err(|_| bad("truncated payload"))?;
            Ok(buf
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect())
        };
        let eigenvalues = read_f64s(n)?;
        let vectors = read_f64s(n * n)?;
        Ok(SpectralBasis {
            eigenvectors: DMatrix::from_vec(n, n, vectors),
            eigenvalues,
            kind,
            ordering,
        })
    }

    /// `index,eigenvalue` CSV with 1-based indices.
    pub fn write_eigenvalues_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("index,eigenvalue\n");
        for (i, v) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, v));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Spectral coefficients `x̂ = Uᵀ x` of a signal in some basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    values: Vec<f64>,
    kind: ShiftKind,
}

impl SpectralCoefficients {
    pub fn new(values: Vec<f64>, basis: &SpectralBasis) -> Result<Self> {
        check_len(basis.dim(), values.len())?;
        Ok(SpectralCoefficients {
            values,
            kind: basis.kind(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn reorder(
    values: &[f64],
    vectors: &DMatrix<f64>,
    ordering: SpectralOrdering,
) -> (Vec<f64>, DMatrix<f64>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps solver order among exact ties.
    match ordering {
        SpectralOrdering::Ascending => order.sort_by(|&a, &b| values[a].total_cmp(&values[b])),
        SpectralOrdering::Descending => order.sort_by(|&a, &b| values[b].total_cmp(&values[a])),
    }
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let rows = vectors.nrows();
    let mut data = Vec::with_capacity(rows * n);
    for &i in &order {
        data.extend_from_slice(&vectors.as_slice()[i * rows..(i + 1) * rows]);
    }
    (sorted_values, DMatrix::from_vec(rows, n, data))
}

fn fix_signs(vectors: &mut DMatrix<f64>) {
    for mut col in vectors.column_iter_mut() {
        let mut best = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenpairs of a dense symmetric matrix, eigenvalues ascending.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = to_faer(m)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Numerical { residual: f64::NAN })?;
    let (s, u) = (eig.S(), eig.U());
    let values = (0..n).map(|i| s[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    Ok((values, vectors))
}

pub(crate) fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    to_faer(m)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| Error::Numerical { residual: f64::NAN })
}

/// Full eigendecomposition of `op`.
///
/// `Q⁺` and `Q⁻` are obtained from the decomposition of `Q` using the
/// operator's shift constant.
pub fn decompose(op: &ShiftOperator<'_>) -> Result<SpectralBasis> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot decompose an empty operator".into()));
    }
    if op.kind().needs_shift_constant() {
        let constant = op.shift_constant().ok_or_else(|| {
            Error::Config(format!("{} operator has no shift constant", op.kind()))
        })?;
        let q = decompose(&ShiftOperator::modularity(op.graph()))?;
        return q.shifted(op.kind(), constant);
    }

    let (raw, vectors) = symmetric_eigen(&op.to_dense()?)?;
    let ordering = SpectralOrdering::for_kind(op.kind());
    let (eigenvalues, mut eigenvectors) = reorder(&raw, &vectors, ordering);
    fix_signs(&mut eigenvectors);
    let basis = SpectralBasis {
        eigenvectors,
        eigenvalues,
        kind: op.kind(),
        ordering,
    };

    let residual = basis.max_residual(op)?;
    let scale = basis.spectral_radius().max(f64::MIN_POSITIVE);
    if !(residual <= RESIDUAL_TOLERANCE * scale) {
        return Err(Error::Numerical { residual });
    }
    Ok(basis)
}

/// `(λ_min, λ_max)` of `op`, without computing eigenvectors.
pub fn extreme_eigenvalues(op: &ShiftOperator<'_>) -> Result<(f64, f64)> {
    if op.dim() == 0 {
        return Err(Error::InvalidParameter("empty operator".into()));
    }
    if op.kind().needs_shift_constant() {
        let c = op.shift_constant().ok_or_else(|| {
            Error::Config(format!("{} operator has no shift constant", op.kind()))
        })?;
        let (qmin, qmax) = extreme_eigenvalues(&ShiftOperator::modularity(op.graph()))?;
        return Ok(match op.kind() {
            ShiftKind::ModularityPlus => (c - qmax, c - qmin),
            _ => (qmin - c, qmax - c),
        });
    }
    let values = symmetric_eigenvalues(&op.to_dense()?)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::Numerical { residual: f64::NAN });
    }
    Ok((min, max))
}

/// `Q⁺` or `Q⁻` with the exact extreme eigenvalue of `Q` as shift constant.
pub fn shifted_modularity<'g>(
    graph: &'g crate::graph::Graph,
    kind: ShiftKind,
) -> Result<ShiftOperator<'g>> {
    let (min, max) = extreme_eigenvalues(&ShiftOperator::modularity(graph))?;
    match kind {
        ShiftKind::ModularityPlus => Ok(ShiftOperator::modularity_plus(graph, max)),
        ShiftKind::ModularityMinus => Ok(ShiftOperator::modularity_minus(graph, min)),
        other => Err(Error::Config(format!("{other} is not a shifted modularity kind"))),
    }
}

/// Graph Fourier transform `x̂ = Uᵀ x`.
pub fn gft(basis: &SpectralBasis, x: &[f64]) -> Result<SpectralCoefficients> {
    check_len(basis.dim(), x.len())?;
    let values = (0..basis.dim())
        .map(|i| crate::graph::dot(basis.eigenvector(i), x))
        .collect();
    Ok(SpectralCoefficients {
        values,
        kind: basis.kind(),
    })
}

/// Inverse transform `x = U x̂`.
pub fn igft(basis: &SpectralBasis, xh: &SpectralCoefficients) -> Result<GraphSignal> {
    igft_values(basis, xh.values())
}

pub(crate) fn igft_values(basis: &SpectralBasis, xh: &[f64]) -> Result<GraphSignal> {
    let n = basis.dim();
    check_len(n, xh.len())?;
    let mut out = vec![0.0; n];
    for (i, &c) in xh.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (o, u) in out.iter_mut().zip(basis.eigenvector(i)) {
            *o += c * u;
        }
    }
    Ok(GraphSignal::from_raw(out))
}

/// Checks `a_1 ≥ b_1 ≥ a_2 ≥ b_2 ≥ … ≥ a_N ≥ b_N` for descending sequences.
pub fn interlaces(upper: &[f64], lower: &[f64], tol: f64) -> bool {
    if upper.len() != lower.len() {
        return false;
    }
    let n = upper.len();
    (0..n).all(|i| {
        upper[i] + tol >= lower[i] && (i + 1 == n || lower[i] + tol >= upper[i + 1])
    })
}
