//! Sampling-set selection and least-squares reconstruction of bandlimited
//! graph signals.
//!
//! With `B = U Σ Uᵀ` the band projector, the optimal `m`-node sampling set
//! maximizes `‖Σ Uᵀ R‖_F`. Each node contributes the squared norm of its
//! column of `Σ Uᵀ` independently of the others, so the optimum is the
//! top-`m` nodes by column norm.
//!
//! Reconstruction pseudo-inverts `B R Bᵀ`. Because `B R Bᵀ = U_F G U_Fᵀ`
//! with `G = U_Fᵀ R U_F`, its non-zero eigenpairs are `(U_F w, ψ)` for the
//! eigenpairs `(w, ψ)` of the `|F| × |F|` Gram matrix `G`, which is what is
//! decomposed here.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::graph::GraphSignal;
use crate::spectral::SpectralBasis;

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Column energies are bucketed at this resolution before ranking so that
/// rounding noise does not override the lower-index tie-break.
const TIE_RESOLUTION: f64 = 1e-12;

/// Projector onto the span of the basis components listed in `band`.
#[derive(Debug, Clone)]
pub struct BandlimitingOperator<'b> {
    basis: &'b SpectralBasis,
    band: Vec<usize>,
}

impl<'b> BandlimitingOperator<'b> {
    /// `band` holds zero-based component indices.
    pub fn new(basis: &'b SpectralBasis, mut band: Vec<usize>) -> Result<Self> {
        let n = basis.dim();
        if band.is_empty() {
            return Err(Error::InvalidPassband("band is empty".into()));
        }
        band.sort_unstable();
        if band.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPassband("band lists a component twice".into()));
        }
        if band[band.len() - 1] >= n {
            return Err(Error::InvalidPassband(format!("component out of range for n = {n}")));
        }
        Ok(BandlimitingOperator { basis, band })
    }

    /// The first `bandwidth` components in basis order: lowest for the
    /// Laplacian, highest for the modularity matrix.
    pub fn leading(basis: &'b SpectralBasis, bandwidth: usize) -> Result<Self> {
        if bandwidth == 0 || bandwidth > basis.dim() {
            return Err(Error::InvalidParameter(format!(
                "bandwidth {bandwidth} outside [1, {}]",
                basis.dim()
            )));
        }
        Self::new(basis, (0..bandwidth).collect())
    }

    pub fn basis(&self) -> &'b SpectralBasis {
        self.basis
    }

    pub fn band(&self) -> &[usize] {
        &self.band
    }

    pub fn bandwidth(&self) -> usize {
        self.band.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `U_F` as a dense `n × |F|` matrix.
    pub fn band_vectors(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut data = Vec::with_capacity(n * self.band.len());
        for &f in &self.band {
            data.extend_from_slice(self.basis.eigenvector(f));
        }
        DMatrix::from_vec(n, self.band.len(), data)
    }

    /// Dense `B = U_F U_Fᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        let uf = self.band_vectors();
        &uf * uf.transpose()
    }

    /// `B x`.
    pub fn project(&self, x: &[f64]) -> Result<GraphSignal> {
        let n = self.dim();
        check_len(n, x.len())?;
        let mut out = vec![0.0; n];
        for &f in &self.band {
            let u = self.basis.eigenvector(f);
            let c = crate::graph::dot(u, x);
            for (o, ui) in out.iter_mut().zip(u) {
                *o += c * ui;
            }
        }
        Ok(GraphSignal::from_raw(out))
    }

    /// Signal `U_F c` for band coefficients `c`.
    pub fn synthesize(&self, coefficients: &[f64]) -> Result<GraphSignal> {
        check_len(self.band.len(), coefficients.len())?;
        let mut out = vec![0.0; self.dim()];
        for (&f, &c) in self.band.iter().zip(coefficients) {
            for (o, ui) in out.iter_mut().zip(self.basis.eigenvector(f)) {
                *o += c * ui;
            }
        }
        Ok(GraphSignal::from_raw(out))
    }

    /// l₂-norm of each node's column of `Σ Uᵀ`.
    pub fn column_norms(&self) -> Vec<f64> {
        self.column_energies().into_iter().map(f64::sqrt).collect()
    }

    fn column_energies(&self) -> Vec<f64> {
        let mut energy = vec![0.0; self.dim()];
        for &f in &self.band {
            for (e, u) in energy.iter_mut().zip(self.basis.eigenvector(f)) {
                *e += u * u;
            }
        }
        energy
    }

    /// `‖Σ Uᵀ R‖_F` for a set of nodes.
    pub fn sampling_objective(&self, nodes: &[usize]) -> f64 {
        let energy = self.column_energies();
        nodes.iter().map(|&i| energy[i]).sum::<f64>().sqrt()
    }
}

/// Ordered list of sampled nodes; the diagonal selection `R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingSet {
    nodes: Vec<usize>,
    n: usize,
    column_norms: Option<Vec<f64>>,
}

impl SamplingSet {
    pub fn new(nodes: Vec<usize>, n: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("sampling set is empty".into()));
        }
        let mut seen = vec![false; n];
        for &i in &nodes {
            if i >= n {
                return Err(Error::InvalidParameter(format!("node {i} out of range")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter(format!("node {i} sampled twice")));
            }
        }
        Ok(SamplingSet {
            nodes,
            n,
            column_norms: None,
        })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Column norm of each selected node, in rank order, when known.
    pub fn column_norms(&self) -> Option<&[f64]> {
        self.column_norms.as_deref()
    }

    /// Diagonal of `R`.
    pub fn indicator(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.n];
        for &i in &self.nodes {
            r[i] = 1.0;
        }
        r
    }
}

/// Top-`m` nodes by column norm of `Σ Uᵀ`, ties broken by lower index.
pub fn select_sampling_set(b: &BandlimitingOperator<'_>, m: usize) -> Result<SamplingSet> {
    let n = b.dim();
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!("sample count {m} outside [1, {n}]")));
    }
    let energy = b.column_energies();
    let bucket: Vec<i64> = energy
        .iter()
        .map(|e| (e / TIE_RESOLUTION).round() as i64)
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| bucket[c].cmp(&bucket[a]).then(a.cmp(&c)));
    order.truncate(m);
    let norms = order.iter().map(|&i| energy[i].sqrt()).collect();
    let mut set = SamplingSet::new(order, n)?;
    set.column_norms = Some(norms);
    Ok(set)
}

/// `x_s = R y`.
pub fn sample(r: &SamplingSet, y: &[f64]) -> Result<GraphSignal> {
    check_len(r.dim(), y.len())?;
    let mut out = vec![0.0; y.len()];
    for &i in r.nodes() {
        out[i] = y[i];
    }
    Ok(GraphSignal::from_raw(out))
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub signal: GraphSignal,
    /// Eigenvalues of `B R Bᵀ` kept by the pseudo-inverse.
    pub effective_rank: usize,
    pub bandwidth: usize,
}

impl Reconstruction {
    /// True when the sampling set cannot pin down every band component.
    pub fn underdetermined(&self) -> bool {
        self.effective_rank < self.bandwidth
    }
}

/// `x_rec = V Ψ⁺ Vᵀ x_s` with `(V, Ψ)` the eigenpairs of `B R Bᵀ`;
/// eigenvalues at or below `rank_tol · max Ψ`, or at rounding level, are
/// dropped.
pub fn reconstruct(
    b: &BandlimitingOperator<'_>,
    r: &SamplingSet,
    x_s: &[f64],
    rank_tol: f64,
) -> Result<Reconstruction> {
    let n = b.dim();
    check_len(n, x_s.len())?;
    check_len(n, r.dim())?;
    if !(rank_tol >= 0.0) {
        return Err(Error::InvalidParameter("rank tolerance must be non-negative".into()));
    }
    let indicator = r.indicator();
    if let Some(i) = (0..n).find(|&i| indicator[i] == 0.0 && x_s[i] != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sampled signal is non-zero at unsampled node {i}"
        )));
    }

    let k = b.bandwidth();
    // rows of U_F restricted to the sampling set
    let mut ur = DMatrix::<f64>::zeros(r.len(), k);
    for (col, &f) in b.band().iter().enumerate() {
        let u = b.basis().eigenvector(f);
        for (row, &node) in r.nodes().iter().enumerate() {
            ur[(row, col)] = u[node];
        }
    }
    let gram = ur.transpose() * &ur;
    let (psi, w_basis) = crate::spectral::symmetric_eigen(&gram)?;
    let psi_max = psi.iter().copied().fold(0.0, f64::max);
    // Ψ ⊂ [0, 1] because U_F has orthonormal columns
    let cutoff = (rank_tol * psi_max).max(r.len().max(k) as f64 * f64::EPSILON);

    let sampled = DVector::from_iterator(r.len(), r.nodes().iter().map(|&i| x_s[i]));
    let z = ur.transpose() * sampled;
    let mut w = w_basis.transpose() * z;
    let mut rank = 0;
    for (wi, &psi) in w.iter_mut().zip(&psi) {
        if psi > cutoff && psi > 0.0 {
            *wi /= psi;
            rank += 1;
        } else {
            *wi = 0.0;
        }
    }
    let coefficients = &w_basis * w;
    let signal = b.synthesize(coefficients.as_slice())?;
    Ok(Reconstruction {
        signal,
        effective_rank: rank,
        bandwidth: k,
    })
}
