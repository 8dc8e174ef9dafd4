//! Spectral-window and polynomial graph filters.
//!
//! A window `h̃` acts as `x_out = U diag(h̃) Uᵀ x`. The four named filters
//! use passbands resolved from the spectrum:
//!
//! - modular: every strictly positive eigenvalue of `Q`
//! - anti-modular: every strictly negative eigenvalue of `Q`
//! - smooth: the lowest Laplacian components, as many as the modular band
//! - non-smooth: the highest Laplacian components, as many as the anti-modular band
//!
//! Inside the band the weight is `|λ_i| / Σ_band |λ_k|`, or one minus that
//! for the smooth filter; outside it is zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{check_len, Error, Result};
use crate::graph::{GraphSignal, ShiftKind, ShiftOperator};
use crate::spectral::{gft, igft_values, SpectralBasis};

/// Per-component filter gains aligned with a basis ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWindow(Vec<f64>);

impl SpectralWindow {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("window weights must be finite".into()));
        }
        Ok(SpectralWindow(weights))
    }

    pub fn all_pass(n: usize) -> Self {
        SpectralWindow(vec![1.0; n])
    }

    /// Window `p(λ_i)` for a polynomial response.
    pub fn from_polynomial(basis: &SpectralBasis, coefficients: &[f64]) -> Self {
        SpectralWindow(
            basis
                .eigenvalues()
                .iter()
                .map(|&l| horner(coefficients, l))
                .collect(),
        )
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandWeighting {
    /// Unit gain across the band.
    Flat,
    /// `|λ_i| / Σ_band |λ_k|`.
    AbsNormalized,
    /// `1 - |λ_i| / Σ_band |λ_k|`.
    ComplementAbsNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassbandKind {
    Modular,
    AntiModular,
    Smooth,
    NonSmooth,
    ExplicitRange,
}

impl PassbandKind {
    /// Basis kind the band is defined on; `None` for explicit ranges.
    pub fn basis_kind(self) -> Option<ShiftKind> {
        match self {
            PassbandKind::Modular | PassbandKind::AntiModular => Some(ShiftKind::Modularity),
            PassbandKind::Smooth | PassbandKind::NonSmooth => Some(ShiftKind::Laplacian),
            PassbandKind::ExplicitRange => None,
        }
    }

    pub fn default_weighting(self) -> BandWeighting {
        match self {
            PassbandKind::Smooth => BandWeighting::ComplementAbsNormalized,
            PassbandKind::ExplicitRange => BandWeighting::Flat,
            _ => BandWeighting::AbsNormalized,
        }
    }
}

/// Eigen-index interval `[first, last]`, 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassbandSpec {
    pub kind: PassbandKind,
    pub first: usize,
    pub last: usize,
    pub weighting: BandWeighting,
}

impl PassbandSpec {
    pub fn explicit(first: usize, last: usize, weighting: BandWeighting) -> Self {
        PassbandSpec {
            kind: PassbandKind::ExplicitRange,
            first,
            last,
            weighting,
        }
    }

    pub fn len(&self) -> usize {
        (self.last + 1).saturating_sub(self.first)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Zero-based component indices.
    pub fn indices(&self) -> std::ops::Range<usize> {
        self.first.saturating_sub(1)..self.last
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.first < 1 || self.first > self.last || self.last > n {
            return Err(Error::InvalidPassband(format!(
                "band [{}, {}] is not within [1, {n}]",
                self.first, self.last
            )));
        }
        Ok(())
    }
}

fn require_kind(basis: &SpectralBasis, expected: ShiftKind, what: &str) -> Result<()> {
    if basis.kind() != expected {
        return Err(Error::Config(format!(
            "{what} filter needs a {expected} basis, got {}",
            basis.kind()
        )));
    }
    Ok(())
}

/// Resolves a named band on `basis`. Smooth and non-smooth bands are matched
/// in size to the modular/anti-modular bands of `modularity`, which must be
/// given for those kinds.
pub fn resolve_passband(
    basis: &SpectralBasis,
    kind: PassbandKind,
    modularity: Option<&SpectralBasis>,
) -> Result<PassbandSpec> {
    let n = basis.dim();
    let (first, last) = match kind {
        PassbandKind::Modular | PassbandKind::AntiModular => {
            require_kind(basis, ShiftKind::Modularity, "modular")?;
            let (pos, _, neg) = basis.sign_counts();
            if kind == PassbandKind::Modular {
                (1, pos)
            } else {
                (n - neg + 1, n)
            }
        }
        PassbandKind::Smooth | PassbandKind::NonSmooth => {
            require_kind(basis, ShiftKind::Laplacian, "smooth")?;
            let q = modularity.ok_or_else(|| {
                Error::Config("smooth bands are matched to a modularity basis".into())
            })?;
            require_kind(q, ShiftKind::Modularity, "reference")?;
            check_len(n, q.dim())?;
            let (pos, _, neg) = q.sign_counts();
            if kind == PassbandKind::Smooth {
                (1, pos)
            } else {
                (n - neg + 1, n)
            }
        }
        PassbandKind::ExplicitRange => {
            return Err(Error::Config(
                "explicit ranges are built with PassbandSpec::explicit".into(),
            ))
        }
    };
    if last < first {
        return Err(Error::InvalidPassband(format!("{kind:?} band is empty")));
    }
    Ok(PassbandSpec {
        kind,
        first,
        last,
        weighting: kind.default_weighting(),
    })
}

/// Window for a resolved passband.
pub fn passband_window(basis: &SpectralBasis, pb: &PassbandSpec) -> Result<SpectralWindow> {
    let n = basis.dim();
    pb.validate(n)?;
    let band = pb.indices();
    let mut weights = vec![0.0; n];
    match pb.weighting {
        BandWeighting::Flat => weights[band].iter_mut().for_each(|w| *w = 1.0),
        BandWeighting::AbsNormalized | BandWeighting::ComplementAbsNormalized => {
            let total: f64 = basis.eigenvalues()[band.clone()].iter().map(|l| l.abs()).sum();
            if !(total > basis.zero_tolerance()) {
                return Err(Error::InvalidPassband(
                    "band eigenvalues sum to zero; weights undefined".into(),
                ));
            }
            let complement = pb.weighting == BandWeighting::ComplementAbsNormalized;
            for i in band {
                let share = basis.eigenvalue(i).abs() / total;
                weights[i] = if complement { 1.0 - share } else { share };
            }
        }
    }
    Ok(SpectralWindow(weights))
}

/// `U diag(h̃) Uᵀ x`.
pub fn apply_window(basis: &SpectralBasis, w: &SpectralWindow, x: &[f64]) -> Result<GraphSignal> {
    check_len(basis.dim(), w.len())?;
    let mut xh = gft(basis, x)?;
    for (c, h) in xh.values_mut().iter_mut().zip(w.weights()) {
        *c *= h;
    }
    igft_values(basis, xh.values())
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &h| acc * x + h)
}

/// Vertex-domain filter `p(S) = Σ_k h_k S^k`.
#[derive(Debug, Clone)]
pub struct PolynomialFilter<'g> {
    coefficients: Vec<f64>,
    op: ShiftOperator<'g>,
}

impl<'g> PolynomialFilter<'g> {
    /// `coefficients[k]` multiplies `S^k`; the degree must not exceed `n - 1`.
    pub fn new(coefficients: Vec<f64>, op: ShiftOperator<'g>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("polynomial has no coefficients".into()));
        }
        if coefficients.len() > op.dim() {
            return Err(Error::InvalidParameter(format!(
                "degree {} exceeds n - 1 = {}",
                coefficients.len() - 1,
                op.dim().saturating_sub(1)
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        Ok(PolynomialFilter { coefficients, op })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn operator(&self) -> &ShiftOperator<'g> {
        &self.op
    }

    /// Frequency response `p(λ)`.
    pub fn response(&self, lambda: f64) -> f64 {
        horner(&self.coefficients, lambda)
    }
}

/// Horner evaluation using `K` matrix-free shift applications.
pub fn apply_polynomial(pf: &PolynomialFilter<'_>, x: &[f64]) -> Result<GraphSignal> {
    let n = pf.op.dim();
    check_len(n, x.len())?;
    let h = &pf.coefficients;
    let mut acc: Vec<f64> = x.iter().map(|v| h[h.len() - 1] * v).collect();
    let mut shifted = vec![0.0; n];
    for &hk in h.iter().rev().skip(1) {
        pf.op.apply_into(&acc, &mut shifted)?;
        for ((a, s), xi) in acc.iter_mut().zip(&shifted).zip(x) {
            *a = s + hk * xi;
        }
    }
    Ok(GraphSignal::from_raw(acc))
}

/// `Δ_C`: mean over communities of the population std of `x` within each.
pub fn within_community_variability(x: &[f64], p: &Partition) -> Result<f64> {
    check_len(p.len(), x.len())?;
    let members = p.members();
    let total: f64 = members
        .iter()
        .map(|group| {
            let n = group.len() as f64;
            let mean = group.iter().map(|&i| x[i]).sum::<f64>() / n;
            (group.iter().map(|&i| (x[i] - mean).powi(2)).sum::<f64>() / n).sqrt()
        })
        .sum();
    Ok(total / members.len() as f64)
}

/// Filter selector used on the command line:
/// `modular | antimodular | smooth | nonsmooth | band:N1:N2:flat | band:N1:N2:absweighted`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterSpec {
    Named(PassbandKind),
    Band {
        first: usize,
        last: usize,
        weighting: BandWeighting,
    },
}

impl FilterSpec {
    pub const NAMED: [FilterSpec; 4] = [
        FilterSpec::Named(PassbandKind::Modular),
        FilterSpec::Named(PassbandKind::AntiModular),
        FilterSpec::Named(PassbandKind::Smooth),
        FilterSpec::Named(PassbandKind::NonSmooth),
    ];

    /// Short label used in output file names.
    pub fn label(&self) -> String {
        match self {
            FilterSpec::Named(PassbandKind::Modular) => "modular".into(),
            FilterSpec::Named(PassbandKind::AntiModular) => "antimodular".into(),
            FilterSpec::Named(PassbandKind::Smooth) => "smooth".into(),
            FilterSpec::Named(PassbandKind::NonSmooth) => "nonsmooth".into(),
            FilterSpec::Named(PassbandKind::ExplicitRange) => "band".into(),
            FilterSpec::Band { first, last, .. } => format!("band{first}-{last}"),
        }
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterSpec::Band {
                first,
                last,
                weighting,
            } => {
                let w = match weighting {
                    BandWeighting::Flat => "flat",
                    _ => "absweighted",
                };
                write!(f, "band:{first}:{last}:{w}")
            }
            named => f.write_str(&named.label()),
        }
    }
}

impl FromStr for FilterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let named = match s {
            "modular" => Some(PassbandKind::Modular),
            "antimodular" | "anti-modular" => Some(PassbandKind::AntiModular),
            "smooth" => Some(PassbandKind::Smooth),
            "nonsmooth" | "non-smooth" => Some(PassbandKind::NonSmooth),
            _ => None,
        };
        if let Some(kind) = named {
            return Ok(FilterSpec::Named(kind));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("invalid filter spec `{s}`"));
        if parts.len() != 4 || parts[0] != "band" {
            return Err(bad());
        }
        let first: usize = parts[1].parse().map_err(|_| bad())?;
        let last: usize = parts[2].parse().map_err(|_| bad())?;
        let weighting = match parts[3] {
            "flat" => BandWeighting::Flat,
            "absweighted" => BandWeighting::AbsNormalized,
            _ => return Err(bad()),
        };
        if first < 1 || first > last {
            return Err(Error::InvalidPassband(format!("band [{first}, {last}]")));
        }
        Ok(FilterSpec::Band {
            first,
            last,
            weighting,
        })
    }
}
