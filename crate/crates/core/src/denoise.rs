//! Quadratic-regularized denoising `argmin ‖x − y‖² + μ xᵀPx` for
//! `P ∈ {L, Q⁺, Q⁻}`, solved in the eigenbasis of `P`, and oracle
//! selection of `μ` against a known clean signal.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::graph::{GraphSignal, ShiftKind, ShiftOperator};
use crate::spectral::{gft, igft_values, SpectralBasis};

pub const REGULARIZERS: [ShiftKind; 3] = [
    ShiftKind::Laplacian,
    ShiftKind::ModularityPlus,
    ShiftKind::ModularityMinus,
];

fn check_regularizer(kind: ShiftKind) -> Result<()> {
    if REGULARIZERS.contains(&kind) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{kind} is not positive semi-definite; use laplacian, modularity-plus or modularity-minus"
        )))
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu >= 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mu must be finite and non-negative, got {mu}")))
    }
}

#[derive(Debug, Clone)]
pub struct DenoiseProblem {
    pub y: GraphSignal,
    pub regularizer: ShiftKind,
    pub mu: f64,
}

impl DenoiseProblem {
    pub fn new(y: GraphSignal, regularizer: ShiftKind, mu: f64) -> Result<Self> {
        check_regularizer(regularizer)?;
        check_mu(mu)?;
        Ok(DenoiseProblem { y, regularizer, mu })
    }

    /// Minimizer using the eigenbasis of the regularizer.
    pub fn solve(&self, basis: &SpectralBasis) -> Result<GraphSignal> {
        if basis.kind() != self.regularizer {
            return Err(Error::Config(format!(
                "regularizer is {} but basis is {}",
                self.regularizer,
                basis.kind()
            )));
        }
        denoise(basis, &self.y, self.mu)
    }
}

fn shrink(basis: &SpectralBasis, yh: &[f64], mu: f64) -> Result<GraphSignal> {
    let coefficients: Vec<f64> = yh
        .iter()
        .zip(basis.eigenvalues())
        .map(|(c, l)| c / (1.0 + mu * l))
        .collect();
    igft_values(basis, &coefficients)
}

/// `x* = (I + μP)⁻¹ y` with `P` the operator of `basis`.
pub fn denoise(basis: &SpectralBasis, y: &[f64], mu: f64) -> Result<GraphSignal> {
    check_regularizer(basis.kind())?;
    check_mu(mu)?;
    let yh = gft(basis, y)?;
    shrink(basis, yh.values(), mu)
}

/// `‖x − y‖² + μ xᵀPx`.
pub fn objective(p: &ShiftOperator<'_>, x: &[f64], y: &[f64], mu: f64) -> Result<f64> {
    check_len(x.len(), y.len())?;
    let fit: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(fit + mu * p.quadratic_form(x)?)
}

/// `2(x − y) + 2μPx`.
pub fn gradient(p: &ShiftOperator<'_>, x: &[f64], y: &[f64], mu: f64) -> Result<GraphSignal> {
    check_len(x.len(), y.len())?;
    let px = p.apply(x)?;
    Ok(GraphSignal::from_raw(
        x.iter()
            .zip(y)
            .zip(px.iter())
            .map(|((a, b), c)| 2.0 * (a - b) + 2.0 * mu * c)
            .collect(),
    ))
}

/// `‖a − b‖₂ / √n`.
pub fn rms(a: &[f64], b: &[f64]) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (sq / a.len() as f64).sqrt()
}

/// Thirty log-spaced values from `1e-3` to `1e3`.
pub fn default_mu_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 30)
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSweep {
    pub regularizer: ShiftKind,
    pub mu_grid: Vec<f64>,
    pub per_mu_rms: Vec<f64>,
    pub best_mu: f64,
    pub best_rms: f64,
}

/// Evaluates every `μ` in `grid` against `truth`; the smallest `μ` wins ties.
pub fn oracle_select(
    basis: &SpectralBasis,
    y: &[f64],
    truth: &[f64],
    grid: &[f64],
) -> Result<OracleSweep> {
    check_regularizer(basis.kind())?;
    check_len(y.len(), truth.len())?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("mu grid is empty".into()));
    }
    if let Some(&bad) = grid.iter().find(|&&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidParameter(format!("mu grid value {bad} is not positive")));
    }
    let yh = gft(basis, y)?;
    let per_mu_rms = grid
        .par_iter()
        .map(|&mu| shrink(basis, yh.values(), mu).map(|x| rms(&x, truth)))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &r) in per_mu_rms.iter().enumerate() {
        let (b, br) = (grid[best], per_mu_rms[best]);
        if r < br || (r == br && grid[i] < b) {
            best = i;
        }
    }
    Ok(OracleSweep {
        regularizer: basis.kind(),
        mu_grid: grid.to_vec(),
        best_mu: grid[best],
        best_rms: per_mu_rms[best],
        per_mu_rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::spectral::{decompose, shifted_modularity};
    use nalgebra::{DMatrix, DVector};

    fn noisy() -> Vec<f64> {
        vec![0.9, 1.1, 1.0, 0.8, 1.2, -0.9, -1.0, -1.1, -0.8, -1.2]
    }

    #[test]
    fn zero_mu_is_identity() {
        let g = fixtures::toy10();
        let l = decompose(&ShiftOperator::laplacian(&g)).unwrap();
        let y = noisy();
        let x = denoise(&l, &y, 0.0).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(denoise(&l, &y, -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn matches_dense_solve() {
        let g = fixtures::toy10();
        let op = ShiftOperator::laplacian(&g);
        let l = decompose(&op).unwrap();
        let y = noisy();
        let x = denoise(&l, &y, 1.0).unwrap();
        let system = DMatrix::<f64>::identity(10, 10) + op.to_dense().unwrap();
        let direct = system.lu().solve(&DVector::from_column_slice(&y)).unwrap();
        for (a, b) in x.iter().zip(direct.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
        let grad = gradient(&op, &x, &y, 1.0).unwrap();
        assert!(grad.norm() <= 1e-8 * GraphSignal::new(y).unwrap().norm());
    }

    #[test]
    fn large_mu_projects_onto_kernel_of_q_plus() {
        let g = fixtures::toy10();
        let op = shifted_modularity(&g, ShiftKind::ModularityPlus).unwrap();
        let basis = decompose(&op).unwrap();
        let y = noisy();
        let x = denoise(&basis, &y, 1e12).unwrap();
        // kernel of Q⁺ is the leading modularity eigenvector
        let u = basis.eigenvector(0);
        assert!(basis.eigenvalue(0).abs() < 1e-9);
        let c: f64 = u.iter().zip(&y).map(|(a, b)| a * b).sum();
        for (xi, ui) in x.iter().zip(u) {
            assert!((xi - c * ui).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_on_clean_signal_picks_smallest_mu() {
        let g = fixtures::toy10();
        let l = decompose(&ShiftOperator::laplacian(&g)).unwrap();
        let y = noisy();
        let grid = default_mu_grid();
        assert_eq!(grid.len(), 30);
        assert!((grid[0] - 1e-3).abs() < 1e-15 && (grid[29] - 1e3).abs() < 1e-9);
        let sweep = oracle_select(&l, &y, &y, &grid).unwrap();
        assert_eq!(sweep.best_mu, grid[0]);
        assert!(sweep.per_mu_rms.windows(2).all(|w| w[0] <= w[1]));
        assert!(oracle_select(&l, &y, &y, &[]).is_err());
        assert!(oracle_select(&l, &y, &y, &[0.0]).is_err());
    }

    #[test]
    fn indefinite_regularizers_are_rejected() {
        let g = fixtures::toy10();
        let q = decompose(&ShiftOperator::modularity(&g)).unwrap();
        assert!(matches!(denoise(&q, &noisy(), 1.0), Err(Error::Config(_))));
        assert!(DenoiseProblem::new(GraphSignal::zeros(10), ShiftKind::Adjacency, 1.0).is_err());
    }
}
