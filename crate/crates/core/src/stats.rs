//! Summary statistics and the paired t-test.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{check_len, Error, Result};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn population_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Sample standard deviation (`n - 1` denominator).
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedTTest {
    pub mean_difference: f64,
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    /// Two-sided.
    pub p_value: f64,
}

/// Paired t-test on `a - b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTTest> {
    check_len(a.len(), b.len())?;
    if a.len() < 2 {
        return Err(Error::InvalidParameter("paired t-test needs at least two pairs".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len();
    let md = mean(&d);
    let sd = sample_std(&d);
    let dof = n - 1;
    if sd == 0.0 {
        let p = if md == 0.0 { 1.0 } else { 0.0 };
        let t = if md == 0.0 { 0.0 } else { md.signum() * f64::INFINITY };
        return Ok(PairedTTest {
            mean_difference: md,
            t_statistic: t,
            degrees_of_freedom: dof,
            p_value: p,
        });
    }
    let t = md / (sd / (n as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, dof as f64)
        .map_err(|e| Error::InvalidParameter(format!("t distribution: {e}")))?;
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(PairedTTest {
        mean_difference: md,
        t_statistic: t,
        degrees_of_freedom: dof,
        p_value: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let v = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert_eq!(mean(&v), 5.0);
        assert_eq!(population_std(&v), 2.0);
        assert!((sample_std(&v) - (32.0f64 / 7.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn t_test_reference_value() {
        // differences 1, 2, 3, 4, 5: mean 3, sd √2.5, t = 3 / (√2.5 / √5) = 4.2426
        let a = [2.0, 4.0, 6.0, 8.0, 10.0];
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = paired_t_test(&a, &b).unwrap();
        assert!((r.t_statistic - 18.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.degrees_of_freedom, 4);
        // two-sided p for t = 4.2426 with 4 dof is 0.01324 (t tables)
        assert!((r.p_value - 0.013236).abs() < 1e-5, "{}", r.p_value);
    }

    #[test]
    fn degenerate_differences() {
        assert_eq!(paired_t_test(&[1.0, 2.0], &[1.0, 2.0]).unwrap().p_value, 1.0);
        assert_eq!(paired_t_test(&[2.0, 3.0], &[1.0, 2.0]).unwrap().p_value, 0.0);
        assert!(paired_t_test(&[1.0], &[1.0]).is_err());
    }
}
