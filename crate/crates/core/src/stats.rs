//! Log-log exponent fits, medians and the KPZ relation.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Predicted exponent of the k-th largest loop: `(3 - sqrt 2) / 2`.
pub fn largest_loop_exponent() -> f64 {
    (3.0 - 2f64.sqrt()) / 2.0
}

/// Predicted exponent of the crossing count: `(3 - sqrt 5) / 2`.
pub fn crossing_exponent() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub ci_95_halfwidth: f64,
    pub n_points: usize,
    pub r_squared: f64,
}

impl RegressionResult {
    pub fn ci(&self) -> (f64, f64) {
        (self.slope - self.ci_95_halfwidth, self.slope + self.ci_95_halfwidth)
    }

    pub fn ci_contains(&self, v: f64) -> bool {
        (self.slope - v).abs() <= self.ci_95_halfwidth
    }
}

/// Least squares on `(ln x, ln y)` with a 95% t-interval for the slope.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<RegressionResult> {
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Domain(format!("log-log fit needs positive data, got {p:?}")));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::Domain("log-log fit needs at least 3 distinct sizes".into()));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = n - 2.0;
    let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::Domain(e.to_string()))?.inverse_cdf(0.975);
    let se = (sse / dof / sxx).sqrt();
    Ok(RegressionResult {
        slope,
        intercept,
        ci_95_halfwidth: t * se,
        n_points: points.len(),
        r_squared: if syy == 0.0 { 1.0 } else { 1.0 - sse / syy },
    })
}

/// Element of rank `(len - 1) / 2` in sorted order.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma must lie in (0, 2], got {gamma}")))
    }
}

/// Euclidean dimension from a quantum one:
/// `(2 + g^2/2) d - (g^2/2) d^2`.
pub fn kpz(delta_gamma: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(0.0..=1.0).contains(&delta_gamma) {
        return Err(Error::Domain(format!("quantum dimension must lie in [0, 1], got {delta_gamma}")));
    }
    let h = gamma * gamma / 2.0;
    Ok((2.0 + h) * delta_gamma - h * delta_gamma * delta_gamma)
}

/// Smaller root of the KPZ quadratic: the quantum dimension of a set of
/// Euclidean dimension `delta_0`.
pub fn kpz_inverse(delta_0: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(0.0..=2.0).contains(&delta_0) {
        return Err(Error::Domain(format!("euclidean dimension must lie in [0, 2], got {delta_0}")));
    }
    let h = gamma * gamma / 2.0;
    let b = 2.0 + h;
    let disc = (b * b - 4.0 * h * delta_0).max(0.0);
    // Rationalized form of (b - sqrt(disc)) / 2h, stable for small delta_0.
    Ok(2.0 * delta_0 / (b + disc.sqrt()))
}

/// Predicted loop exponent for a given LQG parameter: the quantum dimension
/// of the Euclidean dimension 7/4.
pub fn loop_exponent_for_gamma(gamma: f64) -> Result<f64> {
    kpz_inverse(1.75, gamma)
}
