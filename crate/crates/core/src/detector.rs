//! Noncoherent ML detection on the received power.
//!
//! The receiver never sees the channel; its likelihood depends on the
//! received vector only through `||y||^2`. Minimising
//! `||y||^2 / c + N ln c` over the sorted statistics reduces to comparing the
//! average received power `||y||^2 / N` against `M^2 - 1` fixed thresholds
//! `d_l = c_{l+1} mu(c_{l+1} / c_l)` with `mu(x) = ln x / (x - 1)`.
//!
//! Indices are zero-based: region `l` is `(d_{l-1}, d_l]`, with `d_{-1} = -inf`
//! and `d_{M^2-1} = +inf`.

use serde::{Deserialize, Serialize};

use crate::constellation::SumConstellation;
use crate::error::{Error, Result};

const MU_SERIES_RADIUS: f64 = 1e-4;

/// `ln x / (x - 1)`, continuous at `x = 1` where it equals 1.
pub fn mu(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            name: "x",
            value: x,
        });
    }
    Ok(mu_unchecked(x))
}

pub(crate) fn mu_unchecked(x: f64) -> f64 {
    let u = x - 1.0;
    if u.abs() < MU_SERIES_RADIUS {
        // ln(1+u)/u = 1 - u/2 + u^2/3 - u^3/4 + u^4/5 - ...
        1.0 + u * (-0.5 + u * (1.0 / 3.0 + u * (-0.25 + u * 0.2)))
    } else {
        x.ln() / u
    }
}

/// The `M^2 - 1` decision boundaries on the average received power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionThresholds {
    pub bounds: Vec<f64>,
}

pub fn compute_thresholds(sum: &SumConstellation) -> Result<DecisionThresholds> {
    sum.check_valid()?;
    let bounds = sum
        .stats()
        .windows(2)
        .map(|w| w[1] * mu_unchecked(w[1] / w[0]))
        .collect();
    Ok(DecisionThresholds { bounds })
}

/// Detected sorted index together with the symbol pair it decodes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub index: usize,
    pub pair: (usize, usize),
}

/// Threshold detector on `avg_power = ||y||^2 / N`.
pub fn detect(
    avg_power: f64,
    thresholds: &DecisionThresholds,
    sum: &SumConstellation,
) -> Detection {
    let index = thresholds.bounds.partition_point(|d| *d < avg_power);
    Detection {
        index,
        pair: sum.pair(index),
    }
}

/// Exhaustive ML search over every candidate statistic.
///
/// Metrics that agree to a few ulps of their magnitude are treated as tied and
/// resolved toward the smaller statistic, which matches the closed right end
/// of each threshold region.
pub fn detect_bruteforce(y_norm_sq: f64, n_antennas: usize, sum: &SumConstellation) -> usize {
    let n = n_antennas as f64;
    let mut best = 0;
    let mut best_metric = f64::INFINITY;
    let mut best_scale = 0.0;
    for (l, &c) in sum.stats().iter().enumerate() {
        let a = y_norm_sq / c;
        let b = n * c.ln();
        let metric = a + b;
        let scale = a.abs() + b.abs();
        let tie_tol = 8.0 * f64::EPSILON * scale.max(best_scale);
        if metric < best_metric - tie_tol {
            best = l;
            best_metric = metric;
            best_scale = scale;
        }
    }
    best
}

/// A sum constellation bundled with its precomputed thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDetector {
    sum: SumConstellation,
    thresholds: DecisionThresholds,
}

impl PowerDetector {
    pub fn new(sum: SumConstellation) -> Result<Self> {
        let thresholds = compute_thresholds(&sum)?;
        Ok(PowerDetector { sum, thresholds })
    }

    /// Builds a detector around externally supplied thresholds.
    pub fn with_thresholds(sum: SumConstellation, thresholds: DecisionThresholds) -> Result<Self> {
        if thresholds.bounds.len() + 1 != sum.len() {
            return Err(Error::Numerical(format!(
                "{} thresholds for {} statistics",
                thresholds.bounds.len(),
                sum.len()
            )));
        }
        Ok(PowerDetector { sum, thresholds })
    }

    pub fn sum(&self) -> &SumConstellation {
        &self.sum
    }

    pub fn thresholds(&self) -> &DecisionThresholds {
        &self.thresholds
    }

    pub fn detect(&self, avg_power: f64) -> Detection {
        detect(avg_power, &self.thresholds, &self.sum)
    }
}
