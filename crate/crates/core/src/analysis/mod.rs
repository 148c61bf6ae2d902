//! Closed-form error analysis of the threshold detector.
//!
//! With sorted statistics `c_l` and ratios `t_l = c_{l+1} / c_l`, symbol `l`
//! is decoded correctly when `||y||^2 / c_l` lands between `N mu(t_{l-1})` and
//! `N t_l mu(t_l)`. Summing the complementary masses gives the system symbol
//! error rate
//!
//! ```text
//! P_e = (1 / M^2) * sum_l F(t_l),   F(t) = 1 + G(N mu(t)) - G(N t mu(t)).
//! ```

pub mod gamma;

use serde::{Deserialize, Serialize};

pub use gamma::{chi2_cdf_g, chi2_sf_g, regularized_gamma_pair};

use crate::constellation::SumConstellation;
use crate::detector::mu_unchecked;
use crate::error::{Error, Result};

/// Ratios this far below 1 are rounding noise and get clamped.
const RATIO_CLAMP_TOL: f64 = 1e-12;

/// Exact analytics of one sum constellation at a given antenna count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SserReport {
    pub sser: f64,
    pub success_probs: Vec<f64>,
    /// `+inf` for a single-point constellation.
    pub min_ratio: f64,
}

/// Which user's grid produced a gap of the sum constellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    /// User 1 stepped within a block: the gap is `delta1`.
    Delta1,
    /// User 2 stepped to the next block: the gap is `delta2`.
    Delta2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinRatio {
    pub value: f64,
    /// Zero-based `l` of the binding ratio `c_{l+1} / c_l`.
    pub index: usize,
    pub gap: GapKind,
}

/// `F(t) = 1 + G(N mu(t)) - G(N t mu(t))`, the error mass contributed by one
/// adjacent pair of statistics with ratio `t`.
pub fn pairwise_error_f(t: f64, n_antennas: usize) -> Result<f64> {
    if !(t >= 1.0 - RATIO_CLAMP_TOL) {
        return Err(Error::Domain {
            name: "t",
            value: t,
        });
    }
    if n_antennas == 0 {
        return Err(Error::Domain {
            name: "n_antennas",
            value: 0.0,
        });
    }
    let t = t.max(1.0);
    if t == f64::INFINITY {
        return Ok(0.0);
    }
    let n = n_antennas as f64;
    let m = mu_unchecked(t);
    let below = chi2_cdf_g(n * m, n_antennas)?;
    let above = chi2_sf_g(n * t * m, n_antennas)?;
    Ok((below + above).min(1.0))
}

/// Per-symbol probability of correct detection, in sorted order.
pub fn success_probs(sum: &SumConstellation, n_antennas: usize) -> Result<Vec<f64>> {
    sum.check_valid()?;
    let len = sum.len();
    if len < 2 {
        return Ok(vec![1.0]);
    }
    let n = n_antennas as f64;
    let stats = sum.stats();
    // Lower and upper normalized boundaries of each region.
    let mut probs = Vec::with_capacity(len);
    for l in 0..len {
        let upper = if l + 1 < len {
            let t = stats[l + 1] / stats[l];
            Some(n * t * mu_unchecked(t))
        } else {
            None
        };
        let lower = if l > 0 {
            let t = stats[l] / stats[l - 1];
            Some(n * mu_unchecked(t))
        } else {
            None
        };
        let p = match (lower, upper) {
            (None, Some(hi)) => chi2_cdf_g(hi, n_antennas)?,
            (Some(lo), None) => chi2_sf_g(lo, n_antennas)?,
            (Some(lo), Some(hi)) => {
                // whichever tail form keeps the difference well conditioned
                let (p_lo, q_lo) = regularized_gamma_pair(n, lo)?;
                let (p_hi, q_hi) = regularized_gamma_pair(n, hi)?;
                if p_hi < 0.5 {
                    p_hi - p_lo
                } else {
                    q_lo - q_hi
                }
            }
            (None, None) => unreachable!(),
        };
        probs.push(p.clamp(0.0, 1.0));
    }
    Ok(probs)
}

/// Smallest adjacent ratio and where it occurs, `None` for a single point.
pub fn min_ratio(sum: &SumConstellation) -> Option<MinRatio> {
    let mut best: Option<MinRatio> = None;
    for (l, t) in sum.ratios().enumerate() {
        if best.is_none_or(|b| t < b.value) {
            let gap = if sum.pair(l).1 == sum.pair(l + 1).1 {
                GapKind::Delta1
            } else {
                GapKind::Delta2
            };
            best = Some(MinRatio {
                value: t,
                index: l,
                gap,
            });
        }
    }
    best
}

/// Closed-form system symbol error rate with per-symbol breakdown.
pub fn exact_sser(sum: &SumConstellation, n_antennas: usize) -> Result<SserReport> {
    sum.check_valid()?;
    if n_antennas == 0 {
        return Err(Error::Domain {
            name: "n_antennas",
            value: 0.0,
        });
    }
    let len = sum.len();
    let mut total = 0.0;
    for t in sum.ratios() {
        total += pairwise_error_f(t, n_antennas)?;
    }
    Ok(SserReport {
        sser: total / len as f64,
        success_probs: success_probs(sum, n_antennas)?,
        min_ratio: min_ratio(sum).map_or(f64::INFINITY, |m| m.value),
    })
}
