//! Constellation designs for the two-user nested family.
//!
//! For large antenna counts the error rate is governed by the smallest ratio
//! of adjacent statistics, and for the nested family only two ratios can be
//! binding: the last `delta1` gap and the last `delta2` gap. With both offsets
//! at zero the design problem becomes
//!
//! ```text
//! maximize min{ X / (X - delta1), Y / (Y - delta2) }
//!   X = M(M-1) delta1 + (M-1) delta2 + sigma^2
//!   Y = (M-1)^2 delta1 + (M-1) delta2 + sigma^2
//! s.t. (M-1)/2 delta1 <= beta1 P1,  (M-1)/2 ((M-1) delta1 + delta2) <= beta2 P2
//! ```
//!
//! whose optimum balances the two ratios on one of the two constraints.
//! [`solve_p3`] returns that closed form, [`grid_search_p3`] is a brute-force
//! oracle over all `M^2 - 1` ratios and [`med_design`] is the equal-gap
//! minimum-distance baseline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::constellation::{check_power_constraints, NestedDesign};
use crate::error::{Error, Result};

/// Relative agreement required between the two routes to the case-2 `delta2`.
pub const CASE2_ROUTE_TOL: f64 = 1e-9;

/// Which power constraint is active at the design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// The joint (user-2) constraint is tight.
    Case1Constraint2Tight,
    /// User 1's own constraint is tight.
    Case2Constraint1Tight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    pub design: NestedDesign,
    /// Min adjacent ratio achieved by the design.
    pub objective: f64,
    pub case_tag: CaseTag,
    /// The last-`delta1`-gap and last-`delta2`-gap ratios.
    pub ratios: [f64; 2],
}

/// The two ratios that can bind in a zero-offset nested design.
pub fn p3_ratios(delta1: f64, delta2: f64, noise_var: f64, order: usize) -> [f64; 2] {
    let m = order as f64;
    let x = m * (m - 1.0) * delta1 + (m - 1.0) * delta2 + noise_var;
    let y = (m - 1.0) * (m - 1.0) * delta1 + (m - 1.0) * delta2 + noise_var;
    [x / (x - delta1), y / (y - delta2)]
}

/// Min adjacent ratio over the full sorted zero-offset sum constellation.
///
/// Duplicated points give a ratio of exactly 1.
pub fn enumerated_min_ratio(delta1: f64, delta2: f64, noise_var: f64, order: usize) -> f64 {
    let spacing2 = (order as f64 - 1.0) * delta1 + delta2;
    let mut stats: Vec<f64> = (0..order)
        .flat_map(|j| (0..order).map(move |i| i as f64 * delta1 + j as f64 * spacing2 + noise_var))
        .collect();
    stats.sort_by(f64::total_cmp);
    stats
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Positive root of `u^2 + (s + sigma^2 M/(M-1)) u - (s^2 + s sigma^2)/(M-1) = 0`,
/// the user-1 span `(M-1) delta1` that balances both ratios when user 2's
/// span budget is `s`.
pub fn delta1_dagger(delta2_tilde: f64, noise_var: f64, order: usize) -> Result<f64> {
    if order < 2 {
        return Err(Error::Domain {
            name: "order",
            value: order as f64,
        });
    }
    if !(delta2_tilde >= 0.0) || !delta2_tilde.is_finite() {
        return Err(Error::Domain {
            name: "delta2_tilde",
            value: delta2_tilde,
        });
    }
    if !(noise_var > 0.0) {
        return Err(Error::Domain {
            name: "noise_var",
            value: noise_var,
        });
    }
    let m1 = order as f64 - 1.0;
    let b = delta2_tilde + noise_var + noise_var / m1;
    let k = (delta2_tilde * delta2_tilde + delta2_tilde * noise_var) / m1;
    // (-b + sqrt(b^2 + 4k)) / 2 without cancellation
    Ok(2.0 * k / (b + (b * b + 4.0 * k).sqrt()))
}

/// Case-2 `delta2` from the closed form
/// `(-(s + a) + sqrt((s - a)^2 + 4 (a^2 + a sigma^2 + a s)/(M-1))) / 2`
/// with `a = 2 beta1 P1` and `s = sigma^2/(M-1)`.
///
/// Evaluated as `2k / ((s + a) + sqrt(disc))`, where `k = (disc - (s + a)^2)/4`
/// simplifies to `(a^2 + a sigma^2 + a s)/(M-1) - a s`, so a large noise floor
/// does not cancel the numerator away.
fn case2_delta2_closed(span1: f64, noise_var: f64, order: usize) -> f64 {
    let m1 = order as f64 - 1.0;
    let a = span1;
    let s = noise_var / m1;
    let p = (a * a + a * noise_var + a * s) / m1;
    let disc = (s - a).powi(2) + 4.0 * p;
    let k = p - a * s;
    2.0 * k / ((s + a) + disc.sqrt())
}

/// Case-2 `delta2` as the root of `delta1 * Y(delta2) = delta2 * X(delta2)`,
/// found by bisection.
fn case2_delta2_balanced(delta1: f64, noise_var: f64, order: usize) -> f64 {
    let m = order as f64;
    let imbalance = |d2: f64| {
        let x = m * (m - 1.0) * delta1 + (m - 1.0) * d2 + noise_var;
        let y = (m - 1.0) * (m - 1.0) * delta1 + (m - 1.0) * d2 + noise_var;
        delta1 * y - d2 * x
    };
    let mut lo = 0.0;
    let mut hi = delta1.max(noise_var).max(1e-300);
    while imbalance(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if imbalance(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn require_design_config(config: &SystemConfig) -> Result<()> {
    config.validate()?;
    if config.order < 2 {
        return Err(Error::Domain {
            name: "order",
            value: config.order as f64,
        });
    }
    config.require_ordered()?;
    let [b1, b2] = config.budgets();
    if !(b1 > 0.0 && b2 > 0.0) {
        return Err(Error::Infeasible(format!("nonpositive budgets {b1}, {b2}")));
    }
    Ok(())
}

fn solution(design: NestedDesign, config: &SystemConfig, case_tag: CaseTag) -> DesignSolution {
    let ratios = p3_ratios(design.delta1, design.delta2, config.noise_var, config.order);
    DesignSolution {
        design,
        objective: ratios[0].min(ratios[1]),
        case_tag,
        ratios,
    }
}

/// Closed-form asymptotically optimal design with zero offsets.
pub fn solve_p3(config: &SystemConfig) -> Result<DesignSolution> {
    require_design_config(config)?;
    let m1 = config.order as f64 - 1.0;
    let sigma2 = config.noise_var;
    let [b1, b2] = config.budgets();
    let span2 = 2.0 * b2;
    let span1 = 2.0 * b1;
    let dagger = delta1_dagger(span2, sigma2, config.order)?;

    if dagger <= span1 {
        let delta1 = dagger / m1;
        let delta2 = span2 / m1 - dagger;
        return Ok(solution(
            NestedDesign::new(delta1, delta2),
            config,
            CaseTag::Case1Constraint2Tight,
        ));
    }

    let delta1 = span1 / m1;
    let closed = case2_delta2_closed(span1, sigma2, config.order);
    let balanced = case2_delta2_balanced(delta1, sigma2, config.order);
    if (closed - balanced).abs() > CASE2_ROUTE_TOL * closed.abs().max(balanced.abs()) {
        return Err(Error::Numerical(format!(
            "case-2 delta2 routes disagree: closed form {closed}, ratio balance {balanced}"
        )));
    }
    Ok(solution(
        NestedDesign::new(delta1, closed),
        config,
        CaseTag::Case2Constraint1Tight,
    ))
}

/// Exhaustive search over a `(resolution + 1)^2` grid on
/// `[0, 2 beta1 P1/(M-1)] x [0, 2 beta2 P2/(M-1)]`, keeping only points that
/// satisfy both power constraints.
///
/// The objective enumerates every adjacent ratio. Ties resolve to the smallest
/// `(delta1, delta2)` grid index, so the result does not depend on how the rows
/// are split across threads.
pub fn grid_search_p3(config: &SystemConfig, resolution: usize) -> Result<DesignSolution> {
    require_design_config(config)?;
    if resolution < 100 {
        return Err(Error::Domain {
            name: "resolution",
            value: resolution as f64,
        });
    }
    let m1 = config.order as f64 - 1.0;
    let [b1, b2] = config.budgets();
    let max1 = 2.0 * b1 / m1;
    let max2 = 2.0 * b2 / m1;
    let res = resolution as f64;
    let feasible_tol = 1e-12;

    let best = (0..=resolution)
        .into_par_iter()
        .filter_map(|i| {
            let delta1 = max1 * (i as f64 / res);
            let mut row_best: Option<(f64, usize, usize)> = None;
            for j in 0..=resolution {
                let delta2 = max2 * (j as f64 / res);
                let used2 = m1 / 2.0 * (m1 * delta1 + delta2);
                if used2 > b2 * (1.0 + feasible_tol) {
                    break;
                }
                let obj = enumerated_min_ratio(delta1, delta2, config.noise_var, config.order);
                if row_best.is_none_or(|b| obj > b.0) {
                    row_best = Some((obj, i, j));
                }
            }
            row_best
        })
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                b
            } else {
                a
            }
        })
        .ok_or_else(|| Error::Infeasible("no feasible grid point".into()))?;

    let (objective, i, j) = best;
    let design = NestedDesign::new(max1 * (i as f64 / res), max2 * (j as f64 / res));
    let slack = check_power_constraints(&design, config)?;
    let case_tag = if slack.slack[1] / b2 <= slack.slack[0] / b1 {
        CaseTag::Case1Constraint2Tight
    } else {
        CaseTag::Case2Constraint1Tight
    };
    Ok(DesignSolution {
        design,
        objective,
        case_tag,
        ratios: p3_ratios(design.delta1, design.delta2, config.noise_var, config.order),
    })
}

/// Bound on how far a grid optimum at `resolution` can fall below the exact
/// optimum `solution`.
///
/// Rounding the optimum down to the grid moves each spacing by at most one
/// step, so the loss is at most the step-weighted steepest partial derivative
/// of either ratio, doubled for the curvature across one cell.
pub fn grid_spacing_slack(
    config: &SystemConfig,
    resolution: usize,
    solution: &DesignSolution,
) -> f64 {
    let m1 = config.order as f64 - 1.0;
    let [b1, b2] = config.budgets();
    let steps = [
        2.0 * b1 / m1 / resolution as f64,
        2.0 * b2 / m1 / resolution as f64,
    ];
    let point = [solution.design.delta1, solution.design.delta2];
    let mut slack = 0.0;
    for k in 0..2 {
        let h = 1e-6 * point[k].max(steps[k]);
        let mut up = point;
        let mut down = point;
        up[k] += h;
        down[k] = (down[k] - h).max(0.0);
        let r_up = p3_ratios(up[0], up[1], config.noise_var, config.order);
        let r_down = p3_ratios(down[0], down[1], config.noise_var, config.order);
        let steepest = (0..2)
            .map(|r| ((r_up[r] - r_down[r]) / (up[k] - down[k])).abs())
            .fold(0.0, f64::max);
        slack += steps[k] * steepest;
    }
    2.0 * slack
}

/// Equal-gap nested design with the largest uniform spacing both budgets allow.
pub fn med_design(config: &SystemConfig) -> Result<DesignSolution> {
    require_design_config(config)?;
    let m = config.order as f64;
    let [b1, b2] = config.budgets();
    let by_user1 = 2.0 * b1 / (m - 1.0);
    let by_user2 = 2.0 * b2 / (m * (m - 1.0));
    let (delta, case_tag) = if by_user1 < by_user2 {
        (by_user1, CaseTag::Case2Constraint1Tight)
    } else {
        (by_user2, CaseTag::Case1Constraint2Tight)
    };
    let design = NestedDesign::new(delta, delta);
    let mut sol = solution(design, config, case_tag);
    sol.objective = enumerated_min_ratio(delta, delta, config.noise_var, config.order);
    Ok(sol)
}
