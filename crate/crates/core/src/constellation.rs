//! Per-user uniform energy constellations and their nested sum constellation.
//!
//! Both users transmit on the power of their symbol only. User 1 uses the
//! grid `{m * delta1 + q1}` and user 2 the coarser grid
//! `{m * ((M - 1) * delta1 + delta2) + q2}`, so the whole span of user 1 fits
//! inside a single gap of user 2 whenever `delta2 > 0`. All points here are
//! the received (beta-scaled) energies; the transmitted energies are kept
//! alongside as `raw_points`.

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Relative tolerance below which two sum points are treated as equal.
pub const COLLISION_TOL: f64 = 1e-9;

/// The four numbers that fully determine both constellations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedDesign {
    /// Spacing of user 1 and the intra-block gap of the sum constellation.
    pub delta1: f64,
    /// Extra gap between the last point of one user-1 block and the next block.
    pub delta2: f64,
    pub offset1: f64,
    pub offset2: f64,
}

impl NestedDesign {
    /// Design with both constellations anchored at zero energy.
    pub fn new(delta1: f64, delta2: f64) -> Self {
        NestedDesign {
            delta1,
            delta2,
            offset1: 0.0,
            offset2: 0.0,
        }
    }

    pub fn with_offsets(self, offset1: f64, offset2: f64) -> Self {
        NestedDesign {
            offset1,
            offset2,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("offset1", self.offset1),
            ("offset2", self.offset2),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidDesign { name, value });
            }
        }
        Ok(())
    }

    /// Per-user grid spacings `[delta1, (M - 1) * delta1 + delta2]`.
    pub fn spacings(&self, order: usize) -> [f64; 2] {
        let m1 = order.saturating_sub(1) as f64;
        [self.delta1, m1 * self.delta1 + self.delta2]
    }

    /// True when user 2's spacing strictly exceeds the span of user 1.
    pub fn is_nested(&self) -> bool {
        self.delta2 > 0.0
    }
}

/// One user's energy levels, received (`points`) and transmitted (`raw_points`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserConstellation {
    pub points: Vec<f64>,
    pub raw_points: Vec<f64>,
}

impl UserConstellation {
    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Average transmitted energy over equiprobable symbols.
    pub fn mean_raw_power(&self) -> f64 {
        self.raw_points.iter().sum::<f64>() / self.raw_points.len() as f64
    }
}

/// Builds the uniform constellations of both users from a nested design.
pub fn build_user_constellations(
    design: &NestedDesign,
    config: &SystemConfig,
) -> Result<(UserConstellation, UserConstellation)> {
    config.validate()?;
    design.validate()?;
    let spacing = design.spacings(config.order);
    let offsets = [design.offset1, design.offset2];
    let users: Vec<UserConstellation> = (0..2)
        .map(|k| {
            let points: Vec<f64> = (0..config.order)
                .map(|m| m as f64 * spacing[k] + offsets[k])
                .collect();
            let raw_points = points.iter().map(|a| a / config.beta[k]).collect();
            UserConstellation { points, raw_points }
        })
        .collect();
    for user in &users {
        if let Some(bad) = user.points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidDesign {
                name: "constellation point",
                value: *bad,
            });
        }
    }
    let mut users = users.into_iter();
    Ok((users.next().unwrap(), users.next().unwrap()))
}

/// Per-antenna received variance `beta1*s1 + beta2*s2 + sigma^2` for
/// transmitted energies `s1`, `s2`.
pub fn sufficient_statistic(s1: f64, s2: f64, config: &SystemConfig) -> Result<f64> {
    for (name, value) in [("s1", s1), ("s2", s2)] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Domain { name, value });
        }
    }
    Ok(config.beta[0] * s1 + config.beta[1] * s2 + config.noise_var)
}

/// Sorted sufficient statistics `c_l = b_l + sigma^2` with the symbol pair
/// that produces each of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumConstellation {
    stats: Vec<f64>,
    symbol_map: Vec<(usize, usize)>,
    /// `index_of[i * M + j]` is the sorted position of pair `(i, j)`.
    index_of: Vec<usize>,
    order: usize,
}

impl SumConstellation {
    /// Nested sum constellation of `design` under `config`.
    pub fn from_design(design: &NestedDesign, config: &SystemConfig) -> Result<Self> {
        let (a1, a2) = build_user_constellations(design, config)?;
        compose_sum(&a1, &a2, config)
    }

    pub fn stats(&self) -> &[f64] {
        &self.stats
    }

    pub fn symbol_map(&self) -> &[(usize, usize)] {
        &self.symbol_map
    }

    /// Number of points, `M^2`.
    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Per-user modulation order `M`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Symbol pair `(i, j)` carried by sorted index `l`.
    pub fn pair(&self, l: usize) -> (usize, usize) {
        self.symbol_map[l]
    }

    /// Sorted index of the pair `(i, j)`.
    pub fn index_of(&self, i: usize, j: usize) -> usize {
        self.index_of[i * self.order + j]
    }

    /// Consecutive ratios `c_{l+1} / c_l`, `M^2 - 1` of them.
    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.stats.windows(2).map(|w| w[1] / w[0])
    }

    /// Consecutive differences `c_{l+1} - c_l`.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.stats.windows(2).map(|w| w[1] - w[0])
    }

    /// Checks the sortedness and positivity the detector relies on.
    pub(crate) fn check_valid(&self) -> Result<()> {
        if self.stats.is_empty() {
            return Err(Error::Numerical("empty sum constellation".into()));
        }
        if self.stats[0] <= 0.0 || !self.stats[0].is_finite() {
            return Err(Error::Domain {
                name: "c_1",
                value: self.stats[0],
            });
        }
        for (l, w) in self.stats.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::Collision {
                    first: self.symbol_map[l],
                    second: self.symbol_map[l + 1],
                    value: w[1],
                });
            }
        }
        Ok(())
    }
}

/// Enumerates all `M^2` sums, adds the noise floor, sorts them and verifies
/// unique factorability.
pub fn compose_sum(
    c1: &UserConstellation,
    c2: &UserConstellation,
    config: &SystemConfig,
) -> Result<SumConstellation> {
    let order = c1.order();
    if c2.order() != order {
        return Err(Error::OrderMismatch(order, c2.order()));
    }
    if order == 0 {
        return Err(Error::InvalidConfig("empty constellation".into()));
    }
    let mut entries: Vec<(f64, (usize, usize))> = Vec::with_capacity(order * order);
    for (j, a2) in c2.points.iter().enumerate() {
        for (i, a1) in c1.points.iter().enumerate() {
            entries.push((a1 + a2 + config.noise_var, (i, j)));
        }
    }
    entries.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1 .1.cmp(&y.1 .1))
            .then(x.1 .0.cmp(&y.1 .0))
    });

    let top = entries.last().map_or(1.0, |e| e.0);
    let tol = COLLISION_TOL * top.max(1.0);
    for w in entries.windows(2) {
        if w[1].0 - w[0].0 < tol {
            return Err(Error::Collision {
                first: w[0].1,
                second: w[1].1,
                value: w[1].0,
            });
        }
    }

    let mut index_of = vec![0; order * order];
    for (l, (_, (i, j))) in entries.iter().enumerate() {
        index_of[i * order + j] = l;
    }
    let (stats, symbol_map) = entries.into_iter().unzip();
    Ok(SumConstellation {
        stats,
        symbol_map,
        index_of,
        order,
    })
}

/// Slack of the two expanded average-power constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSlack {
    pub slack: [f64; 2],
}

impl PowerSlack {
    pub fn is_feasible(&self) -> bool {
        self.slack.iter().all(|s| *s >= 0.0)
    }

    /// Feasible up to `rel_tol` of the respective budget.
    pub fn is_feasible_within(&self, budgets: [f64; 2], rel_tol: f64) -> bool {
        (0..2).all(|k| self.slack[k] >= -rel_tol * budgets[k])
    }
}

/// Evaluates `q1 + (M-1)/2 delta1 <= beta1 P1` and
/// `q1 + q2 + (M-1)/2 ((M-1) delta1 + delta2) <= beta2 P2`.
///
/// Users must already be ordered with `beta1 P1 <= beta2 P2`.
pub fn check_power_constraints(design: &NestedDesign, config: &SystemConfig) -> Result<PowerSlack> {
    config.validate()?;
    design.validate()?;
    config.require_ordered()?;
    let [b1, b2] = config.budgets();
    let half = (config.order - 1) as f64 / 2.0;
    let [_, spacing2] = design.spacings(config.order);
    let used1 = design.offset1 + half * design.delta1;
    let used2 = design.offset1 + design.offset2 + half * spacing2;
    Ok(PowerSlack {
        slack: [b1 - used1, b2 - used2],
    })
}
