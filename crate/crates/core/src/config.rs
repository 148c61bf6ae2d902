//! Physical parameters of the two-user uplink.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Antenna count, noise level, large-scale gains, power budgets and
/// modulation order shared by both users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Receive antennas at the managing node.
    pub n_antennas: usize,
    /// Per-antenna noise variance in watts.
    pub noise_var: f64,
    /// Large-scale path gains of the two users.
    pub beta: [f64; 2],
    /// Average transmit power budgets in watts.
    pub power: [f64; 2],
    /// Constellation size per user.
    pub order: usize,
}

/// Which physical user ended up in slot 1 after [`SystemConfig::normalized`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UserOrder {
    AsGiven,
    Swapped,
}

impl UserOrder {
    /// Maps a per-slot pair back to the caller's user numbering.
    pub fn to_original<T>(self, pair: [T; 2]) -> [T; 2] {
        match self {
            UserOrder::AsGiven => pair,
            UserOrder::Swapped => {
                let [a, b] = pair;
                [b, a]
            }
        }
    }

    /// Index of the caller's user `k` (0 or 1) inside the normalized config.
    pub fn slot_of(self, k: usize) -> usize {
        match self {
            UserOrder::AsGiven => k,
            UserOrder::Swapped => 1 - k,
        }
    }
}

impl SystemConfig {
    pub fn new(
        n_antennas: usize,
        noise_var: f64,
        beta: [f64; 2],
        power: [f64; 2],
        order: usize,
    ) -> Result<Self> {
        let config = SystemConfig {
            n_antennas,
            noise_var,
            beta,
            power,
            order,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 {
            return Err(Error::InvalidConfig(
                "antenna count must be at least 1".into(),
            ));
        }
        if self.order == 0 {
            return Err(Error::InvalidConfig(
                "modulation order must be at least 1".into(),
            ));
        }
        if !(self.noise_var.is_finite() && self.noise_var > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be positive and finite, got {}",
                self.noise_var
            )));
        }
        for k in 0..2 {
            if !(self.beta[k].is_finite() && self.beta[k] > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "beta{} must be positive and finite, got {}",
                    k + 1,
                    self.beta[k]
                )));
            }
            if !(self.power[k].is_finite() && self.power[k] > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "P{} must be positive and finite, got {}",
                    k + 1,
                    self.power[k]
                )));
            }
            let budget = self.beta[k] * self.power[k];
            if !(budget.is_finite() && budget > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "effective budget beta{k1}*P{k1} = {budget} is not a positive finite number",
                    k1 = k + 1
                )));
            }
        }
        Ok(())
    }

    /// Effective received-power budgets `beta_k * P_k`.
    pub fn budgets(&self) -> [f64; 2] {
        [self.beta[0] * self.power[0], self.beta[1] * self.power[1]]
    }

    /// True when user 1 has the smaller effective budget.
    pub fn is_ordered(&self) -> bool {
        let [b1, b2] = self.budgets();
        b1 <= b2
    }

    pub(crate) fn require_ordered(&self) -> Result<()> {
        let [b1, b2] = self.budgets();
        if b1 > b2 {
            return Err(Error::Ordering {
                first: b1,
                second: b2,
            });
        }
        Ok(())
    }

    /// Swaps the users if needed so that user 1 has the smaller budget.
    pub fn normalized(&self) -> (SystemConfig, UserOrder) {
        if self.is_ordered() {
            (*self, UserOrder::AsGiven)
        } else {
            let mut swapped = *self;
            swapped.beta = [self.beta[1], self.beta[0]];
            swapped.power = [self.power[1], self.power[0]];
            (swapped, UserOrder::Swapped)
        }
    }

    pub fn with_antennas(&self, n_antennas: usize) -> SystemConfig {
        SystemConfig {
            n_antennas,
            ..*self
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SystemConfig {
        SystemConfig::new(16, 1.0, [1.0, 1.0], [5.0, 20.0], 2).unwrap()
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(SystemConfig::new(0, 1.0, [1.0, 1.0], [1.0, 1.0], 2).is_err());
        assert!(SystemConfig::new(4, 0.0, [1.0, 1.0], [1.0, 1.0], 2).is_err());
        assert!(SystemConfig::new(4, 1.0, [-1.0, 1.0], [1.0, 1.0], 2).is_err());
        assert!(SystemConfig::new(4, 1.0, [1.0, 1.0], [1.0, f64::NAN], 2).is_err());
        assert!(SystemConfig::new(4, 1.0, [1.0, 1.0], [1.0, 1.0], 0).is_err());
        assert!(SystemConfig::new(4, 1.0, [1e300, 1.0], [1e300, 1.0], 1).is_err());
    }

    #[test]
    fn normalization_swaps_larger_budget_first() {
        let cfg = SystemConfig::new(8, 1.0, [2.0, 1.0], [50.0, 20.0], 2).unwrap();
        assert!(!cfg.is_ordered());
        let (norm, order) = cfg.normalized();
        assert_eq!(order, UserOrder::Swapped);
        assert_eq!(norm.budgets(), [20.0, 100.0]);
        assert_eq!(order.to_original([1, 2]), [2, 1]);
        assert_eq!(order.slot_of(0), 1);

        let (same, order) = base().normalized();
        assert_eq!(order, UserOrder::AsGiven);
        assert_eq!(same, base());
    }

    #[test]
    fn dbm_round_trip() {
        let w = dbm_to_watts(25.0);
        assert!((w - 0.316).abs() / 0.316 < 5e-3);
        assert!((watts_to_dbm(w) - 25.0).abs() < 1e-12);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
    }
}
