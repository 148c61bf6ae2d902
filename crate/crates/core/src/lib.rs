//! Two-user noncoherent NOMA over a massive SIMO uplink.
//!
//! Two single-antenna nodes put information only on the energy of their
//! symbols and transmit at the same time to an `N`-antenna receiver that has
//! no instantaneous channel knowledge. The receiver sees
//! `c = beta1 |x1|^2 + beta2 |x2|^2 + sigma^2` through `||y||^2` alone, so the
//! pair of energy constellations has to be designed jointly.
//!
//! * [`constellation`] builds the nested uniform constellations and their sum.
//! * [`detector`] is the threshold form of the ML detector plus an exhaustive
//!   oracle.
//! * [`analysis`] evaluates the exact system symbol error rate.
//! * [`optimizer`] gives the closed-form max-min-ratio design, a grid-search
//!   oracle and the equal-gap minimum-distance baseline.
//! * [`simulator`] runs seeded, worker-count-independent Monte Carlo.
//! * [`cli`] reads experiment files and produces reports and CSV sweeps.
//!
//! ```
//! use noma_simo::prelude::*;
//!
//! let config = SystemConfig::new(64, 1.0, [1.0, 1.0], [5.0, 20.0], 2).unwrap();
//! let sol = solve_p3(&config).unwrap();
//! let sum = SumConstellation::from_design(&sol.design, &config).unwrap();
//! let report = exact_sser(&sum, config.n_antennas).unwrap();
//! assert!(report.sser < 0.1);
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod constellation;
pub mod detector;
pub mod error;
pub mod optimizer;
pub mod simulator;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        chi2_cdf_g, exact_sser, min_ratio, pairwise_error_f, success_probs, SserReport,
    };
    pub use crate::config::{dbm_to_watts, SystemConfig, UserOrder};
    pub use crate::constellation::{
        build_user_constellations, check_power_constraints, compose_sum, sufficient_statistic,
        NestedDesign, SumConstellation, UserConstellation,
    };
    pub use crate::detector::{compute_thresholds, detect, detect_bruteforce, mu, PowerDetector};
    pub use crate::optimizer::{
        delta1_dagger, grid_search_p3, med_design, solve_p3, CaseTag, DesignSolution,
    };
    pub use crate::simulator::{run_monte_carlo, McConfig, McResult, SimMode};
}
