//! Seeded Monte Carlo link simulation.
//!
//! Trials are split into fixed blocks of [`BLOCK_TRIALS`]. Block `b` draws
//! from a ChaCha8 stream keyed by `(seed, b)`, and block tallies are integer
//! counts, so the aggregate is bit-identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::constellation::{
    build_user_constellations, compose_sum, NestedDesign, UserConstellation,
};
use crate::detector::{DecisionThresholds, PowerDetector};
use crate::error::{Error, Result};

pub const BLOCK_TRIALS: u64 = 4096;

/// Normal quantile for a two-sided 95% interval.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimMode {
    /// Draws the channel and noise per antenna and sums `|y_n|^2`.
    ChannelLevel,
    /// Draws `||y||^2 = c * Gamma(N, 1)` directly.
    StatisticLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
    pub workers: usize,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, mode: SimMode) -> Self {
        McConfig {
            trials,
            seed,
            mode,
            workers: 1,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        McConfig { workers, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub trials: u64,
    pub errors: u64,
    pub sser_hat: f64,
    /// Wilson 95% interval on the system symbol error rate.
    pub ci95: (f64, f64),
    /// Empirical success frequency per sorted statistic.
    pub per_symbol_success: Vec<f64>,
    /// Transmissions per sorted statistic.
    pub per_symbol_trials: Vec<u64>,
    /// Marginal symbol errors of user 1 and user 2 (diagnostic only).
    pub user_errors: [u64; 2],
}

/// Wilson score interval for `errors` out of `trials` at normal quantile `z`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // rounding can leave p a hair outside at the extremes
    (
        (centre - half).max(0.0).min(p),
        (centre + half).min(1.0).max(p),
    )
}

/// Independent stream for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// `||y||^2` for one use of the channel with transmitted energies
/// `raw_energies` and phase 0 on both users.
pub fn channel_trial<R: Rng + ?Sized>(
    config: &SystemConfig,
    raw_energies: [f64; 2],
    rng: &mut R,
) -> f64 {
    channel_trial_with_phase(config, raw_energies, [0.0, 0.0], rng)
}

/// As [`channel_trial`] with arbitrary transmit phases (radians).
pub fn channel_trial_with_phase<R: Rng + ?Sized>(
    config: &SystemConfig,
    raw_energies: [f64; 2],
    phases: [f64; 2],
    rng: &mut R,
) -> f64 {
    let x: [(f64, f64); 2] = std::array::from_fn(|k| {
        let amp = raw_energies[k].sqrt();
        (amp * phases[k].cos(), amp * phases[k].sin())
    });
    let gain_sd = [(config.beta[0] / 2.0).sqrt(), (config.beta[1] / 2.0).sqrt()];
    let noise_sd = (config.noise_var / 2.0).sqrt();
    let mut energy = 0.0;
    for _ in 0..config.n_antennas {
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..2 {
            let h_re = gain_sd[k] * rng.sample::<f64, _>(StandardNormal);
            let h_im = gain_sd[k] * rng.sample::<f64, _>(StandardNormal);
            re += h_re * x[k].0 - h_im * x[k].1;
            im += h_re * x[k].1 + h_im * x[k].0;
        }
        re += noise_sd * rng.sample::<f64, _>(StandardNormal);
        im += noise_sd * rng.sample::<f64, _>(StandardNormal);
        energy += re * re + im * im;
    }
    energy
}

/// `||y||^2` drawn directly as `c_stat` times a sum of `N` unit exponentials.
pub fn statistic_trial<R: Rng + ?Sized>(c_stat: f64, n_antennas: usize, rng: &mut R) -> f64 {
    let gamma = Gamma::new(n_antennas as f64, 1.0).expect("shape >= 1");
    c_stat * gamma.sample(rng)
}

#[derive(Debug, Clone, Default)]
struct Tally {
    errors: u64,
    user_errors: [u64; 2],
    sent: Vec<u64>,
    correct: Vec<u64>,
}

impl Tally {
    fn new(len: usize) -> Self {
        Tally {
            sent: vec![0; len],
            correct: vec![0; len],
            ..Default::default()
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.errors += other.errors;
        for k in 0..2 {
            self.user_errors[k] += other.user_errors[k];
        }
        for (a, b) in self.sent.iter_mut().zip(other.sent) {
            *a += b;
        }
        for (a, b) in self.correct.iter_mut().zip(other.correct) {
            *a += b;
        }
        self
    }
}

struct Link<'a> {
    config: &'a SystemConfig,
    users: (UserConstellation, UserConstellation),
    detector: PowerDetector,
    gamma: Gamma<f64>,
}

impl Link<'_> {
    fn run_block(&self, mode: SimMode, seed: u64, block: u64, trials: u64) -> Tally {
        let sum = self.detector.sum();
        let order = sum.order();
        let n = self.config.n_antennas as f64;
        let mut rng = block_rng(seed, block);
        let mut tally = Tally::new(sum.len());
        for _ in 0..trials {
            let i = rng.random_range(0..order);
            let j = rng.random_range(0..order);
            let l = sum.index_of(i, j);
            let y_norm_sq = match mode {
                SimMode::StatisticLevel => sum.stats()[l] * self.gamma.sample(&mut rng),
                SimMode::ChannelLevel => channel_trial(
                    self.config,
                    [self.users.0.raw_points[i], self.users.1.raw_points[j]],
                    &mut rng,
                ),
            };
            let det = self.detector.detect(y_norm_sq / n);
            tally.sent[l] += 1;
            if det.pair == (i, j) {
                tally.correct[l] += 1;
            } else {
                tally.errors += 1;
                tally.user_errors[0] += u64::from(det.pair.0 != i);
                tally.user_errors[1] += u64::from(det.pair.1 != j);
            }
        }
        tally
    }
}

/// Simulates `mc.trials` equiprobable transmissions of the nested design and
/// counts joint detection errors.
pub fn run_monte_carlo(
    config: &SystemConfig,
    design: &NestedDesign,
    mc: &McConfig,
) -> Result<McResult> {
    run_monte_carlo_inner(config, design, mc, None)
}

/// As [`run_monte_carlo`] but detecting with the supplied thresholds.
pub fn run_monte_carlo_with_thresholds(
    config: &SystemConfig,
    design: &NestedDesign,
    mc: &McConfig,
    thresholds: DecisionThresholds,
) -> Result<McResult> {
    run_monte_carlo_inner(config, design, mc, Some(thresholds))
}

fn run_monte_carlo_inner(
    config: &SystemConfig,
    design: &NestedDesign,
    mc: &McConfig,
    thresholds: Option<DecisionThresholds>,
) -> Result<McResult> {
    if mc.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if mc.workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    let users = build_user_constellations(design, config)?;
    let sum = compose_sum(&users.0, &users.1, config)?;
    let detector = match thresholds {
        Some(th) => PowerDetector::with_thresholds(sum, th)?,
        None => PowerDetector::new(sum)?,
    };
    let link = Link {
        config,
        users,
        detector,
        gamma: Gamma::new(config.n_antennas as f64, 1.0)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?,
    };
    let len = link.detector.sum().len();
    let blocks = mc.trials.div_ceil(BLOCK_TRIALS);
    let block_len = |b: u64| BLOCK_TRIALS.min(mc.trials - b * BLOCK_TRIALS);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(mc.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let tally = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| link.run_block(mc.mode, mc.seed, b, block_len(b)))
            .reduce(|| Tally::new(len), Tally::merge)
    });

    let per_symbol_success = tally
        .correct
        .iter()
        .zip(&tally.sent)
        .map(|(&c, &s)| {
            if s == 0 {
                f64::NAN
            } else {
                c as f64 / s as f64
            }
        })
        .collect();
    Ok(McResult {
        trials: mc.trials,
        errors: tally.errors,
        sser_hat: tally.errors as f64 / mc.trials as f64,
        ci95: wilson_interval(tally.errors, mc.trials, Z_95),
        per_symbol_success,
        per_symbol_trials: tally.sent,
        user_errors: tally.user_errors,
    })
}
