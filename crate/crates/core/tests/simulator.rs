use noma_simo::prelude::*;
use noma_simo::simulator::{block_rng, channel_trial, channel_trial_with_phase, statistic_trial};

fn config(n: usize) -> SystemConfig {
    SystemConfig::new(n, 0.5, [0.7, 1.3], [5.0, 20.0], 2).unwrap()
}

/// One-sample Kolmogorov-Smirnov distance against `cdf`.
fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

// critical value at alpha = 0.001
fn ks_critical(n: f64, m: f64) -> f64 {
    1.95 * ((n + m) / (n * m)).sqrt()
}

#[test]
fn channel_energy_has_mean_n_c() {
    let cfg = config(16);
    let energies = [2.0, 7.0];
    let c = sufficient_statistic(energies[0], energies[1], &cfg).unwrap();
    let mut rng = block_rng(3, 0);
    let draws = 40_000;
    let mean = (0..draws)
        .map(|_| channel_trial(&cfg, energies, &mut rng))
        .sum::<f64>()
        / draws as f64;
    let want = 16.0 * c;
    // the sample mean has standard deviation sqrt(N) c / sqrt(draws)
    let sd = 4.0 * c / (draws as f64).sqrt();
    assert!((mean - want).abs() < 5.0 * sd, "{mean} vs {want}");
}

#[test]
fn silent_users_leave_noise_only() {
    let cfg = config(8);
    let mut rng = block_rng(5, 0);
    let xs: Vec<f64> = (0..20_000)
        .map(|_| channel_trial(&cfg, [0.0, 0.0], &mut rng) / cfg.noise_var)
        .collect();
    let d = ks_distance(xs, |x| chi2_cdf_g(x, 8).unwrap());
    assert!(d < ks_critical(20_000.0, 1e18), "ks = {d}");
}

#[test]
fn statistic_draws_follow_g() {
    let c = 3.5;
    let mut rng = block_rng(11, 0);
    let xs: Vec<f64> = (0..20_000)
        .map(|_| statistic_trial(c, 4, &mut rng) / c)
        .collect();
    let d = ks_distance(xs, |x| chi2_cdf_g(x, 4).unwrap());
    assert!(d < ks_critical(20_000.0, 1e18), "ks = {d}");
}

#[test]
fn channel_and_statistic_samplers_agree() {
    let cfg = config(8);
    let energies = [1.0, 4.0];
    let c = sufficient_statistic(energies[0], energies[1], &cfg).unwrap();
    let mut rng = block_rng(17, 0);
    let a: Vec<f64> = (0..20_000)
        .map(|_| channel_trial(&cfg, energies, &mut rng))
        .collect();
    let mut rng = block_rng(17, 1);
    let b: Vec<f64> = (0..20_000)
        .map(|_| statistic_trial(c, 8, &mut rng))
        .collect();
    let d = ks_two_sample(a, b);
    assert!(d < ks_critical(20_000.0, 20_000.0), "ks = {d}");
}

#[test]
fn transmit_phase_is_irrelevant() {
    let cfg = config(8);
    let energies = [1.0, 4.0];
    let mut rng = block_rng(23, 0);
    let a: Vec<f64> = (0..20_000)
        .map(|_| channel_trial(&cfg, energies, &mut rng))
        .collect();
    let mut rng = block_rng(23, 1);
    let b: Vec<f64> = (0..20_000)
        .map(|_| channel_trial_with_phase(&cfg, energies, [1.1, -2.3], &mut rng))
        .collect();
    assert!(ks_two_sample(a, b) < ks_critical(20_000.0, 20_000.0));
}

#[test]
fn per_symbol_success_matches_closed_form() {
    let cfg = config(16);
    let sol = solve_p3(&cfg).unwrap();
    let sum = SumConstellation::from_design(&sol.design, &cfg).unwrap();
    let probs = success_probs(&sum, 16).unwrap();
    let r = run_monte_carlo(
        &cfg,
        &sol.design,
        &McConfig::new(400_000, 9, SimMode::StatisticLevel).with_workers(4),
    )
    .unwrap();
    for ((p, hat), &n) in probs
        .iter()
        .zip(&r.per_symbol_success)
        .zip(&r.per_symbol_trials)
    {
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hat - p).abs() <= 4.0 * sd + 1.0 / n as f64, "{hat} vs {p}");
    }
    assert_eq!(r.per_symbol_trials.iter().sum::<u64>(), r.trials);
    assert!(r.user_errors[0] + r.user_errors[1] >= r.errors);
    assert!(r.ci95.0 <= r.sser_hat && r.sser_hat <= r.ci95.1);
}

#[test]
fn channel_and_statistic_modes_agree_with_exact() {
    let cfg = config(8);
    let sol = solve_p3(&cfg).unwrap();
    let sum = SumConstellation::from_design(&sol.design, &cfg).unwrap();
    let exact = exact_sser(&sum, 8).unwrap().sser;
    let trials = 100_000;
    for mode in [SimMode::StatisticLevel, SimMode::ChannelLevel] {
        let r = run_monte_carlo(
            &cfg,
            &sol.design,
            &McConfig::new(trials, 77, mode).with_workers(4),
        )
        .unwrap();
        let band = noma_simo::cli::binomial_band(exact, trials, 4.0);
        assert!(
            (r.sser_hat - exact).abs() <= band,
            "{mode:?}: {} vs {exact}",
            r.sser_hat
        );
    }
}

#[test]
fn channel_mode_is_worker_independent() {
    let cfg = config(4);
    let design = NestedDesign::new(2.0, 3.0);
    let base = McConfig::new(30_000, 5, SimMode::ChannelLevel);
    let one = run_monte_carlo(&cfg, &design, &base).unwrap();
    assert_eq!(
        run_monte_carlo(&cfg, &design, &base.with_workers(16)).unwrap(),
        one
    );
    assert_eq!(
        run_monte_carlo(&cfg, &design, &base.with_workers(3)).unwrap(),
        one
    );
}
