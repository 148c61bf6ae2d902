use noma_simo::analysis::GapKind;
use noma_simo::detector::{compute_thresholds, detect, detect_bruteforce};
use noma_simo::optimizer::{enumerated_min_ratio, p3_ratios};
use noma_simo::prelude::*;
use proptest::prelude::*;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi).prop_map(|e: f64| 10f64.powf(e))
}

fn design_config() -> impl Strategy<Value = (NestedDesign, SystemConfig)> {
    (
        2usize..=5,
        log_uniform(-2.0, 2.0),
        log_uniform(-2.0, 2.0),
        log_uniform(-2.0, 2.0),
        0u32..10,
    )
        .prop_map(|(order, d1, d2, noise, log_n)| {
            let config =
                SystemConfig::new(1 << log_n, noise, [1.0, 1.0], [1.0, 1.0], order).unwrap();
            (NestedDesign::new(d1, d2), config)
        })
}

fn ordered_config() -> impl Strategy<Value = SystemConfig> {
    (
        2usize..=4,
        log_uniform(-2.0, 1.0),
        log_uniform(-1.0, 1.5),
        1.0f64..10.0,
    )
        .prop_map(|(order, noise, b1, k)| {
            SystemConfig::new(16, noise, [1.0, 1.0], [b1, b1 * k], order).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gaps_alternate((design, config) in design_config()) {
        let sum = SumConstellation::from_design(&design, &config).unwrap();
        let m = config.order;
        let gaps: Vec<f64> = sum.gaps().collect();
        prop_assert_eq!(gaps.len(), m * m - 1);
        let mut n1 = 0;
        for (l, g) in gaps.iter().enumerate() {
            let want = if (l + 1) % m == 0 { design.delta2 } else { design.delta1 };
            prop_assert!((g - want).abs() <= 1e-9 * sum.stats()[l + 1], "gap {} = {} want {}", l, g, want);
            n1 += usize::from((l + 1) % m != 0);
        }
        prop_assert_eq!(n1, m * (m - 1));
    }

    #[test]
    fn symbol_map_is_a_bijection((design, config) in design_config()) {
        let sum = SumConstellation::from_design(&design, &config).unwrap();
        let m = config.order;
        let mut seen = vec![false; m * m];
        for l in 0..sum.len() {
            let (i, j) = sum.pair(l);
            prop_assert_eq!(sum.index_of(i, j), l);
            prop_assert!(!seen[i * m + j]);
            seen[i * m + j] = true;
            let c = sufficient_statistic(i as f64 * design.delta1, j as f64 * design.spacings(m)[1], &config).unwrap();
            prop_assert!((c - sum.stats()[l]).abs() <= 1e-12 * c);
        }
    }

    #[test]
    fn detector_matches_bruteforce((design, config) in design_config(), u in 0.0f64..1.0) {
        let sum = SumConstellation::from_design(&design, &config).unwrap();
        let th = compute_thresholds(&sum).unwrap();
        let n = config.n_antennas;
        let avg = u * 2.0 * sum.stats().last().unwrap();
        prop_assert_eq!(detect(avg, &th, &sum).index, detect_bruteforce(n as f64 * avg, n, &sum));
        for &d in &th.bounds {
            prop_assert_eq!(detect(d, &th, &sum).index, detect_bruteforce(n as f64 * d, n, &sum));
        }
    }

    #[test]
    fn thresholds_interlace_statistics((design, config) in design_config()) {
        let sum = SumConstellation::from_design(&design, &config).unwrap();
        let th = compute_thresholds(&sum).unwrap();
        for (l, d) in th.bounds.iter().enumerate() {
            prop_assert!(sum.stats()[l] < *d && *d < sum.stats()[l + 1]);
        }
        // the detected index never decreases with power
        let mut prev = 0;
        for k in 0..200 {
            let avg = *sum.stats().last().unwrap() * 1.5 * k as f64 / 199.0;
            let idx = detect(avg, &th, &sum).index;
            prop_assert!(idx >= prev);
            prev = idx;
        }
    }

    #[test]
    fn sser_is_scale_invariant((design, config) in design_config(), k in log_uniform(-3.0, 3.0)) {
        let sum = SumConstellation::from_design(&design, &config).unwrap();
        let scaled_config = SystemConfig { noise_var: config.noise_var * k, ..config };
        let scaled = NestedDesign::new(design.delta1 * k, design.delta2 * k);
        let sum_k = SumConstellation::from_design(&scaled, &scaled_config).unwrap();
        let a = exact_sser(&sum, config.n_antennas).unwrap().sser;
        let b = exact_sser(&sum_k, config.n_antennas).unwrap().sser;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-300), "{} vs {}", a, b);
    }

    #[test]
    fn two_ratios_bind((design, config) in design_config()) {
        let [r1, r2] = p3_ratios(design.delta1, design.delta2, config.noise_var, config.order);
        let full = enumerated_min_ratio(design.delta1, design.delta2, config.noise_var, config.order);
        prop_assert!((r1.min(r2) - full).abs() <= 1e-12 * full);
        let sum = SumConstellation::from_design(&design, &config).unwrap();
        let mr = min_ratio(&sum).unwrap();
        let kind = if r1 <= r2 { GapKind::Delta1 } else { GapKind::Delta2 };
        if (r1 - r2).abs() > 1e-9 * r1 {
            prop_assert_eq!(mr.gap, kind);
        }
    }

    #[test]
    fn solution_balances_and_uses_budget(config in ordered_config()) {
        let sol = solve_p3(&config).unwrap();
        prop_assert!((sol.ratios[0] - sol.ratios[1]).abs() <= 1e-9 * sol.ratios[0]);
        let slack = check_power_constraints(&sol.design, &config).unwrap();
        prop_assert!(slack.is_feasible_within(config.budgets(), 1e-9));
        let [b1, b2] = config.budgets();
        let tight = match sol.case_tag {
            CaseTag::Case1Constraint2Tight => slack.slack[1].abs() <= 1e-9 * b2,
            CaseTag::Case2Constraint1Tight => slack.slack[0].abs() <= 1e-9 * b1,
        };
        prop_assert!(tight, "{:?} slack {:?}", sol.case_tag, slack.slack);
        // more budget never hurts
        let richer = SystemConfig { power: [config.power[0] * 1.5, config.power[1] * 1.5], ..config };
        prop_assert!(solve_p3(&richer).unwrap().objective >= sol.objective);
    }

    #[test]
    fn closed_form_beats_perturbations(config in ordered_config(), f1 in 0.5f64..1.0, f2 in 0.5f64..1.5) {
        let sol = solve_p3(&config).unwrap();
        let d = NestedDesign::new(sol.design.delta1 * f1, sol.design.delta2 * f2);
        if check_power_constraints(&d, &config).unwrap().is_feasible() {
            let obj = enumerated_min_ratio(d.delta1, d.delta2, config.noise_var, config.order);
            prop_assert!(obj <= sol.objective * (1.0 + 1e-12));
        }
    }

    #[test]
    fn serm_min_ratio_at_least_med(config in ordered_config()) {
        let serm = solve_p3(&config).unwrap();
        let med = med_design(&config).unwrap();
        prop_assert!(serm.objective >= med.objective * (1.0 - 1e-12));
    }

    #[test]
    fn gamma_stays_in_unit_interval(x in 0.0f64..5000.0, n in 1usize..=512) {
        let g = chi2_cdf_g(x, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
        let g2 = chi2_cdf_g(x * 1.01 + 1e-9, n).unwrap();
        prop_assert!(g2 >= g);
    }
}
