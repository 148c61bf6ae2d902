//! Experiment files and the `design`, `sweep` and `validate` commands.
//!
//! An experiment is a flat `key = value` text file. Keys that are absent keep
//! the values of [`ExperimentSpec::demo`]. Powers are given either with a
//! suffixed key (`p1_dbm`, `p1_w`) or with a unit on the value
//! (`p1 = 25dBm`, `p1 = 0.316W`).

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{exact_sser, min_ratio};
use crate::config::{dbm_to_watts, SystemConfig, UserOrder};
use crate::constellation::{
    build_user_constellations, check_power_constraints, NestedDesign, SumConstellation,
};
use crate::detector::{compute_thresholds, detect, detect_bruteforce, DecisionThresholds};
use crate::error::Error;
use crate::optimizer::{grid_search_p3, med_design, solve_p3, DesignSolution};
use crate::simulator::{run_monte_carlo, McConfig, McResult, SimMode};

pub const CSV_HEADER: &str =
    "n_antennas,design,delta1,delta2,min_ratio,sser_exact,sser_mc,ci_low,ci_high,trials,seed";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("infeasible design: {0}")]
    Infeasible(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Validation(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) | Error::Collision { .. } => CliError::Infeasible(e.to_string()),
            Error::Numerical(_) => CliError::Validation(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Serm,
    Med,
    Custom,
}

impl DesignKind {
    pub fn name(self) -> &'static str {
        match self {
            DesignKind::Serm => "serm",
            DesignKind::Med => "med",
            DesignKind::Custom => "custom",
        }
    }
}

/// Everything one run of the tool needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub config: SystemConfig,
    pub n_sweep: Vec<usize>,
    pub designs: Vec<DesignKind>,
    /// Design used when `designs` contains `custom`, in normalized user slots.
    pub custom: Option<NestedDesign>,
    pub mc: Option<McConfig>,
    pub output_path: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Two equal 25 dBm users with path gains 0.5 and 1.0, 10 mW noise,
    /// binary energy modulation and antenna counts 8 to 512.
    pub fn demo() -> Self {
        let p = dbm_to_watts(25.0);
        ExperimentSpec {
            config: SystemConfig {
                n_antennas: 64,
                noise_var: 0.01,
                beta: [0.5, 1.0],
                power: [p, p],
                order: 2,
            },
            n_sweep: vec![8, 16, 32, 64, 128, 256, 512],
            designs: vec![DesignKind::Serm, DesignKind::Med],
            custom: None,
            mc: None,
            output_path: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut spec = ExperimentSpec::demo();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            spec.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| format!("`{key}`: `{v}` is not a number"))
        };
        let int = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| format!("`{key}`: `{v}` is not a nonnegative integer"))
        };
        match key {
            "n" => self.config.n_antennas = int(value)? as usize,
            "m" => self.config.order = int(value)? as usize,
            "sigma2" => self.config.noise_var = num(value)?,
            "beta1" => self.config.beta[0] = num(value)?,
            "beta2" => self.config.beta[1] = num(value)?,
            "p1_dbm" => self.config.power[0] = dbm_to_watts(num(value)?),
            "p2_dbm" => self.config.power[1] = dbm_to_watts(num(value)?),
            "p1_w" => self.config.power[0] = num(value)?,
            "p2_w" => self.config.power[1] = num(value)?,
            "p1" => self.config.power[0] = parse_power(value)?,
            "p2" => self.config.power[1] = parse_power(value)?,
            "trials" => self.mc_mut().trials = int(value)?,
            "seed" => self.mc_mut().seed = int(value)?,
            "workers" => self.mc_mut().workers = int(value)? as usize,
            "mode" => {
                self.mc_mut().mode = match value.to_ascii_lowercase().as_str() {
                    "statistic" | "statistic_level" | "stat" => SimMode::StatisticLevel,
                    "channel" | "channel_level" => SimMode::ChannelLevel,
                    other => return Err(format!("unknown mode `{other}`")),
                }
            }
            "designs" => {
                self.designs = value
                    .split(',')
                    .map(|d| match d.trim().to_ascii_lowercase().as_str() {
                        "serm" => Ok(DesignKind::Serm),
                        "med" => Ok(DesignKind::Med),
                        "custom" => Ok(DesignKind::Custom),
                        other => Err(format!("unknown design `{other}`")),
                    })
                    .collect::<Result<_, _>>()?;
            }
            "n_sweep" => {
                self.n_sweep = value
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<usize>()
                            .map_err(|_| format!("bad antenna count `{v}`"))
                    })
                    .collect::<Result<_, _>>()?;
            }
            "delta1" => self.custom_mut().delta1 = num(value)?,
            "delta2" => self.custom_mut().delta2 = num(value)?,
            "q1" => self.custom_mut().offset1 = num(value)?,
            "q2" => self.custom_mut().offset2 = num(value)?,
            "output" => self.output_path = Some(PathBuf::from(value)),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    fn mc_mut(&mut self) -> &mut McConfig {
        self.mc
            .get_or_insert(McConfig::new(100_000, 1, SimMode::StatisticLevel))
    }

    fn custom_mut(&mut self) -> &mut NestedDesign {
        self.custom.get_or_insert(NestedDesign::new(0.0, 0.0))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.config.validate()?;
        if self.n_sweep.is_empty() {
            return Err(CliError::Config("n_sweep is empty".into()));
        }
        if self.n_sweep.contains(&0) {
            return Err(CliError::Config("antenna counts must be positive".into()));
        }
        if self.n_sweep.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(
                "n_sweep must be strictly increasing".into(),
            ));
        }
        if self.designs.is_empty() {
            return Err(CliError::Config("no designs selected".into()));
        }
        if self.designs.contains(&DesignKind::Custom) {
            let custom = self
                .custom
                .ok_or_else(|| CliError::Config("custom design needs delta1 and delta2".into()))?;
            custom.validate()?;
        }
        if let Some(mc) = &self.mc {
            if mc.trials == 0 {
                return Err(CliError::Config("trials must be at least 1".into()));
            }
            if mc.workers == 0 {
                return Err(CliError::Config("workers must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Canonical `key = value` rendering, used in run metadata.
    pub fn echo(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", c.n_antennas);
        let _ = writeln!(out, "m = {}", c.order);
        let _ = writeln!(out, "sigma2 = {}", c.noise_var);
        let _ = writeln!(out, "beta1 = {}", c.beta[0]);
        let _ = writeln!(out, "beta2 = {}", c.beta[1]);
        let _ = writeln!(out, "p1_w = {}", c.power[0]);
        let _ = writeln!(out, "p2_w = {}", c.power[1]);
        let designs: Vec<_> = self.designs.iter().map(|d| d.name()).collect();
        let _ = writeln!(out, "designs = {}", designs.join(","));
        let sweep: Vec<_> = self.n_sweep.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "n_sweep = {}", sweep.join(","));
        if let Some(d) = &self.custom {
            let _ = writeln!(out, "delta1 = {}", d.delta1);
            let _ = writeln!(out, "delta2 = {}", d.delta2);
            let _ = writeln!(out, "q1 = {}", d.offset1);
            let _ = writeln!(out, "q2 = {}", d.offset2);
        }
        if let Some(mc) = &self.mc {
            let _ = writeln!(out, "trials = {}", mc.trials);
            let _ = writeln!(out, "seed = {}", mc.seed);
            let mode = match mc.mode {
                SimMode::StatisticLevel => "statistic",
                SimMode::ChannelLevel => "channel",
            };
            let _ = writeln!(out, "mode = {mode}");
            let _ = writeln!(out, "workers = {}", mc.workers);
        }
        out
    }
}

/// Parses `25dBm`, `0.316W`, `316mW` or a bare number of watts.
pub fn parse_power(value: &str) -> Result<f64, String> {
    let v = value.trim();
    let lower = v.to_ascii_lowercase();
    let (number, scale_dbm, factor) = if let Some(n) = lower.strip_suffix("dbm") {
        (n, true, 1.0)
    } else if let Some(n) = lower.strip_suffix("mw") {
        (n, false, 1e-3)
    } else if let Some(n) = lower.strip_suffix('w') {
        (n, false, 1.0)
    } else {
        (lower.as_str(), false, 1.0)
    };
    let x: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse power `{v}`"))?;
    Ok(if scale_dbm {
        dbm_to_watts(x)
    } else {
        x * factor
    })
}

/// One resolved design with everything `design` prints.
#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub kind: DesignKind,
    pub user_order: UserOrder,
    /// Design in normalized slots (slot 1 has the smaller budget).
    pub design: NestedDesign,
    pub solution: Option<DesignSolution>,
    /// Constraint slacks in normalized slots.
    pub slack: [f64; 2],
    /// Received-energy points per caller user.
    pub points: [Vec<f64>; 2],
    /// Transmitted-energy points per caller user.
    pub raw_points: [Vec<f64>; 2],
    pub sum_stats: Vec<f64>,
    pub min_ratio: f64,
    pub n_antennas: usize,
    pub sser_exact: f64,
    pub warnings: Vec<String>,
}

impl fmt::Display for DesignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}]", self.kind.name())?;
        writeln!(f, "  delta1 = {}", self.design.delta1)?;
        writeln!(f, "  delta2 = {}", self.design.delta2)?;
        if let Some(sol) = &self.solution {
            writeln!(f, "  case = {:?}", sol.case_tag)?;
            writeln!(f, "  ratios = {} {}", sol.ratios[0], sol.ratios[1])?;
        }
        writeln!(f, "  slack = {} {}", self.slack[0], self.slack[1])?;
        if self.user_order == UserOrder::Swapped {
            writeln!(
                f,
                "  note: user 2 has the smaller budget and takes the inner grid"
            )?;
        }
        writeln!(f, "  A1 = {:?}", self.points[0])?;
        writeln!(f, "  A2 = {:?}", self.points[1])?;
        writeln!(f, "  X1 = {:?}", self.raw_points[0])?;
        writeln!(f, "  X2 = {:?}", self.raw_points[1])?;
        writeln!(f, "  C = {:?}", self.sum_stats)?;
        writeln!(f, "  min_ratio = {}", self.min_ratio)?;
        writeln!(f, "  sser(N = {}) = {:e}", self.n_antennas, self.sser_exact)?;
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

fn resolve_design(
    kind: DesignKind,
    config: &SystemConfig,
    custom: Option<NestedDesign>,
) -> Result<(NestedDesign, Option<DesignSolution>), CliError> {
    if config.order == 1 {
        return Ok((custom.unwrap_or(NestedDesign::new(0.0, 0.0)), None));
    }
    match kind {
        DesignKind::Serm => {
            let sol = solve_p3(config)?;
            Ok((sol.design, Some(sol)))
        }
        DesignKind::Med => {
            let sol = med_design(config)?;
            Ok((sol.design, Some(sol)))
        }
        DesignKind::Custom => {
            let design =
                custom.ok_or_else(|| CliError::Config("custom design not given".into()))?;
            Ok((design, None))
        }
    }
}

fn design_report(
    spec: &ExperimentSpec,
    kind: DesignKind,
    n_antennas: usize,
) -> Result<DesignReport, CliError> {
    let (config, user_order) = spec.config.normalized();
    let config = config.with_antennas(n_antennas);
    let (design, solution) = resolve_design(kind, &config, spec.custom)?;
    let slack = check_power_constraints(&design, &config)?;
    if !slack.is_feasible_within(config.budgets(), 1e-9) {
        return Err(CliError::Infeasible(format!(
            "{} design violates the power constraints (slack {} {})",
            kind.name(),
            slack.slack[0],
            slack.slack[1]
        )));
    }
    let (a1, a2) = build_user_constellations(&design, &config)?;
    let sum = SumConstellation::from_design(&design, &config)?;
    let report = exact_sser(&sum, n_antennas)?;
    let mut warnings = Vec::new();
    if config.order == 1 {
        warnings.push("order 1: single-point constellations carry no information".to_string());
    }
    let points = user_order.to_original([a1.points, a2.points]);
    let raw_points = user_order.to_original([a1.raw_points, a2.raw_points]);
    Ok(DesignReport {
        kind,
        user_order,
        design,
        solution,
        slack: slack.slack,
        points,
        raw_points,
        sum_stats: sum.stats().to_vec(),
        min_ratio: report.min_ratio,
        n_antennas,
        sser_exact: report.sser,
        warnings,
    })
}

/// Resolves every selected design at the spec's antenna count.
pub fn cmd_design(spec: &ExperimentSpec) -> Result<Vec<DesignReport>, CliError> {
    spec.validate()?;
    spec.designs
        .iter()
        .map(|&kind| design_report(spec, kind, spec.config.n_antennas))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n_antennas: usize,
    pub design: DesignKind,
    pub delta1: f64,
    pub delta2: f64,
    pub min_ratio: f64,
    pub sser_exact: f64,
    pub mc: Option<McResult>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{},{},{},",
                r.n_antennas,
                r.design.name(),
                r.delta1,
                r.delta2,
                r.min_ratio,
                r.sser_exact
            );
            match (&r.mc, r.seed) {
                (Some(mc), Some(seed)) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        mc.sser_hat, mc.ci95.0, mc.ci95.1, mc.trials, seed
                    );
                }
                _ => out.push_str(",,,,\n"),
            }
        }
        out
    }

    /// Exact error rates of `design` in sweep order.
    pub fn series(&self, design: DesignKind) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter(|r| r.design == design)
            .map(|r| (r.n_antennas, r.sser_exact))
            .collect()
    }

    /// Smallest swept `N` from which SERM beats MED at every larger swept `N`.
    pub fn crossover(&self) -> Option<usize> {
        let serm = self.series(DesignKind::Serm);
        let med = self.series(DesignKind::Med);
        if serm.is_empty() || serm.len() != med.len() {
            return None;
        }
        let mut crossover = None;
        for ((n, s), (_, m)) in serm.iter().zip(&med).rev() {
            if s < m {
                crossover = Some(*n);
            } else {
                break;
            }
        }
        crossover
    }
}

/// Exact (and optionally simulated) error rate of every design at every `N`.
pub fn cmd_sweep(spec: &ExperimentSpec) -> Result<SweepTable, CliError> {
    spec.validate()?;
    let (config, _) = spec.config.normalized();
    let mut rows = Vec::new();
    for &n in &spec.n_sweep {
        let config = config.with_antennas(n);
        for &kind in &spec.designs {
            let (design, _) = resolve_design(kind, &config, spec.custom)?;
            let sum = SumConstellation::from_design(&design, &config)?;
            let report = exact_sser(&sum, n)?;
            let mc = spec
                .mc
                .as_ref()
                .map(|mc| run_monte_carlo(&config, &design, mc))
                .transpose()?;
            rows.push(SweepRow {
                n_antennas: n,
                design: kind,
                delta1: design.delta1,
                delta2: design.delta2,
                min_ratio: min_ratio(&sum).map_or(f64::INFINITY, |m| m.value),
                sser_exact: report.sser,
                mc,
                seed: spec.mc.map(|mc| mc.seed),
            });
        }
    }
    Ok(SweepTable { rows })
}

/// Companion metadata path for a CSV output path.
pub fn metadata_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta.txt");
    PathBuf::from(s)
}

/// Writes the CSV and its metadata file.
pub fn write_sweep(spec: &ExperimentSpec, table: &SweepTable, path: &Path) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    std::fs::write(path, table.to_csv()).map_err(io)?;
    let mut meta = String::new();
    let _ = writeln!(
        meta,
        "tool = {} {}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION")
    );
    let _ = writeln!(
        meta,
        "seed = {}",
        spec.mc
            .map_or_else(|| "none".to_string(), |m| m.seed.to_string())
    );
    let _ = writeln!(
        meta,
        "crossover_n = {}",
        table
            .crossover()
            .map_or_else(|| "none".to_string(), |n| n.to_string())
    );
    let _ = writeln!(meta, "[spec]");
    meta.push_str(&spec.echo());
    let meta_path = metadata_path(path);
    std::fs::write(&meta_path, meta).map_err(|source| CliError::Io {
        path: meta_path.clone(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Random (design, power) samples for the detector check.
    pub detector_samples: usize,
    pub grid_resolution: usize,
    /// Test hook: multiplies every decision threshold before detection.
    pub threshold_scale: Option<f64>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            detector_samples: 20_000,
            grid_resolution: 500,
            threshold_scale: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {} deviation={:e} bound={:e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.deviation,
                c.bound
            )?;
        }
        Ok(())
    }
}

/// The two worked configurations: the joint constraint binds in the first,
/// user 1's own constraint in the second.
pub fn worked_configs(n_antennas: usize) -> [SystemConfig; 2] {
    [
        SystemConfig {
            n_antennas,
            noise_var: 1.0,
            beta: [1.0, 1.0],
            power: [20.0, 20.0],
            order: 2,
        },
        SystemConfig {
            n_antennas,
            noise_var: 1.0,
            beta: [1.0, 1.0],
            power: [5.0, 20.0],
            order: 2,
        },
    ]
}

/// Random nested design for detector checks: M in {2, 3, 4}, both gaps and the
/// noise floor log-uniform over four decades.
pub fn random_sum_constellation<R: Rng + ?Sized>(rng: &mut R) -> (SumConstellation, usize) {
    loop {
        let order = rng.random_range(2..=4);
        let n = 1usize << rng.random_range(0..10);
        let mut log_uniform = || 10f64.powf(rng.random_range(-2.0..2.0));
        let noise = log_uniform();
        let design = NestedDesign::new(log_uniform(), log_uniform());
        let config = SystemConfig {
            n_antennas: n,
            noise_var: noise,
            beta: [1.0, 1.0],
            power: [1.0, 1.0],
            order,
        };
        if let Ok(sum) = SumConstellation::from_design(&design, &config) {
            return (sum, n);
        }
    }
}

fn scaled(thresholds: DecisionThresholds, scale: Option<f64>) -> DecisionThresholds {
    match scale {
        Some(s) => DecisionThresholds {
            bounds: thresholds.bounds.into_iter().map(|d| d * s).collect(),
        },
        None => thresholds,
    }
}

/// Cross-checks the detector, the closed form and the optimizer against
/// their independent oracles.
pub fn cmd_validate(
    spec: &ExperimentSpec,
    opts: &ValidateOptions,
) -> Result<ValidationReport, CliError> {
    spec.validate()?;
    let seed = spec.mc.map_or(1, |m| m.seed);
    let mut checks = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0u64;
    let mut current: Option<(SumConstellation, usize, DecisionThresholds)> = None;
    for s in 0..opts.detector_samples {
        if s % 100 == 0 {
            let (sum, n) = random_sum_constellation(&mut rng);
            let th = scaled(compute_thresholds(&sum)?, opts.threshold_scale);
            current = Some((sum, n, th));
        }
        let (sum, n, th) = current.as_ref().unwrap();
        let top = *sum.stats().last().unwrap();
        let avg = rng.random_range(0.0..2.0 * top);
        if detect(avg, th, sum).index != detect_bruteforce(*n as f64 * avg, *n, sum) {
            mismatches += 1;
        }
    }
    checks.push(CheckResult {
        name: "detector_equivalence".into(),
        passed: mismatches == 0,
        deviation: mismatches as f64,
        bound: 0.0,
    });

    let mc = spec
        .mc
        .unwrap_or(McConfig::new(100_000, seed, SimMode::StatisticLevel));
    for (idx, config) in worked_configs(spec.config.n_antennas).iter().enumerate() {
        let sol = solve_p3(config)?;
        let sum = SumConstellation::from_design(&sol.design, config)?;
        let exact = exact_sser(&sum, config.n_antennas)?.sser;
        let sim = match opts.threshold_scale {
            Some(_) => crate::simulator::run_monte_carlo_with_thresholds(
                config,
                &sol.design,
                &mc,
                scaled(compute_thresholds(&sum)?, opts.threshold_scale),
            )?,
            None => run_monte_carlo(config, &sol.design, &mc)?,
        };
        let band = binomial_band(exact, mc.trials, 4.0);
        let dev = (sim.sser_hat - exact).abs();
        checks.push(CheckResult {
            name: format!("closed_form_vs_mc[{}]", idx + 1),
            passed: dev <= band,
            deviation: dev,
            bound: band,
        });

        let balance = (sol.ratios[0] - sol.ratios[1]).abs() / sol.ratios[0];
        checks.push(CheckResult {
            name: format!("ratio_balance[{}]", idx + 1),
            passed: balance <= 1e-9,
            deviation: balance,
            bound: 1e-9,
        });

        let grid = grid_search_p3(config, opts.grid_resolution)?;
        let slack = crate::optimizer::grid_spacing_slack(config, opts.grid_resolution, &sol);
        let gap = sol.objective - grid.objective;
        checks.push(CheckResult {
            name: format!("closed_form_vs_grid[{}]", idx + 1),
            passed: gap >= -1e-12 * sol.objective && gap <= slack,
            deviation: gap,
            bound: slack,
        });
    }
    Ok(ValidationReport { checks })
}

/// Half-width `k * sqrt(p (1 - p) / n) + 1 / n` of the acceptance band for a
/// Monte Carlo estimate of probability `p` from `n` trials.
pub fn binomial_band(p: f64, trials: u64, k: f64) -> f64 {
    let n = trials as f64;
    k * (p * (1.0 - p) / n).sqrt() + 1.0 / n
}
