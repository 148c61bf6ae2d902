//! Decision thresholds of the power detector and a check against the
//! exhaustive ML search.
//!
//! cargo run --example threshold_detector

use noma_simo::prelude::*;

fn main() -> noma_simo::Result<()> {
    let n = 16;
    let config = SystemConfig::new(n, 1.0, [1.0, 1.0], [5.0, 20.0], 3)?;
    let sol = solve_p3(&config)?;
    let det = PowerDetector::new(SumConstellation::from_design(&sol.design, &config)?)?;
    let sum = det.sum();
    for (l, c) in sum.stats().iter().enumerate() {
        let bound = det
            .thresholds()
            .bounds
            .get(l)
            .map_or("inf".into(), |d| format!("{d:.4}"));
        println!(
            "c[{l}] = {c:8.4}  pair {:?}  upper threshold {bound}",
            sum.pair(l)
        );
    }

    let top = sum.stats().last().unwrap() * 1.5;
    let steps = 100_000;
    let agree = (0..steps)
        .map(|k| top * k as f64 / steps as f64)
        .filter(|&avg| det.detect(avg).index == detect_bruteforce(n as f64 * avg, n, sum))
        .count();
    println!("threshold vs exhaustive search: {agree}/{steps} agree");
    Ok(())
}
