//! Simulated link against the closed form, in both simulation modes.
//!
//! cargo run --release --example monte_carlo_link

use noma_simo::prelude::*;

fn main() -> noma_simo::Result<()> {
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
    for n in [8, 16, 64] {
        let config = SystemConfig::new(n, 1.0, [1.0, 1.0], [5.0, 20.0], 2)?;
        let sol = solve_p3(&config)?;
        let exact = exact_sser(&SumConstellation::from_design(&sol.design, &config)?, n)?.sser;
        println!("N = {n}: exact {exact:.6}");
        for (mode, trials) in [
            (SimMode::StatisticLevel, 1_000_000),
            (SimMode::ChannelLevel, 100_000),
        ] {
            let mc = McConfig::new(trials, 2024, mode).with_workers(workers);
            let r = run_monte_carlo(&config, &sol.design, &mc)?;
            println!(
                "  {mode:?}: {:.6} in [{:.6}, {:.6}] over {trials} trials",
                r.sser_hat, r.ci95.0, r.ci95.1
            );
        }
    }
    Ok(())
}
