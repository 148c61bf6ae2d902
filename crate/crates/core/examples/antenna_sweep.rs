//! SERM versus equal-gap design over the antenna sweep of the demo setup
//! (two 25 dBm users, gains 0.5 and 1.0, 10 mW noise). Writes CSV to stdout
//! or to the path given as the first argument.
//!
//! cargo run --example antenna_sweep -- sweep.csv

use noma_simo::cli::{cmd_sweep, write_sweep, CliError, DesignKind, ExperimentSpec};

fn main() -> Result<(), CliError> {
    let spec = ExperimentSpec::demo();
    let table = cmd_sweep(&spec)?;
    match std::env::args().nth(1) {
        Some(path) => write_sweep(&spec, &table, path.as_ref())?,
        None => print!("{}", table.to_csv()),
    }
    let serm = table.series(DesignKind::Serm);
    let med = table.series(DesignKind::Med);
    for ((n, s), (_, m)) in serm.iter().zip(&med) {
        eprintln!(
            "N = {n:>3}: serm {s:.3e}  med {m:.3e}  {}",
            if s < m { "serm" } else { "med" }
        );
    }
    match table.crossover() {
        Some(n) => eprintln!("serm is better from N = {n} on"),
        None => eprintln!("no crossover in the sweep"),
    }
    Ok(())
}
