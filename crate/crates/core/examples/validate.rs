//! The cross-oracle self-check behind `noma-simo validate`.
//!
//! cargo run --release --example validate

use noma_simo::cli::{cmd_validate, CliError, ExperimentSpec, ValidateOptions};

fn main() -> Result<(), CliError> {
    let spec = ExperimentSpec::parse("n = 16\ntrials = 200000\nseed = 7")?;
    let report = cmd_validate(&spec, &ValidateOptions::default())?;
    print!("{report}");
    if !report.all_passed() {
        return Err(CliError::Validation("one or more checks failed".into()));
    }
    Ok(())
}
