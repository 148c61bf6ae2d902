//! Exact error rate of a fixed constellation as the array grows.
//!
//! cargo run --example closed_form_sser

use noma_simo::prelude::*;

fn main() -> noma_simo::Result<()> {
    // A1 = {0, 1}, A2 = {0, 4}, sigma^2 = 1 gives C = {1, 2, 5, 6}
    let design = NestedDesign::new(1.0, 3.0);
    println!("{:>5} {:>14}  per-symbol success", "N", "sser");
    for n in [1, 4, 16, 64, 256, 1024] {
        let config = SystemConfig::new(n, 1.0, [1.0, 1.0], [5.0, 20.0], 2)?;
        let sum = SumConstellation::from_design(&design, &config)?;
        let r = exact_sser(&sum, n)?;
        let probs: Vec<String> = r.success_probs.iter().map(|p| format!("{p:.6}")).collect();
        println!("{n:>5} {:>14.6e}  [{}]", r.sser, probs.join(", "));
    }
    Ok(())
}
