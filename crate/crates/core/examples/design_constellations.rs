//! Closed-form SERM design next to the equal-gap baseline for a few budgets.
//!
//! cargo run --example design_constellations

use noma_simo::prelude::*;

fn main() -> noma_simo::Result<()> {
    for budgets in [[20.0, 20.0], [5.0, 20.0], [1.0, 50.0]] {
        let config = SystemConfig::new(64, 1.0, [1.0, 1.0], budgets, 2)?;
        let serm = solve_p3(&config)?;
        let med = med_design(&config)?;
        println!("budgets beta*P = {budgets:?}, sigma^2 = 1, M = 2");
        for (name, sol) in [("serm", serm), ("med", med)] {
            let (a1, a2) = build_user_constellations(&sol.design, &config)?;
            let sum = SumConstellation::from_design(&sol.design, &config)?;
            println!(
                "  {name}: delta1 = {:.4}, delta2 = {:.4}, {:?}",
                sol.design.delta1, sol.design.delta2, sol.case_tag
            );
            println!("    A1 = {:?}  A2 = {:?}", a1.points, a2.points);
            println!(
                "    C  = {:?}  min ratio = {:.5}",
                sum.stats(),
                sol.objective
            );
        }
    }
    Ok(())
}
