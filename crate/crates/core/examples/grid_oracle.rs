//! Closed-form optimum compared with brute-force grid search.
//!
//! cargo run --release --example grid_oracle

use noma_simo::optimizer::grid_spacing_slack;
use noma_simo::prelude::*;

fn main() -> noma_simo::Result<()> {
    let resolution = 500;
    for (order, budgets, noise) in [
        (2, [20.0, 20.0], 1.0),
        (2, [5.0, 20.0], 1.0),
        (3, [2.0, 30.0], 0.1),
    ] {
        let config = SystemConfig::new(16, noise, [1.0, 1.0], budgets, order)?;
        let exact = solve_p3(&config)?;
        let grid = grid_search_p3(&config, resolution)?;
        let slack = grid_spacing_slack(&config, resolution, &exact);
        println!("M = {order}, budgets {budgets:?}, sigma^2 = {noise}");
        println!(
            "  closed form ({:.5}, {:.5}) -> {:.8} {:?}",
            exact.design.delta1, exact.design.delta2, exact.objective, exact.case_tag
        );
        println!(
            "  grid        ({:.5}, {:.5}) -> {:.8}  gap {:.2e} (slack {:.2e})",
            grid.design.delta1,
            grid.design.delta2,
            grid.objective,
            exact.objective - grid.objective,
            slack
        );
    }
    Ok(())
}
