//! How far can a growing fraction of outliers at the top of the support drag
//! each estimator? Also prints the clean-data consistency curve.
//!
//! cargo run --release --example breakdown_sweep

use tentropy::divergence::experiments::{
    run_breakdown_sweep, run_consistency_experiment, BreakdownConfig, ConsistencyConfig,
};

fn main() -> tentropy::Result<()> {
    let sweep = run_breakdown_sweep(&BreakdownConfig::default_sweep(11))?;
    println!("{:>5} {:>9} {:>10} {:>10}", "eps", "outliers", "median t", "median mle");
    for row in &sweep.rows {
        println!("{:>5.2} {:>9} {:>10.4} {:>10.4}", row.eps, row.outliers, row.median_t, row.median_mle);
    }

    let curve = run_consistency_experiment(&ConsistencyConfig::default_curve(5))?;
    println!();
    println!("{:>6} {:>14} {:>14}", "n", "median |err| t", "median |err| mle");
    for row in &curve.rows {
        println!("{:>6} {:>14.6} {:>14.6}", row.sample_size, row.median_abs_error_t, row.median_abs_error_mle);
    }
    Ok(())
}
