//! Standalone differential evolution on two classic test functions.
//!
//! cargo run --release --example differential_evolution

use tentropy::diffevo::{de_optimize, BoxBounds, DEConfig, Sense};

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
            .sum::<f64>()
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

fn main() -> tentropy::Result<()> {
    let cfg = DEConfig {
        population_size: Some(60),
        max_generations: 3000,
        target_tolerance: Some(1e-12),
        stagnation_window: 200,
        parallel: true,
        ..DEConfig::with_seed(3)
    };
    for (name, f, lo, hi) in [
        ("rastrigin", rastrigin as fn(&[f64]) -> f64, -5.12, 5.12),
        ("rosenbrock", rosenbrock, -2.0, 2.0),
    ] {
        let bounds = BoxBounds::cube(lo, hi, 4)?;
        let r = de_optimize(f, &bounds, &cfg, Sense::Minimize)?;
        println!(
            "{name:<10} f = {:.3e} after {} generations ({} evaluations) at {:?}",
            r.best_value,
            r.history.len() - 1,
            r.evaluations,
            r.best_x.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
