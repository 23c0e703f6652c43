//! Minimum arctan-divergence vs maximum likelihood on a binomial sample with
//! a few gross outliers.
//!
//! cargo run --release --example robust_binomial -- [seed]

use tentropy::divergence::experiments::{run_contamination_experiment, ContaminationConfig};
use tentropy::divergence::{fit_min_t_divergence, mle_binomial, sample_model, BinomialModel};
use tentropy::rng;

fn main() -> tentropy::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);

    // One sample, by hand.
    let model = BinomialModel::new(100)?;
    let mut sample = sample_model(&model, &[0.2], 200, &mut rng::seeded(seed));
    sample.extend([95, 97, 99, 100, 100, 92, 96, 91, 98, 94]);
    let fit = fit_min_t_divergence(&sample, &model)?;
    println!(
        "single sample: t-estimate {:.4} (D = {:.3e}, {} evaluations), MLE {:.4}",
        fit.theta_hat[0],
        fit.divergence_at_min,
        fit.evaluations,
        mle_binomial(&sample, 100)?
    );

    // The full replicated experiment.
    let cfg = ContaminationConfig::binomial_robustness(seed);
    let report = run_contamination_experiment(&cfg)?;
    let s = &report.summary;
    println!("{} replicates, true theta {}", report.rows.len(), cfg.true_theta);
    println!("  median t-estimate {:.4}   median |error| {:.4}", s.median_t, s.median_abs_error_t);
    println!("  median MLE        {:.4}   median |error| {:.4}", s.median_mle, s.median_abs_error_mle);

    // Coarse text histogram of both estimators.
    let bins: Vec<f64> = (0..=12).map(|i| 0.17 + 0.01 * i as f64).collect();
    for w in bins.windows(2) {
        let count = |f: fn(&tentropy::divergence::experiments::ReplicateRow) -> f64| {
            report.rows.iter().filter(|r| (w[0]..w[1]).contains(&f(r))).count()
        };
        println!(
            "  [{:.2}, {:.2})  t {:<40} mle {}",
            w[0],
            w[1],
            "#".repeat(count(|r| r.theta_t)),
            "#".repeat(count(|r| r.theta_mle))
        );
    }
    Ok(())
}
