//! Run the fuzzed property suite for the arctan entropy and print one line
//! per property.
//!
//! cargo run --release --example axiom_suite -- [cases]

use tentropy::entropy::axioms::{run_axiom_suite, AxiomSuiteConfig};

fn main() {
    let cases = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000);
    let cfg = AxiomSuiteConfig {
        cases,
        ..AxiomSuiteConfig::default()
    };
    let checks = run_axiom_suite(&cfg);
    for c in &checks {
        println!(
            "{:<5} {:<40} worst slack {:>12.3e}  ({})",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.worst_slack,
            c.statement
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} properties hold over {} cases per order", checks.len() - failed, checks.len(), cases);
}
