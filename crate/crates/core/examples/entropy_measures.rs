//! Compare the arctan entropy with Shannon, Rényi and Tsallis on a few
//! distributions, and show joint/conditional forms.
//!
//! cargo run --example entropy_measures

use tentropy::entropy::{conditional_t_entropy, entropy, joint_t_entropy, marginal, t_entropy, Axis};
use tentropy::{EntropyMeasure, JointDistribution, ProbabilityVector};

fn main() -> tentropy::Result<()> {
    let measures = [
        EntropyMeasure::t(0.1)?,
        EntropyMeasure::t(1.0)?,
        EntropyMeasure::t(10.0)?,
        EntropyMeasure::Shannon,
        EntropyMeasure::renyi(2.0)?,
        EntropyMeasure::tsallis(2.0)?,
    ];
    let cases = [
        ("degenerate", ProbabilityVector::degenerate(4, 0)),
        ("skewed", ProbabilityVector::proper(vec![0.7, 0.2, 0.05, 0.05])?),
        ("uniform(4)", ProbabilityVector::uniform(4)),
        ("uniform(1000)", ProbabilityVector::uniform(1000)),
    ];

    print!("{:<14}", "");
    for m in &measures {
        print!("{:>16}", m.label());
    }
    println!();
    for (name, p) in &cases {
        print!("{name:<14}");
        for m in &measures {
            print!("{:>16.6}", entropy(p, m)?);
        }
        println!();
    }

    // The arctan entropy stays below π/4 however many outcomes there are.
    for n in [2, 10, 1000, 100_000] {
        println!("t(c=1) of uniform({n}) = {:.9}", t_entropy(&ProbabilityVector::uniform(n), 1.0)?);
    }

    let joint = JointDistribution::new(vec![vec![0.4, 0.1], vec![0.1, 0.4]])?;
    println!();
    println!("H(X)   = {:.12}", t_entropy(&marginal(&joint, Axis::X), 1.0)?);
    println!("H(X,Y) = {:.12}", joint_t_entropy(&joint, 1.0)?);
    println!("H(X|Y) = {:.12}", conditional_t_entropy(&joint, 1.0, Axis::Y)?);
    Ok(())
}
