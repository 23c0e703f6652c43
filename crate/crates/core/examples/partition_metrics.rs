//! External validation scores for a few partitions of ten items.
//!
//! cargo run --example partition_metrics

use tentropy::metrics::{ari, gce, nmi, pri, voi};

fn main() -> tentropy::Result<()> {
    let truth = vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 2];
    let candidates = [
        ("identical", vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 2]),
        ("relabelled", vec![2, 2, 2, 0, 0, 0, 1, 1, 1, 1]),
        ("one moved", vec![0, 0, 1, 1, 1, 1, 2, 2, 2, 2]),
        ("merged", vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1]),
        ("singletons", (0..10).collect()),
        ("one block", vec![0; 10]),
    ];
    println!("{:<11} {:>7} {:>7} {:>7} {:>7} {:>7}", "", "NMI", "ARI", "PRI", "GCE", "VoI");
    for (name, c) in &candidates {
        println!(
            "{name:<11} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4}",
            nmi(&truth, c)?,
            ari(&truth, c)?,
            pri(c, std::slice::from_ref(&truth))?,
            gce(c, &truth)?,
            voi(c, &truth)?
        );
    }
    Ok(())
}
