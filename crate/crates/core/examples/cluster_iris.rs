//! Entropy-weighted k-means on Iris with the arctan, Shannon and no
//! regularizer, scanning the default λ grid.
//!
//! cargo run --release --example cluster_iris

use tentropy::ewkm::{self, FitConfig, Regularizer, DEFAULT_LAMBDA_GRID};
use tentropy::io::delimited::LabelColumn;
use tentropy::io::{read_delimited, DelimitedOptions};

fn main() -> tentropy::Result<()> {
    let bytes = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/data/iris.csv"))?;
    let opts = DelimitedOptions {
        has_header: true,
        label_column: LabelColumn::Last,
        ..Default::default()
    };
    let data = read_delimited(&bytes, &opts)?.standardized();

    for reg in [Regularizer::TEntropy, Regularizer::Shannon] {
        let cfg = FitConfig {
            seed: 1,
            ..FitConfig::new(3, 1.0, reg)
        };
        let sweep = ewkm::sweep_lambda(&data, &cfg, &DEFAULT_LAMBDA_GRID)?;
        println!("{reg:?}");
        for s in &sweep.scores {
            println!(
                "  lambda {:>5}: NMI {:.4} ARI {:.4} (restart mean NMI {:.4} ARI {:.4})",
                s.lambda, s.nmi, s.ari, s.mean_nmi, s.mean_ari
            );
        }
        let best = &sweep.best_state;
        println!("  feature weights at lambda {}:", sweep.scores[sweep.best].lambda);
        for (j, w) in best.weights.iter().enumerate() {
            println!("    cluster {j}: {}", w.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" "));
        }
    }

    let plain = ewkm::fit(&data, &FitConfig { seed: 1, ..FitConfig::new(3, 0.0, Regularizer::None) })?;
    let truth = data.labels().expect("labelled");
    println!(
        "k-means: NMI {:.4} ARI {:.4}",
        tentropy::metrics::nmi(truth, &plain.labels)?,
        tentropy::metrics::ari(truth, &plain.labels)?
    );
    Ok(())
}
