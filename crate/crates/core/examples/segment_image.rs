//! Multilevel thresholding of a PGM image (or the built-in two-mode
//! fixture), comparing DE against exhaustive search.
//!
//! cargo run --release --example segment_image -- [image.pgm] [k] [out.pgm]

use tentropy::diffevo::DEConfig;
use tentropy::io::{read_pgm, write_pgm, PgmVariant};
use tentropy::metrics;
use tentropy::thresholding::{self, SEGMENTATION_C};
use tentropy::EntropyMeasure;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (img, truth) = match args.first() {
        Some(path) => (read_pgm(&std::fs::read(path)?)?, None),
        None => {
            let (img, truth) = thresholding::bimodal_fixture(0);
            (img, Some(truth))
        }
    };
    let k: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let hist = thresholding::histogram(&img);
    println!(
        "{}x{} image, {} levels, {} occupied",
        img.width(),
        img.height(),
        img.levels(),
        hist.occupied_levels()
    );

    for m in [EntropyMeasure::t(SEGMENTATION_C)?, EntropyMeasure::t(1.0)?, EntropyMeasure::Shannon] {
        let de = thresholding::optimize_thresholds(&hist, k, &m, &DEConfig::with_seed(1))?;
        print!("{:<12} DE {:?} phi={:.6}", m.label(), de.thresholds(), de.objective);
        match thresholding::exhaustive_thresholds(&hist, k, &m) {
            Ok(best) => print!("  exhaustive {:?} phi={:.6}", best.thresholds(), best.objective),
            Err(e) => print!("  ({e})"),
        }
        if let Some(truth) = &truth {
            let seg = thresholding::segment_labels(&img, &de);
            print!(
                "  PRI={:.3} GCE={:.3} VoI={:.3}",
                metrics::pri(&seg, std::slice::from_ref(truth))?,
                metrics::gce(&seg, truth)?,
                metrics::voi(&seg, truth)?
            );
        }
        println!();
    }

    if let Some(out) = args.get(2) {
        let m = EntropyMeasure::t(SEGMENTATION_C)?;
        let set = thresholding::optimize_thresholds(&hist, k, &m, &DEConfig::with_seed(1))?;
        std::fs::write(out, write_pgm(&thresholding::apply_thresholds(&img, &set)?, PgmVariant::P5)?)?;
        println!("wrote {out}");
    }
    Ok(())
}
