//! Write an image as plain and binary PGM, read both back, and check they
//! agree.
//!
//! cargo run --example pgm_roundtrip -- [dir]

use tentropy::io::{read_pgm, write_pgm, PgmVariant};
use tentropy::thresholding::GrayImage;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let (w, h) = (48, 32);
    let pixels = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            ((x * 255 / (w - 1) + y * 3) % 256) as u16
        })
        .collect();
    let img = GrayImage::new(w, h, 256, pixels)?;

    for (variant, name) in [(PgmVariant::P2, "gradient_plain.pgm"), (PgmVariant::P5, "gradient_binary.pgm")] {
        let path = dir.join(name);
        let bytes = write_pgm(&img, variant)?;
        std::fs::write(&path, &bytes)?;
        let back = read_pgm(&std::fs::read(&path)?)?;
        println!("{:?}: {} bytes -> {}, identical: {}", variant, bytes.len(), path.display(), back == img);
    }
    Ok(())
}
