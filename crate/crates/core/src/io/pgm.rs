//! Portable graymap (P2 plain, P5 binary) with maxval ≤ 255.

use crate::error::{Error, Result};
use crate::thresholding::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmVariant {
    P2,
    P5,
}

const MAX_LINE: usize = 70;

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#' {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let tok = self
            .token()
            .ok_or_else(|| Error::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{what} is not a non-negative integer: {:?}", String::from_utf8_lossy(tok))))
    }
}

/// Parses a P2 or P5 graymap with `maxval + 1` gray levels (256 for 8-bit
/// files, whatever values actually occur).
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut h = Header { bytes, pos: 0 };
    let variant = match h.token() {
        Some(b"P2") => PgmVariant::P2,
        Some(b"P5") => PgmVariant::P5,
        Some(other) => {
            return Err(Error::MalformedHeader(format!(
                "unknown magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
        None => return Err(Error::MalformedHeader("empty input".into())),
    };
    let width = h.number("width")? as usize;
    let height = h.number("height")? as usize;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("zero-sized image {width}x{height}")));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    let levels = maxval as usize + 1;
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedHeader("image dimensions overflow".into()))?;

    let pixels = match variant {
        PgmVariant::P5 => {
            // exactly one whitespace byte separates maxval from the raster
            if h.pos >= bytes.len() || !bytes[h.pos].is_ascii_whitespace() {
                return Err(Error::TruncatedPixelData { expected, found: 0 });
            }
            let body = &bytes[h.pos + 1..];
            if body.len() < expected {
                return Err(Error::TruncatedPixelData {
                    expected,
                    found: body.len(),
                });
            }
            body[..expected].iter().map(|&b| b as u16).collect::<Vec<_>>()
        }
        PgmVariant::P2 => {
            let mut px = Vec::with_capacity(expected);
            while px.len() < expected {
                let Some(tok) = h.token() else {
                    return Err(Error::TruncatedPixelData {
                        expected,
                        found: px.len(),
                    });
                };
                let v = std::str::from_utf8(tok)
                    .ok()
                    .and_then(|s| s.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::InvalidImage(format!(
                            "pixel {} is not an integer: {:?}",
                            px.len(),
                            String::from_utf8_lossy(tok)
                        ))
                    })?;
                px.push(v.min(u16::MAX as u32) as u16);
            }
            px
        }
    };
    if let Some(i) = pixels.iter().position(|&v| v as u32 > maxval) {
        return Err(Error::InvalidImage(format!(
            "pixel {i} has value {} above maxval {maxval}",
            pixels[i]
        )));
    }
    GrayImage::new(width, height, levels, pixels)
}

/// Serializes with `maxval = levels − 1`. P2 output keeps lines within
/// 70 characters.
pub fn write_pgm(img: &GrayImage, variant: PgmVariant) -> Result<Vec<u8>> {
    let maxval = img.levels() - 1;
    if maxval > 255 {
        return Err(Error::UnsupportedMaxval(maxval as u32));
    }
    let magic = match variant {
        PgmVariant::P2 => "P2",
        PgmVariant::P5 => "P5",
    };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", img.width(), img.height()).into_bytes();
    match variant {
        PgmVariant::P5 => out.extend(img.pixels().iter().map(|&v| v as u8)),
        PgmVariant::P2 => {
            let mut line = String::new();
            for &v in img.pixels() {
                let tok = v.to_string();
                if !line.is_empty() && line.len() + 1 + tok.len() > MAX_LINE {
                    out.extend_from_slice(line.as_bytes());
                    out.push(b'\n');
                    line.clear();
                }
                if !line.is_empty() {
                    line.push(' ');
                }
                line.push_str(&tok);
            }
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_example() {
        let img = read_pgm(b"P2 2 2 255 0 0 1 3").unwrap();
        assert_eq!((img.width(), img.height(), img.levels()), (2, 2, 256));
        assert_eq!(img.pixels(), &[0, 0, 1, 3]);
    }

    #[test]
    fn binary_matches_plain() {
        let mut p5 = b"P5\n2 2\n255\n".to_vec();
        p5.extend([0u8, 0, 1, 3]);
        assert_eq!(read_pgm(&p5).unwrap(), read_pgm(b"P2 2 2 255 0 0 1 3").unwrap());
    }

    #[test]
    fn comments_anywhere_in_header() {
        let plain = read_pgm(b"P2\n3 1\n7\n1 2 3\n").unwrap();
        let commented = read_pgm(b"P2 # magic\n# size next\n3 # w\n1\n# max\n7\n1 2 # mid\n3\n").unwrap();
        assert_eq!(plain, commented);
        assert_eq!(plain.levels(), 8);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(read_pgm(b"P3 1 1 255 0"), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_pgm(b"P2 1"), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_pgm(b"P2 1 1 65535 0"), Err(Error::UnsupportedMaxval(65535))));
        assert!(matches!(
            read_pgm(b"P2 2 2 255 0 1"),
            Err(Error::TruncatedPixelData { expected: 4, found: 2 })
        ));
        assert!(matches!(
            read_pgm(b"P5 2 2 255\n\x00"),
            Err(Error::TruncatedPixelData { expected: 4, found: 1 })
        ));
        assert!(read_pgm(b"P2 1 1 3 9").is_err());
        assert!(read_pgm(b"").is_err());
    }

    #[test]
    fn plain_lines_stay_short() {
        let px: Vec<u16> = (0..400).map(|i| (i * 37 % 256) as u16).collect();
        let img = GrayImage::new(20, 20, 256, px).unwrap();
        let bytes = write_pgm(&img, PgmVariant::P2).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.lines().all(|l| l.len() <= MAX_LINE));
        assert!(!text.contains("  "));
        assert_eq!(read_pgm(&bytes).unwrap(), img);
        assert_eq!(read_pgm(&write_pgm(&img, PgmVariant::P5).unwrap()).unwrap(), img);
    }
}
