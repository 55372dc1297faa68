//! Decode a Netpbm image, convert to grayscale, gamma-correct and resize.
//!
//! `cargo run --example preprocess_image [input.ppm] [output.pgm]`
//! Without arguments a synthetic colour gradient is used.

use hogscan::raster::{decode_image, encode_pgm, encode_ppm, gamma_correct, resize_bilinear, RgbImage};

fn main() -> hogscan::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let bytes = match args.first() {
        Some(path) => std::fs::read(path)?,
        None => {
            let pixels = (0..48 * 32)
                .map(|i| {
                    let (x, y) = (i % 48, i / 48);
                    [(x * 5) as u8, (y * 8) as u8, 128]
                })
                .collect();
            encode_ppm(&RgbImage::new(48, 32, pixels)?)
        }
    };
    let gray = decode_image(&bytes)?.into_gray();
    println!("decoded {}x{}", gray.width(), gray.height());

    let corrected = gamma_correct(&gray, 0.5)?;
    let mid = (gray.width() / 2, gray.height() / 2);
    println!(
        "center pixel {} -> {} after gamma 0.5",
        gray.get(mid.0, mid.1),
        corrected.get(mid.0, mid.1)
    );

    let half = resize_bilinear(&corrected, (gray.width() / 2).max(1), (gray.height() / 2).max(1))?;
    println!("resized to {}x{}", half.width(), half.height());

    if let Some(out) = args.get(1) {
        std::fs::write(out, encode_pgm(&half))?;
        println!("wrote {out}");
    }
    Ok(())
}
