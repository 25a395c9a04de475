//! Compares the quinary scheme with a classic least-significant-bit embedder
//! on the same message: pixel cost per character and measured distortion.
//!
//! ```text
//! cargo run --example lsb_baseline
//! ```

use std::error::Error;

use quinstego::baseline::{comparison_table, lsb_decode, lsb_encode, lsb_slots_required};
use quinstego::codebook::tokenize;
use quinstego::metrics::quality_metrics;
use quinstego::{codec, Codebook, RasterImage};

fn main() -> Result<(), Box<dyn Error>> {
    let message = "Least significant bits versus quinary offsets.";
    let cover = RasterImage::from_fn(96, 96, 3, |x, y| [(60 + x) as u8, (50 + y) as u8, (100 + (x + y) / 2) as u8])?;

    let lsb = lsb_encode(&cover, message.as_bytes())?;
    assert_eq!(lsb_decode(&lsb)?, message.as_bytes());
    let (quinary, report) = codec::encode(&cover, &tokenize(message)?, Codebook::standard())?;

    let slots = lsb_slots_required(message.len());
    let lq = quality_metrics(&cover, &lsb)?;
    let qq = quality_metrics(&cover, &quinary)?;
    println!("method    pixels   mse      psnr dB");
    println!("lsb       {:<8} {:<8.5} {:.3}", slots.div_ceil(3), lq.mse, lq.psnr);
    println!("quinary   {:<8} {:<8.5} {:.3}", report.pixels_used, qq.mse, qq.psnr);
    println!("(lsb decodes blind; quinary needs the cover)");

    println!("\nmethod    pixels/char gray  pixels/char rgb");
    for row in comparison_table() {
        println!("{:<9} {:<17} {}", row.method.to_string(), row.pixels_per_char_gray, row.pixels_per_char_rgb);
    }
    Ok(())
}
