//! Grayscale mode: each symbol's triplet is spread over three consecutive
//! usable pixels of a single-channel cover.
//!
//! ```text
//! cargo run --example grayscale
//! ```

use std::error::Error;

use quinstego::codebook::{detokenize, tokenize};
use quinstego::{codec, Codebook, RasterImage};

fn main() -> Result<(), Box<dyn Error>> {
    let rgb = RasterImage::from_fn(64, 48, 3, |x, y| {
        let v = (30 + 3 * x + 2 * y).min(250) as u8;
        [v, v / 2 + 60, 255 - v]
    })?;
    let gray = rgb.to_luma();
    let cb = Codebook::standard();
    let symbols = tokenize("Three gray pixels carry one symbol.")?;

    let (stego, report) = codec::encode_grayscale(&gray, &symbols, cb)?;
    println!("capacity rgb   {}", codec::capacity(&rgb)?);
    println!("capacity gray  {}", codec::capacity_grayscale(&gray)?);
    println!("symbols        {} (+ terminator)", symbols.len());
    println!("pixels used    {}", report.pixels_used);

    let changed = gray.samples().iter().zip(stego.samples()).filter(|(a, b)| a != b).count();
    println!("pixels changed {changed}");

    let decoded = codec::decode_grayscale(&gray, &stego, cb)?;
    println!("decoded        {:?}", detokenize(&decoded));

    // the auto variants pick the mode from the channel count
    assert_eq!(codec::decode_auto(&gray, &stego, cb)?, decoded);
    Ok(())
}
