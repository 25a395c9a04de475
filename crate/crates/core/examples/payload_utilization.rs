//! Sweeps a fixed-length payload across common resolutions and reports pixel
//! utilization and PSNR. The squared error stays constant, so PSNR grows with
//! the pixel count.
//!
//! ```text
//! cargo run --release --example payload_utilization [symbols]
//! ```

use std::error::Error;

use quinstego::codebook::tokenize;
use quinstego::metrics::quality_metrics;
use quinstego::{codec, Codebook, RasterImage};

const RESOLUTIONS: [(usize, usize); 4] = [(512, 512), (1280, 720), (1920, 1080), (3840, 2160)];

fn main() -> Result<(), Box<dyn Error>> {
    let count: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8418);
    let base = tokenize(include_str!("../tests/fixtures/text2.txt"))?;
    let payload: Vec<_> = base.iter().copied().cycle().take(count).collect();
    let cb = Codebook::standard();

    println!("{:>11} {:>10} {:>12} {:>10} {:>9}", "resolution", "used", "unused", "util %", "psnr dB");
    for (w, h) in RESOLUTIONS {
        let cover = RasterImage::from_fn(w, h, 3, |x, y| {
            let (u, v) = (x as f64 / w as f64, y as f64 / h as f64);
            [40.0 + 170.0 * u, 40.0 + 170.0 * v, 128.0 + 60.0 * (u * v * 9.0).sin()].map(|c| c as u8)
        })?;
        let (stego, report) = codec::encode(&cover, &payload, cb)?;
        let q = quality_metrics(&cover, &stego)?;
        println!(
            "{:>11} {:>10} {:>12} {:>10.4} {:>9.3}",
            format!("{w}x{h}"),
            report.pixels_used,
            report.pixels_unused,
            report.utilization_pct,
            q.psnr
        );
    }
    Ok(())
}
