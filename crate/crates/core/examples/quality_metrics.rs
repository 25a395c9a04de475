//! Measures the distortion of an embedding (MAE, MSE, SNR, PSNR, SSIM) and
//! the fidelity of the recovered text (CER, WER).
//!
//! ```text
//! cargo run --release --example quality_metrics [cover.png]
//! ```

use std::error::Error;

use quinstego::codebook::{detokenize, tokenize};
use quinstego::metrics::{cer, wer};
use quinstego::{codec, load_image, Codebook, MetricsReport};

const TEXT: &str = "The quick brown fox jumps over the lazy dog.\n\n\
Pack my box with five dozen liquor jugs! (1234567890)";

fn main() -> Result<(), Box<dyn Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/astronaut.png").into());
    let cover = load_image(&path)?;
    let cb = Codebook::standard();
    let (stego, _) = codec::encode_auto(&cover, &tokenize(TEXT)?, cb)?;
    let decoded = detokenize(&codec::decode_auto(&cover, &stego, cb)?);

    let report = MetricsReport::compute(&cover, &stego, Some((TEXT, &decoded)))?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    // a corrupted transcript for comparison
    let garbled = decoded.replacen("fox", "box", 1).replacen("dozen", "dozn", 1);
    println!("garbled cer {:.4} wer {:.4}", cer(TEXT, &garbled)?, wer(TEXT, &garbled)?);
    Ok(())
}
