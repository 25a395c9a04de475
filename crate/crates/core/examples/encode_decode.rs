//! Hides a message in a cover image, writes the stego PNG, then recovers the
//! message by differencing against the cover.
//!
//! ```text
//! cargo run --example encode_decode [cover.png] [message]
//! ```

use std::error::Error;

use quinstego::codebook::{detokenize, normalize_text, tokenize};
use quinstego::{codec, load_image, save_image, Codebook};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let cover_path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/astronaut.png").into());
    let message = args
        .next()
        .unwrap_or_else(|| "Meet at the \u{201c}old\u{201d} bridge at 9:30.\nBring the map.".into());

    let cover = load_image(&cover_path)?;
    let (normalized, log) = normalize_text(&message, true)?;
    let symbols = tokenize(&normalized)?;
    println!("cover      {}x{}x{} ({cover_path})", cover.width(), cover.height(), cover.channels());
    println!("symbols    {} ({} characters folded)", symbols.len(), log.substitutions.len());
    println!("capacity   {}", codec::capacity(&cover)?);

    let cb = Codebook::standard();
    let (stego, report) = codec::encode(&cover, &symbols, cb)?;
    let out = std::env::temp_dir().join("quinstego_stego.png");
    save_image(&stego, &out)?;
    println!("stego      {}", out.display());
    println!("report     {}", serde_json::to_string(&report)?);

    let decoded = detokenize(&codec::decode(&cover, &load_image(&out)?, cb)?);
    assert_eq!(decoded, normalized);
    println!("decoded    {decoded:?}");
    Ok(())
}
