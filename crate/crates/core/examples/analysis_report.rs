//! Builds the full analysis bundle for an embedding and writes it to a
//! directory: per-channel histograms, the perturbation heatmap (CSV and PNG)
//! and a JSON report.
//!
//! ```text
//! cargo run --release --example analysis_report [outdir]
//! ```

use std::error::Error;

use quinstego::analysis::{emit_report, utilization_breakdown, AnalysisBundle};
use quinstego::codebook::tokenize;
use quinstego::{codec, load_image, Codebook, MetricsReport};

fn main() -> Result<(), Box<dyn Error>> {
    let outdir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("quinstego_analysis"));
    let cover = load_image(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/astronaut.png"))?;
    let text = include_str!("../tests/fixtures/text1.txt");
    let (stego, embed) = codec::encode(&cover, &tokenize(text)?, Codebook::standard())?;

    let metrics = MetricsReport::compute(&cover, &stego, None)?;
    let bundle = AnalysisBundle::build(&cover, &stego, metrics, embed.clone())?;
    for path in emit_report(&bundle, &outdir)? {
        println!("wrote {}", path.display());
    }

    let u = utilization_breakdown(&embed);
    println!(
        "used {} ({:.4}%), skipped {} ({:.4}%), unused {} ({:.4}%)",
        u.used, u.used_pct, u.skipped, u.skipped_pct, u.unused, u.unused_pct
    );
    println!("heatmap nonzero {} max {}", bundle.heatmap.nonzero(), bundle.heatmap.max());
    Ok(())
}
