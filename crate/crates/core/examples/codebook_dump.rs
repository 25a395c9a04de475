//! Prints the symbol-to-triplet codebook as CSV, followed by a summary of how
//! the 125 quinary combinations are allocated.
//!
//! ```text
//! cargo run --example codebook_dump > codebook.csv
//! ```

use std::error::Error;

use quinstego::codebook::SymbolKind;
use quinstego::{Codebook, Triplet};

fn main() -> Result<(), Box<dyn Error>> {
    let cb = Codebook::standard();
    cb.write_csv(std::io::stdout().lock())?;

    let mut kinds = [0usize; 4];
    for (symbol, _) in cb.entries() {
        let slot = match symbol.kind() {
            SymbolKind::Printable(c) if c.is_ascii_uppercase() => 0,
            SymbolKind::Printable(c) if c.is_ascii_lowercase() => 1,
            SymbolKind::Printable(c) if c.is_ascii_digit() => 2,
            _ => 3,
        };
        kinds[slot] += 1;
    }
    let shelved: Vec<Triplet> = Triplet::all().filter(|&t| cb.triplet_to_symbol(t).is_err()).collect();
    eprintln!(
        "{} uppercase, {} lowercase, {} digits, {} other; {} shelved combinations",
        kinds[0],
        kinds[1],
        kinds[2],
        kinds[3],
        shelved.len()
    );
    let mean_energy =
        cb.entries().map(|(_, t)| t.energy() as f64).sum::<f64>() / cb.entries().count() as f64;
    eprintln!("mean squared offset per symbol {mean_energy:.3}");
    Ok(())
}
