//! Text-in-image steganography with quinary RGB perturbations.
//!
//! Each text symbol becomes one triplet of channel offsets in `{-2..=2}` added
//! to a single RGB pixel (or spread over three grayscale pixels). Extraction
//! differences the stego image against the original cover, so recovery is
//! exact as long as the stego image is stored losslessly.
//!
//! ```
//! use quinstego::{codebook, codec, Codebook, RasterImage};
//!
//! let cb = Codebook::standard();
//! let cover = RasterImage::filled(64, 64, &[120, 130, 140]).unwrap();
//! let symbols = codebook::tokenize("Hello, world!").unwrap();
//! let (stego, report) = codec::encode(&cover, &symbols, cb).unwrap();
//! assert_eq!(report.pixels_used, symbols.len() + 1);
//! let decoded = codec::decode(&cover, &stego, cb).unwrap();
//! assert_eq!(codebook::detokenize(&decoded), "Hello, world!");
//! ```

pub mod analysis;
pub mod baseline;
pub mod cli;
pub mod codebook;
pub mod codec;
pub mod imaging;
pub mod metrics;

pub use codebook::{Codebook, Symbol, Triplet};
pub use codec::EmbedReport;
pub use imaging::{load_image, save_image, RasterImage};
pub use metrics::MetricsReport;
