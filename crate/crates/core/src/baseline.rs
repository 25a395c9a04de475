//! Sequential 1-bit LSB embedding, kept as a reference point for pixel usage.
//!
//! Bytes are written most-significant bit first into successive channel LSBs
//! (row-major, R then G then B; one bit per pixel for grayscale) and closed by
//! a `0x00` byte. Decoding is blind: no cover is needed.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::imaging::RasterImage;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("payload needs {needed} channel slots, cover offers {available}")]
    CapacityExceeded { needed: usize, available: usize },
    #[error("payload contains a NUL byte at offset {0}")]
    EmbeddedNul(usize),
    #[error("image exhausted before a NUL terminator byte")]
    MissingTerminator,
    #[error("unknown method {0:?} (expected lsb, msb or proposed)")]
    UnknownMethod(String),
    #[error("channel count must be 1 or 3, got {0}")]
    InvalidChannels(usize),
}

/// Channel slots (bits) consumed by a `len`-byte message plus its terminator.
pub fn lsb_slots_required(len: usize) -> usize {
    8 * (len + 1)
}

pub fn lsb_encode(cover: &RasterImage, text: &[u8]) -> Result<RasterImage, BaselineError> {
    if let Some(i) = text.iter().position(|&b| b == 0) {
        return Err(BaselineError::EmbeddedNul(i));
    }
    let needed = lsb_slots_required(text.len());
    let available = cover.samples().len();
    if needed > available {
        return Err(BaselineError::CapacityExceeded { needed, available });
    }
    let mut stego = cover.clone();
    let bits = text
        .iter()
        .chain(std::iter::once(&0u8))
        .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1));
    for (sample, bit) in stego.samples_mut().iter_mut().zip(bits) {
        *sample = (*sample & !1) | bit;
    }
    Ok(stego)
}

pub fn lsb_decode(stego: &RasterImage) -> Result<Vec<u8>, BaselineError> {
    let mut out = Vec::new();
    for chunk in stego.samples().chunks_exact(8) {
        let byte = chunk.iter().fold(0u8, |acc, s| (acc << 1) | (s & 1));
        if byte == 0 {
            return Ok(out);
        }
        out.push(byte);
    }
    Err(BaselineError::MissingTerminator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    Lsb,
    Msb,
    Proposed,
}

impl FromStr for Method {
    type Err = BaselineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lsb" => Ok(Method::Lsb),
            "msb" => Ok(Method::Msb),
            "proposed" | "quinary" => Ok(Method::Proposed),
            _ => Err(BaselineError::UnknownMethod(s.to_string())),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Lsb => "LSB",
            Method::Msb => "MSB",
            Method::Proposed => "Quinary",
        })
    }
}

/// Pixels needed per character in grayscale and RGB covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MethodProfile {
    pub method: Method,
    pub pixels_per_char_gray: u32,
    pub pixels_per_char_rgb: u32,
}

pub fn method_profile(method: Method) -> MethodProfile {
    let (gray, rgb) = match method {
        Method::Lsb => (8, 3),
        Method::Msb => (8, 3),
        Method::Proposed => (3, 1),
    };
    MethodProfile { method, pixels_per_char_gray: gray, pixels_per_char_rgb: rgb }
}

pub fn pixels_per_character(method: Method, channels: usize) -> Result<u32, BaselineError> {
    let profile = method_profile(method);
    match channels {
        1 => Ok(profile.pixels_per_char_gray),
        3 => Ok(profile.pixels_per_char_rgb),
        other => Err(BaselineError::InvalidChannels(other)),
    }
}

/// The pixels-per-character comparison table.
pub fn comparison_table() -> Vec<MethodProfile> {
    [Method::Lsb, Method::Msb, Method::Proposed].into_iter().map(method_profile).collect()
}
