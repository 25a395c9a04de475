//! Quinary embedding and extraction.
//!
//! A pixel is usable when all of its channels lie in `[2, 253]`, so any
//! triplet can be added without clipping. The encoder walks usable pixels in
//! row-major order, adds one symbol triplet per pixel and closes the message
//! with the terminator triplet. The decoder recomputes the same mask from the
//! cover, differences each usable pixel and inverts the codebook until it
//! meets the terminator.
//!
//! Grayscale covers carry one symbol in three consecutive usable pixels, one
//! triplet component per pixel.

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::codebook::{Codebook, Symbol, Triplet};
use crate::imaging::{PixelRef, RasterImage};

/// Lowest channel value that survives a `-2` offset.
pub const USABLE_MIN: u8 = 2;
/// Highest channel value that survives a `+2` offset.
pub const USABLE_MAX: u8 = 253;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("expected a {expected}-channel image, got {actual} channels")]
    ChannelMismatch { expected: usize, actual: usize },
    #[error("cover is {cover:?} but stego is {stego:?} (width, height, channels)")]
    DimensionMismatch { cover: (usize, usize, usize), stego: (usize, usize, usize) },
    #[error("payload needs {needed} symbols of capacity, cover offers {available}")]
    CapacityExceeded { needed: usize, available: usize },
    #[error("payload contains a terminator symbol at position {0}")]
    TerminatorInPayload(usize),
    #[error("delta {delta} on channel {channel} at pixel ({}, {}) is outside -2..=2", pixel.x, pixel.y)]
    DeltaOutOfRange { pixel: PixelRef, channel: usize, delta: i32 },
    #[error("pixel ({}, {}) carries unassigned triplet {triplet}", pixel.x, pixel.y)]
    UnassignedCombination { pixel: PixelRef, triplet: Triplet },
    #[error("usable pixels exhausted without a terminator")]
    MissingTerminator,
    #[error("usable pixels end mid-group ({leftover} of 3) before a terminator")]
    IncompleteGroup { leftover: usize },
}

/// Per-pixel usability derived from the cover alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsabilityMask {
    usable: Vec<bool>,
}

impl UsabilityMask {
    fn from_image(cover: &RasterImage) -> Self {
        let usable = cover
            .pixels()
            .map(|p| p.iter().all(|v| (USABLE_MIN..=USABLE_MAX).contains(v)))
            .collect();
        UsabilityMask { usable }
    }

    pub fn is_usable(&self, linear: usize) -> bool {
        self.usable[linear]
    }

    pub fn usable_count(&self) -> usize {
        self.usable.iter().filter(|&&u| u).count()
    }

    pub fn len(&self) -> usize {
        self.usable.len()
    }

    pub fn is_empty(&self) -> bool {
        self.usable.is_empty()
    }

    /// Row-major indices of usable pixels.
    pub fn usable_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.usable.iter().enumerate().filter_map(|(i, &u)| u.then_some(i))
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.usable
    }
}

/// Pixel accounting for one embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedReport {
    pub total_pixels: usize,
    /// Embedded symbols including the terminator.
    pub payload_count: usize,
    pub pixels_used: usize,
    /// Unusable pixels passed over before the terminator.
    pub pixels_skipped: usize,
    pub pixels_unused: usize,
    #[serde(serialize_with = "fixed4")]
    pub utilization_pct: f64,
}

fn fixed4<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    let raw = serde_json::value::RawValue::from_string(format!("{value:.4}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(serializer)
}

impl EmbedReport {
    fn new(total_pixels: usize, payload_count: usize, pixels_used: usize, last_used: Option<usize>, usable_before: usize) -> Self {
        let pixels_skipped = last_used.map_or(0, |last| last + 1 - usable_before);
        EmbedReport {
            total_pixels,
            payload_count,
            pixels_used,
            pixels_skipped,
            pixels_unused: total_pixels - pixels_used - pixels_skipped,
            utilization_pct: 100.0 * payload_count as f64 / total_pixels as f64,
        }
    }
}

fn require_channels(img: &RasterImage, expected: usize) -> Result<(), CodecError> {
    if img.channels() == expected {
        Ok(())
    } else {
        Err(CodecError::ChannelMismatch { expected, actual: img.channels() })
    }
}

fn require_same_shape(cover: &RasterImage, stego: &RasterImage) -> Result<(), CodecError> {
    if cover.same_shape(stego) {
        Ok(())
    } else {
        let shape = |i: &RasterImage| (i.width(), i.height(), i.channels());
        Err(CodecError::DimensionMismatch { cover: shape(cover), stego: shape(stego) })
    }
}

fn check_payload(symbols: &[Symbol]) -> Result<(), CodecError> {
    match symbols.iter().position(|s| s.is_terminator()) {
        Some(i) => Err(CodecError::TerminatorInPayload(i)),
        None => Ok(()),
    }
}

/// Usability mask of an RGB or grayscale cover.
pub fn usable_mask_any(cover: &RasterImage) -> UsabilityMask {
    UsabilityMask::from_image(cover)
}

/// Usability mask of a 3-channel cover.
pub fn usable_mask(cover: &RasterImage) -> Result<UsabilityMask, CodecError> {
    require_channels(cover, 3)?;
    Ok(UsabilityMask::from_image(cover))
}

/// Number of payload symbols an RGB cover can hold, terminator excluded.
pub fn capacity(cover: &RasterImage) -> Result<usize, CodecError> {
    Ok(usable_mask(cover)?.usable_count().saturating_sub(1))
}

/// Number of payload symbols a grayscale cover can hold, terminator excluded.
pub fn capacity_grayscale(cover: &RasterImage) -> Result<usize, CodecError> {
    require_channels(cover, 1)?;
    Ok((UsabilityMask::from_image(cover).usable_count() / 3).saturating_sub(1))
}

/// Dispatches on channel count.
pub fn capacity_auto(cover: &RasterImage) -> Result<usize, CodecError> {
    match cover.channels() {
        1 => capacity_grayscale(cover),
        _ => capacity(cover),
    }
}

fn apply(sample: &mut u8, delta: i8) {
    // mask guarantees 2..=253, so this never leaves 0..=255
    *sample = (*sample as i16 + delta as i16) as u8;
}

/// Embeds `symbols` plus a terminator into an RGB cover.
pub fn encode(cover: &RasterImage, symbols: &[Symbol], cb: &Codebook) -> Result<(RasterImage, EmbedReport), CodecError> {
    require_channels(cover, 3)?;
    check_payload(symbols)?;
    let mask = UsabilityMask::from_image(cover);
    let available = mask.usable_count().saturating_sub(1);
    if symbols.len() > available || mask.usable_count() == 0 {
        return Err(CodecError::CapacityExceeded { needed: symbols.len(), available });
    }

    let mut stego = cover.clone();
    let payload = symbols.iter().copied().chain(std::iter::once(Symbol::TERMINATOR));
    let mut last = None;
    for (linear, symbol) in mask.usable_indices().zip(payload) {
        let pixel = stego.pixel_mut(linear);
        for (sample, delta) in pixel.iter_mut().zip(cb.symbol_to_triplet(symbol).components()) {
            apply(sample, delta);
        }
        last = Some(linear);
    }
    let payload_count = symbols.len() + 1;
    let report = EmbedReport::new(cover.pixel_count(), payload_count, payload_count, last, payload_count);
    Ok((stego, report))
}

fn delta(cover: u8, stego: u8, pixel: PixelRef, channel: usize) -> Result<i32, CodecError> {
    let d = stego as i32 - cover as i32;
    if d.abs() > 2 {
        return Err(CodecError::DeltaOutOfRange { pixel, channel, delta: d });
    }
    Ok(d)
}

fn lookup(cb: &Codebook, d: [i32; 3], pixel: PixelRef) -> Result<Symbol, CodecError> {
    // components already range-checked
    let triplet = Triplet::new(d[0], d[1], d[2]).expect("delta within quinary range");
    cb.triplet_to_symbol(triplet)
        .map_err(|_| CodecError::UnassignedCombination { pixel, triplet })
}

/// Recovers the payload of an RGB stego image given its cover.
pub fn decode(cover: &RasterImage, stego: &RasterImage, cb: &Codebook) -> Result<Vec<Symbol>, CodecError> {
    require_channels(cover, 3)?;
    require_same_shape(cover, stego)?;
    let mask = UsabilityMask::from_image(cover);
    let mut symbols = Vec::new();
    for linear in mask.usable_indices() {
        let pixel = cover.pixel_ref(linear);
        let (c, s) = (cover.pixel(linear), stego.pixel(linear));
        let mut d = [0i32; 3];
        for ch in 0..3 {
            d[ch] = delta(c[ch], s[ch], pixel, ch)?;
        }
        let symbol = lookup(cb, d, pixel)?;
        if symbol.is_terminator() {
            return Ok(symbols);
        }
        symbols.push(symbol);
    }
    Err(CodecError::MissingTerminator)
}

/// Embeds `symbols` plus a terminator into a grayscale cover, three usable
/// pixels per symbol.
pub fn encode_grayscale(cover: &RasterImage, symbols: &[Symbol], cb: &Codebook) -> Result<(RasterImage, EmbedReport), CodecError> {
    require_channels(cover, 1)?;
    check_payload(symbols)?;
    let mask = UsabilityMask::from_image(cover);
    let groups = mask.usable_count() / 3;
    let available = groups.saturating_sub(1);
    if symbols.len() > available || groups == 0 {
        return Err(CodecError::CapacityExceeded { needed: symbols.len(), available });
    }

    let mut stego = cover.clone();
    let deltas = symbols
        .iter()
        .copied()
        .chain(std::iter::once(Symbol::TERMINATOR))
        .flat_map(|s| cb.symbol_to_triplet(s).components());
    let mut last = None;
    for (linear, d) in mask.usable_indices().zip(deltas) {
        apply(&mut stego.samples_mut()[linear], d);
        last = Some(linear);
    }
    let payload_count = symbols.len() + 1;
    let used = 3 * payload_count;
    let report = EmbedReport::new(cover.pixel_count(), payload_count, used, last, used);
    Ok((stego, report))
}

/// Inverse of [`encode_grayscale`].
pub fn decode_grayscale(cover: &RasterImage, stego: &RasterImage, cb: &Codebook) -> Result<Vec<Symbol>, CodecError> {
    require_channels(cover, 1)?;
    require_same_shape(cover, stego)?;
    let mask = UsabilityMask::from_image(cover);
    let mut symbols = Vec::new();
    let mut group = [0i32; 3];
    let mut filled = 0;
    for linear in mask.usable_indices() {
        let pixel = cover.pixel_ref(linear);
        group[filled] = delta(cover.samples()[linear], stego.samples()[linear], pixel, filled)?;
        filled += 1;
        if filled == 3 {
            filled = 0;
            let symbol = lookup(cb, group, pixel)?;
            if symbol.is_terminator() {
                return Ok(symbols);
            }
            symbols.push(symbol);
        }
    }
    if filled > 0 {
        Err(CodecError::IncompleteGroup { leftover: filled })
    } else {
        Err(CodecError::MissingTerminator)
    }
}

/// RGB or grayscale encode chosen from the cover's channel count.
pub fn encode_auto(cover: &RasterImage, symbols: &[Symbol], cb: &Codebook) -> Result<(RasterImage, EmbedReport), CodecError> {
    match cover.channels() {
        1 => encode_grayscale(cover, symbols, cb),
        _ => encode(cover, symbols, cb),
    }
}

/// RGB or grayscale decode chosen from the cover's channel count.
pub fn decode_auto(cover: &RasterImage, stego: &RasterImage, cb: &Codebook) -> Result<Vec<Symbol>, CodecError> {
    match cover.channels() {
        1 => decode_grayscale(cover, stego, cb),
        _ => decode(cover, stego, cb),
    }
}

/// The report [`encode_auto`] would produce for `payload_len` symbols, without
/// touching pixels. Used to account for an existing stego image after decoding.
pub fn plan_report(cover: &RasterImage, payload_len: usize) -> Result<EmbedReport, CodecError> {
    let per_symbol = if cover.channels() == 1 { 3 } else { 1 };
    let mask = UsabilityMask::from_image(cover);
    let needed = per_symbol * (payload_len + 1);
    let available = (mask.usable_count() / per_symbol).saturating_sub(1);
    let Some(last) = mask.usable_indices().nth(needed - 1) else {
        return Err(CodecError::CapacityExceeded { needed: payload_len, available });
    };
    Ok(EmbedReport::new(cover.pixel_count(), payload_len + 1, needed, Some(last), needed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::tokenize;

    fn rgb(pixels: &[[u8; 3]]) -> RasterImage {
        RasterImage::new(pixels.len(), 1, 3, pixels.concat()).unwrap()
    }

    fn cb() -> &'static Codebook {
        Codebook::standard()
    }

    #[test]
    fn mask_bounds() {
        let img = rgb(&[[128, 128, 128], [1, 128, 128], [128, 254, 128], [2, 253, 2]]);
        let mask = usable_mask(&img).unwrap();
        assert_eq!(mask.as_slice(), &[true, false, false, true]);
        assert_eq!(mask.usable_count(), 2);
    }

    #[test]
    fn mask_needs_rgb() {
        let gray = RasterImage::filled(2, 2, &[128]).unwrap();
        assert_eq!(usable_mask(&gray), Err(CodecError::ChannelMismatch { expected: 3, actual: 1 }));
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(&RasterImage::filled(512, 512, &[128, 128, 128]).unwrap()), Ok(262143));
        assert_eq!(capacity(&RasterImage::filled(1, 1, &[128, 128, 128]).unwrap()), Ok(0));
        assert_eq!(capacity(&RasterImage::filled(2, 2, &[0, 0, 0]).unwrap()), Ok(0));
    }

    #[test]
    fn encode_single_symbol() {
        let cover = rgb(&[[128, 128, 128], [128, 128, 128]]);
        let (stego, report) = encode(&cover, &tokenize("A").unwrap(), cb()).unwrap();
        assert_eq!(stego.samples(), &[126, 126, 126, 129, 130, 128]);
        assert_eq!(report.payload_count, 2);
        assert_eq!(report.pixels_used, 2);
        assert_eq!(report.pixels_skipped, 0);
        assert_eq!(report.pixels_unused, 0);
    }

    #[test]
    fn encode_skips_unusable() {
        let cover = rgb(&[[1, 50, 50], [100, 100, 100]]);
        let (stego, report) = encode(&cover, &[], cb()).unwrap();
        assert_eq!(stego.samples(), &[1, 50, 50, 101, 102, 100]);
        assert_eq!(report.pixels_skipped, 1);
        assert_eq!(report.pixels_used, 1);
        assert_eq!(report.pixels_unused, 0);
    }

    #[test]
    fn capacity_exceeded() {
        let cover = rgb(&[[128, 128, 128], [0, 0, 0]]);
        let err = encode(&cover, &tokenize("A").unwrap(), cb()).unwrap_err();
        assert_eq!(err, CodecError::CapacityExceeded { needed: 1, available: 0 });
        let dead = rgb(&[[0, 0, 0]]);
        assert!(matches!(encode(&dead, &[], cb()), Err(CodecError::CapacityExceeded { .. })));
    }

    #[test]
    fn terminator_rejected_in_payload() {
        let cover = rgb(&[[128, 128, 128]; 4]);
        let err = encode(&cover, &[Symbol::SPACE, Symbol::TERMINATOR], cb()).unwrap_err();
        assert_eq!(err, CodecError::TerminatorInPayload(1));
    }

    #[test]
    fn utilization_matches_payload_ratio() {
        let cover = RasterImage::filled(512, 512, &[100, 120, 140]).unwrap();
        let symbols = vec![Symbol::SPACE; 8418];
        let (_, report) = encode(&cover, &symbols, cb()).unwrap();
        assert_eq!(report.payload_count, 8419);
        assert!((report.utilization_pct - 3.2116).abs() < 1e-4);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"utilization_pct\":3.2116"), "{json}");
    }

    #[test]
    fn decode_round_trip_and_errors() {
        let cover = rgb(&[[10, 20, 30], [0, 0, 0], [200, 100, 50], [128, 128, 128], [60, 60, 60]]);
        let text = tokenize("Hi!").unwrap();
        let (stego, _) = encode(&cover, &text, cb()).unwrap();
        assert_eq!(decode(&cover, &stego, cb()).unwrap(), text);

        assert_eq!(decode(&cover, &cover, cb()), Err(CodecError::MissingTerminator));

        let mut bad = stego.clone();
        bad.pixel_mut(0)[0] = 13;
        assert!(matches!(
            decode(&cover, &bad, cb()),
            Err(CodecError::DeltaOutOfRange { channel: 0, delta: 3, .. })
        ));

        let mut shelved = cover.clone();
        shelved.pixel_mut(0).copy_from_slice(&[12, 20, 30]);
        assert!(matches!(decode(&cover, &shelved, cb()), Err(CodecError::UnassignedCombination { .. })));

        let other = rgb(&[[0, 0, 0]; 4]);
        assert!(matches!(decode(&cover, &other, cb()), Err(CodecError::DimensionMismatch { .. })));
    }

    #[test]
    fn grayscale_examples() {
        let cover = RasterImage::filled(6, 1, &[128]).unwrap();
        let (stego, report) = encode_grayscale(&cover, &tokenize("A").unwrap(), cb()).unwrap();
        assert_eq!(stego.samples(), &[126, 126, 126, 129, 130, 128]);
        assert_eq!(report.pixels_used, 6);
        assert_eq!(decode_grayscale(&cover, &stego, cb()).unwrap(), tokenize("A").unwrap());
        assert_eq!(decode_grayscale(&cover, &cover, cb()), Err(CodecError::MissingTerminator));

        let three = RasterImage::filled(3, 1, &[50]).unwrap();
        let (stego, report) = encode_grayscale(&three, &[], cb()).unwrap();
        assert_eq!(report.pixels_used, 3);
        assert_eq!(report.payload_count, 1);
        assert!(decode_grayscale(&three, &stego, cb()).unwrap().is_empty());

        let four = RasterImage::filled(4, 1, &[50]).unwrap();
        assert_eq!(decode_grayscale(&four, &four, cb()), Err(CodecError::IncompleteGroup { leftover: 1 }));

        assert!(matches!(
            encode_grayscale(&rgb(&[[1, 2, 3]]), &[], cb()),
            Err(CodecError::ChannelMismatch { .. })
        ));
    }

    #[test]
    fn plan_matches_encode() {
        let cover = RasterImage::from_fn(9, 7, 3, |x, y| [(x * 31) as u8, (y * 40) as u8, 128]).unwrap();
        let symbols = tokenize("plan me").unwrap();
        let (_, report) = encode(&cover, &symbols, cb()).unwrap();
        assert_eq!(plan_report(&cover, symbols.len()).unwrap(), report);

        let gray = cover.to_luma();
        let (_, report) = encode_grayscale(&gray, &symbols, cb()).unwrap();
        assert_eq!(plan_report(&gray, symbols.len()).unwrap(), report);
    }
}
