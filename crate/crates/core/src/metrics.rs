//! Image distortion and text recovery metrics.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::codec::EmbedReport;
use crate::imaging::RasterImage;

/// Peak sample value for 8-bit images.
pub const PEAK: f64 = 255.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("images differ in shape: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize, usize), (usize, usize, usize)),
    #[error("image {0}x{1} is smaller than the 11x11 SSIM window")]
    ImageTooSmall(usize, usize),
    #[error("reference text is empty")]
    EmptyReference,
}

fn shape(img: &RasterImage) -> (usize, usize, usize) {
    (img.width(), img.height(), img.channels())
}

fn same_shape(a: &RasterImage, b: &RasterImage) -> Result<(), MetricsError> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(MetricsError::DimensionMismatch(shape(a), shape(b)))
    }
}

/// Exact integer error sums over every sample of an image pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorSums {
    pub samples: u64,
    pub abs_error: u64,
    pub sq_error: u64,
    pub signal_energy: u64,
}

pub fn error_sums(cover: &RasterImage, stego: &RasterImage) -> Result<ErrorSums, MetricsError> {
    same_shape(cover, stego)?;
    let mut sums = ErrorSums { samples: cover.samples().len() as u64, ..Default::default() };
    for (&c, &s) in cover.samples().iter().zip(stego.samples()) {
        let d = (c as i64 - s as i64).unsigned_abs();
        sums.abs_error += d;
        sums.sq_error += d * d;
        sums.signal_energy += c as u64 * c as u64;
    }
    Ok(sums)
}

/// MAE, MSE, SNR and PSNR pooled over all samples. SNR and PSNR are
/// `f64::INFINITY` for identical images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityMetrics {
    pub mae: f64,
    pub mse: f64,
    pub snr: f64,
    pub psnr: f64,
}

/// `10 log10(255^2 / mse)`; infinite when `mse == 0`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

pub fn quality_metrics(cover: &RasterImage, stego: &RasterImage) -> Result<QualityMetrics, MetricsError> {
    let sums = error_sums(cover, stego)?;
    let n = sums.samples as f64;
    let mse = sums.sq_error as f64 / n;
    let snr = if sums.sq_error == 0 {
        f64::INFINITY
    } else {
        10.0 * (sums.signal_energy as f64 / sums.sq_error as f64).log10()
    };
    Ok(QualityMetrics { mae: sums.abs_error as f64 / n, mse, snr, psnr: psnr_from_mse(mse) })
}

/// Normalized 1-D Gaussian taps for the SSIM window.
pub fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let mut taps = [0.0; SSIM_WINDOW];
    let center = (SSIM_WINDOW / 2) as f64;
    for (i, t) in taps.iter_mut().enumerate() {
        let x = i as f64 - center;
        *t = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    taps
}

/// SSIM stabilizing constants `(C1, C2)`.
pub fn ssim_constants() -> (f64, f64) {
    ((SSIM_K1 * PEAK).powi(2), (SSIM_K2 * PEAK).powi(2))
}

/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5), averaged
/// across channels.
pub fn ssim(cover: &RasterImage, stego: &RasterImage) -> Result<f64, MetricsError> {
    same_shape(cover, stego)?;
    let (w, h, channels) = shape(cover);
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricsError::ImageTooSmall(w, h));
    }
    if cover.samples() == stego.samples() {
        return Ok(1.0);
    }
    let total: f64 = (0..channels).map(|ch| channel_ssim(cover, stego, ch)).sum();
    Ok(total / channels as f64)
}

/// Separable Gaussian filtering with a ring buffer of horizontally filtered
/// rows; memory stays proportional to one window of rows.
fn channel_ssim(cover: &RasterImage, stego: &RasterImage, ch: usize) -> f64 {
    let (w, h, channels) = shape(cover);
    let taps = gaussian_taps();
    let (c1, c2) = ssim_constants();
    let out_w = w - SSIM_WINDOW + 1;
    let out_h = h - SSIM_WINDOW + 1;

    // five moments per output column: x, y, xx, yy, xy
    let mut ring = vec![[0.0f64; 5]; SSIM_WINDOW * out_w];
    let mut row_x = vec![0.0f64; w];
    let mut row_y = vec![0.0f64; w];
    let mut total = 0.0;

    for y in 0..h {
        for x in 0..w {
            row_x[x] = cover.samples()[(y * w + x) * channels + ch] as f64;
            row_y[x] = stego.samples()[(y * w + x) * channels + ch] as f64;
        }
        let slot = &mut ring[(y % SSIM_WINDOW) * out_w..(y % SSIM_WINDOW + 1) * out_w];
        for (ox, m) in slot.iter_mut().enumerate() {
            let mut acc = [0.0; 5];
            for (k, &t) in taps.iter().enumerate() {
                let (a, b) = (row_x[ox + k], row_y[ox + k]);
                acc[0] += t * a;
                acc[1] += t * b;
                acc[2] += t * a * a;
                acc[3] += t * b * b;
                acc[4] += t * a * b;
            }
            *m = acc;
        }
        if y + 1 < SSIM_WINDOW {
            continue;
        }
        let top = y + 1 - SSIM_WINDOW;
        for ox in 0..out_w {
            let mut m = [0.0; 5];
            for (k, &t) in taps.iter().enumerate() {
                let row = &ring[((top + k) % SSIM_WINDOW) * out_w + ox];
                for j in 0..5 {
                    m[j] += t * row[j];
                }
            }
            total += ssim_index(m, c1, c2);
        }
    }
    total / (out_w * out_h) as f64
}

/// SSIM of one window from its weighted moments `[E x, E y, E x², E y², E xy]`.
pub fn ssim_index(m: [f64; 5], c1: f64, c2: f64) -> f64 {
    let [mx, my, exx, eyy, exy] = m;
    let vx = exx - mx * mx;
    let vy = eyy - my * my;
    let cov = exy - mx * my;
    ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
}

/// Levenshtein distance with unit costs, two-row dynamic programming.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Character error rate over Unicode scalar values.
pub fn cer(reference: &str, hypothesis: &str) -> Result<f64, MetricsError> {
    let r: Vec<char> = reference.chars().collect();
    if r.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let h: Vec<char> = hypothesis.chars().collect();
    Ok(edit_distance(&r, &h) as f64 / r.len() as f64)
}

/// Splits on runs of spaces and line breaks.
pub fn words(text: &str) -> Vec<&str> {
    text.split([' ', '\n', '\r']).filter(|w| !w.is_empty()).collect()
}

/// Word error rate over whitespace-separated tokens.
pub fn wer(reference: &str, hypothesis: &str) -> Result<f64, MetricsError> {
    let r = words(reference);
    if r.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    Ok(edit_distance(&r, &words(hypothesis)) as f64 / r.len() as f64)
}

/// Percentage of cover pixels carrying a payload symbol.
pub fn utilization(report: &EmbedReport) -> f64 {
    100.0 * report.payload_count as f64 / report.total_pixels as f64
}

fn finite_or_inf<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if value.is_infinite() {
        serializer.serialize_str(if *value > 0.0 { "inf" } else { "-inf" })
    } else {
        serializer.serialize_f64(*value)
    }
}

/// Full distortion and recovery bundle. Text rates are absent when no
/// reference text was supplied; SSIM is absent for images below the window size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub mae: f64,
    pub mse: f64,
    #[serde(rename = "snr_db", serialize_with = "finite_or_inf")]
    pub snr: f64,
    #[serde(rename = "psnr_db", serialize_with = "finite_or_inf")]
    pub psnr: f64,
    pub ssim: Option<f64>,
    pub cer: Option<f64>,
    pub wer: Option<f64>,
}

impl MetricsReport {
    /// Image metrics for a cover/stego pair, plus text rates when
    /// `texts = Some((reference, decoded))`.
    pub fn compute(cover: &RasterImage, stego: &RasterImage, texts: Option<(&str, &str)>) -> Result<Self, MetricsError> {
        let q = quality_metrics(cover, stego)?;
        let ssim = match ssim(cover, stego) {
            Ok(v) => Some(v),
            Err(MetricsError::ImageTooSmall(..)) => None,
            Err(e) => return Err(e),
        };
        let (cer, wer) = match texts {
            Some((reference, decoded)) => (Some(cer(reference, decoded)?), Some(wer(reference, decoded)?)),
            None => (None, None),
        };
        Ok(MetricsReport { mae: q.mae, mse: q.mse, snr: q.snr, psnr: q.psnr, ssim, cer, wer })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px(pixels: &[[u8; 3]], w: usize) -> RasterImage {
        RasterImage::new(w, pixels.len() / w, 3, pixels.concat()).unwrap()
    }

    #[test]
    fn single_pixel_pair() {
        let a = px(&[[100, 100, 100]], 1);
        let b = px(&[[102, 101, 100]], 1);
        let q = quality_metrics(&a, &b).unwrap();
        assert_eq!(q.mae, 1.0);
        assert!((q.mse - 5.0 / 3.0).abs() < 1e-15);
        assert!(q.mae <= q.mse.sqrt());
    }

    #[test]
    fn identical_images() {
        let a = RasterImage::filled(16, 16, &[30, 60, 90]).unwrap();
        let q = quality_metrics(&a, &a).unwrap();
        assert_eq!((q.mae, q.mse), (0.0, 0.0));
        assert!(q.psnr.is_infinite() && q.snr.is_infinite());
        assert_eq!(ssim(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn psnr_of_printed_mse() {
        assert!((psnr_from_mse(0.0584) - 60.465).abs() < 0.01);
    }

    #[test]
    fn ssim_errors() {
        let a = RasterImage::filled(10, 20, &[1]).unwrap();
        assert_eq!(ssim(&a, &a), Err(MetricsError::ImageTooSmall(10, 20)));
        let b = RasterImage::filled(20, 20, &[1]).unwrap();
        assert!(matches!(ssim(&a, &b), Err(MetricsError::DimensionMismatch(..))));
    }

    #[test]
    fn taps_normalized() {
        let taps = gaussian_taps();
        assert!((taps.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(taps[0], taps[10]);
    }

    #[test]
    fn text_rates() {
        assert_eq!(cer("abc", "abc").unwrap(), 0.0);
        assert!((cer("abc", "abd").unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cer("kitten", "sitting").unwrap(), 0.5);
        assert_eq!(cer("", "x"), Err(MetricsError::EmptyReference));
        assert_eq!(wer("same text", "same text").unwrap(), 0.0);
        assert!((wer("a b c", "a x c").unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(wer("hello world", "world").unwrap(), 0.5);
        assert_eq!(wer(" \n ", "x"), Err(MetricsError::EmptyReference));
        assert_eq!(words("a  b\n\nc "), vec!["a", "b", "c"]);
    }

    #[test]
    fn utilization_rows() {
        let row = |total: usize| EmbedReport {
            total_pixels: total,
            payload_count: 8419,
            pixels_used: 8419,
            pixels_skipped: 0,
            pixels_unused: total - 8419,
            utilization_pct: 0.0,
        };
        assert!((utilization(&row(262144)) - 3.2116).abs() < 5e-5);
        assert!((utilization(&row(921600)) - 0.9135).abs() < 5e-5);
        assert!((utilization(&row(8294400)) - 0.1015).abs() < 5e-5);
    }

    #[test]
    fn report_json_renders_infinity() {
        let a = RasterImage::filled(12, 12, &[5, 5, 5]).unwrap();
        let report = MetricsReport::compute(&a, &a, Some(("x y", "x y"))).unwrap();
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(v["psnr_db"], "inf");
        assert_eq!(v["snr_db"], "inf");
        assert_eq!(v["ssim"], 1.0);
        assert_eq!(v["cer"], 0.0);
    }
}
