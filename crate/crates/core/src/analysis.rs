//! Plot-ready evidence: histograms, perturbation heatmaps and pixel budgets.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::EmbedReport;
use crate::imaging::{save_image, ImagingError, RasterImage};
use crate::metrics::MetricsReport;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("images differ in shape: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize, usize), (usize, usize, usize)),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    R,
    G,
    B,
    Gray,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::R => "r",
            Channel::G => "g",
            Channel::B => "b",
            Channel::Gray => "gray",
        }
    }

    fn for_image(img: &RasterImage) -> &'static [Channel] {
        if img.channels() == 1 {
            &[Channel::Gray]
        } else {
            &[Channel::R, Channel::G, Channel::B]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelHistogram {
    pub channel: Channel,
    pub bins: [u64; 256],
}

impl ChannelHistogram {
    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// Largest per-bin count difference against `other`.
    pub fn max_bin_difference(&self, other: &ChannelHistogram) -> u64 {
        self.bins.iter().zip(&other.bins).map(|(a, b)| a.abs_diff(*b)).max().unwrap_or(0)
    }
}

pub fn channel_histograms(img: &RasterImage) -> Vec<ChannelHistogram> {
    Channel::for_image(img)
        .iter()
        .enumerate()
        .map(|(ch, &channel)| {
            let mut bins = [0u64; 256];
            for p in img.pixels() {
                bins[p[ch] as usize] += 1;
            }
            ChannelHistogram { channel, bins }
        })
        .collect()
}

/// Per-pixel L1 perturbation magnitude `|dR| + |dG| + |dB|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u32>,
}

impl Heatmap {
    pub fn nonzero(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0).count()
    }

    pub fn max(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// 8-bit rendering scaled so that magnitude 6 maps to 255, rounding half-up.
    pub fn to_image(&self) -> RasterImage {
        let samples = self
            .values
            .iter()
            .map(|&v| ((v.min(6) * 255 * 2 + 6) / 12) as u8)
            .collect();
        RasterImage::new(self.width, self.height, 1, samples).expect("heatmap dimensions are non-zero")
    }
}

pub fn heatmap(cover: &RasterImage, stego: &RasterImage) -> Result<Heatmap, AnalysisError> {
    if !cover.same_shape(stego) {
        let s = |i: &RasterImage| (i.width(), i.height(), i.channels());
        return Err(AnalysisError::DimensionMismatch(s(cover), s(stego)));
    }
    let values = cover
        .pixels()
        .zip(stego.pixels())
        .map(|(c, s)| c.iter().zip(s).map(|(&a, &b)| a.abs_diff(b) as u32).sum())
        .collect();
    Ok(Heatmap { width: cover.width(), height: cover.height(), values })
}

/// Used / skipped / unused pixel counts and their shares of the image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilizationBreakdown {
    pub total_pixels: usize,
    pub used: usize,
    pub skipped: usize,
    pub unused: usize,
    pub used_pct: f64,
    pub skipped_pct: f64,
    pub unused_pct: f64,
}

pub fn utilization_breakdown(report: &EmbedReport) -> UtilizationBreakdown {
    let pct = |n: usize| 100.0 * n as f64 / report.total_pixels as f64;
    UtilizationBreakdown {
        total_pixels: report.total_pixels,
        used: report.pixels_used,
        skipped: report.pixels_skipped,
        unused: report.pixels_unused,
        used_pct: pct(report.pixels_used),
        skipped_pct: pct(report.pixels_skipped),
        unused_pct: pct(report.pixels_unused),
    }
}

/// Everything `emit_report` writes.
#[derive(Debug, Clone)]
pub struct AnalysisBundle {
    pub cover_histograms: Vec<ChannelHistogram>,
    pub stego_histograms: Vec<ChannelHistogram>,
    pub heatmap: Heatmap,
    pub metrics: MetricsReport,
    pub embed: EmbedReport,
    pub image: ImageInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageInfo {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
}

impl ImageInfo {
    pub fn of(img: &RasterImage) -> Self {
        ImageInfo { width: img.width(), height: img.height(), channels: img.channels() }
    }
}

impl AnalysisBundle {
    pub fn build(cover: &RasterImage, stego: &RasterImage, metrics: MetricsReport, embed: EmbedReport) -> Result<Self, AnalysisError> {
        Ok(AnalysisBundle {
            cover_histograms: channel_histograms(cover),
            stego_histograms: channel_histograms(stego),
            heatmap: heatmap(cover, stego)?,
            metrics,
            embed,
            image: ImageInfo::of(cover),
        })
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    image: ImageInfo,
    #[serde(flatten)]
    embed: &'a EmbedReport,
    #[serde(flatten)]
    metrics: &'a MetricsReport,
    utilization: UtilizationBreakdown,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, AnalysisError> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|source| AnalysisError::Csv { path: path.to_path_buf(), source })
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), AnalysisError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let wrap = |source| AnalysisError::Csv { path: path.to_path_buf(), source };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row).map_err(wrap)?;
    }
    w.flush().map_err(|source| AnalysisError::Io { path: path.to_path_buf(), source })
}

/// Writes histogram CSVs, the heatmap (CSV and PNG) and `report.json` into
/// `outdir`, returning the written paths.
pub fn emit_report(bundle: &AnalysisBundle, outdir: impl AsRef<Path>) -> Result<Vec<PathBuf>, AnalysisError> {
    let outdir = outdir.as_ref();
    fs::create_dir_all(outdir).map_err(|source| AnalysisError::Io { path: outdir.to_path_buf(), source })?;
    let mut written = Vec::new();

    for (which, hists) in [("cover", &bundle.cover_histograms), ("stego", &bundle.stego_histograms)] {
        for hist in hists {
            let path = outdir.join(format!("hist_{which}_{}.csv", hist.channel.name()));
            let rows = hist.bins.iter().enumerate().map(|(i, c)| [i.to_string(), c.to_string()]);
            write_rows(&path, &["intensity", "count"], rows)?;
            written.push(path);
        }
    }

    let path = outdir.join("heatmap.csv");
    let hm = &bundle.heatmap;
    let rows = hm
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| [(i % hm.width).to_string(), (i / hm.width).to_string(), v.to_string()]);
    write_rows(&path, &["x", "y", "magnitude"], rows)?;
    written.push(path);

    let path = outdir.join("heatmap.png");
    save_image(&hm.to_image(), &path)?;
    written.push(path);

    let path = outdir.join("report.json");
    let json = ReportJson {
        image: bundle.image,
        embed: &bundle.embed,
        metrics: &bundle.metrics,
        utilization: utilization_breakdown(&bundle.embed),
    };
    let text = serde_json::to_string_pretty(&json).expect("report serializes");
    fs::write(&path, text + "\n").map_err(|source| AnalysisError::Io { path: path.clone(), source })?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_extremes() {
        let img = RasterImage::new(2, 1, 3, vec![0, 0, 0, 255, 255, 255]).unwrap();
        let hists = channel_histograms(&img);
        assert_eq!(hists.len(), 3);
        for h in &hists {
            assert_eq!(h.bins[0], 1);
            assert_eq!(h.bins[255], 1);
            assert_eq!(h.total(), 2);
        }
    }

    #[test]
    fn heatmap_of_single_symbol() {
        let cover = RasterImage::filled(3, 1, &[128, 128, 128]).unwrap();
        let mut stego = cover.clone();
        stego.pixel_mut(1).copy_from_slice(&[126, 126, 126]);
        let hm = heatmap(&cover, &stego).unwrap();
        assert_eq!(hm.values, vec![0, 6, 0]);
        assert_eq!(hm.nonzero(), 1);
        assert!(heatmap(&cover, &cover).unwrap().values.iter().all(|&v| v == 0));
    }

    #[test]
    fn heatmap_png_scale() {
        let hm = Heatmap { width: 7, height: 1, values: (0..7).collect() };
        assert_eq!(hm.to_image().samples(), &[0, 43, 85, 128, 170, 213, 255]);
    }

    #[test]
    fn breakdown_sums_to_hundred() {
        let report = EmbedReport {
            total_pixels: 262144,
            payload_count: 8419,
            pixels_used: 8419,
            pixels_skipped: 0,
            pixels_unused: 253725,
            utilization_pct: 3.2116,
        };
        let b = utilization_breakdown(&report);
        assert_eq!((b.used, b.unused), (8419, 253725));
        assert!((b.used_pct + b.skipped_pct + b.unused_pct - 100.0).abs() < 1e-9);
    }
}
