//! Lossless 8-bit raster I/O.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use image::codecs::bmp::BmpEncoder;
use image::codecs::png::PngEncoder;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat, ImageReader};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("only 8-bit images are supported, got {0}")]
    BitDepthUnsupported(String),
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
}

/// Row-major 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

/// Pixel coordinates plus the row-major pixel index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct PixelRef {
    pub x: usize,
    pub y: usize,
    pub linear: usize,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::InvalidRaster(format!("empty dimensions {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(ImagingError::InvalidRaster(format!("{channels} channels")));
        }
        if samples.len() != width * height * channels {
            return Err(ImagingError::InvalidRaster(format!(
                "expected {} samples, got {}",
                width * height * channels,
                samples.len()
            )));
        }
        Ok(RasterImage { width, height, channels, samples })
    }

    /// Image filled with a single pixel value; `pixel.len()` sets the channel count.
    pub fn filled(width: usize, height: usize, pixel: &[u8]) -> Result<Self, ImagingError> {
        let samples = pixel.iter().copied().cycle().take(width * height * pixel.len()).collect();
        RasterImage::new(width, height, pixel.len(), samples)
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn<F>(width: usize, height: usize, channels: usize, mut f: F) -> Result<Self, ImagingError>
    where
        F: FnMut(usize, usize) -> [u8; 3],
    {
        let mut samples = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                samples.extend_from_slice(&px[..channels.min(3)]);
            }
        }
        RasterImage::new(width, height, channels, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    pub fn pixel(&self, linear: usize) -> &[u8] {
        &self.samples[linear * self.channels..(linear + 1) * self.channels]
    }

    pub fn pixel_mut(&mut self, linear: usize) -> &mut [u8] {
        &mut self.samples[linear * self.channels..(linear + 1) * self.channels]
    }

    pub fn pixels(&self) -> std::slice::ChunksExact<'_, u8> {
        self.samples.chunks_exact(self.channels)
    }

    pub fn pixel_ref(&self, linear: usize) -> PixelRef {
        PixelRef { x: linear % self.width, y: linear / self.width, linear }
    }

    pub fn same_shape(&self, other: &RasterImage) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    /// Integer Rec.601 luma, `(299 R + 587 G + 114 B) / 1000` rounded half-up.
    /// Grayscale input is returned unchanged.
    pub fn to_luma(&self) -> RasterImage {
        if self.channels == 1 {
            return self.clone();
        }
        let samples = self
            .pixels()
            .map(|p| {
                let weighted = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
                ((weighted + 500) / 1000) as u8
            })
            .collect();
        RasterImage { width: self.width, height: self.height, channels: 1, samples }
    }

    fn from_dynamic(img: DynamicImage) -> Result<Self, ImagingError> {
        use image::ColorType as C;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let (channels, samples) = match img.color() {
            C::L8 => (1, img.into_luma8().into_raw()),
            C::La8 => (1, img.into_luma8().into_raw()),
            C::Rgb8 => (3, img.into_rgb8().into_raw()),
            C::Rgba8 => (3, img.into_rgb8().into_raw()),
            other => return Err(ImagingError::BitDepthUnsupported(format!("{other:?}"))),
        };
        RasterImage::new(w, h, channels, samples)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ImagingError + '_ {
    move |source| ImagingError::Io { path: path.to_path_buf(), source }
}

fn image_err(path: &Path, err: image::ImageError) -> ImagingError {
    match err {
        image::ImageError::IoError(source) => ImagingError::Io { path: path.to_path_buf(), source },
        image::ImageError::Unsupported(e) => ImagingError::UnsupportedFormat(e.to_string()),
        other => ImagingError::UnsupportedFormat(format!("{}: {other}", path.display())),
    }
}

/// Loads a PNG, BMP or binary PNM file. Lossy formats are refused.
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage, ImagingError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    let reader = ImageReader::new(BufReader::new(file))
        .with_guessed_format()
        .map_err(io_err(path))?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Bmp | ImageFormat::Pnm) => {}
        Some(other) => {
            return Err(ImagingError::UnsupportedFormat(format!(
                "{}: {other:?} is not a lossless raster format",
                path.display()
            )))
        }
        None => {
            return Err(ImagingError::UnsupportedFormat(format!("{}: unrecognized format", path.display())))
        }
    }
    let img = reader.decode().map_err(|e| image_err(path, e))?;
    RasterImage::from_dynamic(img)
}

/// Saves losslessly; the format comes from the extension (png, bmp, ppm, pgm).
pub fn save_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<(), ImagingError> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let color = if img.channels == 1 { ExtendedColorType::L8 } else { ExtendedColorType::Rgb8 };
    match (ext.as_str(), img.channels) {
        ("png", _) | ("bmp", 3) | ("ppm", 3) | ("pgm", 1) => {}
        ("bmp", _) => return Err(ImagingError::UnsupportedFormat("bmp output requires an RGB image".into())),
        ("ppm", _) => return Err(ImagingError::UnsupportedFormat("ppm output requires an RGB image".into())),
        ("pgm", _) => return Err(ImagingError::UnsupportedFormat("pgm output requires a grayscale image".into())),
        _ => {
            return Err(ImagingError::UnsupportedFormat(format!(
                "refusing to write {}: only png, bmp, ppm and pgm are lossless",
                path.display()
            )))
        }
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    let (w, h) = (img.width as u32, img.height as u32);
    let result = match ext.as_str() {
        "png" => PngEncoder::new(&mut out).write_image(&img.samples, w, h, color),
        "bmp" => BmpEncoder::new(&mut out).write_image(&img.samples, w, h, color),
        "ppm" => PnmEncoder::new(&mut out)
            .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
            .write_image(&img.samples, w, h, color),
        _ => PnmEncoder::new(&mut out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(&img.samples, w, h, color),
    };
    result.map_err(|e| image_err(path, e))?;
    std::io::Write::flush(&mut out).map_err(io_err(path))
}
