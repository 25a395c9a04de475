#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use quinstego::codebook::{tokenize, Codebook, Symbol};
use quinstego::codec::{self, EmbedReport};
use quinstego::metrics::error_sums;
use quinstego::RasterImage;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Random alphabet symbols, terminator excluded.
pub fn random_symbols(rng: &mut impl Rng, len: usize) -> Vec<Symbol> {
    (0..len)
        .map(|_| Symbol::from_alphabet_index(rng.gen_range(0..97)).unwrap())
        .collect()
}

/// Random cover with a share of pixels pinned to the boundary values
/// 0, 1, 2, 253, 254, 255 so the skip rule is exercised.
pub fn random_cover(rng: &mut impl Rng, width: usize, height: usize, channels: usize) -> RasterImage {
    const EDGES: [u8; 6] = [0, 1, 2, 253, 254, 255];
    let samples = (0..width * height * channels)
        .map(|_| {
            if rng.gen_bool(0.08) {
                EDGES[rng.gen_range(0..EDGES.len())]
            } else {
                rng.gen()
            }
        })
        .collect();
    RasterImage::new(width, height, channels, samples).unwrap()
}

/// Smooth synthetic scene, resolution independent, every sample in `[8, 247]`.
pub fn scene(width: usize, height: usize) -> RasterImage {
    RasterImage::from_fn(width, height, 3, |x, y| {
        let u = x as f64 / width as f64;
        let v = y as f64 / height as f64;
        let wave = (u * 9.0).sin() * (v * 7.0).cos();
        let r = 128.0 + 100.0 * wave;
        let g = 40.0 + 170.0 * v + 20.0 * (u * 23.0).sin();
        let b = 200.0 - 150.0 * u * v + 30.0 * ((u + v) * 13.0).cos();
        [r, g, b].map(|c| c.clamp(8.0, 247.0) as u8)
    })
    .unwrap()
}

/// `count` symbols cycled from the two reference text fixtures.
pub fn text_payload(count: usize) -> Vec<Symbol> {
    let mut base = tokenize(&fixture_text("text2.txt")).unwrap();
    base.extend(tokenize(&fixture_text("text1.txt")).unwrap());
    base.iter().copied().cycle().take(count).collect()
}

/// Encodes and checks the invariants every encode must satisfy: samples move
/// by at most 2, and the image-side squared error equals the codebook-side
/// triplet energy exactly.
pub fn checked_encode(cover: &RasterImage, symbols: &[Symbol]) -> (RasterImage, EmbedReport) {
    let cb = Codebook::standard();
    let (stego, report) = codec::encode_auto(cover, symbols, cb).unwrap();
    let linf = cover
        .samples()
        .iter()
        .zip(stego.samples())
        .map(|(a, b)| a.abs_diff(*b))
        .max()
        .unwrap_or(0);
    assert!(linf <= 2, "L-inf distortion {linf}");
    let codebook_energy: u64 = symbols
        .iter()
        .chain(std::iter::once(&Symbol::TERMINATOR))
        .map(|&s| cb.symbol_to_triplet(s).energy() as u64)
        .sum();
    assert_eq!(error_sums(cover, &stego).unwrap().sq_error, codebook_energy, "MSE identity");
    assert_eq!(
        report.pixels_used + report.pixels_skipped + report.pixels_unused,
        report.total_pixels
    );
    (stego, report)
}

/// Textbook full-matrix Levenshtein distance.
pub fn oracle_edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

/// Direct per-window SSIM: builds the 2-D Gaussian weights explicitly and
/// evaluates means, variances and covariance around the means.
pub fn oracle_ssim(a: &RasterImage, b: &RasterImage) -> f64 {
    let (w, h, channels) = (a.width(), a.height(), a.channels());
    let sigma = 1.5f64;
    let mut weights = [[0.0f64; 11]; 11];
    let mut total = 0.0;
    for (i, row) in weights.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp();
            total += *v;
        }
    }
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let at = |img: &RasterImage, x: usize, y: usize, ch: usize| img.samples()[(y * w + x) * channels + ch] as f64;
    let mut sum = 0.0;
    let mut count = 0usize;
    for ch in 0..channels {
        for oy in 0..=h - 11 {
            for ox in 0..=w - 11 {
                let (mut mx, mut my) = (0.0, 0.0);
                for i in 0..11 {
                    for j in 0..11 {
                        let wt = weights[i][j] / total;
                        mx += wt * at(a, ox + j, oy + i, ch);
                        my += wt * at(b, ox + j, oy + i, ch);
                    }
                }
                let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
                for i in 0..11 {
                    for j in 0..11 {
                        let wt = weights[i][j] / total;
                        let dx = at(a, ox + j, oy + i, ch) - mx;
                        let dy = at(b, ox + j, oy + i, ch) - my;
                        vx += wt * dx * dx;
                        vy += wt * dy * dy;
                        cov += wt * dx * dy;
                    }
                }
                sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
                count += 1;
            }
        }
    }
    sum / count as f64
}

/// Decodes by exhaustive search: for each usable pixel, scans all 125
/// triplets for the observed delta, then all 98 symbols for that triplet.
pub fn oracle_decode(cover: &RasterImage, stego: &RasterImage, cb: &Codebook) -> Option<Vec<Symbol>> {
    let mut out = Vec::new();
    for (c, s) in cover.pixels().zip(stego.pixels()) {
        if !c.iter().all(|&v| (2..=253).contains(&v)) {
            continue;
        }
        let delta: Vec<i32> = c.iter().zip(s).map(|(&a, &b)| b as i32 - a as i32).collect();
        let triplet = quinstego::Triplet::all().find(|t| {
            t.components().iter().zip(&delta).all(|(&x, &d)| x as i32 == d)
        })?;
        let symbol = Symbol::alphabet().find(|&sym| cb.symbol_to_triplet(sym) == triplet)?;
        if symbol.is_terminator() {
            return Some(out);
        }
        out.push(symbol);
    }
    None
}
