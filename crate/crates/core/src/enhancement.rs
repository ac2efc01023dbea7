//! Contrast enhancement and grayscale-to-binary conversion.

use crate::image_io::{BinaryImage, GrayImage, LEVELS};

pub const DEFAULT_BLOCK_SIZE: usize = 16;
pub const DEFAULT_FLATNESS: u8 = 8;

/// Level-to-level lookup produced by [`histogram_equalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistogramMap {
    pub mapping: [u8; LEVELS],
    pub source_histogram: [u64; LEVELS],
}

impl HistogramMap {
    /// Builds the cumulative-distribution mapping for `hist`.
    ///
    /// Level `k` maps to `255 * cdf(k)` rounded half-up, where `cdf(k)` is the
    /// fraction of pixels at or below `k`. Integer arithmetic throughout, so the
    /// result is identical on every platform.
    pub fn from_histogram(hist: [u64; LEVELS]) -> Self {
        let total: u64 = hist.iter().sum();
        let mut mapping = [0u8; LEVELS];
        if total > 0 {
            let mut cumulative = 0u64;
            for (level, &count) in hist.iter().enumerate() {
                cumulative += count;
                mapping[level] = ((255 * cumulative * 2 + total) / (2 * total)) as u8;
            }
        }
        Self {
            mapping,
            source_histogram: hist,
        }
    }

    pub fn apply(&self, level: u8) -> u8 {
        self.mapping[level as usize]
    }
}

pub fn histogram_equalize(img: &GrayImage) -> (GrayImage, HistogramMap) {
    let map = HistogramMap::from_histogram(img.histogram());
    (img.map(|p| map.apply(p)), map)
}

/// Per-block mean threshold.
///
/// The raster is tiled into `block`×`block` tiles aligned at the origin (edge
/// tiles may be smaller). A pixel is ridge when it is strictly darker than its
/// tile's mean. Tiles whose intensity range is below `flatness` carry no ridge
/// structure and become background.
pub fn binarize(img: &GrayImage, block: usize, flatness: u8) -> BinaryImage {
    assert!(block > 0, "block size must be positive");
    let (w, h) = (img.width(), img.height());
    let mut out = BinaryImage::empty(w, h);
    for by in (0..h).step_by(block) {
        for bx in (0..w).step_by(block) {
            let ys = by..(by + block).min(h);
            let xs = bx..(bx + block).min(w);
            let (mut sum, mut count, mut lo, mut hi) = (0u64, 0u64, u8::MAX, u8::MIN);
            for y in ys.clone() {
                for x in xs.clone() {
                    let p = img.get(x, y);
                    sum += p as u64;
                    count += 1;
                    lo = lo.min(p);
                    hi = hi.max(p);
                }
            }
            if hi - lo < flatness {
                continue;
            }
            for y in ys.clone() {
                for x in xs.clone() {
                    // p < sum / count without division
                    if (img.get(x, y) as u64) * count < sum {
                        out.set(x, y, true);
                    }
                }
            }
        }
    }
    out
}
