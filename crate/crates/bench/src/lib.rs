//! Inputs shared by the criterion benches.

use biokey_core::{load_gray, BinaryImage, GrayImage};

pub const FIXTURE: &[u8] = include_bytes!("../../core/tests/fixtures/synthetic_fingerprint.pgm");

pub fn fixture() -> GrayImage {
    load_gray(FIXTURE).expect("bundled fixture is a valid PGM")
}

/// Parallel diagonal ridges `width` pixels thick, repeating every `period` pixels.
pub fn ridge_field(size: usize, period: usize, width: usize) -> BinaryImage {
    BinaryImage::from_fn(size, size, |x, y| (x + y) % period < width)
}
