//! Writes a deterministic synthetic fingerprint as binary PGM.
//!
//! Ridges follow a gently curving plane wave. Each phase dislocation
//! (`±atan2` term) starts or ends one ridge, which shows up after thinning as a
//! ridge ending or bifurcation.
//!
//! ```text
//! cargo run -p biokey-core --example synth_fingerprint -- out.pgm
//! ```

use std::f64::consts::PI;

use biokey_core::{save_gray, GrayImage};

const SIZE: usize = 256;
const PERIOD: f64 = 9.0;

fn noise(x: usize, y: usize) -> f64 {
    // splitmix-style integer hash, mapped to [-1, 1)
    let mut z = (y * SIZE + x) as u64 ^ 0x9E37_79B9_7F4A_7C15;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

fn main() -> std::io::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "synthetic_fingerprint.pgm".into());

    // dislocation centres on a jittered grid, alternating orientation
    let mut dislocations = Vec::new();
    for gy in 0..6 {
        for gx in 0..6 {
            let jx = ((gx * 7 + gy * 3) % 9) as f64 - 4.0;
            let jy = ((gx * 5 + gy * 11) % 9) as f64 - 4.0;
            let cx = 40.0 + gx as f64 * 35.0 + jx;
            let cy = 40.0 + gy as f64 * 35.0 + jy;
            let sign = if (gx + gy) % 2 == 0 { 1.0 } else { -1.0 };
            dislocations.push((cx, cy, sign));
        }
    }

    let img = GrayImage::from_fn(SIZE, SIZE, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let (u, v) = (fx - 128.0, fy - 128.0);
        // ridges bend around a point below the image
        let bend = ((u * u + (v + 300.0) * (v + 300.0)).sqrt() - 300.0) * 0.85 + 0.15 * u;
        let mut phase = 2.0 * PI * bend / PERIOD;
        for &(cx, cy, s) in &dislocations {
            phase += s * (fy - cy).atan2(fx - cx);
        }
        let value = 128.0 + 95.0 * phase.cos() + 18.0 * noise(x, y);
        value.round().clamp(0.0, 255.0) as u8
    })
    .expect("non-empty raster");

    std::fs::write(&out, save_gray(&img))?;
    eprintln!("wrote {out}");
    Ok(())
}
