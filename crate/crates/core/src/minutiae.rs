//! Crossing-number minutiae extraction and false-minutiae filtering.
//!
//! The 3x3 window is read as a ring P1..P8 starting east and running
//! counter-clockwise:
//!
//! ```text
//! P4 P3 P2
//! P5 P  P1
//! P6 P7 P8
//! ```
//!
//! The crossing number is half the sum of absolute differences between
//! consecutive ring pixels, with P9 = P1.

use std::fmt;

use thiserror::Error;

use crate::image_io::BinaryImage;

pub const DEFAULT_MIN_DISTANCE: usize = 6;
pub const DEFAULT_BORDER: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinutiaeError {
    #[error("skeleton is not thinned: 2x2 foreground block at ({x}, {y})")]
    NotThinned { x: usize, y: usize },
}

/// (dx, dy) of P1..P8.
pub const RING_OFFSETS: [(isize, isize); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// A 3x3 binary window, `rows[dy + 1][dx + 1]`.
pub type Window = [[u8; 3]; 3];

/// The P1..P8 ring of a window.
pub fn ring_of(window: &Window) -> [u8; 8] {
    RING_OFFSETS.map(|(dx, dy)| window[(dy + 1) as usize][(dx + 1) as usize])
}

pub fn crossing_number(window: &Window) -> u8 {
    let ring = ring_of(window);
    let sum: u8 = (0..8).map(|i| ring[i].abs_diff(ring[(i + 1) % 8])).sum();
    sum / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MinutiaKind {
    IsolatedPoint,
    RidgeEnding,
    ContinuingRidge,
    Bifurcation,
    CrossingPoint,
}

impl MinutiaKind {
    pub fn from_crossing_number(cn: u8) -> Option<Self> {
        Some(match cn {
            0 => Self::IsolatedPoint,
            1 => Self::RidgeEnding,
            2 => Self::ContinuingRidge,
            3 => Self::Bifurcation,
            4 => Self::CrossingPoint,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::IsolatedPoint => "isolated",
            Self::RidgeEnding => "ending",
            Self::ContinuingRidge => "continuing",
            Self::Bifurcation => "bifurcation",
            Self::CrossingPoint => "crossing",
        }
    }
}

impl fmt::Display for MinutiaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Minutia {
    pub x: usize,
    pub y: usize,
    pub cn: u8,
    pub kind: MinutiaKind,
}

impl Minutia {
    pub fn new(x: usize, y: usize, kind: MinutiaKind) -> Self {
        let cn = match kind {
            MinutiaKind::IsolatedPoint => 0,
            MinutiaKind::RidgeEnding => 1,
            MinutiaKind::ContinuingRidge => 2,
            MinutiaKind::Bifurcation => 3,
            MinutiaKind::CrossingPoint => 4,
        };
        Self { x, y, cn, kind }
    }

    fn dist_sq(&self, other: &Minutia) -> usize {
        let dx = self.x.abs_diff(other.x);
        let dy = self.y.abs_diff(other.y);
        dx * dx + dy * dy
    }
}

/// Minutiae sorted by (y, x), tagged with the raster size they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinutiaeSet {
    minutiae: Vec<Minutia>,
    width: usize,
    height: usize,
}

impl MinutiaeSet {
    /// Sorts by (y, x) and drops duplicate coordinates (first occurrence wins).
    pub fn new(width: usize, height: usize, mut minutiae: Vec<Minutia>) -> Self {
        minutiae.sort_by_key(|m| (m.y, m.x));
        minutiae.dedup_by_key(|m| (m.y, m.x));
        Self {
            minutiae,
            width,
            height,
        }
    }

    pub fn minutiae(&self) -> &[Minutia] {
        &self.minutiae
    }

    pub fn len(&self) -> usize {
        self.minutiae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minutiae.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn count(&self, kind: MinutiaKind) -> usize {
        self.minutiae.iter().filter(|m| m.kind == kind).count()
    }

    /// One `x y kind cn` line per minutia.
    pub fn to_dump(&self) -> String {
        self.minutiae
            .iter()
            .map(|m| format!("{} {} {} {}\n", m.x, m.y, m.kind, m.cn))
            .collect()
    }
}

fn window_at(img: &BinaryImage, x: usize, y: usize) -> Window {
    let mut w = [[0u8; 3]; 3];
    for (dy, row) in w.iter_mut().enumerate() {
        for (dx, cell) in row.iter_mut().enumerate() {
            *cell = img.get_or_zero(x as isize + dx as isize - 1, y as isize + dy as isize - 1);
        }
    }
    w
}

/// Scans every interior foreground pixel of a thinned skeleton and keeps ridge
/// endings (CN 1) and bifurcations (CN 3).
pub fn extract_minutiae(skeleton: &BinaryImage) -> Result<MinutiaeSet, MinutiaeError> {
    if let Some((x, y)) = skeleton.find_full_2x2() {
        return Err(MinutiaeError::NotThinned { x, y });
    }
    let (w, h) = (skeleton.width(), skeleton.height());
    let mut found = Vec::new();
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            if skeleton.get(x, y) == 0 {
                continue;
            }
            let cn = crossing_number(&window_at(skeleton, x, y));
            if let Some(kind @ (MinutiaKind::RidgeEnding | MinutiaKind::Bifurcation)) =
                MinutiaKind::from_crossing_number(cn)
            {
                found.push(Minutia { x, y, cn, kind });
            }
        }
    }
    // raster order is already (y, x) order
    Ok(MinutiaeSet {
        minutiae: found,
        width: w,
        height: h,
    })
}

/// Region-of-interest trim followed by symmetric close-pair deletion.
///
/// First drops every minutia fewer than `border` pixels from an image edge.
/// Then, among the survivors, removes both members of every pair closer than
/// `min_distance` (Euclidean). That single rule covers broken ridges
/// (ending/ending), spurs (ending/bifurcation) and bridges
/// (bifurcation/bifurcation). Pairs are judged against the trimmed set as a
/// whole, so the result does not depend on iteration order.
pub fn remove_false_minutiae(set: &MinutiaeSet, min_distance: usize, border: usize) -> MinutiaeSet {
    let (w, h) = set.dims();
    let inside: Vec<Minutia> = set
        .minutiae
        .iter()
        .copied()
        .filter(|m| {
            let edge =
                m.x.min(m.y)
                    .min(w.saturating_sub(m.x + 1))
                    .min(h.saturating_sub(m.y + 1));
            edge >= border
        })
        .collect();

    let limit = min_distance * min_distance;
    let mut doomed = vec![false; inside.len()];
    for i in 0..inside.len() {
        for j in i + 1..inside.len() {
            if inside[i].dist_sq(&inside[j]) < limit {
                doomed[i] = true;
                doomed[j] = true;
            }
        }
    }
    let kept = inside
        .into_iter()
        .zip(doomed)
        .filter_map(|(m, d)| (!d).then_some(m))
        .collect();
    MinutiaeSet {
        minutiae: kept,
        width: w,
        height: h,
    }
}
