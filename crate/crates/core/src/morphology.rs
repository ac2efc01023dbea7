//! Binary morphology on [`BinaryImage`]: 3x3 erosion and dilation, removal of
//! single-pixel artifacts, and Zhang–Suen thinning.
//!
//! Pixels outside the raster always read as background.

use crate::image_io::BinaryImage;

/// Offsets of the 8-neighbourhood clockwise from north:
/// N, NE, E, SE, S, SW, W, NW.
const CLOCKWISE: [(isize, isize); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

fn ring(img: &BinaryImage, x: usize, y: usize) -> [u8; 8] {
    let (x, y) = (x as isize, y as isize);
    CLOCKWISE.map(|(dx, dy)| img.get_or_zero(x + dx, y + dy))
}

fn neighbour_count(img: &BinaryImage, x: usize, y: usize) -> u8 {
    ring(img, x, y).iter().sum()
}

/// 3x3 square erosion.
pub fn erode(img: &BinaryImage) -> BinaryImage {
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        img.get(x, y) == 1 && neighbour_count(img, x, y) == 8
    })
}

/// 3x3 square dilation.
pub fn dilate(img: &BinaryImage) -> BinaryImage {
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        img.get(x, y) == 1 || neighbour_count(img, x, y) > 0
    })
}

/// Drops isolated foreground pixels and fills single-pixel holes.
///
/// Both rules read the input raster, so the result does not depend on scan order.
pub fn clean_artifacts(img: &BinaryImage) -> BinaryImage {
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        match (img.get(x, y), neighbour_count(img, x, y)) {
            (1, 0) => false,
            (0, 8) => true,
            (p, _) => p == 1,
        }
    })
}

#[derive(Clone, Copy, Debug)]
enum Subpass {
    First,
    Second,
}

fn removable(n: &[u8; 8], pass: Subpass) -> bool {
    let b: u8 = n.iter().sum();
    if !(2..=6).contains(&b) {
        return false;
    }
    let a = (0..8).filter(|&i| n[i] == 0 && n[(i + 1) % 8] == 1).count();
    if a != 1 {
        return false;
    }
    let [north, _, east, _, south, _, west, _] = *n;
    match pass {
        Subpass::First => north * east * south == 0 && east * south * west == 0,
        Subpass::Second => north * east * west == 0 && north * south * west == 0,
    }
}

fn run_subpass(img: &mut BinaryImage, pass: Subpass) -> bool {
    let (w, h) = (img.width(), img.height());
    let candidates: Vec<(usize, usize)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| img.get(x, y) == 1 && removable(&ring(img, x, y), pass))
        .collect();

    // Candidates come from the subpass snapshot. Re-testing each one against the
    // partially updated raster keeps every single deletion topology-safe, which
    // stops two-pixel-thick runs and 2x2 squares from vanishing entirely.
    let mut changed = false;
    for (x, y) in candidates {
        if removable(&ring(img, x, y), pass) {
            img.set(x, y, false);
            changed = true;
        }
    }
    changed
}

/// Two perpendicular edge neighbours with the corner between them empty: the
/// inner corner of a 4-connected staircase.
fn is_kink(n: &[u8; 8]) -> bool {
    (0..8)
        .step_by(2)
        .any(|k| n[k] == 1 && n[(k + 2) % 8] == 1 && n[k + 1] == 0)
}

/// Deletes simple kink pixels in raster order. The subpasses never touch them
/// (they have two 0->1 transitions), so a two-pixel-thick staircase would
/// otherwise be eaten from its tips one pixel per iteration.
fn strip_staircases(img: &mut BinaryImage) -> bool {
    let mut changed = false;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.get(x, y) == 0 {
                continue;
            }
            let n = ring(img, x, y);
            if is_kink(&n) && is_simple(&n) {
                img.set(x, y, false);
                changed = true;
            }
        }
    }
    changed
}

/// Zhang–Suen two-subpass thinning, iterated until no pixel changes.
///
/// Each iteration also removes staircase kinks, and leftover 2x2 blocks are
/// broken once the subpasses stall.
///
/// The result is one pixel wide (no fully foreground 2x2 block) and keeps the
/// number of 8-connected foreground components whenever
/// [`ThinningOutcome::forced_breaks`] is zero.
pub fn thin(img: &BinaryImage) -> BinaryImage {
    thin_with_stats(img).skeleton
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThinningOutcome {
    pub skeleton: BinaryImage,
    /// Full Zhang–Suen iterations (both subpasses) that deleted something.
    pub iterations: usize,
    /// 2x2 blocks broken by deleting a simple pixel.
    pub simple_breaks: usize,
    /// 2x2 blocks with no simple pixel, broken anyway. Each one may split a
    /// component (four diagonal arms meeting at a 2x2 core is the classic case).
    pub forced_breaks: usize,
}

pub fn thin_with_stats(img: &BinaryImage) -> ThinningOutcome {
    let mut out = img.clone();
    let (mut iterations, mut simple_breaks, mut forced_breaks) = (0, 0, 0);
    loop {
        loop {
            let first = run_subpass(&mut out, Subpass::First);
            let second = run_subpass(&mut out, Subpass::Second);
            let stairs = strip_staircases(&mut out);
            if !first && !second && !stairs {
                break;
            }
            iterations += 1;
        }
        // Zhang–Suen's single-transition rule is stricter than 8-simplicity, so
        // it can stall on 2x2 cores that still contain a removable pixel.
        // Break every block in one raster sweep, each checked against the
        // current raster, then let the subpasses tidy up around the breaks.
        let mut broke = false;
        for by in 0..out.height().saturating_sub(1) {
            for bx in 0..out.width().saturating_sub(1) {
                let block = [(bx, by), (bx + 1, by), (bx, by + 1), (bx + 1, by + 1)];
                if block.iter().any(|&(x, y)| out.get(x, y) == 0) {
                    continue;
                }
                broke = true;
                match block.iter().find(|&&(x, y)| is_simple(&ring(&out, x, y))) {
                    Some(&(x, y)) => {
                        out.set(x, y, false);
                        simple_breaks += 1;
                    }
                    None => {
                        out.set(bx, by, false);
                        forced_breaks += 1;
                    }
                }
            }
        }
        if !broke {
            break;
        }
    }
    ThinningOutcome {
        skeleton: out,
        iterations,
        simple_breaks,
        forced_breaks,
    }
}

/// Whether deleting the centre pixel leaves both the 8-connected foreground and
/// the 4-connected background topology of the 3x3 window unchanged.
fn is_simple(n: &[u8; 8]) -> bool {
    // ring indices run clockwise from N, so even indices are edge neighbours
    let ring_adjacent = |i: usize, j: usize| matches!((i + 8 - j) % 8, 1 | 7);
    let fg = ring_components(n, 1, 0..8, |i, j| {
        // two edge neighbours around a corner also touch diagonally
        ring_adjacent(i, j) || (i % 2 == 0 && j % 2 == 0 && matches!((i + 8 - j) % 8, 2 | 6))
    });
    // only background components 4-adjacent to the centre count
    let bg = ring_components(n, 0, (0..8).step_by(2), ring_adjacent);
    fg == 1 && bg == 1
}

fn ring_components(
    n: &[u8; 8],
    value: u8,
    starts: impl Iterator<Item = usize>,
    adj: impl Fn(usize, usize) -> bool,
) -> usize {
    let mut seen = [false; 8];
    let mut count = 0;
    for start in starts {
        if n[start] != value || seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for j in 0..8 {
                if !seen[j] && n[j] == value && adj(i, j) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}
