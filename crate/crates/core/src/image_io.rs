//! Grayscale and binary rasters plus PGM (P2/P5) parsing and serialization.
//!
//! Only 8-bit PGM with `maxval` 255 is accepted. Binary rasters use ridge = 1
//! internally and are rendered with ridges black (0) and valleys white (255).

use thiserror::Error;

/// Number of intensity levels in a [`GrayImage`].
pub const LEVELS: usize = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid pixel sample {0:?}")]
    InvalidSample(String),
    #[error("raster of {width}x{height} needs {expected} pixels, got {found}")]
    DimensionMismatch {
        width: usize,
        height: usize,
        expected: usize,
        found: usize,
    },
    #[error("binary raster holds value {0} outside {{0, 1}}")]
    NotBinary(u8),
}

/// 8-bit single-channel raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        f: impl Fn(usize, usize) -> u8,
    ) -> Result<Self, ImageError> {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Count of pixels at each intensity level.
    pub fn histogram(&self) -> [u64; LEVELS] {
        let mut hist = [0u64; LEVELS];
        for &p in &self.pixels {
            hist[p as usize] += 1;
        }
        hist
    }

    pub fn map(&self, f: impl Fn(u8) -> u8) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// 1-bit raster, row-major; 1 = ridge (foreground), 0 = valley.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(width, height, pixels.len())?;
        if let Some(&bad) = pixels.iter().find(|&&p| p > 1) {
            return Err(ImageError::NotBinary(bad));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// All-background raster.
    pub fn empty(width: usize, height: usize) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be positive"
        );
        Self {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut img = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                img.pixels[y * width + x] = f(x, y) as u8;
            }
        }
        img
    }

    /// Parses rows of `#` (ridge) and `.` (valley). Handy for tests and fixtures.
    pub fn from_ascii(art: &str) -> Result<Self, ImageError> {
        let rows: Vec<&str> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut pixels = Vec::with_capacity(width * height);
        for row in &rows {
            if row.len() != width {
                return Err(ImageError::DimensionMismatch {
                    width,
                    height,
                    expected: width * height,
                    found: row.len() * height,
                });
            }
            for c in row.chars() {
                match c {
                    '#' => pixels.push(1),
                    '.' => pixels.push(0),
                    other => return Err(ImageError::InvalidSample(other.to_string())),
                }
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for row in self.pixels.chunks(self.width) {
            out.extend(row.iter().map(|&p| if p == 1 { '#' } else { '.' }));
            out.push('\n');
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Pixel lookup with everything outside the raster reading as background.
    pub fn get_or_zero(&self, x: isize, y: isize) -> u8 {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            0
        } else {
            self.pixels[y as usize * self.width + x as usize]
        }
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.pixels[y * self.width + x] = value as u8;
    }

    pub fn count_foreground(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == 1).count()
    }

    /// Top-left corner of the first 2x2 block that is entirely foreground, in raster order.
    pub fn find_full_2x2(&self) -> Option<(usize, usize)> {
        for y in 0..self.height.saturating_sub(1) {
            for x in 0..self.width.saturating_sub(1) {
                if self.get(x, y) == 1
                    && self.get(x + 1, y) == 1
                    && self.get(x, y + 1) == 1
                    && self.get(x + 1, y + 1) == 1
                {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    let expected = width.checked_mul(height).ok_or_else(|| {
        ImageError::MalformedHeader(format!("dimensions {width}x{height} overflow"))
    })?;
    if expected != len {
        return Err(ImageError::DimensionMismatch {
            width,
            height,
            expected,
            found: len,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32, ImageError> {
        let tok = self
            .token()
            .ok_or_else(|| ImageError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                ImageError::MalformedHeader(format!(
                    "{what} is not a number: {:?}",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

/// Parses a binary (P5) or ASCII (P2) PGM with maxval 255.
pub fn load_gray(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut rd = HeaderReader { bytes, pos: 0 };
    let encoding = match rd.token() {
        Some(b"P5") => Encoding::Binary,
        Some(b"P2") => Encoding::Ascii,
        Some(other) => {
            return Err(ImageError::MalformedHeader(format!(
                "unsupported magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
        None => return Err(ImageError::MalformedHeader("empty input".into())),
    };
    let width = rd.number("width")? as usize;
    let height = rd.number("height")? as usize;
    let maxval = rd.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(ImageError::UnsupportedMaxval(maxval));
    }
    let expected = width.checked_mul(height).ok_or_else(|| {
        ImageError::MalformedHeader(format!("dimensions {width}x{height} overflow"))
    })?;

    let pixels = match encoding {
        Encoding::Binary => {
            // exactly one whitespace byte separates maxval from the raster
            match bytes.get(rd.pos) {
                Some(b) if b.is_ascii_whitespace() => rd.pos += 1,
                Some(_) => {
                    return Err(ImageError::MalformedHeader(
                        "expected whitespace after maxval".into(),
                    ))
                }
                None => return Err(ImageError::Truncated { expected, found: 0 }),
            }
            let data = &bytes[rd.pos..];
            if data.len() < expected {
                return Err(ImageError::Truncated {
                    expected,
                    found: data.len(),
                });
            }
            data[..expected].to_vec()
        }
        Encoding::Ascii => {
            let mut pixels = Vec::with_capacity(expected);
            while pixels.len() < expected {
                let Some(tok) = rd.token() else {
                    return Err(ImageError::Truncated {
                        expected,
                        found: pixels.len(),
                    });
                };
                let value = std::str::from_utf8(tok)
                    .ok()
                    .and_then(|s| s.parse::<u32>().ok())
                    .filter(|&v| v <= 255)
                    .ok_or_else(|| {
                        ImageError::InvalidSample(String::from_utf8_lossy(tok).into_owned())
                    })?;
                pixels.push(value as u8);
            }
            pixels
        }
    };
    GrayImage::new(width, height, pixels)
}

/// Serializes as binary PGM (P5).
pub fn save_gray(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

/// Renders a binary raster as P5 with ridges black (0) and valleys white (255).
pub fn save_binary(img: &BinaryImage) -> Vec<u8> {
    save_gray(&binary_to_gray(img))
}

pub fn binary_to_gray(img: &BinaryImage) -> GrayImage {
    GrayImage {
        width: img.width,
        height: img.height,
        pixels: img
            .pixels
            .iter()
            .map(|&p| if p == 1 { 0 } else { 255 })
            .collect(),
    }
}

/// Loads a PGM and marks every pixel darker than `threshold` as ridge.
pub fn load_binary(bytes: &[u8], threshold: u8) -> Result<BinaryImage, ImageError> {
    let gray = load_gray(bytes)?;
    Ok(BinaryImage {
        width: gray.width,
        height: gray.height,
        pixels: gray.pixels.iter().map(|&p| (p < threshold) as u8).collect(),
    })
}
