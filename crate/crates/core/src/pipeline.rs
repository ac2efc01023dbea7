//! End-to-end key generation: equalize, binarize, clean, thin, extract,
//! filter, encode, reduce.

use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::des::{key_weakness, KeyWeakness};
use crate::enhancement::{binarize, histogram_equalize, DEFAULT_BLOCK_SIZE, DEFAULT_FLATNESS};
use crate::image_io::{BinaryImage, GrayImage};
use crate::keygen::{encode_minutiae, reduce_key, BitString, DesKey, KeyError, ReductionPlan};
use crate::minutiae::{
    extract_minutiae, remove_false_minutiae, MinutiaKind, MinutiaeError, MinutiaeSet,
    DEFAULT_BORDER, DEFAULT_MIN_DISTANCE,
};
use crate::morphology::{clean_artifacts, thin};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config value `{0}` must be strictly positive")]
    NotPositive(&'static str),
    #[error("flatness must fit in 1..=255, got {0}")]
    FlatnessRange(usize),
    #[error("invalid config file: {0}")]
    Parse(String),
}

/// Every tunable of the pipeline. Values must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Binarization tile edge in pixels.
    pub block_size: usize,
    /// Minimum intensity range for a tile to hold ridges.
    pub flatness: usize,
    /// Minutiae closer than this (pixels) are removed in pairs.
    pub false_minutiae_dist: usize,
    /// Minutiae closer than this to an image edge are dropped.
    pub border_trim: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            block_size: DEFAULT_BLOCK_SIZE,
            flatness: DEFAULT_FLATNESS as usize,
            false_minutiae_dist: DEFAULT_MIN_DISTANCE,
            border_trim: DEFAULT_BORDER,
        }
    }
}

impl PipelineConfig {
    /// Parses `key = value` lines; missing keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_owned()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("block_size", self.block_size),
            ("flatness", self.flatness),
            ("false_minutiae_dist", self.false_minutiae_dist),
            ("border_trim", self.border_trim),
        ] {
            if v == 0 {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if self.flatness > 255 {
            return Err(ConfigError::FlatnessRange(self.flatness));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Minutiae(#[from] MinutiaeError),
}

/// Every intermediate product of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub config: PipelineConfig,
    pub equalized: GrayImage,
    pub binary: BinaryImage,
    pub cleaned: BinaryImage,
    pub thinned: BinaryImage,
    pub raw_minutiae: MinutiaeSet,
    pub minutiae: MinutiaeSet,
    pub keyset: BitString,
    pub key: Result<DesKey, KeyError>,
}

impl PipelineRun {
    pub fn execute(img: &GrayImage, config: &PipelineConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        let (equalized, _) = histogram_equalize(img);
        let binary = binarize(&equalized, config.block_size, config.flatness as u8);
        let cleaned = clean_artifacts(&binary);
        let thinned = thin(&cleaned);
        let raw_minutiae = extract_minutiae(&thinned)?;
        let minutiae = remove_false_minutiae(
            &raw_minutiae,
            config.false_minutiae_dist,
            config.border_trim,
        );
        let keyset = encode_minutiae(&minutiae);
        let key = reduce_key(&keyset);
        Ok(Self {
            config: *config,
            equalized,
            binary,
            cleaned,
            thinned,
            raw_minutiae,
            minutiae,
            keyset,
            key,
        })
    }

    pub fn weakness(&self) -> Option<KeyWeakness> {
        self.key.as_ref().ok().and_then(|&k| key_weakness(k))
    }

    /// Human-readable per-stage summary, identical for identical inputs.
    pub fn report(&self) -> String {
        let plan = ReductionPlan::for_len(self.keyset.len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "size: {}x{}",
            self.equalized.width(),
            self.equalized.height()
        );
        let _ = writeln!(
            out,
            "config: block_size={} flatness={} false_minutiae_dist={} border_trim={}",
            self.config.block_size,
            self.config.flatness,
            self.config.false_minutiae_dist,
            self.config.border_trim
        );
        let _ = writeln!(out, "ridge pixels: {}", self.cleaned.count_foreground());
        let _ = writeln!(out, "skeleton pixels: {}", self.thinned.count_foreground());
        let _ = writeln!(
            out,
            "raw endings: {}",
            self.raw_minutiae.count(MinutiaKind::RidgeEnding)
        );
        let _ = writeln!(
            out,
            "raw bifurcations: {}",
            self.raw_minutiae.count(MinutiaKind::Bifurcation)
        );
        let _ = writeln!(
            out,
            "endings: {}",
            self.minutiae.count(MinutiaKind::RidgeEnding)
        );
        let _ = writeln!(
            out,
            "bifurcations: {}",
            self.minutiae.count(MinutiaKind::Bifurcation)
        );
        let _ = writeln!(out, "bits: {}", self.keyset.len());
        let _ = writeln!(out, "trimmed bits: {}", plan.remainder);
        match &self.key {
            Ok(key) => {
                let _ = writeln!(out, "reduction passes: {}", plan.passes);
                let _ = writeln!(out, "key: {key}");
                if let Some(w) = self.weakness() {
                    let _ = writeln!(out, "warning: {w:?} DES key");
                }
            }
            Err(e) => {
                let _ = writeln!(out, "reduction passes: 0");
                let _ = writeln!(out, "key: none ({e})");
            }
        }
        out
    }
}

/// Runs the pipeline and returns only the key.
pub fn derive_key(img: &GrayImage, config: &PipelineConfig) -> Result<DesKey, DeriveError> {
    Ok(PipelineRun::execute(img, config)?.key?)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeriveError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Key(#[from] KeyError),
}
