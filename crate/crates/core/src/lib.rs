//! Derive a 64-bit DES key from a fingerprint image and use it with DES.
//!
//! The pipeline runs histogram equalization, block-mean binarization,
//! morphological cleanup, Zhang–Suen thinning, crossing-number minutiae
//! extraction with false-minutiae filtering, and finally a drop-and-swap
//! reduction of the encoded minutiae to 64 bits. [`des`] is a from-scratch
//! FIPS 46-3 implementation with ECB/PKCS#7 helpers for byte strings.
//!
//! ```no_run
//! use biokey_core::{derive_key, des, load_gray, PipelineConfig};
//!
//! let img = load_gray(&std::fs::read("finger.pgm")?)?;
//! let key = derive_key(&img, &PipelineConfig::default())?;
//! let ciphertext = des::encrypt_text(b"attack at dawn", key);
//! assert_eq!(des::decrypt_text(&ciphertext, key)?, b"attack at dawn");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod des;
pub mod enhancement;
pub mod image_io;
pub mod keygen;
pub mod minutiae;
pub mod morphology;
pub mod pipeline;

pub use des::{Block64, DesError, KeyWeakness, RoundKeySchedule};
pub use enhancement::{binarize, histogram_equalize, HistogramMap};
pub use image_io::{
    load_binary, load_gray, save_binary, save_gray, BinaryImage, GrayImage, ImageError,
};
pub use keygen::{encode_minutiae, reduce_key, BitString, DesKey, KeyError};
pub use minutiae::{
    extract_minutiae, remove_false_minutiae, Minutia, MinutiaKind, MinutiaeError, MinutiaeSet,
};
pub use morphology::{clean_artifacts, dilate, erode, thin, thin_with_stats, ThinningOutcome};
pub use pipeline::{
    derive_key, ConfigError, DeriveError, PipelineConfig, PipelineError, PipelineRun,
};
