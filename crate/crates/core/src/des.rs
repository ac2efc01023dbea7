//! Data Encryption Standard (FIPS 46-3), plus ECB/PKCS#7 helpers for byte strings.
//!
//! Permutation tables use FIPS numbering: bit 1 is the most significant bit of
//! the input word.

use thiserror::Error;

use crate::keygen::DesKey;

pub const BLOCK_BYTES: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesError {
    #[error("ciphertext length {0} is not a nonzero multiple of 8")]
    MalformedCiphertext(usize),
    #[error("invalid PKCS#7 padding")]
    BadPadding,
}

/// A 64-bit cipher block, FIPS bit 1 most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block64(pub u64);

impl Block64 {
    pub fn from_bytes(bytes: [u8; 8]) -> Self {
        Self(u64::from_be_bytes(bytes))
    }

    pub fn to_bytes(self) -> [u8; 8] {
        self.0.to_be_bytes()
    }
}

impl From<u64> for Block64 {
    fn from(v: u64) -> Self {
        Self(v)
    }
}

impl From<Block64> for u64 {
    fn from(b: Block64) -> Self {
        b.0
    }
}

/// The sixteen 48-bit round keys, first round first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundKeySchedule([u64; 16]);

impl RoundKeySchedule {
    pub fn keys(&self) -> &[u64; 16] {
        &self.0
    }

    pub fn round_key(&self, round: usize) -> u64 {
        self.0[round]
    }
}

/// Recognised classes of degenerate DES keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyWeakness {
    /// All sixteen round keys are identical; encryption is an involution.
    Weak,
    /// Round keys alternate between two values; a partner key decrypts.
    SemiWeak,
}

const PARITY_MASK: u64 = 0xFEFE_FEFE_FEFE_FEFE;

const WEAK_KEYS: [u64; 4] = [
    0x0101_0101_0101_0101,
    0xFEFE_FEFE_FEFE_FEFE,
    0xE0E0_E0E0_F1F1_F1F1,
    0x1F1F_1F1F_0E0E_0E0E,
];

const SEMI_WEAK_KEYS: [u64; 12] = [
    0x01FE_01FE_01FE_01FE,
    0xFE01_FE01_FE01_FE01,
    0x1FE0_1FE0_0EF1_0EF1,
    0xE01F_E01F_F10E_F10E,
    0x01E0_01E0_01F1_01F1,
    0xE001_E001_F101_F101,
    0x1FFE_1FFE_0EFE_0EFE,
    0xFE1F_FE1F_FE0E_FE0E,
    0x011F_011F_010E_010E,
    0x1F01_1F01_0E01_0E01,
    0xE0FE_E0FE_F1FE_F1FE,
    0xFEE0_FEE0_FEF1_FEF1,
];

/// Classifies `key` ignoring its parity bits.
pub fn key_weakness(key: DesKey) -> Option<KeyWeakness> {
    let k = key.bits() & PARITY_MASK;
    if WEAK_KEYS.iter().any(|&w| w & PARITY_MASK == k) {
        Some(KeyWeakness::Weak)
    } else if SEMI_WEAK_KEYS.iter().any(|&w| w & PARITY_MASK == k) {
        Some(KeyWeakness::SemiWeak)
    } else {
        None
    }
}

pub mod tables {
    //! FIPS 46-3 tables.

    /// Initial permutation.
    pub const IP: [u8; 64] = [
        58, 50, 42, 34, 26, 18, 10, 2, 60, 52, 44, 36, 28, 20, 12, 4, //
        62, 54, 46, 38, 30, 22, 14, 6, 64, 56, 48, 40, 32, 24, 16, 8, //
        57, 49, 41, 33, 25, 17, 9, 1, 59, 51, 43, 35, 27, 19, 11, 3, //
        61, 53, 45, 37, 29, 21, 13, 5, 63, 55, 47, 39, 31, 23, 15, 7,
    ];

    /// Final permutation, the inverse of [`IP`].
    pub const FP: [u8; 64] = [
        40, 8, 48, 16, 56, 24, 64, 32, 39, 7, 47, 15, 55, 23, 63, 31, //
        38, 6, 46, 14, 54, 22, 62, 30, 37, 5, 45, 13, 53, 21, 61, 29, //
        36, 4, 44, 12, 52, 20, 60, 28, 35, 3, 43, 11, 51, 19, 59, 27, //
        34, 2, 42, 10, 50, 18, 58, 26, 33, 1, 41, 9, 49, 17, 57, 25,
    ];

    /// Expansion P-box, 32 -> 48.
    pub const E: [u8; 48] = [
        32, 1, 2, 3, 4, 5, 4, 5, 6, 7, 8, 9, //
        8, 9, 10, 11, 12, 13, 12, 13, 14, 15, 16, 17, //
        16, 17, 18, 19, 20, 21, 20, 21, 22, 23, 24, 25, //
        24, 25, 26, 27, 28, 29, 28, 29, 30, 31, 32, 1,
    ];

    /// Straight P-box applied to the S-box output.
    pub const P: [u8; 32] = [
        16, 7, 20, 21, 29, 12, 28, 17, 1, 15, 23, 26, 5, 18, 31, 10, //
        2, 8, 24, 14, 32, 27, 3, 9, 19, 13, 30, 6, 22, 11, 4, 25,
    ];

    /// Parity-drop permutation, 64 -> 56.
    pub const PC1: [u8; 56] = [
        57, 49, 41, 33, 25, 17, 9, 1, 58, 50, 42, 34, 26, 18, //
        10, 2, 59, 51, 43, 35, 27, 19, 11, 3, 60, 52, 44, 36, //
        63, 55, 47, 39, 31, 23, 15, 7, 62, 54, 46, 38, 30, 22, //
        14, 6, 61, 53, 45, 37, 29, 21, 13, 5, 28, 20, 12, 4,
    ];

    /// Compression permutation, 56 -> 48.
    pub const PC2: [u8; 48] = [
        14, 17, 11, 24, 1, 5, 3, 28, 15, 6, 21, 10, //
        23, 19, 12, 4, 26, 8, 16, 7, 27, 20, 13, 2, //
        41, 52, 31, 37, 47, 55, 30, 40, 51, 45, 33, 48, //
        44, 49, 39, 56, 34, 53, 46, 42, 50, 36, 29, 32,
    ];

    /// Left rotation of each key half per round.
    pub const SHIFTS: [u32; 16] = [1, 1, 2, 2, 2, 2, 2, 2, 1, 2, 2, 2, 2, 2, 2, 1];

    /// `S[box][row][column]`.
    pub const S: [[[u8; 16]; 4]; 8] = [
        [
            [14, 4, 13, 1, 2, 15, 11, 8, 3, 10, 6, 12, 5, 9, 0, 7],
            [0, 15, 7, 4, 14, 2, 13, 1, 10, 6, 12, 11, 9, 5, 3, 8],
            [4, 1, 14, 8, 13, 6, 2, 11, 15, 12, 9, 7, 3, 10, 5, 0],
            [15, 12, 8, 2, 4, 9, 1, 7, 5, 11, 3, 14, 10, 0, 6, 13],
        ],
        [
            [15, 1, 8, 14, 6, 11, 3, 4, 9, 7, 2, 13, 12, 0, 5, 10],
            [3, 13, 4, 7, 15, 2, 8, 14, 12, 0, 1, 10, 6, 9, 11, 5],
            [0, 14, 7, 11, 10, 4, 13, 1, 5, 8, 12, 6, 9, 3, 2, 15],
            [13, 8, 10, 1, 3, 15, 4, 2, 11, 6, 7, 12, 0, 5, 14, 9],
        ],
        [
            [10, 0, 9, 14, 6, 3, 15, 5, 1, 13, 12, 7, 11, 4, 2, 8],
            [13, 7, 0, 9, 3, 4, 6, 10, 2, 8, 5, 14, 12, 11, 15, 1],
            [13, 6, 4, 9, 8, 15, 3, 0, 11, 1, 2, 12, 5, 10, 14, 7],
            [1, 10, 13, 0, 6, 9, 8, 7, 4, 15, 14, 3, 11, 5, 2, 12],
        ],
        [
            [7, 13, 14, 3, 0, 6, 9, 10, 1, 2, 8, 5, 11, 12, 4, 15],
            [13, 8, 11, 5, 6, 15, 0, 3, 4, 7, 2, 12, 1, 10, 14, 9],
            [10, 6, 9, 0, 12, 11, 7, 13, 15, 1, 3, 14, 5, 2, 8, 4],
            [3, 15, 0, 6, 10, 1, 13, 8, 9, 4, 5, 11, 12, 7, 2, 14],
        ],
        [
            [2, 12, 4, 1, 7, 10, 11, 6, 8, 5, 3, 15, 13, 0, 14, 9],
            [14, 11, 2, 12, 4, 7, 13, 1, 5, 0, 15, 10, 3, 9, 8, 6],
            [4, 2, 1, 11, 10, 13, 7, 8, 15, 9, 12, 5, 6, 3, 0, 14],
            [11, 8, 12, 7, 1, 14, 2, 13, 6, 15, 0, 9, 10, 4, 5, 3],
        ],
        [
            [12, 1, 10, 15, 9, 2, 6, 8, 0, 13, 3, 4, 14, 7, 5, 11],
            [10, 15, 4, 2, 7, 12, 9, 5, 6, 1, 13, 14, 0, 11, 3, 8],
            [9, 14, 15, 5, 2, 8, 12, 3, 7, 0, 4, 10, 1, 13, 11, 6],
            [4, 3, 2, 12, 9, 5, 15, 10, 11, 14, 1, 7, 6, 0, 8, 13],
        ],
        [
            [4, 11, 2, 14, 15, 0, 8, 13, 3, 12, 9, 7, 5, 10, 6, 1],
            [13, 0, 11, 7, 4, 9, 1, 10, 14, 3, 5, 12, 2, 15, 8, 6],
            [1, 4, 11, 13, 12, 3, 7, 14, 10, 15, 6, 8, 0, 5, 9, 2],
            [6, 11, 13, 8, 1, 4, 10, 7, 9, 5, 0, 15, 14, 2, 3, 12],
        ],
        [
            [13, 2, 8, 4, 6, 15, 11, 1, 10, 9, 3, 14, 5, 0, 12, 7],
            [1, 15, 13, 8, 10, 3, 7, 4, 12, 5, 6, 11, 0, 14, 9, 2],
            [7, 11, 4, 1, 9, 12, 14, 2, 0, 6, 10, 13, 15, 3, 5, 8],
            [2, 1, 14, 7, 4, 10, 8, 13, 15, 12, 9, 0, 3, 5, 6, 11],
        ],
    ];
}

/// Applies a FIPS-numbered permutation table to the low `in_width` bits of `input`.
pub fn permute(table: &[u8], input: u64, in_width: u32) -> u64 {
    table.iter().fold(0u64, |acc, &pos| {
        acc << 1 | (input >> (in_width - pos as u32) & 1)
    })
}

fn rotate28(half: u64, by: u32) -> u64 {
    (half << by | half >> (28 - by)) & 0x0FFF_FFFF
}

/// PC-1, per-round rotations of both 28-bit halves, PC-2.
pub fn key_schedule(key: DesKey) -> RoundKeySchedule {
    let cd = permute(&tables::PC1, key.bits(), 64);
    let mut c = cd >> 28;
    let mut d = cd & 0x0FFF_FFFF;
    let mut keys = [0u64; 16];
    for (round_key, &shift) in keys.iter_mut().zip(&tables::SHIFTS) {
        c = rotate28(c, shift);
        d = rotate28(d, shift);
        *round_key = permute(&tables::PC2, c << 28 | d, 56);
    }
    RoundKeySchedule(keys)
}

/// The eight S-box lookups on a 48-bit input, giving 32 bits.
pub fn substitute(input: u64) -> u32 {
    (0..8).fold(0u32, |acc, i| {
        let chunk = (input >> (42 - 6 * i)) as usize & 0x3F;
        let row = (chunk >> 4 & 0b10) | (chunk & 1);
        let col = chunk >> 1 & 0xF;
        acc << 4 | tables::S[i][row][col] as u32
    })
}

/// The round function: expansion, key mixing, S-boxes, straight permutation.
pub fn feistel_f(right: u32, round_key: u64) -> u32 {
    let expanded = permute(&tables::E, right as u64, 32);
    permute(&tables::P, substitute(expanded ^ round_key) as u64, 32) as u32
}

fn crypt(block: Block64, round_keys: impl Iterator<Item = u64>) -> Block64 {
    let permuted = permute(&tables::IP, block.0, 64);
    let (left, right) = round_keys.fold(
        ((permuted >> 32) as u32, permuted as u32),
        |(left, right), k| (right, left ^ feistel_f(right, k)),
    );
    // halves swap before the final permutation
    let preoutput = (right as u64) << 32 | left as u64;
    Block64(permute(&tables::FP, preoutput, 64))
}

pub fn encrypt_block(plain: Block64, schedule: &RoundKeySchedule) -> Block64 {
    crypt(plain, schedule.0.iter().copied())
}

pub fn decrypt_block(cipher: Block64, schedule: &RoundKeySchedule) -> Block64 {
    crypt(cipher, schedule.0.iter().rev().copied())
}

/// ECB encryption with PKCS#7 padding. Always emits at least one block.
pub fn encrypt_text(plaintext: &[u8], key: DesKey) -> Vec<u8> {
    let schedule = key_schedule(key);
    let pad = BLOCK_BYTES - plaintext.len() % BLOCK_BYTES;
    let mut padded = plaintext.to_vec();
    padded.resize(plaintext.len() + pad, pad as u8);
    padded
        .chunks_exact(BLOCK_BYTES)
        .flat_map(|chunk| {
            let block = Block64::from_bytes(chunk.try_into().expect("8-byte chunk"));
            encrypt_block(block, &schedule).to_bytes()
        })
        .collect()
}

/// ECB decryption followed by PKCS#7 validation and stripping.
pub fn decrypt_text(ciphertext: &[u8], key: DesKey) -> Result<Vec<u8>, DesError> {
    if ciphertext.is_empty() || !ciphertext.len().is_multiple_of(BLOCK_BYTES) {
        return Err(DesError::MalformedCiphertext(ciphertext.len()));
    }
    let schedule = key_schedule(key);
    let mut plain: Vec<u8> = ciphertext
        .chunks_exact(BLOCK_BYTES)
        .flat_map(|chunk| {
            let block = Block64::from_bytes(chunk.try_into().expect("8-byte chunk"));
            decrypt_block(block, &schedule).to_bytes()
        })
        .collect();
    let pad = *plain.last().expect("nonempty") as usize;
    if pad == 0
        || pad > BLOCK_BYTES
        || plain[plain.len() - pad..]
            .iter()
            .any(|&b| b as usize != pad)
    {
        return Err(DesError::BadPadding);
    }
    plain.truncate(plain.len() - pad);
    Ok(plain)
}
