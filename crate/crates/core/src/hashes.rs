// SPDX-License-Identifier: Apache-2.0

//! SHA2-256 and SHA3-256, the two 256-bit digests a manifest may carry.
//!
//! Both functions are delegated to the RustCrypto implementations; conformance
//! is pinned by the FIPS 180-4 / FIPS 202 vectors in the test suite.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::Digest as _;

/// Output length shared by both supported digest functions.
pub const DIGEST_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DigestAlg {
    #[serde(rename = "sha2-256")]
    Sha2_256,
    #[serde(rename = "sha3-256")]
    Sha3_256,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HashError {
    #[error("unknown digest algorithm code {0}")]
    UnknownCode(u64),
    #[error("unsupported digest algorithm `{0}` (only SHA2-256 and SHA3-256)")]
    Unsupported(String),
    #[error("digest must be {DIGEST_LEN} bytes, got {0}")]
    BadLength(usize),
}

impl DigestAlg {
    pub const ALL: [DigestAlg; 2] = [DigestAlg::Sha2_256, DigestAlg::Sha3_256];

    pub fn code(self) -> u8 {
        match self {
            DigestAlg::Sha2_256 => 1,
            DigestAlg::Sha3_256 => 2,
        }
    }

    pub fn from_code(code: u64) -> Result<Self, HashError> {
        match code {
            1 => Ok(DigestAlg::Sha2_256),
            2 => Ok(DigestAlg::Sha3_256),
            other => Err(HashError::UnknownCode(other)),
        }
    }

    pub fn output_len(self) -> usize {
        DIGEST_LEN
    }

    pub fn name(self) -> &'static str {
        match self {
            DigestAlg::Sha2_256 => "sha2-256",
            DigestAlg::Sha3_256 => "sha3-256",
        }
    }
}

impl fmt::Display for DigestAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DigestAlg {
    type Err = HashError;

    /// Accepts the common spellings of the two 256-bit members. Other widths
    /// (224/384/512) are rejected here rather than at hashing time.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "sha2256" | "sha256" => Ok(DigestAlg::Sha2_256),
            "sha3256" => Ok(DigestAlg::Sha3_256),
            _ => Err(HashError::Unsupported(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Digest {
    pub alg: DigestAlg,
    pub bytes: [u8; DIGEST_LEN],
}

impl Digest {
    pub fn from_slice(alg: DigestAlg, bytes: &[u8]) -> Result<Self, HashError> {
        let bytes: [u8; DIGEST_LEN] = bytes
            .try_into()
            .map_err(|_| HashError::BadLength(bytes.len()))?;
        Ok(Digest { alg, bytes })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.bytes)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.alg, self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Streaming digest context. Single owner; feed with [`Hasher::update`] and
/// consume with [`Hasher::finalize`].
#[derive(Clone)]
pub enum Hasher {
    Sha2(sha2::Sha256),
    Sha3(sha3::Sha3_256),
}

impl Hasher {
    pub fn new(alg: DigestAlg) -> Self {
        match alg {
            DigestAlg::Sha2_256 => Hasher::Sha2(sha2::Sha256::new()),
            DigestAlg::Sha3_256 => Hasher::Sha3(sha3::Sha3_256::new()),
        }
    }

    pub fn alg(&self) -> DigestAlg {
        match self {
            Hasher::Sha2(_) => DigestAlg::Sha2_256,
            Hasher::Sha3(_) => DigestAlg::Sha3_256,
        }
    }

    pub fn update(&mut self, data: &[u8]) {
        match self {
            Hasher::Sha2(h) => h.update(data),
            Hasher::Sha3(h) => h.update(data),
        }
    }

    pub fn finalize(self) -> Digest {
        let alg = self.alg();
        let bytes: [u8; DIGEST_LEN] = match self {
            Hasher::Sha2(h) => h.finalize().into(),
            Hasher::Sha3(h) => h.finalize().into(),
        };
        Digest { alg, bytes }
    }
}

impl std::io::Write for Hasher {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

pub fn digest(alg: DigestAlg, data: &[u8]) -> Digest {
    let mut h = Hasher::new(alg);
    h.update(data);
    h.finalize()
}

/// Hashes everything `reader` yields without buffering it whole.
pub fn digest_reader<R: std::io::Read>(alg: DigestAlg, mut reader: R) -> std::io::Result<Digest> {
    let mut h = Hasher::new(alg);
    std::io::copy(&mut reader, &mut h)?;
    Ok(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HashBenchRow {
    pub input_bytes: usize,
    pub mean_ns: f64,
    /// Megabytes (10^6 bytes) per second.
    pub throughput_mb_s: f64,
}

/// Host timing of `alg` over each input size, averaged over `repetitions`.
/// Repetitions below one are treated as one.
pub fn bench_hash(alg: DigestAlg, input_sizes: &[usize], repetitions: usize) -> Vec<HashBenchRow> {
    let reps = repetitions.max(1);
    input_sizes
        .iter()
        .map(|&size| {
            let input: Vec<u8> = (0..size).map(|i| (i * 31 + 7) as u8).collect();
            let start = Instant::now();
            for _ in 0..reps {
                std::hint::black_box(digest(alg, std::hint::black_box(&input)));
            }
            // Clamp to 1ns so tiny inputs never report zero on coarse clocks.
            let mean_ns = (start.elapsed().as_nanos() as f64 / reps as f64).max(1.0);
            let throughput_mb_s = size as f64 / mean_ns * 1e3;
            HashBenchRow {
                input_bytes: size,
                mean_ns,
                throughput_mb_s,
            }
        })
        .collect()
}
