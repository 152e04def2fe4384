// SPDX-License-Identifier: Apache-2.0

//! Stateful hash-based signatures: LM-OTS, LMS trees and the HSS hierarchy
//! of RFC 8554, with SHA-256 throughout.
//!
//! Private keys are seed-derived. A private state records the master seed,
//! the per-level key identifiers and the next unused leaf of every level;
//! all one-time secrets and every cached tree are recomputed from those.
//!
//! Signing is commit-before-release: the advanced state is written to a
//! [`StateStore`] before the signature bytes are handed back, and a state
//! whose generation no longer matches the store refuses to sign.

mod hss;
mod ots;
mod params;
mod state;
mod store;
mod tree;
mod wire;

pub use hss::{
    hss_keygen, hss_sign, hss_verify, public_key_size, signature_size, Entropy, HssPrivateState,
    HssPublicKey, HssSignature, RandomizerMode,
};
pub use ots::{coef, lmots_checksum, OtsSignature};
pub use params::{
    HssParams, LevelParams, LmotsParams, LmotsType, LmsParams, LmsType, HASH_LEN,
    HSS_PUBLIC_KEY_LEN, ID_LEN, LMS_PUBLIC_KEY_LEN, MAX_LEVELS,
};
pub use state::{export_state, import_state, STATE_VERSION};
pub use store::{FileStore, MemoryStore, StateStore, StoreError};
pub use tree::{lms_public_key_from_seed, LmsPublicKey, LmsSignature};

/// Why a signature was rejected. Verification never errors otherwise.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Reject {
    #[error("malformed: {0}")]
    Malformed(String),
    #[error("parameter type mismatch between key and signature")]
    TypeMismatch,
    #[error("signature level count does not match public key")]
    LevelMismatch,
    #[error("signature does not verify")]
    InvalidSignature,
}

impl Reject {
    pub fn code(&self) -> &'static str {
        match self {
            Reject::Malformed(_) => "malformed",
            Reject::TypeMismatch => "type-mismatch",
            Reject::LevelMismatch => "level-mismatch",
            Reject::InvalidSignature => "invalid-signature",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LmsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("key exhausted: no one-time leaves left")]
    KeyExhausted,
    #[error("stale state: in-memory generation {in_memory}, persisted {persisted:?}")]
    StaleState { in_memory: u64, persisted: Option<u64> },
    #[error("state storage failed, no signature released: {0}")]
    StorageFailure(String),
    #[error("corrupt state: {0}")]
    CorruptState(String),
    #[error("state format version {found}, expected {expected}")]
    VersionMismatch { found: u16, expected: u16 },
}
