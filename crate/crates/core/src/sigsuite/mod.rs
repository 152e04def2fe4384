// SPDX-License-Identifier: Apache-2.0

//! One signing interface over the five evaluated schemes.
//!
//! Ed25519, ECDSA P-256 and HSS/LMS are always live. Falcon-512 and
//! Dilithium are live only with the `pq-adapters` feature; otherwise they
//! stay in the registry as size-only descriptors and every operation on
//! them returns [`SigError::BackendUnavailable`].

pub mod ecdsa;
mod keyfile;
#[cfg(feature = "pq-adapters")]
mod pq;

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::lms::{
    hss_keygen, hss_sign, hss_verify, Entropy, HssParams, HssPrivateState, HssPublicKey,
    HssSignature, LmsError, MemoryStore, StateStore,
};

pub use keyfile::{KeyFile, KeyFileError, PrivateRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeId {
    Ed25519,
    EcdsaP256,
    HssLms,
    #[serde(rename = "falcon-512")]
    Falcon512,
    Dilithium,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::Ed25519,
        SchemeId::EcdsaP256,
        SchemeId::HssLms,
        SchemeId::Falcon512,
        SchemeId::Dilithium,
    ];

    pub fn code(self) -> u8 {
        match self {
            SchemeId::Ed25519 => 1,
            SchemeId::EcdsaP256 => 2,
            SchemeId::HssLms => 3,
            SchemeId::Falcon512 => 4,
            SchemeId::Dilithium => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Ed25519 => "ed25519",
            SchemeId::EcdsaP256 => "ecdsa-p256",
            SchemeId::HssLms => "hss-lms",
            SchemeId::Falcon512 => "falcon-512",
            SchemeId::Dilithium => "dilithium",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = SigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| SigError::UnknownScheme(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    EllipticCurve,
    HashBased,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecurityLevel {
    PreQuantum128,
    NistPqLevel1,
    NistPqLevel2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub id: SchemeId,
    pub private_key_bytes: usize,
    pub public_key_bytes: usize,
    pub signature_bytes: usize,
    pub family: Family,
    pub security: SecurityLevel,
    pub stateful: bool,
    pub backend_available: bool,
}

const PQ_LIVE: bool = cfg!(feature = "pq-adapters");

/// Sizes are those of the reference parameter sets: HSS/LMS with two
/// levels of H5/W4, Falcon-512 (padded signatures) and Dilithium2.
const REGISTRY: [SchemeDescriptor; 5] = [
    SchemeDescriptor {
        id: SchemeId::Ed25519,
        private_key_bytes: 32,
        public_key_bytes: 32,
        signature_bytes: 64,
        family: Family::EllipticCurve,
        security: SecurityLevel::PreQuantum128,
        stateful: false,
        backend_available: true,
    },
    SchemeDescriptor {
        id: SchemeId::EcdsaP256,
        private_key_bytes: 32,
        public_key_bytes: 32,
        signature_bytes: 64,
        family: Family::EllipticCurve,
        security: SecurityLevel::PreQuantum128,
        stateful: false,
        backend_available: true,
    },
    SchemeDescriptor {
        id: SchemeId::HssLms,
        private_key_bytes: 64,
        public_key_bytes: 60,
        signature_bytes: 4756,
        family: Family::HashBased,
        security: SecurityLevel::NistPqLevel1,
        stateful: true,
        backend_available: true,
    },
    SchemeDescriptor {
        id: SchemeId::Falcon512,
        private_key_bytes: 1281,
        public_key_bytes: 897,
        signature_bytes: 666,
        family: Family::Lattice,
        security: SecurityLevel::NistPqLevel1,
        stateful: false,
        backend_available: PQ_LIVE,
    },
    SchemeDescriptor {
        id: SchemeId::Dilithium,
        private_key_bytes: 2528,
        public_key_bytes: 1312,
        signature_bytes: 2420,
        family: Family::Lattice,
        security: SecurityLevel::NistPqLevel2,
        stateful: false,
        backend_available: PQ_LIVE,
    },
];

pub fn registry() -> &'static [SchemeDescriptor] {
    &REGISTRY
}

pub fn descriptor(id: SchemeId) -> &'static SchemeDescriptor {
    &REGISTRY[id.code() as usize - 1]
}

/// Schemes that must have a live backend in every build.
pub fn required_backends() -> [SchemeId; 3] {
    [SchemeId::Ed25519, SchemeId::EcdsaP256, SchemeId::HssLms]
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SigError {
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("{0}: no backend in this build (size-only descriptor)")]
    BackendUnavailable(SchemeId),
    #[error("key is for {key}, operation requested {requested}")]
    SchemeMismatch { requested: SchemeId, key: SchemeId },
    #[error("invalid {scheme} key: {reason}")]
    InvalidKey { scheme: SchemeId, reason: String },
    #[error(transparent)]
    Lms(#[from] LmsError),
}

/// Why `verify` did not accept.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("{0}: no backend in this build (size-only descriptor)")]
    BackendUnavailable(SchemeId),
    #[error("malformed key or signature: {0}")]
    Malformed(String),
    #[error("signature does not verify")]
    BadSignature,
}

/// A stateful HSS private key: the in-memory state plus the store every
/// signature is committed to before it is released.
pub struct HssHandle {
    state: Mutex<HssPrivateState>,
    store: Box<dyn StateStore>,
}

impl HssHandle {
    /// Persists a freshly generated state into an empty store.
    pub fn create(state: HssPrivateState, store: Box<dyn StateStore>) -> Result<Self, LmsError> {
        state.persist_new(store.as_ref())?;
        Ok(HssHandle {
            state: Mutex::new(state),
            store,
        })
    }

    pub fn open(store: Box<dyn StateStore>) -> Result<Self, LmsError> {
        let state = HssPrivateState::load(store.as_ref())?;
        Ok(HssHandle {
            state: Mutex::new(state),
            store,
        })
    }

    pub fn sign(&self, message: &[u8]) -> Result<HssSignature, LmsError> {
        let mut state = self.state.lock().unwrap_or_else(|p| p.into_inner());
        hss_sign(&mut state, message, self.store.as_ref())
    }

    pub fn signatures_remaining(&self) -> u64 {
        self.state.lock().unwrap_or_else(|p| p.into_inner()).signatures_remaining()
    }

    pub fn public_key(&self) -> HssPublicKey {
        self.state.lock().unwrap_or_else(|p| p.into_inner()).public_key()
    }
}

impl fmt::Debug for HssHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HssHandle")
            .field("remaining", &self.signatures_remaining())
            .finish_non_exhaustive()
    }
}

/// Private key material. The HSS variant is a handle to persisted state and
/// is exempt from the descriptor's private key length.
#[derive(Debug)]
pub enum PrivateKey {
    Bytes(Vec<u8>),
    Stateful(HssHandle),
}

#[derive(Debug)]
pub struct KeyPair {
    pub scheme: SchemeId,
    pub public: Vec<u8>,
    pub private: PrivateKey,
}

#[derive(Default)]
pub struct KeygenOptions {
    /// Deterministic key material. Falcon and Dilithium backends draw from
    /// the system RNG regardless.
    pub seed: Option<[u8; 32]>,
    /// HSS parameters; defaults to two levels of H5/W4.
    pub hss_params: Option<HssParams>,
    /// Where the HSS state lives; defaults to an in-memory store.
    pub hss_store: Option<Box<dyn StateStore>>,
}

pub fn keygen(scheme: SchemeId) -> Result<KeyPair, SigError> {
    keygen_with(scheme, KeygenOptions::default())
}

pub fn keygen_with(scheme: SchemeId, opts: KeygenOptions) -> Result<KeyPair, SigError> {
    let mut rng = match opts.seed {
        Some(s) => ChaCha20Rng::from_seed(s),
        None => ChaCha20Rng::from_entropy(),
    };
    let (public, private) = match scheme {
        SchemeId::Ed25519 => {
            let mut sk = [0u8; 32];
            rng.fill_bytes(&mut sk);
            let pk = ed25519_dalek::SigningKey::from_bytes(&sk).verifying_key();
            (pk.to_bytes().to_vec(), PrivateKey::Bytes(sk.to_vec()))
        }
        SchemeId::EcdsaP256 => {
            let (d, x) = ecdsa::keygen(&mut rng);
            (x.to_vec(), PrivateKey::Bytes(d.to_vec()))
        }
        SchemeId::HssLms => {
            let params = opts.hss_params.unwrap_or_default();
            let entropy = match opts.seed {
                Some(s) => Entropy::Seed(s),
                None => Entropy::System,
            };
            let (pk, state) = hss_keygen(&params, entropy);
            let store = opts.hss_store.unwrap_or_else(|| Box::new(MemoryStore::new()));
            let handle = HssHandle::create(state, store)?;
            (pk.to_bytes(), PrivateKey::Stateful(handle))
        }
        SchemeId::Falcon512 | SchemeId::Dilithium => pq_keygen(scheme)?,
    };
    Ok(KeyPair {
        scheme,
        public,
        private,
    })
}

#[cfg(feature = "pq-adapters")]
fn pq_keygen(scheme: SchemeId) -> Result<(Vec<u8>, PrivateKey), SigError> {
    let (pk, sk) = pq::keygen(scheme);
    Ok((pk, PrivateKey::Bytes(sk)))
}

#[cfg(not(feature = "pq-adapters"))]
fn pq_keygen(scheme: SchemeId) -> Result<(Vec<u8>, PrivateKey), SigError> {
    Err(SigError::BackendUnavailable(scheme))
}

fn fixed<const N: usize>(scheme: SchemeId, bytes: &[u8]) -> Result<[u8; N], SigError> {
    bytes.try_into().map_err(|_| SigError::InvalidKey {
        scheme,
        reason: format!("expected {N} bytes, got {}", bytes.len()),
    })
}

/// Signs `message`. For HSS/LMS this advances and persists the key state
/// before returning.
pub fn sign(scheme: SchemeId, key: &PrivateKey, message: &[u8]) -> Result<Vec<u8>, SigError> {
    match (scheme, key) {
        (SchemeId::HssLms, PrivateKey::Stateful(h)) => Ok(h.sign(message)?.to_bytes()),
        (SchemeId::HssLms, PrivateKey::Bytes(_)) => Err(SigError::InvalidKey {
            scheme,
            reason: "HSS/LMS signing needs a stateful handle".into(),
        }),
        (_, PrivateKey::Stateful(_)) => Err(SigError::SchemeMismatch {
            requested: scheme,
            key: SchemeId::HssLms,
        }),
        (SchemeId::Ed25519, PrivateKey::Bytes(sk)) => {
            use ed25519_dalek::Signer;
            let sk = ed25519_dalek::SigningKey::from_bytes(&fixed(scheme, sk)?);
            Ok(sk.sign(message).to_bytes().to_vec())
        }
        (SchemeId::EcdsaP256, PrivateKey::Bytes(sk)) => {
            let d = fixed(scheme, sk)?;
            ecdsa::sign(&d, message)
                .map(|s| s.to_vec())
                .map_err(|reason| SigError::InvalidKey { scheme, reason })
        }
        (SchemeId::Falcon512 | SchemeId::Dilithium, PrivateKey::Bytes(sk)) => pq_sign(scheme, sk, message),
    }
}

#[cfg(feature = "pq-adapters")]
fn pq_sign(scheme: SchemeId, sk: &[u8], message: &[u8]) -> Result<Vec<u8>, SigError> {
    pq::sign(scheme, sk, message).map_err(|reason| SigError::InvalidKey { scheme, reason })
}

#[cfg(not(feature = "pq-adapters"))]
fn pq_sign(scheme: SchemeId, _sk: &[u8], _message: &[u8]) -> Result<Vec<u8>, SigError> {
    Err(SigError::BackendUnavailable(scheme))
}

pub fn verify(scheme: SchemeId, public: &[u8], message: &[u8], signature: &[u8]) -> Result<(), VerifyError> {
    let d = descriptor(scheme);
    if public.len() != d.public_key_bytes {
        return Err(VerifyError::Malformed(format!(
            "{scheme} public key must be {} bytes, got {}",
            d.public_key_bytes,
            public.len()
        )));
    }
    match scheme {
        SchemeId::Ed25519 => {
            let pk = ed25519_dalek::VerifyingKey::from_bytes(public.try_into().unwrap())
                .map_err(|e| VerifyError::Malformed(e.to_string()))?;
            let sig = ed25519_dalek::Signature::from_slice(signature)
                .map_err(|e| VerifyError::Malformed(e.to_string()))?;
            pk.verify_strict(message, &sig).map_err(|_| VerifyError::BadSignature)
        }
        SchemeId::EcdsaP256 => ecdsa::verify(public.try_into().unwrap(), message, signature),
        SchemeId::HssLms => {
            let pk = HssPublicKey::from_bytes(public).map_err(|e| VerifyError::Malformed(e.to_string()))?;
            let sig = HssSignature::from_bytes(signature).map_err(|e| VerifyError::Malformed(e.to_string()))?;
            hss_verify(&pk, message, &sig).map_err(|e| match e {
                crate::lms::Reject::Malformed(m) => VerifyError::Malformed(m),
                _ => VerifyError::BadSignature,
            })
        }
        SchemeId::Falcon512 | SchemeId::Dilithium => pq_verify(scheme, public, message, signature),
    }
}

#[cfg(feature = "pq-adapters")]
fn pq_verify(scheme: SchemeId, public: &[u8], message: &[u8], signature: &[u8]) -> Result<(), VerifyError> {
    pq::verify(scheme, public, message, signature)
}

#[cfg(not(feature = "pq-adapters"))]
fn pq_verify(scheme: SchemeId, _: &[u8], _: &[u8], _: &[u8]) -> Result<(), VerifyError> {
    Err(VerifyError::BackendUnavailable(scheme))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_stable_and_ordered() {
        let codes: Vec<u8> = SchemeId::ALL.iter().map(|s| s.code()).collect();
        assert_eq!(codes, [1, 2, 3, 4, 5]);
        for s in SchemeId::ALL {
            assert_eq!(SchemeId::from_code(s.code()), Some(s));
            assert_eq!(s.name().parse::<SchemeId>().unwrap(), s);
            assert_eq!(descriptor(s).id, s);
        }
        assert_eq!(SchemeId::from_code(0), None);
    }

    #[test]
    fn only_hss_is_stateful() {
        for d in registry() {
            assert_eq!(d.stateful, d.id == SchemeId::HssLms);
        }
    }
}
