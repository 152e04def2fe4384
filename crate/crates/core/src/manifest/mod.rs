// SPDX-License-Identifier: Apache-2.0

//! Update manifests, their deterministic CBOR encoding, and the
//! COSE_Sign1-shaped envelope that carries the vendor signature.
//!
//! Manifest map (keys in this order):
//!
//! | key | field            | CBOR                      |
//! |-----|------------------|---------------------------|
//! | 1   | manifest_version | uint                      |
//! | 2   | sequence_number  | uint                      |
//! | 3   | vendor_id        | bstr .size 16             |
//! | 4   | class_id         | bstr .size 16             |
//! | 5   | payload_digest   | [alg: uint, bstr .size 32] |
//! | 6   | payload_size     | uint                      |
//! | 7   | payload_uri      | tstr                      |
//! | 8   | slot             | uint                      |
//!
//! Envelope: `[protected: bstr, payload: bstr, signature: bstr]`, where
//! `protected` wraps `{1: scheme, 2: digest alg}`. The signature covers
//! `["Signature1", protected, h'', payload]`.

mod cbor;

use std::fmt;

use uuid::Uuid;

use crate::hashes::{Digest, DigestAlg};
use crate::sigsuite::{self, PrivateKey, SchemeId, SigError, VerifyError};

use cbor::{Encoder, Item};

pub const MANIFEST_VERSION: u8 = 1;
pub const SUIT_FILE_EXTENSION: &str = "suit";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifestError {
    #[error("malformed encoding at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error("non-canonical encoding at byte {offset}: {reason}")]
    NonCanonical { offset: usize, reason: String },
    #[error("invalid manifest: {0}")]
    Invalid(String),
}

impl ManifestError {
    fn malformed(offset: usize, reason: impl Into<String>) -> Self {
        ManifestError::Malformed {
            offset,
            reason: reason.into(),
        }
    }

    fn non_canonical(offset: usize, reason: impl Into<String>) -> Self {
        ManifestError::NonCanonical {
            offset,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Manifest {
    pub manifest_version: u8,
    pub sequence_number: u64,
    pub vendor_id: Uuid,
    pub class_id: Uuid,
    pub payload_digest: Digest,
    pub payload_size: u64,
    pub payload_uri: String,
    pub slot: u8,
}

impl Manifest {
    pub fn validate(&self) -> Result<(), ManifestError> {
        if self.sequence_number == 0 {
            return Err(ManifestError::Invalid("sequence number must be at least 1".into()));
        }
        if self.payload_size == 0 {
            return Err(ManifestError::Invalid("payload size must be positive".into()));
        }
        Ok(())
    }

    /// Canonical encoding. Fails only if the manifest is invalid.
    pub fn encode(&self) -> Result<Vec<u8>, ManifestError> {
        self.validate()?;
        let mut e = Encoder::default();
        e.map(8);
        e.uint(1).uint(self.manifest_version.into());
        e.uint(2).uint(self.sequence_number);
        e.uint(3).bytes(self.vendor_id.as_bytes());
        e.uint(4).bytes(self.class_id.as_bytes());
        e.uint(5).array(2).uint(self.payload_digest.alg.code().into()).bytes(&self.payload_digest.bytes);
        e.uint(6).uint(self.payload_size);
        e.uint(7).text(&self.payload_uri);
        e.uint(8).uint(self.slot.into());
        Ok(e.out)
    }

    /// Strict decoding: only the canonical form of a valid manifest is accepted.
    pub fn decode(bytes: &[u8]) -> Result<Self, ManifestError> {
        let root = cbor::decode(bytes)?;
        let f = root.keyed(8)?;
        let digest = f[4].array(2)?;
        let alg = DigestAlg::from_code(digest[0].uint()?)
            .map_err(|e| ManifestError::malformed(digest[0].offset, e.to_string()))?;
        let m = Manifest {
            manifest_version: small(f[0])?,
            sequence_number: f[1].uint()?,
            vendor_id: uuid(f[2])?,
            class_id: uuid(f[3])?,
            payload_digest: Digest::from_slice(alg, digest[1].bytes()?)
                .map_err(|e| ManifestError::malformed(digest[1].offset, e.to_string()))?,
            payload_size: f[5].uint()?,
            payload_uri: f[6].text()?.to_string(),
            slot: small(f[7])?,
        };
        m.validate()?;
        Ok(m)
    }
}

fn small(item: &Item) -> Result<u8, ManifestError> {
    u8::try_from(item.uint()?).map_err(|_| ManifestError::malformed(item.offset, "value exceeds 255"))
}

fn uuid(item: &Item) -> Result<Uuid, ManifestError> {
    let b = item.bytes()?;
    Uuid::from_slice(b).map_err(|_| ManifestError::malformed(item.offset, format!("expected 16-byte id, got {}", b.len())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtectedHeader {
    pub scheme: SchemeId,
    pub digest_alg: DigestAlg,
}

impl ProtectedHeader {
    pub fn encode(&self) -> Vec<u8> {
        let mut e = Encoder::default();
        e.map(2);
        e.uint(1).uint(self.scheme.code().into());
        e.uint(2).uint(self.digest_alg.code().into());
        e.out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, ManifestError> {
        let root = cbor::decode(bytes)?;
        let f = root.keyed(2)?;
        let code = f[0].uint()?;
        let scheme = u8::try_from(code)
            .ok()
            .and_then(SchemeId::from_code)
            .ok_or_else(|| ManifestError::malformed(f[0].offset, format!("unknown scheme {code}")))?;
        let digest_alg = DigestAlg::from_code(f[1].uint()?)
            .map_err(|e| ManifestError::malformed(f[1].offset, e.to_string()))?;
        Ok(ProtectedHeader { scheme, digest_alg })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedEnvelope {
    pub protected: ProtectedHeader,
    /// Canonical manifest encoding.
    pub payload: Vec<u8>,
    pub signature: Vec<u8>,
}

/// The byte string that is signed: the canonical encoding of
/// `["Signature1", protected, h'', payload]`.
pub fn signing_input(protected: &ProtectedHeader, payload: &[u8]) -> Vec<u8> {
    let mut e = Encoder::default();
    e.array(4).text("Signature1").bytes(&protected.encode()).bytes(&[]).bytes(payload);
    e.out
}

impl SignedEnvelope {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Encoder::default();
        e.array(3).bytes(&self.protected.encode()).bytes(&self.payload).bytes(&self.signature);
        e.out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ManifestError> {
        let root = cbor::decode(bytes)?;
        let parts = root.array(3)?;
        let header = parts[0].bytes()?;
        let base = parts[0].offset + cbor::head_len(header.len() as u64);
        let protected = ProtectedHeader::decode(header).map_err(|e| shift(e, base))?;
        Ok(SignedEnvelope {
            protected,
            payload: parts[1].bytes()?.to_vec(),
            signature: parts[2].bytes()?.to_vec(),
        })
    }

    pub fn signing_input(&self) -> Vec<u8> {
        signing_input(&self.protected, &self.payload)
    }

    /// Bytes the envelope adds on top of the manifest and the signature.
    pub fn framing_len(&self) -> usize {
        self.to_bytes().len() - self.payload.len() - self.signature.len()
    }
}

/// Re-bases an error from a nested encoding that starts at `base` in the
/// enclosing buffer.
fn shift(e: ManifestError, base: usize) -> ManifestError {
    match e {
        ManifestError::Malformed { offset, reason } => ManifestError::Malformed {
            offset: offset + base,
            reason: format!("in protected header: {reason}"),
        },
        ManifestError::NonCanonical { offset, reason } => ManifestError::NonCanonical {
            offset: offset + base,
            reason: format!("in protected header: {reason}"),
        },
        other => other,
    }
}

pub fn sign_envelope(m: &Manifest, scheme: SchemeId, key: &PrivateKey) -> Result<SignedEnvelope, SignError> {
    let protected = ProtectedHeader {
        scheme,
        digest_alg: m.payload_digest.alg,
    };
    let payload = m.encode()?;
    let signature = sigsuite::sign(scheme, key, &signing_input(&protected, &payload))?;
    Ok(SignedEnvelope {
        protected,
        payload,
        signature,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Sig(#[from] SigError),
}

/// Why an envelope was not accepted.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvelopeReject {
    #[error("bad signature")]
    BadSignature,
    #[error("malformed: {0}")]
    Malformed(String),
    #[error("envelope signed with {found}, trust anchor is {expected}")]
    SchemeMismatch { expected: SchemeId, found: SchemeId },
    #[error("{0}: no backend in this build")]
    BackendUnavailable(SchemeId),
}

impl EnvelopeReject {
    pub fn code(&self) -> &'static str {
        match self {
            EnvelopeReject::BadSignature => "bad-signature",
            EnvelopeReject::Malformed(_) => "malformed",
            EnvelopeReject::SchemeMismatch { .. } => "scheme-mismatch",
            EnvelopeReject::BackendUnavailable(_) => "backend-unavailable",
        }
    }
}

/// Verifies under the scheme named in the protected header. A public key
/// whose length does not fit that scheme is a scheme mismatch.
pub fn verify_envelope(env: &SignedEnvelope, public: &[u8]) -> Result<Manifest, EnvelopeReject> {
    let scheme = env.protected.scheme;
    if public.len() != sigsuite::descriptor(scheme).public_key_bytes {
        let expected = SchemeId::ALL
            .into_iter()
            .find(|s| sigsuite::descriptor(*s).public_key_bytes == public.len())
            .unwrap_or(scheme);
        if expected != scheme {
            return Err(EnvelopeReject::SchemeMismatch { expected, found: scheme });
        }
        return Err(EnvelopeReject::Malformed(format!(
            "{}-byte public key fits no known scheme",
            public.len()
        )));
    }
    verify_checked(env, scheme, public)
}

/// Verifies against a trust anchor of a known scheme; an envelope naming
/// any other scheme is rejected before signature work.
pub fn verify_envelope_as(env: &SignedEnvelope, scheme: SchemeId, public: &[u8]) -> Result<Manifest, EnvelopeReject> {
    if env.protected.scheme != scheme {
        return Err(EnvelopeReject::SchemeMismatch {
            expected: scheme,
            found: env.protected.scheme,
        });
    }
    verify_checked(env, scheme, public)
}

fn verify_checked(env: &SignedEnvelope, scheme: SchemeId, public: &[u8]) -> Result<Manifest, EnvelopeReject> {
    sigsuite::verify(scheme, public, &env.signing_input(), &env.signature).map_err(|e| match e {
        VerifyError::BadSignature => EnvelopeReject::BadSignature,
        VerifyError::Malformed(_) => EnvelopeReject::BadSignature,
        VerifyError::BackendUnavailable(s) => EnvelopeReject::BackendUnavailable(s),
    })?;
    let m = Manifest::decode(&env.payload).map_err(|e| EnvelopeReject::Malformed(e.to_string()))?;
    if m.payload_digest.alg != env.protected.digest_alg {
        return Err(EnvelopeReject::Malformed(
            "payload digest algorithm differs from the protected header".into(),
        ));
    }
    Ok(m)
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "version:  {}", self.manifest_version)?;
        writeln!(f, "sequence: {}", self.sequence_number)?;
        writeln!(f, "vendor:   {}", self.vendor_id)?;
        writeln!(f, "class:    {}", self.class_id)?;
        writeln!(f, "digest:   {} {}", self.payload_digest.alg, self.payload_digest)?;
        writeln!(f, "size:     {}", self.payload_size)?;
        writeln!(f, "uri:      {}", self.payload_uri)?;
        write!(f, "slot:     {}", self.slot)
    }
}

/// Offset-annotated hex dump, 16 bytes per row.
pub fn hex_dump(bytes: &[u8]) -> String {
    bytes
        .chunks(16)
        .enumerate()
        .map(|(i, row)| {
            let hex: Vec<String> = row.iter().map(|b| format!("{b:02x}")).collect();
            format!("{:06x}  {}\n", i * 16, hex.join(" "))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashes::digest;

    pub(crate) fn sample() -> Manifest {
        Manifest {
            manifest_version: MANIFEST_VERSION,
            sequence_number: 7,
            vendor_id: Uuid::from_bytes([0x11; 16]),
            class_id: Uuid::from_bytes([0x22; 16]),
            payload_digest: digest(DigestAlg::Sha2_256, b"image"),
            payload_size: 5,
            payload_uri: "coap://fw.example/app.bin".into(),
            slot: 1,
        }
    }

    #[test]
    fn round_trip_and_reencode() {
        let bytes = sample().encode().unwrap();
        let back = Manifest::decode(&bytes).unwrap();
        assert_eq!(back, sample());
        assert_eq!(back.encode().unwrap(), bytes);
    }

    #[test]
    fn invalid_manifests_do_not_encode() {
        let mut m = sample();
        m.sequence_number = 0;
        assert!(matches!(m.encode(), Err(ManifestError::Invalid(_))));
        let mut m = sample();
        m.payload_size = 0;
        assert!(matches!(m.encode(), Err(ManifestError::Invalid(_))));
    }

    #[test]
    fn protected_header_offsets_point_into_envelope() {
        let env = SignedEnvelope {
            protected: ProtectedHeader {
                scheme: SchemeId::Ed25519,
                digest_alg: DigestAlg::Sha2_256,
            },
            payload: vec![1],
            signature: vec![2],
        };
        let mut bytes = env.to_bytes();
        // 83 45 a2 01 01 02 01 ...: scheme code 01 at offset 4 becomes 09.
        assert_eq!(bytes[4], 0x01);
        bytes[4] = 0x09;
        match SignedEnvelope::from_bytes(&bytes) {
            Err(ManifestError::Malformed { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
    }
}
