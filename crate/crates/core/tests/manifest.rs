// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uuid::Uuid;

use suitpq::hashes::{digest, Digest, DigestAlg};
use suitpq::lms::HssParams;
use suitpq::manifest::*;
use suitpq::sigsuite::{descriptor, keygen_with, registry, KeygenOptions, SchemeId};

fn sample() -> Manifest {
    Manifest {
        manifest_version: MANIFEST_VERSION,
        sequence_number: 42,
        vendor_id: Uuid::from_bytes([0xa1; 16]),
        class_id: Uuid::from_bytes([0xb2; 16]),
        payload_digest: digest(DigestAlg::Sha2_256, b"firmware image"),
        payload_size: 14,
        payload_uri: "coap://[2001:db8::1]/fw/app.bin".into(),
        slot: 0,
    }
}

fn random_manifest(rng: &mut impl Rng) -> Manifest {
    let alg = if rng.gen() { DigestAlg::Sha2_256 } else { DigestAlg::Sha3_256 };
    let uri_len = rng.gen_range(0..300);
    let (seq_shift, size_shift): (u32, u32) = (rng.gen_range(0..64), rng.gen_range(0..64));
    Manifest {
        manifest_version: rng.gen(),
        sequence_number: rng.gen_range(1..=u64::MAX >> seq_shift),
        vendor_id: Uuid::from_bytes(rng.gen()),
        class_id: Uuid::from_bytes(rng.gen()),
        payload_digest: Digest { alg, bytes: rng.gen() },
        payload_size: rng.gen_range(1..=u64::MAX >> size_shift),
        payload_uri: (0..uri_len).map(|_| rng.gen_range('a'..='z')).collect(),
        slot: rng.gen(),
    }
}

prop_compose! {
    fn arb_manifest()(seed in any::<u64>()) -> Manifest {
        random_manifest(&mut ChaCha8Rng::seed_from_u64(seed))
    }
}

proptest! {
    #[test]
    fn encode_decode_encode_is_stable(m in arb_manifest()) {
        let bytes = m.encode().unwrap();
        let back = Manifest::decode(&bytes).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.encode().unwrap(), bytes);
    }

    #[test]
    fn unicode_uris_round_trip(uri in "\\PC{0,40}") {
        let m = Manifest { payload_uri: uri, ..sample() };
        prop_assert_eq!(Manifest::decode(&m.encode().unwrap()).unwrap(), m);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = Manifest::decode(&bytes);
        let _ = SignedEnvelope::from_bytes(&bytes);
    }
}

#[test]
fn ten_thousand_manifests_have_distinct_encodings() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut manifests = HashSet::new();
    let mut encodings = HashSet::new();
    for _ in 0..10_000 {
        let m = random_manifest(&mut rng);
        let enc = m.encode().unwrap();
        assert_eq!(Manifest::decode(&enc).unwrap().encode().unwrap(), enc);
        encodings.insert(digest(DigestAlg::Sha2_256, &enc).bytes);
        manifests.insert(m);
    }
    assert_eq!(encodings.len(), manifests.len());

    // Neighbouring manifests differing in one field.
    let base = sample();
    let variants = [
        Manifest { sequence_number: 43, ..base.clone() },
        Manifest { slot: 1, ..base.clone() },
        Manifest { manifest_version: 2, ..base.clone() },
        Manifest { payload_size: 15, ..base.clone() },
        Manifest { payload_digest: Digest { alg: DigestAlg::Sha3_256, ..base.payload_digest }, ..base.clone() },
        Manifest { class_id: base.vendor_id, ..base.clone() },
        Manifest { payload_uri: base.payload_uri.clone() + "x", ..base.clone() },
    ];
    let enc = base.encode().unwrap();
    for v in variants {
        assert_ne!(v.encode().unwrap(), enc);
    }
}

#[test]
fn hand_built_indefinite_map_is_non_canonical() {
    let mut bytes = sample().encode().unwrap();
    assert_eq!(bytes[0], 0xa8);
    bytes[0] = 0xbf;
    bytes.push(0xff);
    assert!(matches!(
        Manifest::decode(&bytes),
        Err(ManifestError::NonCanonical { offset: 0, .. })
    ));
}

#[test]
fn indefinite_uri_string_is_non_canonical() {
    let m = Manifest { payload_uri: "ab".into(), ..sample() };
    let bytes = m.encode().unwrap();
    // 07 62 'a' 'b' -> 07 7f 61 'a' 61 'b' ff
    let at = bytes.windows(4).position(|w| w == [0x07, 0x62, b'a', b'b']).unwrap();
    let mut chunked = bytes[..at + 1].to_vec();
    chunked.extend_from_slice(&[0x7f, 0x61, b'a', 0x61, b'b', 0xff]);
    chunked.extend_from_slice(&bytes[at + 4..]);
    match Manifest::decode(&chunked) {
        Err(ManifestError::NonCanonical { offset, .. }) => assert_eq!(offset, at + 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn schema_violations_are_malformed_with_offset() {
    let bytes = sample().encode().unwrap();
    // Truncation anywhere inside.
    for cut in [1, 10, bytes.len() - 1] {
        assert!(matches!(Manifest::decode(&bytes[..cut]), Err(ManifestError::Malformed { .. })));
    }
    // Vendor id of the wrong length: 03 50 <16 bytes> -> 03 4f <15 bytes>.
    let at = bytes.windows(2).position(|w| w == [0x03, 0x50]).unwrap();
    let mut short = bytes[..at + 1].to_vec();
    short.push(0x4f);
    short.extend_from_slice(&bytes[at + 2..at + 17]);
    short.extend_from_slice(&bytes[at + 18..]);
    match Manifest::decode(&short) {
        Err(ManifestError::Malformed { offset, .. }) => assert_eq!(offset, at + 1),
        other => panic!("{other:?}"),
    }
    // Sequence number zero decodes structurally but is invalid.
    let mut zero = bytes.clone();
    let at = zero.windows(2).position(|w| w == [0x02, 0x18]).unwrap();
    zero.splice(at + 1..at + 3, [0x00]);
    assert!(matches!(Manifest::decode(&zero), Err(ManifestError::Invalid(_))));
}

fn small_key_opts() -> KeygenOptions {
    KeygenOptions {
        seed: Some([21; 32]),
        hss_params: Some(HssParams::default()),
        hss_store: None,
    }
}

#[test]
fn sign_and_verify_every_live_scheme() {
    for d in registry().iter().filter(|d| d.backend_available) {
        let kp = keygen_with(d.id, small_key_opts()).unwrap();
        let env = sign_envelope(&sample(), d.id, &kp.private).unwrap();
        assert_eq!(env.signature.len(), d.signature_bytes, "{}", d.id);
        let wire = env.to_bytes();
        let back = SignedEnvelope::from_bytes(&wire).unwrap();
        assert_eq!(back, env);
        assert_eq!(verify_envelope(&back, &kp.public).unwrap(), sample());
        assert_eq!(verify_envelope_as(&back, d.id, &kp.public).unwrap(), sample());
        // Signing input is a function of the decoded header and payload only.
        assert_eq!(back.signing_input(), signing_input(&env.protected, &sample().encode().unwrap()));
    }
}

#[test]
fn framing_overhead_is_constant_and_small() {
    // Measured once on `sample()` (117-byte manifest) and frozen.
    let golden = [
        (SchemeId::Ed25519, 11),
        (SchemeId::EcdsaP256, 11),
        (SchemeId::HssLms, 12),
        (SchemeId::Falcon512, 12),
        (SchemeId::Dilithium, 12),
    ];
    let payload = sample().encode().unwrap();
    assert_eq!(payload.len(), 117);
    for (id, framing) in golden {
        let env = SignedEnvelope {
            protected: ProtectedHeader { scheme: id, digest_alg: DigestAlg::Sha2_256 },
            payload: payload.clone(),
            signature: vec![0; descriptor(id).signature_bytes],
        };
        assert_eq!(env.framing_len(), framing, "{id}");
        assert!(framing <= 16);
        assert_eq!(
            env.to_bytes().len(),
            payload.len() + descriptor(id).signature_bytes + framing
        );
    }
}

#[test]
fn recorded_metadata_plus_signature_baseline() {
    // 419-byte manifest from the reference deployment plus an Ed25519 signature.
    let recorded_manifest = suitpq::costmodel::PaperConstants::load().unwrap().suit_manifest_bytes;
    assert_eq!(recorded_manifest, 419);
    assert_eq!(recorded_manifest + descriptor(SchemeId::Ed25519).signature_bytes as u64, 483);
}

#[test]
fn any_payload_bit_flip_is_bad_signature() {
    let kp = keygen_with(SchemeId::Ed25519, small_key_opts()).unwrap();
    let env = sign_envelope(&sample(), SchemeId::Ed25519, &kp.private).unwrap();
    for bit in 0..env.payload.len() * 8 {
        let tampered = SignedEnvelope { payload: common::flip_bit(&env.payload, bit), ..env.clone() };
        assert_eq!(verify_envelope(&tampered, &kp.public), Err(EnvelopeReject::BadSignature), "bit {bit}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let wire = env.to_bytes();
    for _ in 0..300 {
        let bit = rng.gen_range(0..wire.len() * 8);
        let verdict = SignedEnvelope::from_bytes(&common::flip_bit(&wire, bit))
            .map_err(|e| EnvelopeReject::Malformed(e.to_string()))
            .and_then(|e| verify_envelope(&e, &kp.public));
        assert!(verdict.is_err(), "bit {bit}");
    }
}

#[test]
fn header_scheme_change_never_accepts() {
    let kp = keygen_with(SchemeId::Ed25519, small_key_opts()).unwrap();
    let env = sign_envelope(&sample(), SchemeId::Ed25519, &kp.private).unwrap();
    for id in SchemeId::ALL {
        let mut wire = env.to_bytes();
        // 83 45 a2 01 <scheme> ...
        wire[4] = id.code();
        let altered = SignedEnvelope::from_bytes(&wire).unwrap();
        let verdict = verify_envelope(&altered, &kp.public);
        if id == SchemeId::Ed25519 {
            assert!(verdict.is_ok());
        } else {
            assert!(
                matches!(verdict, Err(EnvelopeReject::BadSignature | EnvelopeReject::SchemeMismatch { .. })),
                "{id}: {verdict:?}"
            );
            assert!(matches!(
                verify_envelope_as(&altered, SchemeId::Ed25519, &kp.public),
                Err(EnvelopeReject::SchemeMismatch { .. })
            ));
        }
    }
    // Changing the digest algorithm in the header breaks the signature too.
    let mut wire = env.to_bytes();
    wire[6] = DigestAlg::Sha3_256.code();
    let altered = SignedEnvelope::from_bytes(&wire).unwrap();
    assert_eq!(verify_envelope(&altered, &kp.public), Err(EnvelopeReject::BadSignature));
}
