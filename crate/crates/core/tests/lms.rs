// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use suitpq::lms::*;

use common::{flip_bit, keyed_hex, read_data, Fault, FlakyStore};

fn rfc_case(name: &str) -> (HssPublicKey, Vec<u8>, Vec<u8>) {
    let d = keyed_hex(name);
    let pk = HssPublicKey::from_bytes(&d["public_key"]).unwrap();
    (pk, d["message"].clone(), d["signature"].clone())
}

#[test]
fn rfc8554_published_test_cases_verify() {
    for case in ["rfc8554_case1.txt", "rfc8554_case2.txt"] {
        let (pk, msg, sig) = rfc_case(case);
        let parsed = HssSignature::from_bytes(&sig).unwrap();
        assert_eq!(parsed.to_bytes(), sig, "{case} re-encoding");
        assert_eq!(hss_verify(&pk, &msg, &parsed), Ok(()), "{case}");

        let mut bad_msg = msg.clone();
        bad_msg[0] ^= 1;
        assert_eq!(hss_verify(&pk, &bad_msg, &parsed), Err(Reject::InvalidSignature));
        assert!(matches!(
            HssSignature::from_bytes(&sig[..sig.len() - 1]),
            Err(Reject::Malformed(_))
        ));
    }
}

#[test]
fn tree_roots_match_independent_implementation() {
    // Roots computed by the pure-Python `hsslms` package (tests/oracles).
    for line in read_data("lms_roots.txt").lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let lms = LmsType::from_code(f[0].parse().unwrap()).unwrap();
        let ots = LmotsType::from_code(f[1].parse().unwrap()).unwrap();
        let id: [u8; ID_LEN] = hex::decode(f[2]).unwrap().try_into().unwrap();
        let seed: [u8; HASH_LEN] = hex::decode(f[3]).unwrap().try_into().unwrap();
        let pk = lms_public_key_from_seed(LevelParams::new(lms, ots), id, seed);
        assert_eq!(hex::encode(pk.root), f[4], "{lms} {ots}");
    }
}

#[test]
fn size_formula_matches_arithmetic_oracle() {
    // lmots = 4 + n + p*n ; lms = 4 + lmots + 4 + h*m ; hss = 4 + sum + (L-1)*56
    let lmots_w4 = 4 + 32 + 67 * 32;
    let lms_h5_w4 = 4 + lmots_w4 + 4 + 5 * 32;
    assert_eq!(lms_h5_w4, 2348);
    assert_eq!(4 + lms_h5_w4 + 56 + lms_h5_w4, 4756);
    assert_eq!(signature_size(&HssParams::default()), 4756);

    let lmots_w8 = 4 + 32 + 34 * 32;
    assert_eq!(
        signature_size(&HssParams::uniform(1, 5, 8).unwrap()),
        4 + (4 + lmots_w8 + 4 + 160)
    );
    assert_eq!(signature_size(&HssParams::uniform(1, 5, 8).unwrap()), 1296);
    for p in ["L=1,h=5,w=4", "L=2,h=5,w=8", "h10w4/h5w8", "L=1,h=15,w=1"] {
        assert_eq!(public_key_size(&p.parse().unwrap()), 60);
    }
}

#[test]
fn serialized_lengths_equal_formula() {
    for p in ["L=1,h=5,w=4", "L=1,h=5,w=8", "L=2,h=5,w=4", "L=2,h=5,w=8", "L=1,h=5,w=2"] {
        let params: HssParams = p.parse().unwrap();
        let (pk, mut sk) = hss_keygen(&params, Entropy::Seed([2; 32]));
        let store = MemoryStore::new();
        sk.persist_new(&store).unwrap();
        let sig = hss_sign(&mut sk, b"size", &store).unwrap();
        assert_eq!(sig.to_bytes().len(), signature_size(&params), "{p}");
        assert_eq!(sig.encoded_len(), signature_size(&params), "{p}");
        assert_eq!(pk.to_bytes().len(), public_key_size(&params), "{p}");
    }
}

#[test]
fn keygen_is_deterministic_under_fixed_seed() {
    let params = HssParams::uniform(1, 5, 4).unwrap();
    let (a, sa) = hss_keygen(&params, Entropy::Seed([7; 32]));
    let (b, sb) = hss_keygen(&params, Entropy::Seed([7; 32]));
    assert_eq!(a, b);
    assert_eq!(sa.signatures_remaining(), 32);
    assert_eq!(export_state(&sa), export_state(&sb));
    let (c, _) = hss_keygen(&params, Entropy::Seed([8; 32]));
    assert_ne!(a, c);
    let (d, _) = hss_keygen(&params, Entropy::System);
    assert_ne!(a, d);

    let two = HssParams::uniform(2, 5, 5 - 1).unwrap();
    assert_eq!(hss_keygen(&two, Entropy::Seed([7; 32])).1.signatures_remaining(), 1024);
}

#[test]
fn identical_signature_for_identical_message_and_leaf() {
    let params = HssParams::default();
    let sign_first = || {
        let (_, mut sk) = hss_keygen(&params, Entropy::Seed([3; 32]));
        let store = MemoryStore::new();
        sk.persist_new(&store).unwrap();
        hss_sign(&mut sk, b"same", &store).unwrap().to_bytes()
    };
    assert_eq!(sign_first(), sign_first());
}

#[test]
fn system_randomizer_differs_between_keys_with_same_message() {
    let params = HssParams::uniform(1, 5, 4).unwrap();
    let (pk, mut sk) = hss_keygen(&params, Entropy::System);
    assert_eq!(sk.randomizer(), RandomizerMode::System);
    let store = MemoryStore::new();
    sk.persist_new(&store).unwrap();
    let a = hss_sign(&mut sk, b"m", &store).unwrap();
    let b = hss_sign(&mut sk, b"m", &store).unwrap();
    assert_ne!(a.last.ots.c, b.last.ots.c);
    assert!(hss_verify(&pk, b"m", &a).is_ok() && hss_verify(&pk, b"m", &b).is_ok());
}

#[test]
fn exhausts_after_exactly_two_to_the_h() {
    let params = HssParams::uniform(1, 5, 4).unwrap();
    let (pk, mut sk) = hss_keygen(&params, Entropy::Seed([1; 32]));
    let store = MemoryStore::new();
    sk.persist_new(&store).unwrap();
    let mut seen = HashSet::new();
    for i in 0..32u32 {
        let msg = i.to_be_bytes();
        let sig = hss_sign(&mut sk, &msg, &store).unwrap();
        assert!(seen.insert(sig.leaf_index()));
        assert_eq!(hss_verify(&pk, &msg, &sig), Ok(()));
    }
    assert_eq!(sk.signatures_remaining(), 0);
    assert_eq!(hss_sign(&mut sk, b"33rd", &store).unwrap_err(), LmsError::KeyExhausted);
}

#[test]
fn second_handle_on_same_file_is_stale() {
    let dir = tempfile::tempdir().unwrap();
    let store = FileStore::new(dir.path().join("key.state"));
    let (_, sk) = hss_keygen(&HssParams::uniform(1, 5, 4).unwrap(), Entropy::Seed([4; 32]));
    sk.persist_new(&store).unwrap();
    assert!(sk.persist_new(&store).is_err(), "store must not be re-initialized");

    let mut a = HssPrivateState::load(&store).unwrap();
    let mut b = HssPrivateState::load(&store).unwrap();
    hss_sign(&mut a, b"first", &store).unwrap();
    assert!(matches!(
        hss_sign(&mut b, b"second", &store),
        Err(LmsError::StaleState { in_memory: 0, persisted: Some(1) })
    ));
    // The high-water mark catches a restored older state file.
    let old = export_state(&b);
    std::fs::write(store.path(), &old).unwrap();
    assert!(matches!(
        HssPrivateState::load(&store),
        Err(LmsError::StaleState { in_memory: 0, persisted: Some(1) })
    ));
}

#[test]
fn tampered_state_is_corrupt() {
    let (_, sk) = hss_keygen(&HssParams::uniform(1, 5, 4).unwrap(), Entropy::Seed([4; 32]));
    let mut blob = export_state(&sk);
    let mid = blob.len() / 2;
    blob[mid] ^= 0x40;
    assert!(matches!(import_state(&blob, None), Err(LmsError::CorruptState(_))));
}

#[test]
fn randomized_crash_schedules_never_reuse_a_leaf() {
    let params = HssParams::uniform(1, 5, 4).unwrap();
    let (pk, template) = hss_keygen(&params, Entropy::Seed([9; 32]));
    let fresh = export_state(&template);
    for schedule in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(schedule);
        let store = FlakyStore::default();
        import_state(&fresh, None).unwrap().persist_new(&store).unwrap();
        let mut sk = HssPrivateState::load(&store).unwrap();
        let mut released = Vec::new();
        for step in 0..60 {
            let roll: u8 = rng.gen_range(0..10);
            match roll {
                0 => store.faults.lock().unwrap().push_back(Fault::BeforeWrite),
                1 => store.faults.lock().unwrap().push_back(Fault::AfterWrite),
                2 => {
                    // Crash after persist: the signature never leaves the process.
                    let _ = hss_sign(&mut sk, b"lost", &store);
                    sk = HssPrivateState::load(&store).unwrap();
                    continue;
                }
                3 => {
                    sk = import_state(&export_state(&sk), None).unwrap();
                    continue;
                }
                _ => {}
            }
            let msg = format!("{schedule}/{step}");
            match hss_sign(&mut sk, msg.as_bytes(), &store) {
                Ok(sig) => {
                    assert_eq!(hss_verify(&pk, msg.as_bytes(), &sig), Ok(()));
                    released.push(sig.leaf_index());
                }
                Err(LmsError::KeyExhausted) => break,
                Err(LmsError::StorageFailure(_)) | Err(LmsError::StaleState { .. }) => {
                    sk = HssPrivateState::load(&store).unwrap();
                }
                Err(e) => panic!("unexpected {e}"),
            }
        }
        let unique: HashSet<_> = released.iter().collect();
        assert_eq!(unique.len(), released.len(), "schedule {schedule}: {released:?}");
    }
}

#[test]
fn leaf_uniqueness_across_subtrees_with_reloads() {
    let params = HssParams::uniform(2, 5, 8).unwrap();
    let (pk, sk) = hss_keygen(&params, Entropy::Seed([6; 32]));
    let dir = tempfile::tempdir().unwrap();
    let store = FileStore::new(dir.path().join("s"));
    sk.persist_new(&store).unwrap();
    let mut seen = HashSet::new();
    let mut sk = HssPrivateState::load(&store).unwrap();
    for i in 0..70u32 {
        if i % 9 == 0 {
            sk = HssPrivateState::load(&store).unwrap();
        }
        let sig = hss_sign(&mut sk, &i.to_le_bytes(), &store).unwrap();
        assert!(hss_verify(&pk, &i.to_le_bytes(), &sig).is_ok());
        assert!(seen.insert((sig.bottom_tree_id().unwrap(), sig.leaf_index())));
    }
    assert_eq!(sk.signatures_remaining(), 1024 - 70);
}

#[test]
fn malformed_inputs_reject_with_reason() {
    let (pk, mut sk) = hss_keygen(&HssParams::default(), Entropy::Seed([5; 32]));
    let store = MemoryStore::new();
    sk.persist_new(&store).unwrap();
    let sig = hss_sign(&mut sk, b"x", &store).unwrap().to_bytes();
    assert!(matches!(HssSignature::from_bytes(&[]), Err(Reject::Malformed(_))));
    let mut longer = sig.clone();
    longer.push(0);
    assert!(matches!(HssSignature::from_bytes(&longer), Err(Reject::Malformed(_))));
    assert!(HssPublicKey::from_bytes(&pk.to_bytes()[..59]).is_err());

    // A one-level key cannot accept a two-level signature.
    let (pk1, _) = hss_keygen(&HssParams::uniform(1, 5, 4).unwrap(), Entropy::Seed([5; 32]));
    let parsed = HssSignature::from_bytes(&sig).unwrap();
    assert_eq!(hss_verify(&pk1, b"x", &parsed), Err(Reject::LevelMismatch));
    assert_eq!(Reject::LevelMismatch.code(), "level-mismatch");

    // Every single-bit flip of the signature is caught, either at parse time or at verify.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let bit = rng.gen_range(0..sig.len() * 8);
        let verdict = HssSignature::from_bytes(&flip_bit(&sig, bit))
            .and_then(|s| hss_verify(&pk, b"x", &s));
        assert!(verdict.is_err(), "bit {bit}");
    }
}

/// Digits read bit by bit from an expanded bit string; independent of `coef`.
fn brute_force_digits(bytes: &[u8], w: usize) -> Vec<u32> {
    let bits: Vec<u32> = bytes
        .iter()
        .flat_map(|b| (0..8).rev().map(move |i| ((b >> i) & 1) as u32))
        .collect();
    bits.chunks(w)
        .map(|c| c.iter().fold(0, |acc, b| acc * 2 + b))
        .collect()
}

proptest! {
    #[test]
    fn checksum_equals_direct_sum(bytes in proptest::collection::vec(any::<u8>(), 32), wi in 0usize..4) {
        let typ = LmotsType::ALL[wi];
        let prm = typ.params();
        let digits = brute_force_digits(&bytes, prm.w as usize);
        let via_coef: Vec<u32> = (0..prm.message_digits()).map(|i| coef(&bytes, i, prm.w)).collect();
        prop_assert_eq!(&digits, &via_coef);
        let direct: u32 = digits.iter().map(|d| (1u32 << prm.w) - 1 - d).sum();
        prop_assert_eq!(lmots_checksum(&digits, &prm) as u32, (direct << prm.ls) & 0xffff);
    }
}

#[test]
fn deterministic_output_matches_frozen_interop_vectors() {
    // Accepted by the independent verifier in tests/oracles.
    for line in read_data("hss_interop.txt").lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let params: HssParams = f[0].parse().unwrap();
        let (pk, mut sk) = hss_keygen(&params, Entropy::Seed([1; 32]));
        assert_eq!(hex::encode(pk.to_bytes()), f[1]);
        let store = MemoryStore::new();
        sk.persist_new(&store).unwrap();
        for _ in 0..3 {
            hss_sign(&mut sk, b"x", &store).unwrap();
        }
        let sig = hss_sign(&mut sk, b"interop", &store).unwrap();
        assert_eq!(hex::encode(sig.to_bytes()), f[2], "{}", f[0]);
    }
}
