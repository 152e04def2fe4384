// SPDX-License-Identifier: Apache-2.0

//! ECDSA over P-256 with SHA-256 and RFC 6979 nonces.
//!
//! Public keys are the 32-byte x coordinate of a point with even y. Key
//! generation, and signing with an imported scalar, use `d` or `n - d`,
//! whichever yields the even-y point, so the x coordinate alone names the key.

use p256::ecdsa::signature::{Signer, Verifier};
use p256::ecdsa::{Signature, SigningKey, VerifyingKey};
use p256::NonZeroScalar;
use rand::{CryptoRng, RngCore};

use super::VerifyError;

fn even_y(sk: SigningKey) -> SigningKey {
    let odd = sk.verifying_key().to_encoded_point(true).as_bytes()[0] == 0x03;
    if odd {
        SigningKey::from(-*sk.as_nonzero_scalar())
    } else {
        sk
    }
}

fn x_only(sk: &SigningKey) -> [u8; 32] {
    let point = sk.verifying_key().to_encoded_point(true);
    point.as_bytes()[1..].try_into().unwrap()
}

/// Returns `(d, x)` with the point for `d` having even y.
pub fn keygen(rng: &mut (impl RngCore + CryptoRng)) -> ([u8; 32], [u8; 32]) {
    let sk = even_y(SigningKey::from(NonZeroScalar::random(rng)));
    (sk.to_bytes().into(), x_only(&sk))
}

pub fn public_from_private(d: &[u8; 32]) -> Result<[u8; 32], String> {
    let sk = SigningKey::from_bytes(d.into()).map_err(|e| e.to_string())?;
    Ok(x_only(&even_y(sk)))
}

/// `r || s` under the even-y form of `d`.
pub fn sign(d: &[u8; 32], message: &[u8]) -> Result<[u8; 64], String> {
    let sk = SigningKey::from_bytes(d.into()).map_err(|e| e.to_string())?;
    let sig: Signature = even_y(sk).sign(message);
    Ok(sig.to_bytes().into())
}

/// `r || s` under `d` exactly as given, for conformance vectors.
pub fn sign_raw(d: &[u8; 32], message: &[u8]) -> Result<[u8; 64], String> {
    let sk = SigningKey::from_bytes(d.into()).map_err(|e| e.to_string())?;
    let sig: Signature = sk.sign(message);
    Ok(sig.to_bytes().into())
}

pub fn verify(x: &[u8; 32], message: &[u8], signature: &[u8]) -> Result<(), VerifyError> {
    let mut sec1 = [0u8; 33];
    sec1[0] = 0x02;
    sec1[1..].copy_from_slice(x);
    verify_sec1(&sec1, message, signature)
}

/// Verifies against any SEC1-encoded public point.
pub fn verify_sec1(point: &[u8], message: &[u8], signature: &[u8]) -> Result<(), VerifyError> {
    let vk = VerifyingKey::from_sec1_bytes(point).map_err(|_| VerifyError::Malformed("not a P-256 point".into()))?;
    let sig = Signature::from_slice(signature).map_err(|_| VerifyError::Malformed("bad r||s encoding".into()))?;
    vk.verify(message, &sig).map_err(|_| VerifyError::BadSignature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn odd_scalar_is_normalized_consistently() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
        for _ in 0..20 {
            let raw = SigningKey::from(NonZeroScalar::random(&mut rng));
            let d: [u8; 32] = raw.to_bytes().into();
            let x = public_from_private(&d).unwrap();
            let sig = sign(&d, b"m").unwrap();
            assert_eq!(verify(&x, b"m", &sig), Ok(()));
        }
    }
}
