// SPDX-License-Identifier: Apache-2.0

//! Falcon-512 (padded, fixed-length signatures) and Dilithium2 through the
//! PQClean bindings.

use pqcrypto_dilithium::dilithium2;
use pqcrypto_falcon::falconpadded512;
use pqcrypto_traits::sign::{DetachedSignature, PublicKey, SecretKey};

use super::{SchemeId, VerifyError};

pub fn keygen(scheme: SchemeId) -> (Vec<u8>, Vec<u8>) {
    match scheme {
        SchemeId::Falcon512 => {
            let (pk, sk) = falconpadded512::keypair();
            (pk.as_bytes().to_vec(), sk.as_bytes().to_vec())
        }
        SchemeId::Dilithium => {
            let (pk, sk) = dilithium2::keypair();
            (pk.as_bytes().to_vec(), sk.as_bytes().to_vec())
        }
        _ => unreachable!("not a PQClean scheme"),
    }
}

pub fn sign(scheme: SchemeId, sk: &[u8], message: &[u8]) -> Result<Vec<u8>, String> {
    match scheme {
        SchemeId::Falcon512 => {
            let sk = falconpadded512::SecretKey::from_bytes(sk).map_err(|e| e.to_string())?;
            Ok(falconpadded512::detached_sign(message, &sk).as_bytes().to_vec())
        }
        SchemeId::Dilithium => {
            let sk = dilithium2::SecretKey::from_bytes(sk).map_err(|e| e.to_string())?;
            Ok(dilithium2::detached_sign(message, &sk).as_bytes().to_vec())
        }
        _ => unreachable!("not a PQClean scheme"),
    }
}

pub fn verify(scheme: SchemeId, pk: &[u8], message: &[u8], sig: &[u8]) -> Result<(), VerifyError> {
    let malformed = |e: pqcrypto_traits::Error| VerifyError::Malformed(e.to_string());
    let ok = match scheme {
        SchemeId::Falcon512 => {
            let pk = falconpadded512::PublicKey::from_bytes(pk).map_err(malformed)?;
            let sig = falconpadded512::DetachedSignature::from_bytes(sig).map_err(malformed)?;
            falconpadded512::verify_detached_signature(&sig, message, &pk).is_ok()
        }
        SchemeId::Dilithium => {
            let pk = dilithium2::PublicKey::from_bytes(pk).map_err(malformed)?;
            let sig = dilithium2::DetachedSignature::from_bytes(sig).map_err(malformed)?;
            dilithium2::verify_detached_signature(&sig, message, &pk).is_ok()
        }
        _ => unreachable!("not a PQClean scheme"),
    };
    if ok {
        Ok(())
    } else {
        Err(VerifyError::BadSignature)
    }
}
