// SPDX-License-Identifier: Apache-2.0

//! LM-OTS one-time signatures over SHA-256.

use crate::hashes::{DigestAlg, Hasher};

use super::params::{LmotsParams, LmotsType, HASH_LEN, ID_LEN};
use super::wire::Reader;
use super::Reject;

pub(crate) const D_PBLC: u16 = 0x8080;
pub(crate) const D_MESG: u16 = 0x8181;
pub(crate) const D_LEAF: u16 = 0x8282;
pub(crate) const D_INTR: u16 = 0x8383;

pub(crate) type Node = [u8; HASH_LEN];

pub(crate) fn hash(parts: &[&[u8]]) -> Node {
    let mut h = Hasher::new(DigestAlg::Sha2_256);
    for p in parts {
        h.update(p);
    }
    h.finalize().bytes
}

/// Digit `i` of `s` in base `2^w`, most significant first.
pub fn coef(s: &[u8], i: usize, w: u32) -> u32 {
    let w = w as usize;
    let byte = s[i * w / 8];
    let shift = 8 - (w * (i % (8 / w)) + w);
    ((byte >> shift) as u32) & ((1 << w) - 1)
}

/// Checksum over base-2^w digits, already shifted left by `ls`.
pub fn lmots_checksum(digits: &[u32], params: &LmotsParams) -> u16 {
    let max = params.max_digit();
    let sum: u32 = digits
        .iter()
        .map(|&d| {
            debug_assert!(d <= max, "digit {d} out of range for w={}", params.w);
            max - d
        })
        .sum();
    (sum << params.ls) as u16
}

/// Message digest with the checksum appended, ready for digit extraction.
fn digits_source(q_hash: &Node, params: &LmotsParams) -> Vec<u8> {
    let digits: Vec<u32> = (0..params.message_digits())
        .map(|i| coef(q_hash, i, params.w))
        .collect();
    let mut out = Vec::with_capacity(HASH_LEN + 2);
    out.extend_from_slice(q_hash);
    out.extend_from_slice(&lmots_checksum(&digits, params).to_be_bytes());
    out
}

fn chain(id: &[u8; ID_LEN], q: u32, i: u16, from: u32, to: u32, mut tmp: Node) -> Node {
    let q = q.to_be_bytes();
    let i = i.to_be_bytes();
    for j in from..to {
        tmp = hash(&[id, &q, &i, &[j as u8], &tmp]);
    }
    tmp
}

/// Pseudorandom chain start `x[i]` for leaf `q`, from the tree seed.
fn secret_element(id: &[u8; ID_LEN], q: u32, i: u16, seed: &[u8; HASH_LEN]) -> Node {
    hash(&[id, &q.to_be_bytes(), &i.to_be_bytes(), &[0xff], seed])
}

fn message_hash(id: &[u8; ID_LEN], q: u32, c: &Node, message: &[u8]) -> Node {
    hash(&[id, &q.to_be_bytes(), &D_MESG.to_be_bytes(), c, message])
}

fn public_from_ends(id: &[u8; ID_LEN], q: u32, ends: &[Node]) -> Node {
    let mut h = Hasher::new(DigestAlg::Sha2_256);
    h.update(id);
    h.update(&q.to_be_bytes());
    h.update(&D_PBLC.to_be_bytes());
    for y in ends {
        h.update(y);
    }
    h.finalize().bytes
}

/// One-time public key `K` of leaf `q`.
pub(crate) fn public_key(typ: LmotsType, id: &[u8; ID_LEN], q: u32, seed: &[u8; HASH_LEN]) -> Node {
    let prm = typ.params();
    let ends: Vec<Node> = (0..prm.p as u16)
        .map(|i| chain(id, q, i, 0, prm.max_digit(), secret_element(id, q, i, seed)))
        .collect();
    public_from_ends(id, q, &ends)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtsSignature {
    pub typ: LmotsType,
    pub c: Node,
    pub y: Vec<Node>,
}

impl OtsSignature {
    pub(crate) fn sign(
        typ: LmotsType,
        id: &[u8; ID_LEN],
        q: u32,
        seed: &[u8; HASH_LEN],
        c: Node,
        message: &[u8],
    ) -> Self {
        let prm = typ.params();
        let src = digits_source(&message_hash(id, q, &c, message), &prm);
        let y = (0..prm.p)
            .map(|i| {
                let a = coef(&src, i, prm.w);
                chain(id, q, i as u16, 0, a, secret_element(id, q, i as u16, seed))
            })
            .collect();
        OtsSignature { typ, c, y }
    }

    /// Candidate public key `Kc`; equals `K` exactly when the signature is valid.
    pub(crate) fn candidate_public_key(&self, id: &[u8; ID_LEN], q: u32, message: &[u8]) -> Node {
        let prm = self.typ.params();
        let src = digits_source(&message_hash(id, q, &self.c, message), &prm);
        let ends: Vec<Node> = self
            .y
            .iter()
            .enumerate()
            .map(|(i, y)| {
                let a = coef(&src, i, prm.w);
                chain(id, q, i as u16, a, prm.max_digit(), *y)
            })
            .collect();
        public_from_ends(id, q, &ends)
    }

    pub fn encoded_len(&self) -> usize {
        self.typ.params().signature_len()
    }

    pub(crate) fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.typ.code().to_be_bytes());
        out.extend_from_slice(&self.c);
        for y in &self.y {
            out.extend_from_slice(y);
        }
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, Reject> {
        let code = r.u32()?;
        let typ = LmotsType::from_code(code)
            .ok_or_else(|| Reject::Malformed(format!("unknown LM-OTS type {code}")))?;
        let c = r.node()?;
        let y = (0..typ.params().p)
            .map(|_| r.node())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OtsSignature { typ, c, y })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_of_max_digits_is_zero() {
        for t in LmotsType::ALL {
            let prm = t.params();
            let digits = vec![prm.max_digit(); prm.message_digits()];
            assert_eq!(lmots_checksum(&digits, &prm), 0);
        }
    }

    #[test]
    fn checksum_of_zero_digits_w4() {
        let prm = LmotsType::W4.params();
        let digits = vec![0; 64];
        assert_eq!(lmots_checksum(&digits, &prm), 960 << prm.ls);
    }

    #[test]
    fn coef_extracts_big_endian_digits() {
        let s = [0x12, 0x34];
        assert_eq!((0..4).map(|i| coef(&s, i, 4)).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(coef(&s, 0, 8), 0x12);
        assert_eq!((0..8).map(|i| coef(&s[..1], i, 1)).collect::<Vec<_>>(), vec![0, 0, 0, 1, 0, 0, 1, 0]);
        assert_eq!(coef(&s, 3, 2), 2);
    }

    #[test]
    fn one_time_round_trip() {
        let id = [7u8; ID_LEN];
        let seed = [9u8; HASH_LEN];
        for t in [LmotsType::W2, LmotsType::W4, LmotsType::W8] {
            let k = public_key(t, &id, 3, &seed);
            let sig = OtsSignature::sign(t, &id, 3, &seed, [1; 32], b"hello");
            assert_eq!(sig.candidate_public_key(&id, 3, b"hello"), k);
            assert_ne!(sig.candidate_public_key(&id, 3, b"hellp"), k);
            assert_ne!(sig.candidate_public_key(&id, 4, b"hello"), k);
        }
    }
}
