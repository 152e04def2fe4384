// SPDX-License-Identifier: Apache-2.0

//! Single LMS Merkle tree over LM-OTS leaves.

use super::ots::{self, hash, Node, OtsSignature, D_INTR, D_LEAF};
use super::params::{LevelParams, LmotsType, LmsType, HASH_LEN, ID_LEN, LMS_PUBLIC_KEY_LEN};
use super::wire::Reader;
use super::Reject;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmsPublicKey {
    pub lms: LmsType,
    pub ots: LmotsType,
    pub id: [u8; ID_LEN],
    pub root: Node,
}

impl LmsPublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(LMS_PUBLIC_KEY_LEN);
        self.write(&mut out);
        out
    }

    pub(crate) fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.lms.code().to_be_bytes());
        out.extend_from_slice(&self.ots.code().to_be_bytes());
        out.extend_from_slice(&self.id);
        out.extend_from_slice(&self.root);
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, Reject> {
        let code = r.u32()?;
        let lms = LmsType::from_code(code)
            .ok_or_else(|| Reject::Malformed(format!("unknown LMS type {code}")))?;
        let code = r.u32()?;
        let ots = LmotsType::from_code(code)
            .ok_or_else(|| Reject::Malformed(format!("unknown LM-OTS type {code}")))?;
        Ok(LmsPublicKey {
            lms,
            ots,
            id: r.id()?,
            root: r.node()?,
        })
    }

    /// Checks `sig` over `message`; the RFC 8554 algorithm 6a root recomputation.
    pub fn verify(&self, message: &[u8], sig: &LmsSignature) -> Result<(), Reject> {
        if sig.lms != self.lms || sig.ots.typ != self.ots {
            return Err(Reject::TypeMismatch);
        }
        let h = self.lms.height();
        if u64::from(sig.q) >= 1u64 << h || sig.path.len() != h as usize {
            return Err(Reject::Malformed(format!("leaf index {} out of range", sig.q)));
        }
        let kc = sig.ots.candidate_public_key(&self.id, sig.q, message);
        let mut node_num = (1u32 << h) + sig.q;
        let mut tmp = hash(&[&self.id, &node_num.to_be_bytes(), &D_LEAF.to_be_bytes(), &kc]);
        for sibling in &sig.path {
            let parent = (node_num / 2).to_be_bytes();
            tmp = if node_num % 2 == 1 {
                hash(&[&self.id, &parent, &D_INTR.to_be_bytes(), sibling, &tmp])
            } else {
                hash(&[&self.id, &parent, &D_INTR.to_be_bytes(), &tmp, sibling])
            };
            node_num /= 2;
        }
        if tmp == self.root {
            Ok(())
        } else {
            Err(Reject::InvalidSignature)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmsSignature {
    pub q: u32,
    pub ots: OtsSignature,
    pub lms: LmsType,
    pub path: Vec<Node>,
}

impl LmsSignature {
    pub fn encoded_len(&self) -> usize {
        LevelParams::new(self.lms, self.ots.typ).lms_signature_len()
    }

    pub(crate) fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.q.to_be_bytes());
        self.ots.write(out);
        out.extend_from_slice(&self.lms.code().to_be_bytes());
        for node in &self.path {
            out.extend_from_slice(node);
        }
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, Reject> {
        let q = r.u32()?;
        let ots = OtsSignature::read(r)?;
        let code = r.u32()?;
        let lms = LmsType::from_code(code)
            .ok_or_else(|| Reject::Malformed(format!("unknown LMS type {code}")))?;
        let path = (0..lms.height())
            .map(|_| r.node())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LmsSignature { q, ots, lms, path })
    }
}

/// Public key of the single LMS tree generated from `seed` and `id` under
/// the RFC 8554 appendix A derivation.
pub fn lms_public_key_from_seed(level: LevelParams, id: [u8; ID_LEN], seed: [u8; HASH_LEN]) -> LmsPublicKey {
    LmsPrivateTree::build(level, id, seed).public_key()
}

/// Private LMS tree with every node cached; `nodes[1]` is the root.
#[derive(Clone)]
pub(crate) struct LmsPrivateTree {
    pub level: LevelParams,
    pub id: [u8; ID_LEN],
    seed: [u8; HASH_LEN],
    nodes: Vec<Node>,
}

impl LmsPrivateTree {
    pub fn build(level: LevelParams, id: [u8; ID_LEN], seed: [u8; HASH_LEN]) -> Self {
        let h = level.lms.height();
        let leaves = 1usize << h;
        let mut nodes = vec![[0u8; HASH_LEN]; 2 * leaves];
        for q in 0..leaves {
            let r = (leaves + q) as u32;
            let k = ots::public_key(level.ots, &id, q as u32, &seed);
            nodes[r as usize] = hash(&[&id, &r.to_be_bytes(), &D_LEAF.to_be_bytes(), &k]);
        }
        for r in (1..leaves).rev() {
            nodes[r] = hash(&[
                &id,
                &(r as u32).to_be_bytes(),
                &D_INTR.to_be_bytes(),
                &nodes[2 * r],
                &nodes[2 * r + 1],
            ]);
        }
        LmsPrivateTree { level, id, seed, nodes }
    }

    pub fn public_key(&self) -> LmsPublicKey {
        LmsPublicKey {
            lms: self.level.lms,
            ots: self.level.ots,
            id: self.id,
            root: self.nodes[1],
        }
    }

    pub fn leaves(&self) -> u32 {
        1 << self.level.lms.height()
    }

    /// Randomizer derived from the tree seed; unique per leaf.
    pub fn deterministic_c(&self, q: u32) -> Node {
        hash(&[&self.id, &q.to_be_bytes(), &0xfffcu16.to_be_bytes(), &[0xff], &self.seed])
    }

    /// Seed and identifier for the child tree signed by leaf `q`.
    pub fn child_material(&self, q: u32) -> ([u8; ID_LEN], [u8; HASH_LEN]) {
        let seed = hash(&[&self.id, &q.to_be_bytes(), &0xfffeu16.to_be_bytes(), &[0xff], &self.seed]);
        let id_full = hash(&[&self.id, &q.to_be_bytes(), &0xfffdu16.to_be_bytes(), &[0xff], &self.seed]);
        (id_full[..ID_LEN].try_into().unwrap(), seed)
    }

    pub fn sign(&self, q: u32, c: Node, message: &[u8]) -> LmsSignature {
        debug_assert!(q < self.leaves());
        let ots = OtsSignature::sign(self.level.ots, &self.id, q, &self.seed, c, message);
        let mut r = (self.leaves() + q) as usize;
        let mut path = Vec::with_capacity(self.level.lms.height() as usize);
        while r > 1 {
            path.push(self.nodes[r ^ 1]);
            r /= 2;
        }
        LmsSignature {
            q,
            ots,
            lms: self.level.lms,
            path,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_leaf_verifies_under_root() {
        let level = LevelParams::new(LmsType::H5, LmotsType::W4);
        let tree = LmsPrivateTree::build(level, [3; ID_LEN], [4; HASH_LEN]);
        let pk = tree.public_key();
        for q in 0..tree.leaves() {
            let sig = tree.sign(q, tree.deterministic_c(q), b"msg");
            assert_eq!(pk.verify(b"msg", &sig), Ok(()));
            let mut bytes = Vec::new();
            sig.write(&mut bytes);
            assert_eq!(bytes.len(), level.lms_signature_len());
        }
    }

    #[test]
    fn wrong_index_fails() {
        let level = LevelParams::new(LmsType::H5, LmotsType::W8);
        let tree = LmsPrivateTree::build(level, [3; ID_LEN], [4; HASH_LEN]);
        let mut sig = tree.sign(5, [0; 32], b"m");
        sig.q = 6;
        assert_eq!(tree.public_key().verify(b"m", &sig), Err(Reject::InvalidSignature));
        sig.q = 32;
        assert!(matches!(tree.public_key().verify(b"m", &sig), Err(Reject::Malformed(_))));
    }
}
