// SPDX-License-Identifier: Apache-2.0

use rand::rngs::OsRng;
use rand::RngCore;

use super::ots::{hash, Node};
use super::params::{HssParams, LevelParams, HASH_LEN, HSS_PUBLIC_KEY_LEN, ID_LEN};
use super::state::export_state;
use super::store::{StateStore, StoreError};
use super::tree::{LmsPrivateTree, LmsPublicKey, LmsSignature};
use super::wire::Reader;
use super::{LmsError, Reject};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HssPublicKey {
    pub levels: u32,
    pub top: LmsPublicKey,
}

impl HssPublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HSS_PUBLIC_KEY_LEN);
        out.extend_from_slice(&self.levels.to_be_bytes());
        self.top.write(&mut out);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Reject> {
        let mut r = Reader::new(bytes);
        let levels = r.u32()?;
        if levels == 0 || levels as usize > super::MAX_LEVELS {
            return Err(Reject::Malformed(format!("unsupported level count {levels}")));
        }
        let top = LmsPublicKey::read(&mut r)?;
        r.finish()?;
        Ok(HssPublicKey { levels, top })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HssSignature {
    /// For every level below the top: the parent's signature over the child
    /// public key, and that key.
    pub signed_keys: Vec<(LmsSignature, LmsPublicKey)>,
    pub last: LmsSignature,
}

impl HssSignature {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&(self.signed_keys.len() as u32).to_be_bytes());
        for (sig, key) in &self.signed_keys {
            sig.write(&mut out);
            key.write(&mut out);
        }
        self.last.write(&mut out);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Reject> {
        let mut r = Reader::new(bytes);
        let nspk = r.u32()?;
        if nspk as usize >= super::MAX_LEVELS {
            return Err(Reject::Malformed(format!("{nspk} signed public keys")));
        }
        let mut signed_keys = Vec::with_capacity(nspk as usize);
        for _ in 0..nspk {
            let sig = LmsSignature::read(&mut r)?;
            let key = LmsPublicKey::read(&mut r)?;
            signed_keys.push((sig, key));
        }
        let last = LmsSignature::read(&mut r)?;
        r.finish()?;
        Ok(HssSignature { signed_keys, last })
    }

    pub fn encoded_len(&self) -> usize {
        4 + self
            .signed_keys
            .iter()
            .map(|(s, _)| s.encoded_len() + super::LMS_PUBLIC_KEY_LEN)
            .sum::<usize>()
            + self.last.encoded_len()
    }

    /// Leaf index used in the bottom tree.
    pub fn leaf_index(&self) -> u32 {
        self.last.q
    }

    /// Identifier of the bottom tree when it is carried in the signature.
    pub fn bottom_tree_id(&self) -> Option<[u8; ID_LEN]> {
        self.signed_keys.last().map(|(_, k)| k.id)
    }
}

/// Closed-form HSS signature length.
pub fn signature_size(params: &HssParams) -> usize {
    let levels = params.levels();
    4 + levels.iter().map(LevelParams::lms_signature_len).sum::<usize>()
        + (levels.len() - 1) * super::LMS_PUBLIC_KEY_LEN
}

pub fn public_key_size(_params: &HssParams) -> usize {
    HSS_PUBLIC_KEY_LEN
}

pub fn hss_verify(public: &HssPublicKey, message: &[u8], sig: &HssSignature) -> Result<(), Reject> {
    if sig.signed_keys.len() + 1 != public.levels as usize {
        return Err(Reject::LevelMismatch);
    }
    let mut key = &public.top;
    for (child_sig, child_key) in &sig.signed_keys {
        key.verify(&child_key.to_bytes(), child_sig)?;
        key = child_key;
    }
    key.verify(message, &sig.last)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entropy {
    Seed([u8; HASH_LEN]),
    System,
}

/// Source of the per-signature randomizer `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomizerMode {
    /// Derived from the tree seed and leaf index, for reproducible fixtures.
    Deterministic,
    System,
}

pub struct HssPrivateState {
    pub(crate) params: HssParams,
    pub(crate) seed: [u8; HASH_LEN],
    pub(crate) ids: Vec<[u8; ID_LEN]>,
    pub(crate) q: Vec<u32>,
    pub(crate) generation: u64,
    pub(crate) randomizer: RandomizerMode,
    trees: Vec<LmsPrivateTree>,
    signed_keys: Vec<(LmsSignature, LmsPublicKey)>,
}

impl std::fmt::Debug for HssPrivateState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HssPrivateState")
            .field("params", &self.params)
            .field("q", &self.q)
            .field("generation", &self.generation)
            .field("randomizer", &self.randomizer)
            .finish_non_exhaustive()
    }
}

fn root_material(master: &[u8; HASH_LEN]) -> ([u8; ID_LEN], [u8; HASH_LEN]) {
    let seed = hash(&[b"hss-root-seed", master]);
    let id = hash(&[b"hss-root-id", master]);
    (id[..ID_LEN].try_into().unwrap(), seed)
}

/// Trees and signed child keys implied by `(params, master, q)`. Every
/// non-bottom level must already have used at least one leaf.
fn build_chain(
    params: &HssParams,
    master: &[u8; HASH_LEN],
    q: &[u32],
) -> (Vec<LmsPrivateTree>, Vec<(LmsSignature, LmsPublicKey)>) {
    let (id, seed) = root_material(master);
    let mut trees = vec![LmsPrivateTree::build(params.levels()[0], id, seed)];
    let mut signed = Vec::new();
    extend_chain(params, &mut trees, &mut signed, q);
    (trees, signed)
}

fn extend_chain(
    params: &HssParams,
    trees: &mut Vec<LmsPrivateTree>,
    signed: &mut Vec<(LmsSignature, LmsPublicKey)>,
    q: &[u32],
) {
    for level in trees.len()..params.level_count() {
        let parent = &trees[level - 1];
        let leaf = q[level - 1] - 1;
        let (id, seed) = parent.child_material(leaf);
        let child = LmsPrivateTree::build(params.levels()[level], id, seed);
        let child_pub = child.public_key();
        let sig = parent.sign(leaf, parent.deterministic_c(leaf), &child_pub.to_bytes());
        signed.push((sig, child_pub));
        trees.push(child);
    }
}

/// Next leaf plan: the advanced index vector and the bottom leaf it reserves.
fn plan_next(params: &HssParams, q: &[u32]) -> Option<(Vec<u32>, u32)> {
    let caps: Vec<u32> = params.levels().iter().map(|l| 1u32 << l.lms.height()).collect();
    let bottom = q.len() - 1;
    let mut next = q.to_vec();
    if next[bottom] < caps[bottom] {
        let leaf = next[bottom];
        next[bottom] += 1;
        return Some((next, leaf));
    }
    let spare = (0..bottom).rev().find(|&i| next[i] < caps[i])?;
    next[spare] += 1;
    for v in next.iter_mut().take(bottom).skip(spare + 1) {
        *v = 1;
    }
    next[bottom] = 1;
    Some((next, 0))
}

pub(crate) fn remaining_for(params: &HssParams, q: &[u32]) -> u64 {
    let caps: Vec<u64> = params.levels().iter().map(|l| 1u64 << l.lms.height()).collect();
    let bottom = q.len() - 1;
    let mut remaining = caps[bottom] - q[bottom] as u64;
    let mut below = caps[bottom];
    for i in (0..bottom).rev() {
        remaining += (caps[i] - q[i] as u64) * below;
        below *= caps[i];
    }
    remaining
}

pub fn hss_keygen(params: &HssParams, entropy: Entropy) -> (HssPublicKey, HssPrivateState) {
    let (seed, randomizer) = match entropy {
        Entropy::Seed(s) => (s, RandomizerMode::Deterministic),
        Entropy::System => {
            let mut s = [0u8; HASH_LEN];
            OsRng.fill_bytes(&mut s);
            (s, RandomizerMode::System)
        }
    };
    let mut q = vec![1u32; params.level_count()];
    *q.last_mut().unwrap() = 0;
    let state = HssPrivateState::from_parts(params.clone(), seed, q, 0, randomizer);
    (state.public_key(), state)
}

impl HssPrivateState {
    pub(crate) fn from_parts(
        params: HssParams,
        seed: [u8; HASH_LEN],
        q: Vec<u32>,
        generation: u64,
        randomizer: RandomizerMode,
    ) -> Self {
        let (trees, signed_keys) = build_chain(&params, &seed, &q);
        let ids = trees.iter().map(|t| t.id).collect();
        HssPrivateState {
            params,
            seed,
            ids,
            q,
            generation,
            randomizer,
            trees,
            signed_keys,
        }
    }

    pub fn params(&self) -> &HssParams {
        &self.params
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Next unused leaf per level.
    pub fn leaf_indices(&self) -> &[u32] {
        &self.q
    }

    pub fn key_ids(&self) -> &[[u8; ID_LEN]] {
        &self.ids
    }

    pub fn randomizer(&self) -> RandomizerMode {
        self.randomizer
    }

    pub fn signatures_remaining(&self) -> u64 {
        remaining_for(&self.params, &self.q)
    }

    pub fn public_key(&self) -> HssPublicKey {
        HssPublicKey {
            levels: self.params.level_count() as u32,
            top: self.trees[0].public_key(),
        }
    }

    /// Writes a freshly generated state to an empty store.
    pub fn persist_new(&self, store: &dyn StateStore) -> Result<(), LmsError> {
        store
            .commit(None, self.generation, &export_state(self))
            .map_err(|e| store_error(e, self.generation))
    }

    /// Loads the persisted state, enforcing the store's high-water mark.
    pub fn load(store: &dyn StateStore) -> Result<Self, LmsError> {
        let blob = store
            .load()
            .map_err(|e| LmsError::StorageFailure(e.to_string()))?
            .ok_or_else(|| LmsError::StorageFailure("store is empty".into()))?;
        let hwm = store
            .high_water()
            .map_err(|e| LmsError::StorageFailure(e.to_string()))?;
        super::import_state(&blob, hwm)
    }
}

fn store_error(e: StoreError, in_memory: u64) -> LmsError {
    match e {
        StoreError::Conflict { persisted } => LmsError::StaleState {
            in_memory,
            persisted,
        },
        StoreError::Io(msg) => LmsError::StorageFailure(msg),
    }
}

/// Signs `message` with the next unused leaf.
///
/// The advanced state is committed to `store` before any signature exists
/// outside this function. On error the in-memory state is left untouched.
pub fn hss_sign(
    state: &mut HssPrivateState,
    message: &[u8],
    store: &dyn StateStore,
) -> Result<HssSignature, LmsError> {
    let (next_q, leaf) = plan_next(&state.params, &state.q).ok_or(LmsError::KeyExhausted)?;
    let persisted = store.generation().map_err(|e| store_error(e, state.generation))?;
    if persisted != Some(state.generation) {
        return Err(LmsError::StaleState {
            in_memory: state.generation,
            persisted,
        });
    }

    let bottom = state.params.level_count() - 1;
    // Levels whose tree changes when a parent leaf is consumed.
    let first_new = (0..bottom).find(|&i| next_q[i] != state.q[i]).map(|i| i + 1);
    let (trees, signed_keys) = match first_new {
        Some(level) => {
            let mut trees = state.trees[..level].to_vec();
            let mut signed = state.signed_keys[..level - 1].to_vec();
            extend_chain(&state.params, &mut trees, &mut signed, &next_q);
            (Some(trees), Some(signed))
        }
        None => (None, None),
    };

    let next = HssPrivateState {
        params: state.params.clone(),
        seed: state.seed,
        ids: trees
            .as_ref()
            .map(|t| t.iter().map(|t| t.id).collect())
            .unwrap_or_else(|| state.ids.clone()),
        q: next_q,
        generation: state.generation + 1,
        randomizer: state.randomizer,
        trees: Vec::new(),
        signed_keys: Vec::new(),
    };
    store
        .commit(Some(state.generation), next.generation, &export_state(&next))
        .map_err(|e| store_error(e, state.generation))?;

    // Committed: install the new state, then produce the signature.
    state.ids = next.ids;
    state.q = next.q;
    state.generation = next.generation;
    if let (Some(t), Some(s)) = (trees, signed_keys) {
        state.trees = t;
        state.signed_keys = s;
    }
    let tree = &state.trees[bottom];
    let c: Node = match state.randomizer {
        RandomizerMode::Deterministic => tree.deterministic_c(leaf),
        RandomizerMode::System => {
            let mut c = [0u8; HASH_LEN];
            OsRng.fill_bytes(&mut c);
            c
        }
    };
    Ok(HssSignature {
        signed_keys: state.signed_keys.clone(),
        last: tree.sign(leaf, c, message),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lms::{LmotsType, LmsType, MemoryStore};

    #[test]
    fn plan_walks_into_next_subtree() {
        let p = HssParams::uniform(2, 5, 4).unwrap();
        assert_eq!(plan_next(&p, &[1, 0]), Some((vec![1, 1], 0)));
        assert_eq!(plan_next(&p, &[1, 32]), Some((vec![2, 1], 0)));
        assert_eq!(plan_next(&p, &[32, 32]), None);
        let single = HssParams::uniform(1, 5, 4).unwrap();
        assert_eq!(plan_next(&single, &[31]), Some((vec![32], 31)));
        assert_eq!(plan_next(&single, &[32]), None);
    }

    #[test]
    fn remaining_counts() {
        let p = HssParams::uniform(2, 5, 4).unwrap();
        assert_eq!(remaining_for(&p, &[1, 0]), 1024);
        assert_eq!(remaining_for(&p, &[1, 32]), 992);
        assert_eq!(remaining_for(&p, &[32, 32]), 0);
    }

    #[test]
    fn crossing_subtree_boundary_keeps_verifying() {
        let params = HssParams::new(vec![
            LevelParams::new(LmsType::H5, LmotsType::W8),
            LevelParams::new(LmsType::H5, LmotsType::W8),
        ])
        .unwrap();
        let (pk, mut sk) = hss_keygen(&params, Entropy::Seed([5; 32]));
        sk.q[1] = 31;
        sk.generation = 0;
        let store = MemoryStore::new();
        sk.persist_new(&store).unwrap();
        let a = hss_sign(&mut sk, b"a", &store).unwrap();
        let b = hss_sign(&mut sk, b"b", &store).unwrap();
        assert_eq!((a.leaf_index(), b.leaf_index()), (31, 0));
        assert_ne!(a.bottom_tree_id(), b.bottom_tree_id());
        assert_eq!(hss_verify(&pk, b"a", &a), Ok(()));
        assert_eq!(hss_verify(&pk, b"b", &b), Ok(()));
        assert_eq!(sk.leaf_indices(), &[2, 1]);
    }
}
