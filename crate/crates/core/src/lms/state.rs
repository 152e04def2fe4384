// SPDX-License-Identifier: Apache-2.0

//! Binary state blob: fields below, then a CRC-32 of everything before it.
//!
//! ```text
//! magic "HSST" | version u16 | generation u64 | randomizer u8 | L u8
//! L x (lms type u32 | ots type u32 | I [16] | q u32)
//! seed [32] | signatures_remaining u64 | crc32 u32
//! ```
//!
//! The blob is larger than a bare 64-byte key because it carries the leaf
//! counters and identifiers for every level.

use super::hss::{remaining_for, HssPrivateState, RandomizerMode};
use super::params::{HssParams, LevelParams, LmotsType, LmsType, HASH_LEN, ID_LEN};
use super::LmsError;

pub const STATE_VERSION: u16 = 1;
const MAGIC: &[u8; 4] = b"HSST";
const GENERATION_OFFSET: usize = 6;

pub fn export_state(state: &HssPrivateState) -> Vec<u8> {
    let mut out = Vec::with_capacity(128);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&STATE_VERSION.to_be_bytes());
    out.extend_from_slice(&state.generation.to_be_bytes());
    out.push(match state.randomizer {
        RandomizerMode::Deterministic => 0,
        RandomizerMode::System => 1,
    });
    out.push(state.params.level_count() as u8);
    for ((level, id), q) in state.params.levels().iter().zip(&state.ids).zip(&state.q) {
        out.extend_from_slice(&level.lms.code().to_be_bytes());
        out.extend_from_slice(&level.ots.code().to_be_bytes());
        out.extend_from_slice(id);
        out.extend_from_slice(&q.to_be_bytes());
    }
    out.extend_from_slice(&state.seed);
    out.extend_from_slice(&remaining_for(&state.params, &state.q).to_be_bytes());
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_be_bytes());
    out
}

fn corrupt(msg: impl Into<String>) -> LmsError {
    LmsError::CorruptState(msg.into())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], LmsError> {
        let out = self
            .buf
            .get(self.pos..self.pos + n)
            .ok_or_else(|| corrupt(format!("truncated at offset {}", self.pos)))?;
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, LmsError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, LmsError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, LmsError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Verifies magic, checksum and version; returns the body without the CRC.
fn checked_body(blob: &[u8]) -> Result<&[u8], LmsError> {
    if blob.len() < MAGIC.len() + 2 + 8 + 4 || &blob[..4] != MAGIC {
        return Err(corrupt("bad magic or length"));
    }
    let (body, crc) = blob.split_at(blob.len() - 4);
    if crc32fast::hash(body) != u32::from_be_bytes(crc.try_into().unwrap()) {
        return Err(corrupt("checksum mismatch"));
    }
    let version = u16::from_be_bytes([body[4], body[5]]);
    if version != STATE_VERSION {
        return Err(LmsError::VersionMismatch {
            found: version,
            expected: STATE_VERSION,
        });
    }
    Ok(body)
}

/// Generation of a checked blob, without rebuilding any trees.
pub(crate) fn peek_generation(blob: &[u8]) -> Result<u64, LmsError> {
    let body = checked_body(blob)?;
    Ok(u64::from_be_bytes(
        body[GENERATION_OFFSET..GENERATION_OFFSET + 8].try_into().unwrap(),
    ))
}

/// Rebuilds a private state and validates every invariant. A generation
/// below `high_water` means an older copy of the state was restored.
pub fn import_state(blob: &[u8], high_water: Option<u64>) -> Result<HssPrivateState, LmsError> {
    let body = checked_body(blob)?;
    let mut c = Cursor {
        buf: body,
        pos: GENERATION_OFFSET,
    };
    let generation = c.u64()?;
    if let Some(hwm) = high_water {
        if generation < hwm {
            return Err(LmsError::StaleState {
                in_memory: generation,
                persisted: Some(hwm),
            });
        }
    }
    let randomizer = match c.u8()? {
        0 => RandomizerMode::Deterministic,
        1 => RandomizerMode::System,
        other => return Err(corrupt(format!("randomizer mode {other}"))),
    };
    let l = c.u8()? as usize;
    let mut levels = Vec::with_capacity(l);
    let mut ids = Vec::with_capacity(l);
    let mut q = Vec::with_capacity(l);
    for _ in 0..l {
        let lms = LmsType::from_code(c.u32()?).ok_or_else(|| corrupt("LMS type"))?;
        let ots = LmotsType::from_code(c.u32()?).ok_or_else(|| corrupt("LM-OTS type"))?;
        let id: [u8; ID_LEN] = c.take(ID_LEN)?.try_into().unwrap();
        let leaf = c.u32()?;
        if u64::from(leaf) > 1u64 << lms.height() {
            return Err(corrupt(format!("leaf index {leaf} beyond tree")));
        }
        levels.push(LevelParams::new(lms, ots));
        ids.push(id);
        q.push(leaf);
    }
    let params = HssParams::new(levels).map_err(|e| corrupt(e.to_string()))?;
    if q[..l - 1].iter().any(|&v| v == 0) {
        return Err(corrupt("parent level has no consumed leaf"));
    }
    let seed: [u8; HASH_LEN] = c.take(HASH_LEN)?.try_into().unwrap();
    let remaining = c.u64()?;
    if c.pos != body.len() {
        return Err(corrupt("trailing bytes"));
    }
    if remaining != remaining_for(&params, &q) {
        return Err(corrupt("signatures_remaining inconsistent with leaf indices"));
    }
    let state = HssPrivateState::from_parts(params, seed, q, generation, randomizer);
    if state.ids != ids {
        return Err(corrupt("key identifiers do not match the seed"));
    }
    Ok(state)
}
