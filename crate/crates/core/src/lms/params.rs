// SPDX-License-Identifier: Apache-2.0

//! Registered SHA-256 parameter sets and their derived quantities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LmsError;

/// Hash output length `n` (LM-OTS) and node size `m` (LMS) for every
/// supported set.
pub const HASH_LEN: usize = 32;

/// Size of the key-pair identifier `I`.
pub const ID_LEN: usize = 16;

/// Serialized LMS public key: type, OTS type, I, T[1].
pub const LMS_PUBLIC_KEY_LEN: usize = 4 + 4 + ID_LEN + HASH_LEN;

/// Serialized HSS public key: L followed by the top-level LMS public key.
pub const HSS_PUBLIC_KEY_LEN: usize = 4 + LMS_PUBLIC_KEY_LEN;

pub const MAX_LEVELS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LmotsType {
    W1,
    W2,
    W4,
    W8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LmotsParams {
    pub w: u32,
    pub n: usize,
    pub p: usize,
    pub ls: u32,
}

impl LmotsParams {
    /// Chain count and checksum shift for `n = 32`, derived the way RFC 8554
    /// appendix B does rather than read from a table.
    pub fn derive(w: u32) -> Self {
        let n = HASH_LEN;
        let u = (8 * n as u32).div_ceil(w);
        let max_sum = ((1u32 << w) - 1) * u;
        let bits = u32::BITS - max_sum.leading_zeros(); // floor(lg(max_sum)) + 1
        let v = bits.div_ceil(w);
        LmotsParams {
            w,
            n,
            p: (u + v) as usize,
            ls: 16 - v * w,
        }
    }

    pub fn max_digit(&self) -> u32 {
        (1 << self.w) - 1
    }

    /// Number of message digits, excluding the checksum digits.
    pub fn message_digits(&self) -> usize {
        8 * self.n / self.w as usize
    }

    pub fn signature_len(&self) -> usize {
        4 + self.n + self.p * self.n
    }
}

impl LmotsType {
    pub const ALL: [LmotsType; 4] = [LmotsType::W1, LmotsType::W2, LmotsType::W4, LmotsType::W8];

    pub fn code(self) -> u32 {
        match self {
            LmotsType::W1 => 1,
            LmotsType::W2 => 2,
            LmotsType::W4 => 3,
            LmotsType::W8 => 4,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.code() == code)
    }

    pub fn w(self) -> u32 {
        match self {
            LmotsType::W1 => 1,
            LmotsType::W2 => 2,
            LmotsType::W4 => 4,
            LmotsType::W8 => 8,
        }
    }

    pub fn from_w(w: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.w() == w)
    }

    pub fn params(self) -> LmotsParams {
        LmotsParams::derive(self.w())
    }
}

impl fmt::Display for LmotsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LMOTS_SHA256_N32_W{}", self.w())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LmsType {
    H5,
    H10,
    H15,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LmsParams {
    pub h: u32,
    pub m: usize,
}

impl LmsParams {
    pub fn leaves(&self) -> u64 {
        1u64 << self.h
    }
}

impl LmsType {
    pub const ALL: [LmsType; 3] = [LmsType::H5, LmsType::H10, LmsType::H15];

    pub fn code(self) -> u32 {
        match self {
            LmsType::H5 => 5,
            LmsType::H10 => 6,
            LmsType::H15 => 7,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.code() == code)
    }

    pub fn height(self) -> u32 {
        match self {
            LmsType::H5 => 5,
            LmsType::H10 => 10,
            LmsType::H15 => 15,
        }
    }

    pub fn from_height(h: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.height() == h)
    }

    pub fn params(self) -> LmsParams {
        LmsParams {
            h: self.height(),
            m: HASH_LEN,
        }
    }
}

impl fmt::Display for LmsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LMS_SHA256_M32_H{}", self.height())
    }
}

/// One level of an HSS hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelParams {
    pub lms: LmsType,
    pub ots: LmotsType,
}

impl LevelParams {
    pub fn new(lms: LmsType, ots: LmotsType) -> Self {
        LevelParams { lms, ots }
    }

    pub fn lms_signature_len(&self) -> usize {
        4 + self.ots.params().signature_len() + 4 + self.lms.height() as usize * HASH_LEN
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HssParams {
    levels: Vec<LevelParams>,
}

impl HssParams {
    pub fn new(levels: Vec<LevelParams>) -> Result<Self, LmsError> {
        if levels.is_empty() || levels.len() > MAX_LEVELS {
            return Err(LmsError::InvalidParams(format!(
                "HSS supports 1..={MAX_LEVELS} levels, got {}",
                levels.len()
            )));
        }
        Ok(HssParams { levels })
    }

    /// Same LMS/LM-OTS pair at every level.
    pub fn uniform(levels: usize, h: u32, w: u32) -> Result<Self, LmsError> {
        let lms = LmsType::from_height(h)
            .ok_or_else(|| LmsError::InvalidParams(format!("unsupported tree height {h}")))?;
        let ots = LmotsType::from_w(w)
            .ok_or_else(|| LmsError::InvalidParams(format!("unsupported Winternitz width {w}")))?;
        Self::new(vec![LevelParams::new(lms, ots); levels])
    }

    pub fn levels(&self) -> &[LevelParams] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Total one-time signatures available to the bottom level.
    pub fn capacity(&self) -> u64 {
        self.levels.iter().map(|l| 1u64 << l.lms.height()).product()
    }
}

/// Two levels of H5/W4: a 60-byte public key and a 4756-byte signature.
impl Default for HssParams {
    fn default() -> Self {
        HssParams {
            levels: vec![LevelParams::new(LmsType::H5, LmotsType::W4); 2],
        }
    }
}

impl fmt::Display for HssParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={}", self.levels.len())?;
        for l in &self.levels {
            write!(f, " h{}/w{}", l.lms.height(), l.ots.w())?;
        }
        Ok(())
    }
}

/// Parses `L=2,h=5,w=4` (uniform) or `h5w4/h5w8` (per level).
impl FromStr for HssParams {
    type Err = LmsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LmsError::InvalidParams(format!("cannot parse HSS parameters `{s}`"));
        let s = s.trim();
        if s.contains('=') {
            let (mut l, mut h, mut w) = (2usize, 5u32, 4u32);
            for part in s.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(bad)?;
                match k.trim().to_ascii_lowercase().as_str() {
                    "l" => l = v.trim().parse().map_err(|_| bad())?,
                    "h" => h = v.trim().parse().map_err(|_| bad())?,
                    "w" => w = v.trim().parse().map_err(|_| bad())?,
                    _ => return Err(bad()),
                }
            }
            return Self::uniform(l, h, w);
        }
        let mut levels = Vec::new();
        for part in s.split('/') {
            let part = part.trim().to_ascii_lowercase();
            let rest = part.strip_prefix('h').ok_or_else(bad)?;
            let (h, w) = rest.split_once('w').ok_or_else(bad)?;
            let h: u32 = h.parse().map_err(|_| bad())?;
            let w: u32 = w.parse().map_err(|_| bad())?;
            let lms = LmsType::from_height(h).ok_or_else(bad)?;
            let ots = LmotsType::from_w(w).ok_or_else(bad)?;
            levels.push(LevelParams::new(lms, ots));
        }
        Self::new(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_p_and_ls_match_registered_values() {
        let expect = [(1, 265, 7), (2, 133, 6), (4, 67, 4), (8, 34, 0)];
        for (w, p, ls) in expect {
            let prm = LmotsParams::derive(w);
            assert_eq!((prm.p, prm.ls), (p, ls), "w={w}");
        }
    }

    #[test]
    fn code_points() {
        for t in LmotsType::ALL {
            assert_eq!(LmotsType::from_code(t.code()), Some(t));
        }
        for t in LmsType::ALL {
            assert_eq!(LmsType::from_code(t.code()), Some(t));
        }
        assert_eq!(LmsType::from_code(8), None);
        assert_eq!(LmotsType::from_code(0), None);
    }

    #[test]
    fn level_count_is_bounded() {
        assert!(HssParams::new(vec![]).is_err());
        let l = LevelParams::new(LmsType::H5, LmotsType::W4);
        assert!(HssParams::new(vec![l; 3]).is_err());
        assert_eq!(HssParams::new(vec![l; 2]).unwrap().capacity(), 1024);
    }

    #[test]
    fn parses_both_spellings() {
        assert_eq!("L=2,h=5,w=4".parse::<HssParams>().unwrap(), HssParams::default());
        let p: HssParams = "h10w4/h5w8".parse().unwrap();
        assert_eq!(p.levels()[0], LevelParams::new(LmsType::H10, LmotsType::W4));
        assert_eq!(p.levels()[1], LevelParams::new(LmsType::H5, LmotsType::W8));
        assert!("h6w4".parse::<HssParams>().is_err());
        assert!("L=1,h=5,w=3".parse::<HssParams>().is_err());
    }
}
