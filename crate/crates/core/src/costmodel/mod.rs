// SPDX-License-Identifier: Apache-2.0

//! Size and network-cost model for SUIT updates under each signature
//! scheme, built on recorded reference figures.
//!
//! Costs are composed against an Ed25519 (C25519) + SHA-256 baseline on a
//! Cortex-M4 board:
//!
//! * manifest total = recorded metadata + signature bytes;
//! * update image without crypto code = recorded firmware minus the
//!   baseline signature and hash code;
//! * with crypto code, the image also carries the scheme's verifier and
//!   the chosen hash implementation;
//! * flash and stack increases are the scheme and hash deltas over the
//!   recorded SUIT firmware flash and stack.

mod bench;
mod dataset;
mod render;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::sigsuite::{descriptor, SchemeId};

pub use bench::{bench_signatures, BenchConfig, BenchRow, RecordedMcu, DEFAULT_TICK_HZ};
pub use dataset::{
    cost_implementation, parse_records, Board, DatasetError, McuRow, PaperConstants, Record, RecordedCost,
    SizeRow, DATASET_CSV, DATASET_SHA256, IMPLEMENTATIONS,
};
pub use render::{render_bench, render_cost_report, render_key_sizes, render_relative_costs, Format, Table};

/// Allowed gap, in percentage points, between a composed and a recorded
/// relative cost.
pub const RELATIVE_COST_TOLERANCE_PP: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateCategory {
    #[serde(rename = "module-5kB")]
    Module5kB,
    #[serde(rename = "small-50kB-no-crypto")]
    Small50kBNoCrypto,
    #[serde(rename = "small-50kB-with-crypto")]
    Small50kBWithCrypto,
    #[serde(rename = "large-250kB")]
    Large250kB,
}

impl UpdateCategory {
    pub const ALL: [UpdateCategory; 4] = [
        UpdateCategory::Module5kB,
        UpdateCategory::Small50kBNoCrypto,
        UpdateCategory::Small50kBWithCrypto,
        UpdateCategory::Large250kB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UpdateCategory::Module5kB => "module-5kB",
            UpdateCategory::Small50kBNoCrypto => "small-50kB-no-crypto",
            UpdateCategory::Small50kBWithCrypto => "small-50kB-with-crypto",
            UpdateCategory::Large250kB => "large-250kB",
        }
    }

    pub fn dataset_key(self) -> &'static str {
        match self {
            UpdateCategory::Module5kB => "module",
            UpdateCategory::Small50kBNoCrypto => "small-no-crypto",
            UpdateCategory::Small50kBWithCrypto => "small-with-crypto",
            UpdateCategory::Large250kB => "large",
        }
    }

    pub fn nominal_bytes(self) -> u64 {
        match self {
            UpdateCategory::Module5kB => 5_000,
            UpdateCategory::Small50kBNoCrypto | UpdateCategory::Small50kBWithCrypto => 50_000,
            UpdateCategory::Large250kB => 250_000,
        }
    }

    /// Whether the shipped image carries the signature and hash code.
    pub fn includes_crypto(self) -> bool {
        matches!(self, UpdateCategory::Small50kBWithCrypto | UpdateCategory::Large250kB)
    }
}

impl fmt::Display for UpdateCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UpdateCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s || c.dataset_key() == s)
            .ok_or_else(|| format!("unknown category {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashChoice {
    Sha256,
    Sha3Compact,
    Sha3Fast,
}

impl HashChoice {
    pub const ALL: [HashChoice; 3] = [HashChoice::Sha256, HashChoice::Sha3Compact, HashChoice::Sha3Fast];

    pub fn name(self) -> &'static str {
        match self {
            HashChoice::Sha256 => "sha-256",
            HashChoice::Sha3Compact => "sha3-256-compact",
            HashChoice::Sha3Fast => "sha3-256-fast",
        }
    }

    pub fn flash_b(self, pc: &PaperConstants) -> u64 {
        match self {
            HashChoice::Sha256 => pc.sha256_flash_b,
            HashChoice::Sha3Compact => pc.sha3_compact_flash_b,
            HashChoice::Sha3Fast => pc.sha3_fast_flash_b,
        }
    }

    pub fn stack_delta_b(self, pc: &PaperConstants) -> i64 {
        match self {
            HashChoice::Sha256 => 0,
            HashChoice::Sha3Compact => pc.sha3_compact_stack_delta_b,
            HashChoice::Sha3Fast => pc.sha3_fast_stack_delta_b,
        }
    }
}

impl fmt::Display for HashChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HashChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sha-256" | "sha256" | "sha2-256" => Ok(HashChoice::Sha256),
            "sha3-256-compact" | "sha3-compact" => Ok(HashChoice::Sha3Compact),
            "sha3-256-fast" | "sha3-fast" | "sha3-256" => Ok(HashChoice::Sha3Fast),
            _ => Err(format!("unknown hash implementation {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManifestTotal {
    pub scheme: SchemeId,
    pub total_bytes: u64,
    /// Relative to the Ed25519 total.
    pub ratio: f64,
}

fn baseline_manifest(pc: &PaperConstants) -> u64 {
    pc.suit_manifest_bytes + descriptor(SchemeId::Ed25519).signature_bytes as u64
}

/// Recorded metadata plus the scheme's signature.
pub fn manifest_total(pc: &PaperConstants, scheme: SchemeId) -> ManifestTotal {
    let total = pc.suit_manifest_bytes + descriptor(scheme).signature_bytes as u64;
    ManifestTotal {
        scheme,
        total_bytes: total,
        ratio: total as f64 / baseline_manifest(pc) as f64,
    }
}

/// Truncates to two decimals, the way the recorded ratios are quoted.
pub fn truncate2(x: f64) -> f64 {
    (x * 100.0 + 1e-9).floor() / 100.0
}

/// Signature plus hash code in the baseline image.
fn baseline_crypto_b(pc: &PaperConstants) -> u64 {
    pc.cost_row(SchemeId::Ed25519).flash_b.unwrap() + pc.sha256_flash_b
}

/// Update image without any crypto code for `category`.
fn image_without_crypto(pc: &PaperConstants, category: UpdateCategory) -> u64 {
    let nominal = pc.category_bytes[category.dataset_key()];
    match category {
        UpdateCategory::Module5kB => nominal,
        // The measured ~50 kB firmware stands in for the small categories.
        UpdateCategory::Small50kBNoCrypto | UpdateCategory::Small50kBWithCrypto => {
            pc.firmware_bytes - baseline_crypto_b(pc)
        }
        UpdateCategory::Large250kB => nominal - baseline_crypto_b(pc),
    }
}

fn crypto_b(pc: &PaperConstants, scheme: SchemeId, hash: HashChoice) -> u64 {
    pc.cost_row(scheme).flash_b.unwrap() + hash.flash_b(pc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferCost {
    pub category: UpdateCategory,
    pub scheme: SchemeId,
    pub hash: HashChoice,
    pub bytes: u64,
    /// Same category with Ed25519 and SHA-256.
    pub baseline_bytes: u64,
    /// Percent over the baseline.
    pub increase_pct: f64,
    pub time_s: (f64, f64),
}

/// Bytes sent for one update: image (with crypto code when the category
/// ships it) plus the signed manifest.
pub fn transfer_cost(pc: &PaperConstants, category: UpdateCategory, scheme: SchemeId, hash: HashChoice) -> TransferCost {
    let bytes_for = |s: SchemeId, h: HashChoice| {
        let mut b = image_without_crypto(pc, category) + manifest_total(pc, s).total_bytes;
        if category.includes_crypto() {
            b += crypto_b(pc, s, h);
        }
        b
    };
    let bytes = bytes_for(scheme, hash);
    let baseline_bytes = bytes_for(SchemeId::Ed25519, HashChoice::Sha256);
    TransferCost {
        category,
        scheme,
        hash,
        bytes,
        baseline_bytes,
        increase_pct: pct(bytes as f64, baseline_bytes as f64),
        time_s: transfer_time(pc, bytes),
    }
}

fn pct(value: f64, base: f64) -> f64 {
    (value / base - 1.0) * 100.0
}

/// Linear link model through the recorded anchor (50 kB in 30 to 60 s).
pub fn transfer_time(pc: &PaperConstants, bytes: u64) -> (f64, f64) {
    let scale = bytes as f64 / pc.link_bytes as f64;
    (scale * pc.link_min_s, scale * pc.link_max_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlashStack {
    pub scheme: SchemeId,
    pub hash: HashChoice,
    pub flash_delta_b: i64,
    pub stack_delta_b: i64,
    pub flash_increase_pct: f64,
    pub stack_increase_pct: f64,
}

/// Flash and stack growth of the SUIT firmware when the baseline signature
/// verifier and hash are swapped for `scheme` and `hash`. Stack uses the
/// verifier's peak, which is what runs on the device.
pub fn flash_stack_report(pc: &PaperConstants, scheme: SchemeId, hash: HashChoice) -> FlashStack {
    let row = pc.cost_row(scheme);
    let base = pc.cost_row(SchemeId::Ed25519);
    let flash_delta = row.flash_b.unwrap() as i64 - base.flash_b.unwrap() as i64
        + hash.flash_b(pc) as i64
        - pc.sha256_flash_b as i64;
    let stack_delta =
        row.verify_stack_b.unwrap() as i64 - base.verify_stack_b.unwrap() as i64 + hash.stack_delta_b(pc);
    FlashStack {
        scheme,
        hash,
        flash_delta_b: flash_delta,
        stack_delta_b: stack_delta,
        flash_increase_pct: flash_delta as f64 / (pc.baseline_flash_kb * 1000.0) * 100.0,
        stack_increase_pct: stack_delta as f64 / (pc.baseline_stack_kb * 1000.0) * 100.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostRow {
    pub scheme: SchemeId,
    pub manifest_bytes: u64,
    pub manifest_ratio: f64,
    pub transfer_bytes: u64,
    pub transfer_crypto_bytes: u64,
    pub transfer_increase_pct: f64,
    pub transfer_crypto_increase_pct: f64,
    pub flash_increase_pct: f64,
    pub stack_increase_pct: f64,
    pub time_s: (f64, f64),
    pub time_crypto_s: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub hash: HashChoice,
    pub baseline_transfer_bytes: u64,
    pub baseline_transfer_crypto_bytes: u64,
    pub rows: Vec<CostRow>,
}

/// Every scheme on the small firmware categories. The Ed25519 row is the
/// baseline and always reads 1.0x / +0%.
pub fn cost_report(pc: &PaperConstants, hash: HashChoice) -> CostReport {
    let rows: Vec<CostRow> = SchemeId::ALL
        .into_iter()
        .map(|s| {
            let h = if s == SchemeId::Ed25519 { HashChoice::Sha256 } else { hash };
            let m = manifest_total(pc, s);
            let t = transfer_cost(pc, UpdateCategory::Small50kBNoCrypto, s, h);
            let tc = transfer_cost(pc, UpdateCategory::Small50kBWithCrypto, s, h);
            let fs = flash_stack_report(pc, s, h);
            CostRow {
                scheme: s,
                manifest_bytes: m.total_bytes,
                manifest_ratio: m.ratio,
                transfer_bytes: t.bytes,
                transfer_crypto_bytes: tc.bytes,
                transfer_increase_pct: t.increase_pct,
                transfer_crypto_increase_pct: tc.increase_pct,
                flash_increase_pct: fs.flash_increase_pct,
                stack_increase_pct: fs.stack_increase_pct,
                time_s: t.time_s,
                time_crypto_s: tc.time_s,
            }
        })
        .collect();
    CostReport {
        hash,
        baseline_transfer_bytes: rows[0].transfer_bytes,
        baseline_transfer_crypto_bytes: rows[0].transfer_crypto_bytes,
        rows,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeCostCell {
    pub scheme: SchemeId,
    pub column: &'static str,
    pub computed_pct: f64,
    pub recorded_pct: f64,
    pub pass: bool,
}

pub const RELATIVE_COST_COLUMNS: [&str; 4] = ["flash", "stack", "transfer", "transfer-w-crypto"];

/// Composed vs recorded relative costs for the three post-quantum schemes
/// with speed-optimized SHA3-256.
pub fn reproduce_relative_costs(pc: &PaperConstants) -> Vec<RelativeCostCell> {
    let report = cost_report(pc, HashChoice::Sha3Fast);
    let mut out = Vec::new();
    for rec in &pc.recorded_costs {
        let row = report.rows.iter().find(|r| r.scheme == rec.scheme).unwrap();
        let pairs = [
            (row.flash_increase_pct, rec.flash_pct),
            (row.stack_increase_pct, rec.stack_pct),
            (row.transfer_increase_pct, rec.transfer_pct),
            (row.transfer_crypto_increase_pct, rec.transfer_crypto_pct),
        ];
        for (column, (computed, recorded)) in RELATIVE_COST_COLUMNS.into_iter().zip(pairs) {
            out.push(RelativeCostCell {
                scheme: rec.scheme,
                column,
                computed_pct: computed,
                recorded_pct: recorded,
                pass: (computed - recorded).abs() <= RELATIVE_COST_TOLERANCE_PP,
            });
        }
    }
    out
}
