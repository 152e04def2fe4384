// SPDX-License-Identifier: Apache-2.0

//! Recorded reference figures, embedded as a long-format CSV
//! (`table,row,column,value,note`) and pinned by SHA-256.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::hashes::{digest, DigestAlg};
use crate::sigsuite::SchemeId;

pub const DATASET_CSV: &str = include_str!("../../data/recorded_constants.csv");
pub const DATASET_SHA256: &str = "371718cd4d6bb1146cc0e2dd805029174111d72be07b7e253eefb9ecda1388eb";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset checksum {found} does not match pinned {expected}")]
    Checksum { found: String, expected: &'static str },
    #[error("dataset line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("dataset lacks {0}")]
    Missing(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub table: String,
    pub row: String,
    pub column: String,
    pub value: f64,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Board {
    Nrf52840,
    Esp32,
    LonganNano,
}

impl Board {
    pub const ALL: [Board; 3] = [Board::Nrf52840, Board::Esp32, Board::LonganNano];

    pub fn table(self) -> &'static str {
        match self {
            Board::Nrf52840 => "mcu-nrf52840",
            Board::Esp32 => "mcu-esp32",
            Board::LonganNano => "mcu-longan-nano",
        }
    }

    pub fn name(self) -> &'static str {
        self.table().trim_start_matches("mcu-")
    }

    pub fn label(self) -> &'static str {
        match self {
            Board::Nrf52840 => "nRF52840 (Cortex-M4)",
            Board::Esp32 => "ESP32 (WROOM-32)",
            Board::LonganNano => "Longan Nano (RISC-V)",
        }
    }
}

/// One implementation measured on one board. Absent cells were not measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McuRow {
    pub board: Board,
    pub implementation: String,
    pub scheme: SchemeId,
    pub flash_b: Option<u64>,
    pub sign_ms: Option<f64>,
    pub sign_kiloticks: Option<u64>,
    pub sign_stack_b: Option<u64>,
    pub verify_ms: Option<f64>,
    pub verify_kiloticks: Option<u64>,
    pub verify_stack_b: Option<u64>,
}

/// Implementation rows and the scheme each belongs to, in display order.
pub const IMPLEMENTATIONS: [(&str, &str, SchemeId); 7] = [
    ("ed25519-c25519", "Ed25519 (C25519)", SchemeId::Ed25519),
    ("ed25519-monocypher", "Ed25519 (Monocypher)", SchemeId::Ed25519),
    ("ecdsa-p256-tinycrypt", "ECDSA p256 (Tinycrypt)", SchemeId::EcdsaP256),
    ("falcon", "Falcon", SchemeId::Falcon512),
    ("dilithium-dynamic", "Dilithium (Dynamic)", SchemeId::Dilithium),
    ("dilithium-static", "Dilithium (Static)", SchemeId::Dilithium),
    ("lms", "LMS (RFC8554)", SchemeId::HssLms),
];

/// Implementation used for each scheme when composing SUIT costs.
pub fn cost_implementation(scheme: SchemeId) -> &'static str {
    match scheme {
        SchemeId::Ed25519 => "ed25519-c25519",
        SchemeId::EcdsaP256 => "ecdsa-p256-tinycrypt",
        SchemeId::Falcon512 => "falcon",
        SchemeId::Dilithium => "dilithium-dynamic",
        SchemeId::HssLms => "lms",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeRow {
    pub scheme: SchemeId,
    pub private_key_b: u64,
    pub public_key_b: u64,
    pub signature_b: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordedCost {
    pub scheme: SchemeId,
    pub flash_pct: f64,
    pub stack_pct: f64,
    pub transfer_pct: f64,
    pub transfer_crypto_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperConstants {
    pub sizes: Vec<SizeRow>,
    pub mcu: Vec<McuRow>,
    pub sha256_flash_b: u64,
    pub sha3_compact_flash_b: u64,
    pub sha3_fast_flash_b: u64,
    pub sha3_compact_stack_delta_b: i64,
    pub sha3_fast_stack_delta_b: i64,
    pub suit_manifest_bytes: u64,
    pub suit_signature_bytes: u64,
    pub firmware_bytes: u64,
    pub baseline_flash_kb: f64,
    pub baseline_stack_kb: f64,
    pub baseline_transfer_kb: f64,
    pub baseline_transfer_crypto_kb: f64,
    pub recorded_costs: Vec<RecordedCost>,
    pub link_bytes: u64,
    pub link_min_s: f64,
    pub link_max_s: f64,
    pub category_bytes: BTreeMap<String, u64>,
    #[serde(skip)]
    pub records: Vec<Record>,
}

pub fn parse_records(csv_text: &str) -> Result<Vec<Record>, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(false)
        .from_reader(csv_text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<Record>().enumerate() {
        out.push(rec.map_err(|e| DatasetError::Parse {
            line: i + 2,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

struct Lookup<'a>(BTreeMap<(&'a str, &'a str, &'a str), f64>);

impl Lookup<'_> {
    fn get(&self, t: &str, r: &str, c: &str) -> Option<f64> {
        self.0.get(&(t, r, c)).copied()
    }

    fn req(&self, t: &str, r: &str, c: &str) -> Result<f64, DatasetError> {
        self.get(t, r, c).ok_or_else(|| DatasetError::Missing(format!("{t}/{r}/{c}")))
    }

    fn bytes(&self, t: &str, r: &str, c: &str) -> Result<u64, DatasetError> {
        self.req(t, r, c).map(|v| v as u64)
    }
}

impl PaperConstants {
    /// The embedded dataset, after checking it against the pinned digest.
    pub fn load() -> Result<Self, DatasetError> {
        Self::load_checked(DATASET_CSV, DATASET_SHA256)
    }

    pub fn load_checked(csv_text: &str, pinned_sha256: &'static str) -> Result<Self, DatasetError> {
        let found = digest(DigestAlg::Sha2_256, csv_text.as_bytes()).to_hex();
        if found != pinned_sha256 {
            return Err(DatasetError::Checksum {
                found,
                expected: pinned_sha256,
            });
        }
        Self::from_csv(csv_text)
    }

    /// Parses a dataset without the checksum gate.
    pub fn from_csv(csv_text: &str) -> Result<Self, DatasetError> {
        let records = parse_records(csv_text)?;
        let mut map = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if map
                .insert((r.table.as_str(), r.row.as_str(), r.column.as_str()), r.value)
                .is_some()
            {
                return Err(DatasetError::Parse {
                    line: i + 2,
                    reason: format!("duplicate cell {}/{}/{}", r.table, r.row, r.column),
                });
            }
        }
        let l = Lookup(map);

        let sizes = crate::sigsuite::SchemeId::ALL
            .into_iter()
            .map(|s| {
                Ok(SizeRow {
                    scheme: s,
                    private_key_b: l.bytes("sizes", s.name(), "private_key_b")?,
                    public_key_b: l.bytes("sizes", s.name(), "public_key_b")?,
                    signature_b: l.bytes("sizes", s.name(), "signature_b")?,
                })
            })
            .collect::<Result<Vec<_>, DatasetError>>()?;

        let mut mcu = Vec::new();
        for board in Board::ALL {
            for (key, label, scheme) in IMPLEMENTATIONS {
                let t = board.table();
                let u = |c: &str| l.get(t, key, c).map(|v| v as u64);
                let row = McuRow {
                    board,
                    implementation: label.to_string(),
                    scheme,
                    flash_b: u("flash_b"),
                    sign_ms: l.get(t, key, "sign_ms"),
                    sign_kiloticks: u("sign_kiloticks"),
                    sign_stack_b: u("sign_stack_b"),
                    verify_ms: l.get(t, key, "verify_ms"),
                    verify_kiloticks: u("verify_kiloticks"),
                    verify_stack_b: u("verify_stack_b"),
                };
                if row.flash_b.is_some() || row.verify_ms.is_some() {
                    mcu.push(row);
                }
            }
        }

        let recorded_costs = [SchemeId::Falcon512, SchemeId::HssLms, SchemeId::Dilithium]
            .into_iter()
            .map(|s| {
                Ok(RecordedCost {
                    scheme: s,
                    flash_pct: l.req("suit-cost", s.name(), "flash_pct")?,
                    stack_pct: l.req("suit-cost", s.name(), "stack_pct")?,
                    transfer_pct: l.req("suit-cost", s.name(), "transfer_pct")?,
                    transfer_crypto_pct: l.req("suit-cost", s.name(), "transfer_crypto_pct")?,
                })
            })
            .collect::<Result<Vec<_>, DatasetError>>()?;

        let category_bytes = records
            .iter()
            .filter(|r| r.table == "category")
            .map(|r| (r.row.clone(), r.value as u64))
            .collect();

        let base = "ed25519-sha256";
        Ok(PaperConstants {
            sizes,
            mcu,
            sha256_flash_b: l.bytes("hash-flash", "sha-256", "flash_b")?,
            sha3_compact_flash_b: l.bytes("hash-flash", "sha3-256-compact", "flash_b")?,
            sha3_fast_flash_b: l.bytes("hash-flash", "sha3-256-fast", "flash_b")?,
            sha3_compact_stack_delta_b: l.req("hash-stack-delta", "sha3-256-compact", "stack_b")? as i64,
            sha3_fast_stack_delta_b: l.req("hash-stack-delta", "sha3-256-fast", "stack_b")? as i64,
            suit_manifest_bytes: l.bytes("transfer-baseline", "suit-metadata", "bytes")?,
            suit_signature_bytes: l.bytes("transfer-baseline", "suit-signature", "bytes")?,
            firmware_bytes: l.bytes("transfer-baseline", "os-firmware", "bytes")?,
            baseline_flash_kb: l.req("suit-baseline", base, "flash_kb")?,
            baseline_stack_kb: l.req("suit-baseline", base, "stack_kb")?,
            baseline_transfer_kb: l.req("suit-baseline", base, "transfer_kb")?,
            baseline_transfer_crypto_kb: l.req("suit-baseline", base, "transfer_crypto_kb")?,
            recorded_costs,
            link_bytes: l.bytes("link", "ieee802154", "bytes")?,
            link_min_s: l.req("link", "ieee802154", "min_s")?,
            link_max_s: l.req("link", "ieee802154", "max_s")?,
            category_bytes,
            records,
        })
    }

    pub fn mcu_row(&self, board: Board, implementation_key: &str) -> Option<&McuRow> {
        let label = IMPLEMENTATIONS.iter().find(|(k, _, _)| *k == implementation_key)?.1;
        self.mcu
            .iter()
            .find(|r| r.board == board && r.implementation == label)
    }

    /// The Cortex-M4 row used for cost composition of `scheme`.
    pub fn cost_row(&self, scheme: SchemeId) -> &McuRow {
        self.mcu_row(Board::Nrf52840, cost_implementation(scheme))
            .expect("every scheme has a Cortex-M4 row")
    }

    pub fn size(&self, scheme: SchemeId) -> &SizeRow {
        self.sizes.iter().find(|s| s.scheme == scheme).expect("every scheme has a size row")
    }

    pub fn recorded_cost(&self, scheme: SchemeId) -> Option<&RecordedCost> {
        self.recorded_costs.iter().find(|c| c.scheme == scheme)
    }
}

impl std::str::FromStr for Board {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Board::ALL
            .into_iter()
            .find(|b| b.name() == s || b.table() == s)
            .ok_or_else(|| format!("unknown board {s:?} (nrf52840, esp32, longan-nano)"))
    }
}
