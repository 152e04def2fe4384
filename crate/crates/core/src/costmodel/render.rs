// SPDX-License-Identifier: Apache-2.0

use std::str::FromStr;

use crate::sigsuite::descriptor;

use super::bench::{BenchConfig, BenchRow};
use super::dataset::PaperConstants;
use super::{truncate2, CostReport, RelativeCostCell, RELATIVE_COST_TOLERANCE_PP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(title: &str, headers: &[&str]) -> Self {
        Table {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
        }
    }

    fn text(&self) -> String {
        let cols = self.headers.len();
        let width: Vec<usize> = (0..cols)
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain([self.headers[c].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(i, s)| if i == 0 { format!("{s:<w$}", w = width[i]) } else { format!("{s:>w$}", w = width[i]) })
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = format!("{}\n", self.title);
        out += &line(&self.headers);
        out += &(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n");
        for r in &self.rows {
            out += &line(r);
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

/// Key and signature sizes from the dataset, checked against the registry.
pub fn render_key_sizes(pc: &PaperConstants) -> Table {
    let mut t = Table::new(
        "Private key, public key and signature size (bytes)",
        &["scheme", "private_key_b", "public_key_b", "signature_b", "registry"],
    );
    for s in &pc.sizes {
        let d = descriptor(s.scheme);
        let same = (d.private_key_bytes as u64, d.public_key_bytes as u64, d.signature_bytes as u64)
            == (s.private_key_b, s.public_key_b, s.signature_b);
        t.rows.push(vec![
            s.scheme.to_string(),
            s.private_key_b.to_string(),
            s.public_key_b.to_string(),
            s.signature_b.to_string(),
            if same { "match" } else { "MISMATCH" }.into(),
        ]);
    }
    t
}

pub fn render_relative_costs(cells: &[RelativeCostCell]) -> Table {
    let mut t = Table::new(
        &format!("Relative SUIT cost with SHA3-256 vs Ed25519/SHA-256 (tolerance {RELATIVE_COST_TOLERANCE_PP} pp)"),
        &["scheme", "column", "computed_pct", "recorded_pct", "delta_pp", "verdict"],
    );
    for c in cells {
        t.rows.push(vec![
            c.scheme.to_string(),
            c.column.to_string(),
            format!("{:.2}", c.computed_pct),
            format!("{}", c.recorded_pct),
            format!("{:+.2}", c.computed_pct - c.recorded_pct),
            if c.pass { "PASS" } else { "FAIL" }.into(),
        ]);
    }
    t
}

pub fn render_cost_report(r: &CostReport) -> Table {
    let mut t = Table::new(
        &format!(
            "SUIT update cost, {} for post-quantum rows (baseline transfer {} B, with crypto {} B)",
            r.hash, r.baseline_transfer_bytes, r.baseline_transfer_crypto_bytes
        ),
        &[
            "scheme",
            "manifest_b",
            "ratio",
            "transfer_b",
            "transfer_pct",
            "transfer_crypto_b",
            "transfer_crypto_pct",
            "flash_pct",
            "stack_pct",
            "time_s",
        ],
    );
    for row in &r.rows {
        t.rows.push(vec![
            row.scheme.to_string(),
            row.manifest_bytes.to_string(),
            format!("{:.2}", truncate2(row.manifest_ratio)),
            row.transfer_bytes.to_string(),
            format!("{:+.2}", row.transfer_increase_pct),
            row.transfer_crypto_bytes.to_string(),
            format!("{:+.2}", row.transfer_crypto_increase_pct),
            format!("{:+.2}", row.flash_increase_pct),
            format!("{:+.2}", row.stack_increase_pct),
            format!("{:.0}-{:.0}", row.time_s.0, row.time_s.1),
        ]);
    }
    t
}

/// Host timings next to recorded MCU flash and stack. The `_recorded`
/// columns come from the dataset, not from this machine.
pub fn render_bench(rows: &[BenchRow], cfg: &BenchConfig) -> Table {
    let board = rows
        .iter()
        .find_map(|r| r.recorded.as_ref().map(|m| m.board.label()))
        .unwrap_or("-");
    let mut t = Table::new(
        &format!(
            "Host sign/verify, {} B message, {} reps, ticks at {:.0} MHz; flash/stack recorded on {board}",
            cfg.message_bytes,
            cfg.repetitions,
            cfg.tick_hz / 1e6
        ),
        &[
            "algorithm",
            "flash_b_recorded",
            "sign_ms",
            "sign_kiloticks",
            "sign_stack_b_recorded",
            "verify_ms",
            "verify_kiloticks",
            "verify_stack_b_recorded",
        ],
    );
    for r in rows {
        let rec = r.recorded.as_ref();
        t.rows.push(vec![
            rec.map(|m| format!("{} [{}]", r.scheme, m.implementation))
                .unwrap_or_else(|| r.scheme.to_string()),
            opt(rec.and_then(|m| m.flash_b)),
            format!("{:.3}", r.sign_ms),
            format!("{:.0}", r.sign_kiloticks),
            opt(rec.and_then(|m| m.sign_stack_b)),
            format!("{:.3}", r.verify_ms),
            format!("{:.0}", r.verify_kiloticks),
            opt(rec.and_then(|m| m.verify_stack_b)),
        ]);
    }
    t
}
