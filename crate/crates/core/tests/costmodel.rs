// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, HashSet};

use suitpq::costmodel::*;
use suitpq::lms::HssParams;
use suitpq::sigsuite::{self, descriptor, keygen, registry, SchemeId};

fn pc() -> PaperConstants {
    PaperConstants::load().unwrap()
}

#[test]
fn dataset_checksum_is_pinned() {
    assert!(PaperConstants::load().is_ok());
    let edited = DATASET_CSV.replace("sizes,falcon-512,signature_b,666", "sizes,falcon-512,signature_b,667");
    assert_ne!(edited, DATASET_CSV);
    assert!(matches!(
        PaperConstants::load_checked(&edited, DATASET_SHA256),
        Err(DatasetError::Checksum { .. })
    ));
}

#[test]
fn every_recorded_cell_appears_once() {
    let records = parse_records(DATASET_CSV).unwrap();
    let mut seen = HashSet::new();
    let mut per_table: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &records {
        assert!(seen.insert((&r.table, &r.row, &r.column)), "{r:?}");
        *per_table.entry(r.table.as_str()).or_default() += 1;
    }
    // 3 sizes per scheme; 7 cells per implementation row, minus the cells
    // that were not measured on the RISC-V board.
    assert_eq!(per_table["sizes"], 15);
    assert_eq!(per_table["mcu-nrf52840"], 49);
    assert_eq!(per_table["mcu-esp32"], 49);
    assert_eq!(per_table["mcu-longan-nano"], 36);
    assert_eq!(per_table["hash-flash"], 3);
    assert_eq!(per_table["transfer-baseline"], 3);
    assert_eq!(per_table["suit-baseline"], 4);
    assert_eq!(per_table["suit-cost"], 12);

    let dup = format!("{DATASET_CSV}sizes,ed25519,signature_b,64,\n");
    assert!(matches!(PaperConstants::from_csv(&dup), Err(DatasetError::Parse { .. })));
}

#[test]
fn dataset_sizes_equal_registry_and_live_lengths() {
    let pc = pc();
    for s in &pc.sizes {
        let d = descriptor(s.scheme);
        assert_eq!(
            (s.private_key_b, s.public_key_b, s.signature_b),
            (d.private_key_bytes as u64, d.public_key_bytes as u64, d.signature_bytes as u64)
        );
    }
    for d in registry().iter().filter(|d| d.backend_available) {
        let kp = keygen(d.id).unwrap();
        let sig = sigsuite::sign(d.id, &kp.private, b"m").unwrap();
        assert_eq!(sig.len() as u64, pc.size(d.id).signature_b, "{}", d.id);
        assert_eq!(kp.public.len() as u64, pc.size(d.id).public_key_b, "{}", d.id);
    }
}

#[test]
fn manifest_totals_to_the_byte() {
    let pc = pc();
    let totals: Vec<u64> = [SchemeId::Ed25519, SchemeId::Falcon512, SchemeId::Dilithium, SchemeId::HssLms]
        .into_iter()
        .map(|s| manifest_total(&pc, s).total_bytes)
        .collect();
    assert_eq!(totals, [483, 1085, 2839, 5175]);
    assert_eq!(manifest_total(&pc, SchemeId::Ed25519).ratio, 1.0);
    assert_eq!(truncate2(manifest_total(&pc, SchemeId::Falcon512).ratio), 2.24);
    assert_eq!(truncate2(manifest_total(&pc, SchemeId::Dilithium).ratio), 5.87);
    // total / baseline for the hash-based scheme.
    assert_eq!(truncate2(manifest_total(&pc, SchemeId::HssLms).ratio), 10.71);
}

#[test]
fn transfer_time_is_linear_in_the_anchor() {
    let pc = pc();
    assert_eq!(transfer_time(&pc, 50_000), (30.0, 60.0));
    assert_eq!(transfer_time(&pc, 0), (0.0, 0.0));
    assert_eq!(transfer_time(&pc, 100_000), (60.0, 120.0));
}

#[test]
fn composed_baselines_round_to_recorded_kilobytes() {
    let pc = pc();
    let r = cost_report(&pc, HashChoice::Sha3Fast);
    assert_eq!(r.baseline_transfer_bytes, 46_854);
    assert_eq!(r.baseline_transfer_crypto_bytes, 52_968);
    assert!((r.baseline_transfer_bytes as f64 / 1000.0 - pc.baseline_transfer_kb).abs() < 0.5);
    assert!((r.baseline_transfer_crypto_bytes as f64 / 1000.0 - pc.baseline_transfer_crypto_kb).abs() < 0.5);
}

#[test]
fn relative_costs_within_tolerance() {
    let cells = reproduce_relative_costs(&pc());
    assert_eq!(cells.len(), 12);
    for c in &cells {
        assert!(c.pass, "{} {}: {:.2} vs {}", c.scheme, c.column, c.computed_pct, c.recorded_pct);
    }
}

#[test]
fn frozen_composition_values() {
    // Hand-computed from the dataset; guards against silent formula drift.
    let pc = pc();
    let fs = flash_stack_report(&pc, SchemeId::Falcon512, HashChoice::Sha3Fast);
    assert_eq!(fs.flash_delta_b, 57_613 - 5_106 + 11_548 - 1_008);
    assert_eq!(fs.stack_delta_b, 4_744 - 1_300 - 50);
    let fs = flash_stack_report(&pc, SchemeId::HssLms, HashChoice::Sha3Compact);
    assert_eq!(fs.flash_delta_b, 12_864 - 5_106 + 1_692 - 1_008);
    assert_eq!(fs.stack_delta_b, 1_580 - 1_300 + 50);
    let t = transfer_cost(&pc, UpdateCategory::Small50kBWithCrypto, SchemeId::Dilithium, HashChoice::Sha3Fast);
    assert_eq!(t.bytes, 52_485 - 5_106 - 1_008 + 2_839 + 11_664 + 11_548);
}

#[test]
fn categories() {
    let pc = pc();
    for c in UpdateCategory::ALL {
        assert_eq!(pc.category_bytes[c.dataset_key()], c.nominal_bytes(), "{c}");
        let base = transfer_cost(&pc, c, SchemeId::Ed25519, HashChoice::Sha256);
        assert_eq!(base.increase_pct, 0.0);
        let a = transfer_cost(&pc, c, SchemeId::Falcon512, HashChoice::Sha256);
        let b = transfer_cost(&pc, c, SchemeId::Falcon512, HashChoice::Sha3Fast);
        assert_eq!(a.bytes == b.bytes, !c.includes_crypto(), "{c}");
    }
    let module = transfer_cost(&pc, UpdateCategory::Module5kB, SchemeId::HssLms, HashChoice::Sha3Fast);
    assert_eq!(module.bytes, 5_000 + 5_175);
    let large = transfer_cost(&pc, UpdateCategory::Large250kB, SchemeId::HssLms, HashChoice::Sha3Fast);
    let small = transfer_cost(&pc, UpdateCategory::Small50kBWithCrypto, SchemeId::HssLms, HashChoice::Sha3Fast);
    assert!(large.increase_pct < small.increase_pct);
}

fn bench_cfg() -> BenchConfig {
    BenchConfig {
        repetitions: 5,
        hss_params: HssParams::uniform(1, 5, 4).unwrap(),
        ..BenchConfig::default()
    }
}

#[test]
fn bench_rows_for_required_backends() {
    let pc = pc();
    let cfg = bench_cfg();
    let schemes = sigsuite::required_backends();
    let rows = bench_signatures(&pc, &schemes, &cfg).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.sign_ms > 0.0 && r.verify_ms > 0.0, "{r:?}");
        assert!((r.sign_kiloticks - r.sign_ms * 64.0).abs() < 1e-6 * r.sign_kiloticks.max(1.0));
        let rec = r.recorded.as_ref().unwrap();
        assert_eq!(rec.board, Board::Nrf52840);
    }
    let hss = rows.iter().find(|r| r.scheme == SchemeId::HssLms).unwrap();
    if hss.verify_ms >= hss.sign_ms {
        eprintln!(
            "soft check: hss-lms verify {:.3} ms not below sign {:.3} ms on this host",
            hss.verify_ms, hss.sign_ms
        );
    }
}

#[test]
fn bench_table_is_stable_apart_from_timings() {
    let pc = pc();
    let cfg = bench_cfg();
    let schemes = [SchemeId::Ed25519, SchemeId::EcdsaP256];
    let a = render_bench(&bench_signatures(&pc, &schemes, &cfg).unwrap(), &cfg);
    let b = render_bench(&bench_signatures(&pc, &schemes, &cfg).unwrap(), &cfg);
    assert_eq!(a.headers, b.headers);
    let timing: HashSet<usize> = a
        .headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.ends_with("_ms") || h.ends_with("_kiloticks"))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(timing.len(), 4);
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        for (i, (x, y)) in ra.iter().zip(rb).enumerate() {
            if !timing.contains(&i) {
                assert_eq!(x, y);
            }
        }
    }
    assert!(a.headers.iter().filter(|h| h.ends_with("_recorded")).count() == 3);
}

#[cfg(not(feature = "pq-adapters"))]
#[test]
fn bench_refuses_size_only_schemes() {
    assert!(bench_signatures(&pc(), &[SchemeId::Falcon512], &bench_cfg()).is_err());
}

#[test]
fn rendered_tables() {
    let pc = pc();
    let t2 = render_key_sizes(&pc);
    assert_eq!(t2.rows.len(), 5);
    assert!(t2.rows.iter().all(|r| r[4] == "match"));
    let t6 = render_relative_costs(&reproduce_relative_costs(&pc)).render(Format::Csv);
    assert_eq!(t6.lines().count(), 13);
    assert!(t6.lines().skip(1).all(|l| l.ends_with("PASS")));
    let text = render_cost_report(&cost_report(&pc, HashChoice::Sha3Fast)).render(Format::Text);
    assert!(text.contains("hss-lms") && text.contains("5175"));
}
