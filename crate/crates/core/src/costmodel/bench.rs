// SPDX-License-Identifier: Apache-2.0

//! Host timing of sign and verify, laid out like the MCU benchmark tables.
//! Flash and stack are never measured here; those cells carry the recorded
//! MCU figures and say so.

use std::time::Instant;

use serde::Serialize;

use crate::lms::HssParams;
use crate::sigsuite::{self, keygen_with, KeygenOptions, SchemeId, SigError};

use super::dataset::{cost_implementation, Board, PaperConstants};

/// Cortex-M4 core clock of the reference board.
pub const DEFAULT_TICK_HZ: f64 = 64_000_000.0;

#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub message_bytes: usize,
    pub repetitions: usize,
    /// Converts host seconds into kiloticks of a clock at this rate.
    pub tick_hz: f64,
    /// Board whose recorded flash and stack figures are shown.
    pub board: Board,
    pub hss_params: HssParams,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            message_bytes: 32,
            repetitions: 20,
            tick_hz: DEFAULT_TICK_HZ,
            board: Board::Nrf52840,
            hss_params: HssParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordedMcu {
    pub board: Board,
    pub implementation: String,
    pub flash_b: Option<u64>,
    pub sign_stack_b: Option<u64>,
    pub verify_stack_b: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub scheme: SchemeId,
    pub sign_ms: f64,
    pub sign_kiloticks: f64,
    pub verify_ms: f64,
    pub verify_kiloticks: f64,
    pub recorded: Option<RecordedMcu>,
}

/// Mean host time per operation for each live scheme. Runs on the calling
/// thread only.
pub fn bench_signatures(
    pc: &PaperConstants,
    schemes: &[SchemeId],
    cfg: &BenchConfig,
) -> Result<Vec<BenchRow>, SigError> {
    let reps = cfg.repetitions.max(1);
    let msg = vec![0xa5u8; cfg.message_bytes];
    let mut rows = Vec::new();
    for &scheme in schemes {
        if !sigsuite::descriptor(scheme).backend_available {
            return Err(SigError::BackendUnavailable(scheme));
        }
        let kp = keygen_with(
            scheme,
            KeygenOptions {
                hss_params: Some(cfg.hss_params.clone()),
                ..Default::default()
            },
        )?;

        let t = Instant::now();
        let mut sigs = Vec::with_capacity(reps);
        for _ in 0..reps {
            sigs.push(sigsuite::sign(scheme, &kp.private, &msg)?);
        }
        let sign_s = t.elapsed().as_secs_f64() / reps as f64;

        let t = Instant::now();
        for sig in &sigs {
            sigsuite::verify(scheme, &kp.public, &msg, sig).expect("fresh signature verifies");
        }
        let verify_s = t.elapsed().as_secs_f64() / reps as f64;

        let recorded = pc.mcu_row(cfg.board, cost_implementation(scheme)).map(|r| RecordedMcu {
            board: cfg.board,
            implementation: r.implementation.clone(),
            flash_b: r.flash_b,
            sign_stack_b: r.sign_stack_b,
            verify_stack_b: r.verify_stack_b,
        });
        rows.push(BenchRow {
            scheme,
            sign_ms: sign_s * 1e3,
            sign_kiloticks: sign_s * cfg.tick_hz / 1e3,
            verify_ms: verify_s * 1e3,
            verify_kiloticks: verify_s * cfg.tick_hz / 1e3,
            recorded,
        });
    }
    Ok(rows)
}
