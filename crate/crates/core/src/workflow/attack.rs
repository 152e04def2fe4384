// SPDX-License-Identifier: Apache-2.0

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use uuid::Uuid;

use crate::hashes::{digest, DigestAlg};

use super::device::{device_update_wire, DeviceState, RejectReason, UpdateOutcome};
use super::source::{PackageSource, SourceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attack {
    /// One image bit flipped in transit.
    Tamper,
    /// The legitimate package delivered again after installation.
    Replay,
    /// The legitimate package offered to a device of another class.
    ClassMismatch,
    /// Signature replaced by random bytes of the same length.
    ForgedSignature,
}

impl Attack {
    pub const ALL: [Attack; 4] = [Attack::Tamper, Attack::Replay, Attack::ClassMismatch, Attack::ForgedSignature];

    pub fn expected(self) -> RejectReason {
        match self {
            Attack::Tamper => RejectReason::DigestMismatch,
            Attack::Replay => RejectReason::Replay,
            Attack::ClassMismatch => RejectReason::ClassMismatch,
            Attack::ForgedSignature => RejectReason::BadSignature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackResult {
    pub attack: Attack,
    pub expected: RejectReason,
    /// `installed` or the rejection code.
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControlResult {
    pub observed: String,
    pub sequence_before: u64,
    pub sequence_after: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackReport {
    pub source: String,
    pub update: String,
    pub control: ControlResult,
    pub attacks: Vec<AttackResult>,
    pub all_passed: bool,
}

/// Runs the legitimate update `name` from `source` as a control, then the
/// four attacks against copies of `device`. The device itself is untouched.
pub fn attack_suite(device: &DeviceState, source: &dyn PackageSource, name: &str) -> Result<AttackReport, SourceError> {
    let (manifest, image) = source.fetch(name)?;
    let mut report = attack_suite_wire(device, &manifest, &image);
    report.source = source.describe();
    report.update = name.to_string();
    Ok(report)
}

/// [`attack_suite`] on bytes already in hand.
pub fn attack_suite_wire(device: &DeviceState, manifest: &[u8], image: &[u8]) -> AttackReport {
    let control_outcome = device_update_wire(device, manifest, image);
    let control = ControlResult {
        observed: control_outcome.code().to_string(),
        sequence_before: device.installed_sequence(),
        sequence_after: match &control_outcome {
            UpdateOutcome::Installed(s) => s.installed_sequence(),
            UpdateOutcome::Rejected(_) => device.installed_sequence(),
        },
        pass: matches!(&control_outcome, UpdateOutcome::Installed(s) if s.installed_sequence() > device.installed_sequence()),
    };

    // Mutations are derived from the package so the report is reproducible.
    let mut rng = ChaCha20Rng::from_seed(digest(DigestAlg::Sha2_256, manifest).bytes);
    let attacks: Vec<AttackResult> = Attack::ALL
        .into_iter()
        .map(|attack| {
            let outcome = match attack {
                Attack::Tamper => {
                    let mut img = image.to_vec();
                    if img.is_empty() {
                        img.push(0);
                    } else {
                        let bit = (rng.next_u64() % (img.len() as u64 * 8)) as usize;
                        img[bit / 8] ^= 1 << (bit % 8);
                    }
                    device_update_wire(device, manifest, &img)
                }
                Attack::Replay => match &control_outcome {
                    UpdateOutcome::Installed(after) => device_update_wire(after, manifest, image),
                    rejected => rejected.clone(),
                },
                Attack::ClassMismatch => {
                    let mut other = *device.class_id.as_bytes();
                    other.iter_mut().for_each(|b| *b ^= 0x5a);
                    device_update_wire(&device.with_class(Uuid::from_bytes(other)), manifest, image)
                }
                Attack::ForgedSignature => match crate::manifest::SignedEnvelope::from_bytes(manifest) {
                    Ok(mut env) => {
                        rng.fill_bytes(&mut env.signature);
                        device_update_wire(device, &env.to_bytes(), image)
                    }
                    Err(_) => UpdateOutcome::Rejected(RejectReason::Malformed),
                },
            };
            AttackResult {
                attack,
                expected: attack.expected(),
                observed: outcome.code().to_string(),
                pass: outcome.reason() == Some(attack.expected()),
            }
        })
        .collect();

    let all_passed = control.pass && attacks.iter().all(|a| a.pass);
    AttackReport {
        source: String::new(),
        update: String::new(),
        control,
        attacks,
        all_passed,
    }
}
