// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::hashes::{digest, Digest, DigestAlg};
use crate::manifest::{verify_envelope_as, EnvelopeReject, ManifestError, SignedEnvelope};
use crate::sigsuite::SchemeId;

/// Why a device dropped an update. Exactly one per rejection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    BadSignature,
    DigestMismatch,
    Replay,
    VendorMismatch,
    ClassMismatch,
    SizeMismatch,
    Malformed,
}

impl RejectReason {
    pub const ALL: [RejectReason; 7] = [
        RejectReason::BadSignature,
        RejectReason::DigestMismatch,
        RejectReason::Replay,
        RejectReason::VendorMismatch,
        RejectReason::ClassMismatch,
        RejectReason::SizeMismatch,
        RejectReason::Malformed,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RejectReason::BadSignature => "bad-signature",
            RejectReason::DigestMismatch => "digest-mismatch",
            RejectReason::Replay => "replay",
            RejectReason::VendorMismatch => "vendor-mismatch",
            RejectReason::ClassMismatch => "class-mismatch",
            RejectReason::SizeMismatch => "size-mismatch",
            RejectReason::Malformed => "malformed",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrustAnchor {
    pub scheme: SchemeId,
    #[serde(with = "hex::serde")]
    pub public_key: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub active: bool,
    pub digest: Option<Digest>,
    pub size: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum DeviceStateError {
    #[error("device state: {0}")]
    Io(#[from] std::io::Error),
    #[error("device state: {0}")]
    Json(#[from] serde_json::Error),
    #[error("device state: {0}")]
    Invalid(&'static str),
}

/// Commissioned device: identity, trust anchor, anti-rollback counter and two
/// image slots. Single owner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceState {
    pub vendor_id: Uuid,
    pub class_id: Uuid,
    pub trusted_public_key: TrustAnchor,
    installed_sequence: u64,
    slots: [Slot; 2],
    boot_count: u64,
}

impl DeviceState {
    /// Factory state: the initial image sits in slot 0 and the counter is 0,
    /// so any signed sequence number of at least 1 is newer.
    pub fn commission(vendor_id: Uuid, class_id: Uuid, anchor: TrustAnchor, initial_image: &[u8]) -> Self {
        DeviceState {
            vendor_id,
            class_id,
            trusted_public_key: anchor,
            installed_sequence: 0,
            slots: [
                Slot {
                    active: true,
                    digest: Some(digest(DigestAlg::Sha2_256, initial_image)),
                    size: initial_image.len() as u64,
                },
                Slot {
                    active: false,
                    digest: None,
                    size: 0,
                },
            ],
            boot_count: 1,
        }
    }

    pub fn installed_sequence(&self) -> u64 {
        self.installed_sequence
    }

    pub fn boot_count(&self) -> u64 {
        self.boot_count
    }

    pub fn slots(&self) -> &[Slot; 2] {
        &self.slots
    }

    pub fn active_slot(&self) -> usize {
        if self.slots[0].active {
            0
        } else {
            1
        }
    }

    pub fn active_image(&self) -> &Slot {
        &self.slots[self.active_slot()]
    }

    /// Same device, different hardware class.
    pub fn with_class(&self, class_id: Uuid) -> Self {
        DeviceState {
            class_id,
            ..self.clone()
        }
    }

    fn check(&self) -> Result<(), DeviceStateError> {
        if self.slots.iter().filter(|s| s.active).count() != 1 {
            return Err(DeviceStateError::Invalid("exactly one slot must be active"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device state serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, DeviceStateError> {
        let d: DeviceState = serde_json::from_str(text)?;
        d.check()?;
        Ok(d)
    }

    pub fn load(path: &Path) -> Result<Self, DeviceStateError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), DeviceStateError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_json())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Envelope plus image as fetched. Nothing is checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdatePackage {
    pub envelope: SignedEnvelope,
    pub image: Vec<u8>,
}

impl UpdatePackage {
    pub fn from_wire(manifest: &[u8], image: Vec<u8>) -> Result<Self, ManifestError> {
        Ok(UpdatePackage {
            envelope: SignedEnvelope::from_bytes(manifest)?,
            image,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateOutcome {
    Installed(DeviceState),
    Rejected(RejectReason),
}

impl UpdateOutcome {
    pub fn reason(&self) -> Option<RejectReason> {
        match self {
            UpdateOutcome::Installed(_) => None,
            UpdateOutcome::Rejected(r) => Some(*r),
        }
    }

    /// `installed` or the rejection code.
    pub fn code(&self) -> &'static str {
        match self {
            UpdateOutcome::Installed(_) => "installed",
            UpdateOutcome::Rejected(r) => r.code(),
        }
    }
}

/// Checks, in order: signature, manifest decode, vendor, class, sequence,
/// size, image digest. The first failure is reported. On success the image
/// goes to the inactive slot, which becomes active.
pub fn device_update(device: &DeviceState, pkg: &UpdatePackage) -> UpdateOutcome {
    match check_package(device, pkg) {
        Ok(state) => UpdateOutcome::Installed(state),
        Err(r) => UpdateOutcome::Rejected(r),
    }
}

/// [`device_update`] on raw transport bytes; an undecodable envelope is
/// `malformed`.
pub fn device_update_wire(device: &DeviceState, manifest: &[u8], image: &[u8]) -> UpdateOutcome {
    match UpdatePackage::from_wire(manifest, image.to_vec()) {
        Ok(pkg) => device_update(device, &pkg),
        Err(_) => UpdateOutcome::Rejected(RejectReason::Malformed),
    }
}

fn check_package(device: &DeviceState, pkg: &UpdatePackage) -> Result<DeviceState, RejectReason> {
    let anchor = &device.trusted_public_key;
    let m = verify_envelope_as(&pkg.envelope, anchor.scheme, &anchor.public_key).map_err(|e| match e {
        // Signed payload that does not decode.
        EnvelopeReject::Malformed(_) => RejectReason::Malformed,
        // Not authenticated by the trust anchor.
        EnvelopeReject::BadSignature
        | EnvelopeReject::SchemeMismatch { .. }
        | EnvelopeReject::BackendUnavailable(_) => RejectReason::BadSignature,
    })?;
    if m.vendor_id != device.vendor_id {
        return Err(RejectReason::VendorMismatch);
    }
    if m.class_id != device.class_id {
        return Err(RejectReason::ClassMismatch);
    }
    if m.sequence_number <= device.installed_sequence {
        return Err(RejectReason::Replay);
    }
    if m.payload_size != pkg.image.len() as u64 {
        return Err(RejectReason::SizeMismatch);
    }
    let found = digest(m.payload_digest.alg, &pkg.image);
    if found != m.payload_digest {
        return Err(RejectReason::DigestMismatch);
    }

    let mut next = device.clone();
    let target = 1 - device.active_slot();
    next.slots[target] = Slot {
        active: true,
        digest: Some(found),
        size: m.payload_size,
    };
    next.slots[1 - target].active = false;
    next.installed_sequence = m.sequence_number;
    next.boot_count += 1;
    Ok(next)
}
