// SPDX-License-Identifier: Apache-2.0

//! Maintainer publish pipeline, update repository with its HTTP service,
//! device-side verify and install, and the attack harness.

mod attack;
mod device;
mod http;
mod repo;
mod source;

pub use attack::{attack_suite, attack_suite_wire, Attack, AttackReport, AttackResult, ControlResult};
pub use device::{
    device_update, device_update_wire, DeviceState, DeviceStateError, RejectReason, Slot, TrustAnchor, UpdateOutcome,
    UpdatePackage,
};
pub use http::{serve, HttpSource, RepoServer, ServeError, MAX_BODY_BYTES};
pub use repo::{
    validate_name, EntrySummary, PublishMeta, Published, RepoError, Repository, IMAGE_FILE, MANIFEST_FILE, META_FILE,
};
pub use source::{fetch_and_update, FetchedUpdate, PackageSource, SourceError};
