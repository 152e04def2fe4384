// SPDX-License-Identifier: Apache-2.0

use super::device::{device_update_wire, DeviceState, UpdateOutcome};
use super::repo::{RepoError, Repository};

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("transport: {0}")]
    Transport(String),
}

/// Where a device fetches `(manifest, image)` bytes from.
pub trait PackageSource {
    fn fetch(&self, name: &str) -> Result<(Vec<u8>, Vec<u8>), SourceError>;

    fn describe(&self) -> String;
}

impl PackageSource for Repository {
    fn fetch(&self, name: &str) -> Result<(Vec<u8>, Vec<u8>), SourceError> {
        let map = |e: RepoError| match e {
            RepoError::NotFound(n) | RepoError::InvalidName(n) => SourceError::NotFound(n),
            other => SourceError::Transport(other.to_string()),
        };
        Ok((self.manifest_bytes(name).map_err(map)?, self.image_bytes(name).map_err(map)?))
    }

    fn describe(&self) -> String {
        self.root().display().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchedUpdate {
    pub outcome: UpdateOutcome,
    pub manifest_bytes: usize,
    pub image_bytes: usize,
}

impl FetchedUpdate {
    pub fn transfer_bytes(&self) -> u64 {
        (self.manifest_bytes + self.image_bytes) as u64
    }
}

/// Fetch then [`device_update_wire`]. Transport errors are not rejections.
pub fn fetch_and_update(
    device: &DeviceState,
    source: &dyn PackageSource,
    name: &str,
) -> Result<FetchedUpdate, SourceError> {
    let (manifest, image) = source.fetch(name)?;
    Ok(FetchedUpdate {
        outcome: device_update_wire(device, &manifest, &image),
        manifest_bytes: manifest.len(),
        image_bytes: image.len(),
    })
}
