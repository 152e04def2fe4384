// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use uuid::Uuid;

use crate::hashes::{digest, DigestAlg};
use crate::manifest::{sign_envelope, Manifest, SignError, SignedEnvelope, MANIFEST_VERSION};
use crate::sigsuite::{PrivateKey, SchemeId};

use super::device::UpdatePackage;

pub const MANIFEST_FILE: &str = "manifest.suit";
pub const IMAGE_FILE: &str = "image.bin";
pub const META_FILE: &str = "meta.txt";
const LOCK_FILE: &str = ".lock";

#[derive(Debug, thiserror::Error)]
pub enum RepoError {
    #[error("repository i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid update name {0:?}")]
    InvalidName(String),
    #[error("no update named {0:?}")]
    NotFound(String),
    #[error("sequence {sequence} is not above {published}, already published for this vendor and class")]
    DuplicateSequence { sequence: u64, published: u64 },
    #[error("{name:?} belongs to another vendor or class")]
    NameTaken { name: String },
    #[error("stored manifest for {name:?} is unreadable: {reason}")]
    Corrupt { name: String, reason: String },
    #[error(transparent)]
    Sign(#[from] SignError),
}

/// What the maintainer states about a new image. The digest and size are
/// computed from the image itself.
#[derive(Debug, Clone)]
pub struct PublishMeta {
    pub name: String,
    pub sequence: u64,
    pub vendor_id: Uuid,
    pub class_id: Uuid,
    pub slot: u8,
    /// Defaults to the repository service path of the image.
    pub uri: Option<String>,
    pub digest_alg: DigestAlg,
}

#[derive(Debug, Clone)]
pub struct Published {
    pub name: String,
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub envelope: SignedEnvelope,
    pub envelope_bytes: usize,
    pub image_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrySummary {
    pub name: String,
    pub scheme: SchemeId,
    pub manifest: Manifest,
}

/// On-disk layout: `<root>/<name>/{manifest.suit,image.bin,meta.txt}`.
/// Publishing holds an exclusive lock on `<root>/.lock`; reads take none and
/// see either the old or the new entry, since entries are swapped in by
/// rename.
#[derive(Debug, Clone)]
pub struct Repository {
    root: PathBuf,
}

pub fn validate_name(name: &str) -> Result<(), RepoError> {
    let ok = !name.is_empty()
        && name.len() <= 64
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'));
    if ok {
        Ok(())
    } else {
        Err(RepoError::InvalidName(name.to_string()))
    }
}

impl Repository {
    /// Opens `root`, creating it if needed.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, RepoError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Repository { root })
    }

    /// Opens an existing directory without creating it.
    pub fn open_existing(root: impl Into<PathBuf>) -> Result<Self, RepoError> {
        let root = root.into();
        if !root.is_dir() {
            return Err(RepoError::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{} is not a directory", root.display()),
            )));
        }
        Ok(Repository { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entry_dir(&self, name: &str) -> Result<PathBuf, RepoError> {
        validate_name(name)?;
        Ok(self.root.join(name))
    }

    fn read(&self, name: &str, file: &str) -> Result<Vec<u8>, RepoError> {
        let path = self.entry_dir(name)?.join(file);
        fs::read(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => RepoError::NotFound(name.to_string()),
            _ => RepoError::Io(e),
        })
    }

    pub fn manifest_bytes(&self, name: &str) -> Result<Vec<u8>, RepoError> {
        self.read(name, MANIFEST_FILE)
    }

    pub fn image_bytes(&self, name: &str) -> Result<Vec<u8>, RepoError> {
        self.read(name, IMAGE_FILE)
    }

    pub fn load(&self, name: &str) -> Result<UpdatePackage, RepoError> {
        let manifest = self.manifest_bytes(name)?;
        let image = self.image_bytes(name)?;
        UpdatePackage::from_wire(&manifest, image).map_err(|e| RepoError::Corrupt {
            name: name.to_string(),
            reason: e.to_string(),
        })
    }

    /// Entries sorted by name. The manifests are decoded, not verified.
    pub fn entries(&self) -> Result<Vec<EntrySummary>, RepoError> {
        let mut out = Vec::new();
        for dirent in fs::read_dir(&self.root)? {
            let dirent = dirent?;
            let name = dirent.file_name().to_string_lossy().into_owned();
            if validate_name(&name).is_err() || !dirent.path().join(MANIFEST_FILE).is_file() {
                continue;
            }
            let corrupt = |reason: String| RepoError::Corrupt {
                name: name.clone(),
                reason,
            };
            let env = SignedEnvelope::from_bytes(&self.manifest_bytes(&name)?).map_err(|e| corrupt(e.to_string()))?;
            let manifest = Manifest::decode(&env.payload).map_err(|e| corrupt(e.to_string()))?;
            out.push(EntrySummary {
                name,
                scheme: env.protected.scheme,
                manifest,
            });
        }
        out.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(out)
    }

    fn lock(&self) -> Result<File, RepoError> {
        let f = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.root.join(LOCK_FILE))?;
        f.lock()?;
        Ok(f)
    }

    /// Signs a manifest for `image` and stores it under `meta.name`. The
    /// sequence must exceed every sequence already published for the same
    /// vendor and class; this is checked before any signing key is used.
    pub fn publish(
        &self,
        image: &[u8],
        meta: &PublishMeta,
        scheme: SchemeId,
        key: &PrivateKey,
    ) -> Result<Published, RepoError> {
        let dir = self.entry_dir(&meta.name)?;
        let _guard = self.lock()?;

        let component = |e: &EntrySummary| e.manifest.vendor_id == meta.vendor_id && e.manifest.class_id == meta.class_id;
        let entries = self.entries()?;
        if let Some(published) = entries.iter().filter(|e| component(e)).map(|e| e.manifest.sequence_number).max() {
            if meta.sequence <= published {
                return Err(RepoError::DuplicateSequence {
                    sequence: meta.sequence,
                    published,
                });
            }
        }
        if entries.iter().any(|e| e.name == meta.name && !component(e)) {
            return Err(RepoError::NameTaken {
                name: meta.name.clone(),
            });
        }

        let manifest = Manifest {
            manifest_version: MANIFEST_VERSION,
            sequence_number: meta.sequence,
            vendor_id: meta.vendor_id,
            class_id: meta.class_id,
            payload_digest: digest(meta.digest_alg, image),
            payload_size: image.len() as u64,
            payload_uri: meta
                .uri
                .clone()
                .unwrap_or_else(|| format!("/updates/{}/image", meta.name)),
            slot: meta.slot,
        };
        let envelope = sign_envelope(&manifest, scheme, key)?;
        let wire = envelope.to_bytes();

        let staging = self.root.join(format!(".{}.staging", meta.name));
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir(&staging)?;
        write_synced(&staging.join(MANIFEST_FILE), &wire)?;
        write_synced(&staging.join(IMAGE_FILE), image)?;
        write_synced(&staging.join(META_FILE), meta_text(&meta.name, scheme, &manifest, wire.len()).as_bytes())?;

        // Swap the entry in. The old one moves aside first because rename
        // will not replace a non-empty directory.
        let retired = self.root.join(format!(".{}.retired", meta.name));
        if dir.exists() {
            if retired.exists() {
                fs::remove_dir_all(&retired)?;
            }
            fs::rename(&dir, &retired)?;
        }
        fs::rename(&staging, &dir)?;
        if retired.exists() {
            fs::remove_dir_all(&retired)?;
        }

        Ok(Published {
            name: meta.name.clone(),
            dir,
            manifest,
            envelope,
            envelope_bytes: wire.len(),
            image_bytes: image.len(),
        })
    }
}

fn write_synced(path: &Path, data: &[u8]) -> std::io::Result<()> {
    let mut f = File::create(path)?;
    f.write_all(data)?;
    f.sync_all()
}

fn meta_text(name: &str, scheme: SchemeId, m: &Manifest, envelope_len: usize) -> String {
    format!(
        "name:     {name}\nscheme:   {scheme}\npublished: {}\nenvelope: {envelope_len} bytes\n{m}\n",
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    )
}
