// SPDX-License-Identifier: Apache-2.0

//! Text key files, one `field: value` per line:
//!
//! ```text
//! scheme: hss-lms
//! created-at: 2026-01-01T00:00:00Z
//! public-key: 00000002...
//! state-file: device-key.state
//! ```
//!
//! Stateless schemes carry `private-key: <hex>` instead of `state-file`.
//! Public key files omit both.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::lms::FileStore;

use super::{HssHandle, KeyPair, PrivateKey, SchemeId, SigError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivateRef {
    Hex(Vec<u8>),
    /// Relative paths resolve against the key file's directory.
    StateFile(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyFile {
    pub scheme: SchemeId,
    pub created_at: String,
    pub public_key: Vec<u8>,
    pub private: Option<PrivateRef>,
}

#[derive(Debug, thiserror::Error)]
pub enum KeyFileError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("missing field {0}")]
    Missing(&'static str),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("key file holds no private key")]
    PublicOnly,
    #[error(transparent)]
    Sig(#[from] SigError),
}

impl KeyFile {
    pub fn new(scheme: SchemeId, public_key: Vec<u8>, private: Option<PrivateRef>) -> Self {
        KeyFile {
            scheme,
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            public_key,
            private,
        }
    }

    /// The public half of this file.
    pub fn public_only(&self) -> KeyFile {
        KeyFile {
            private: None,
            ..self.clone()
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "scheme: {}\ncreated-at: {}\npublic-key: {}\n",
            self.scheme,
            self.created_at,
            hex::encode(&self.public_key)
        );
        match &self.private {
            Some(PrivateRef::Hex(b)) => out += &format!("private-key: {}\n", hex::encode(b)),
            Some(PrivateRef::StateFile(p)) => out += &format!("state-file: {}\n", p.display()),
            None => {}
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, KeyFileError> {
        let (mut scheme, mut created_at, mut public_key, mut private) = (None, None, None, None);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| KeyFileError::Parse { line: i + 1, reason };
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| err("expected `field: value`".into()))?;
            let v = v.trim();
            let hex_val = || hex::decode(v).map_err(|e| err(format!("{k}: {e}")));
            match k.trim() {
                "scheme" => scheme = Some(v.parse::<SchemeId>().map_err(|e| err(e.to_string()))?),
                "created-at" => created_at = Some(v.to_string()),
                "public-key" => public_key = Some(hex_val()?),
                "private-key" | "state-file" if private.is_some() => {
                    return Err(err("more than one private key reference".into()))
                }
                "private-key" => private = Some(PrivateRef::Hex(hex_val()?)),
                "state-file" => private = Some(PrivateRef::StateFile(PathBuf::from(v))),
                other => return Err(err(format!("unknown field {other:?}"))),
            }
        }
        let kf = KeyFile {
            scheme: scheme.ok_or(KeyFileError::Missing("scheme"))?,
            created_at: created_at.ok_or(KeyFileError::Missing("created-at"))?,
            public_key: public_key.ok_or(KeyFileError::Missing("public-key"))?,
            private,
        };
        if kf.scheme == SchemeId::HssLms && matches!(kf.private, Some(PrivateRef::Hex(_))) {
            return Err(KeyFileError::Parse {
                line: 0,
                reason: "hss-lms keys reference a state-file".into(),
            });
        }
        Ok(kf)
    }

    pub fn load(path: &Path) -> Result<Self, KeyFileError> {
        let text = fs::read_to_string(path).map_err(|source| KeyFileError::Io {
            path: path.into(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Writes the file; files holding private material are created owner-only.
    pub fn save(&self, path: &Path) -> Result<(), KeyFileError> {
        let io = |source| KeyFileError::Io {
            path: path.into(),
            source,
        };
        let mut opts = fs::OpenOptions::new();
        opts.write(true).create(true).truncate(true);
        #[cfg(unix)]
        if matches!(self.private, Some(PrivateRef::Hex(_))) {
            use std::os::unix::fs::OpenOptionsExt;
            opts.mode(0o600);
        }
        let mut f = opts.open(path).map_err(io)?;
        f.write_all(self.render().as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)
    }

    /// Materializes the private key; `key_dir` anchors a relative state-file.
    pub fn private_key(&self, key_dir: &Path) -> Result<PrivateKey, KeyFileError> {
        match &self.private {
            None => Err(KeyFileError::PublicOnly),
            Some(PrivateRef::Hex(b)) => Ok(PrivateKey::Bytes(b.clone())),
            Some(PrivateRef::StateFile(p)) => {
                let handle = HssHandle::open(Box::new(FileStore::new(key_dir.join(p))))
                    .map_err(SigError::from)?;
                if handle.public_key().to_bytes() != self.public_key {
                    return Err(SigError::InvalidKey {
                        scheme: self.scheme,
                        reason: "state file belongs to a different public key".into(),
                    }
                    .into());
                }
                Ok(PrivateKey::Stateful(handle))
            }
        }
    }

    pub fn into_keypair(self, key_dir: &Path) -> Result<KeyPair, KeyFileError> {
        let private = self.private_key(key_dir)?;
        Ok(KeyPair {
            scheme: self.scheme,
            public: self.public_key,
            private,
        })
    }
}
