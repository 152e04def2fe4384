// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::state::peek_generation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("generation conflict, persisted {persisted:?}")]
    Conflict { persisted: Option<u64> },
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for StoreError {
    fn from(e: std::io::Error) -> Self {
        StoreError::Io(e.to_string())
    }
}

/// Durable home of a private state. `commit` is a compare-and-swap on the
/// generation: it only succeeds while the persisted generation is `expected`.
pub trait StateStore: Send + Sync {
    fn generation(&self) -> Result<Option<u64>, StoreError>;

    fn load(&self) -> Result<Option<Vec<u8>>, StoreError>;

    /// Highest generation ever committed, when the store tracks it apart
    /// from the state itself.
    fn high_water(&self) -> Result<Option<u64>, StoreError> {
        Ok(None)
    }

    fn commit(&self, expected: Option<u64>, generation: u64, blob: &[u8]) -> Result<(), StoreError>;
}

#[derive(Default)]
pub struct MemoryStore {
    slot: Mutex<Option<(u64, Vec<u8>)>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl StateStore for MemoryStore {
    fn generation(&self) -> Result<Option<u64>, StoreError> {
        Ok(self.slot.lock().unwrap().as_ref().map(|(g, _)| *g))
    }

    fn load(&self) -> Result<Option<Vec<u8>>, StoreError> {
        Ok(self.slot.lock().unwrap().as_ref().map(|(_, b)| b.clone()))
    }

    fn commit(&self, expected: Option<u64>, generation: u64, blob: &[u8]) -> Result<(), StoreError> {
        let mut slot = self.slot.lock().unwrap();
        let persisted = slot.as_ref().map(|(g, _)| *g);
        if persisted != expected {
            return Err(StoreError::Conflict { persisted });
        }
        *slot = Some((generation, blob.to_vec()));
        Ok(())
    }
}

/// State file plus two sidecars: `<path>.hwm` holds the highest committed
/// generation and `<path>.lock` serializes writers across processes.
#[derive(Debug, Clone)]
pub struct FileStore {
    path: PathBuf,
}

impl FileStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FileStore { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn sidecar(&self, ext: &str) -> PathBuf {
        let mut name = self.path.as_os_str().to_owned();
        name.push(ext);
        PathBuf::from(name)
    }

    fn lock(&self) -> Result<File, StoreError> {
        let f = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.sidecar(".lock"))?;
        f.lock()?;
        Ok(f)
    }

    fn write_atomic(&self, target: &Path, data: &[u8]) -> Result<(), StoreError> {
        let tmp = {
            let mut name = target.as_os_str().to_owned();
            name.push(".tmp");
            PathBuf::from(name)
        };
        let mut f = File::create(&tmp)?;
        f.write_all(data)?;
        f.sync_all()?;
        fs::rename(&tmp, target)?;
        if let Some(dir) = target.parent().filter(|d| !d.as_os_str().is_empty()) {
            // Directory fsync is not supported everywhere; the rename already happened.
            let _ = File::open(dir).and_then(|d| d.sync_all());
        }
        Ok(())
    }

    fn read_generation(&self) -> Result<Option<u64>, StoreError> {
        match self.load()? {
            None => Ok(None),
            Some(blob) => peek_generation(&blob)
                .map(Some)
                .map_err(|e| StoreError::Io(e.to_string())),
        }
    }
}

impl StateStore for FileStore {
    fn generation(&self) -> Result<Option<u64>, StoreError> {
        self.read_generation()
    }

    fn load(&self) -> Result<Option<Vec<u8>>, StoreError> {
        match fs::read(&self.path) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn high_water(&self) -> Result<Option<u64>, StoreError> {
        match fs::read_to_string(self.sidecar(".hwm")) {
            Ok(s) => s
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| StoreError::Io("unreadable high-water mark".into())),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn commit(&self, expected: Option<u64>, generation: u64, blob: &[u8]) -> Result<(), StoreError> {
        let _guard = self.lock()?;
        let persisted = self.read_generation()?;
        if persisted != expected {
            return Err(StoreError::Conflict { persisted });
        }
        if let Some(hwm) = self.high_water()? {
            if generation <= hwm && expected.is_none() {
                return Err(StoreError::Conflict { persisted: Some(hwm) });
            }
        }
        self.write_atomic(&self.path, blob)?;
        self.write_atomic(&self.sidecar(".hwm"), generation.to_string().as_bytes())?;
        Ok(())
    }
}
