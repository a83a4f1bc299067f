//! On-disk cache of weight-independent invariant values.
//!
//! One JSON file per entry, named by the SHA-256 of the canonical
//! descriptor key, written through a temporary file and an atomic rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::LaurentSeries;

pub const ENGINE_VERSION: &str = concat!("gwql-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache conflict for key {key}: stored {stored}, new {new}")]
    Conflict {
        key: String,
        stored: String,
        new: String,
    },
    #[error("refusing to cache a truncated series")]
    Truncated,
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache encoding: {0}")]
    Encoding(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub value: LaurentSeries,
    pub engine_version: String,
    pub timestamp: u64,
}

#[derive(Debug, Clone)]
pub struct InvariantCache {
    dir: PathBuf,
    version: String,
}

impl InvariantCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        Self::open_with_version(dir, ENGINE_VERSION)
    }

    pub fn open_with_version(dir: impl Into<PathBuf>, version: &str) -> Result<Self, CacheError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(InvariantCache {
            dir,
            version: version.to_string(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        self.dir.join(format!("{}.json", hex::encode(digest)))
    }

    fn read_entry(&self, key: &str) -> Option<CacheEntry> {
        let path = self.path_for(key);
        let bytes = fs::read(&path).ok()?;
        match serde_json::from_slice::<CacheEntry>(&bytes) {
            Ok(e) if e.key == key && e.engine_version == self.version => Some(e),
            Ok(_) => None,
            Err(err) => {
                log::warn!("ignoring corrupt cache entry {}: {err}", path.display());
                None
            }
        }
    }

    /// Stored value, or `None` if absent, stale, or corrupt.
    pub fn get(&self, key: &str) -> Option<LaurentSeries> {
        self.read_entry(key).map(|e| e.value)
    }

    /// Durable write. Rewriting an identical value is a no-op; a different
    /// value under the same key is an error.
    pub fn put(&self, key: &str, value: &LaurentSeries) -> Result<(), CacheError> {
        if !value.is_exact() {
            return Err(CacheError::Truncated);
        }
        if let Some(existing) = self.read_entry(key) {
            if &existing.value == value {
                return Ok(());
            }
            return Err(CacheError::Conflict {
                key: key.to_string(),
                stored: existing.value.to_string(),
                new: value.to_string(),
            });
        }
        let entry = CacheEntry {
            key: key.to_string(),
            value: value.clone(),
            engine_version: self.version.clone(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let path = self.path_for(key);
        let tmp = self.dir.join(format!(
            ".{}.{}.tmp",
            path.file_name().and_then(|s| s.to_str()).unwrap_or("entry"),
            std::process::id()
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&serde_json::to_vec_pretty(&entry)?)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// All readable entries of the current version, sorted by key.
    pub fn entries(&self) -> Result<Vec<CacheEntry>, CacheError> {
        let mut out = Vec::new();
        for item in fs::read_dir(&self.dir)? {
            let path = item?.path();
            if path.extension().and_then(|s| s.to_str()) != Some("json") {
                continue;
            }
            if let Ok(bytes) = fs::read(&path) {
                if let Ok(e) = serde_json::from_slice::<CacheEntry>(&bytes) {
                    if e.engine_version == self.version {
                        out.push(e);
                    }
                }
            }
        }
        out.sort_by(|a, b| a.key.cmp(&b.key));
        Ok(out)
    }

    /// Removes every entry file; returns how many were removed.
    pub fn clear(&self) -> Result<usize, CacheError> {
        let mut n = 0;
        for item in fs::read_dir(&self.dir)? {
            let path = item?.path();
            if path.extension().and_then(|s| s.to_str()) == Some("json") {
                fs::remove_file(path)?;
                n += 1;
            }
        }
        Ok(n)
    }
}
