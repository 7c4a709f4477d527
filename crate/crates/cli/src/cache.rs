//! Content-addressed artifact cache.
//!
//! Entries live at `<root>/<sha256(key)>.bin` and start with the key itself,
//! so a hash collision reads as a miss. Writes go through a temporary file
//! and a rename: readers see a whole entry or none.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use sha2::{Digest, Sha256};

use crate::output::write_atomic;

/// Environment variable naming the cache root.
pub const CACHE_ENV: &str = "RINGLAB_CACHE";

#[derive(Debug, Default)]
pub struct Cache {
    root: Option<PathBuf>,
    calls: AtomicUsize,
}

impl Cache {
    pub fn new(root: Option<PathBuf>) -> Self {
        Self { root, calls: AtomicUsize::new(0) }
    }

    /// `dir` when non-empty, otherwise `$RINGLAB_CACHE`, otherwise no cache.
    pub fn resolve(dir: &str) -> Self {
        let root = if dir.is_empty() { std::env::var_os(CACHE_ENV).map(PathBuf::from) } else { Some(PathBuf::from(dir)) };
        Self::new(root)
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Number of times a producer ran.
    pub fn producer_calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn path_for(&self, key: &str) -> Option<PathBuf> {
        let digest = Sha256::digest(key.as_bytes());
        self.root.as_ref().map(|r| r.join(format!("{}.bin", hex::encode(digest))))
    }

    fn read(&self, key: &str) -> Option<Vec<u8>> {
        let bytes = std::fs::read(self.path_for(key)?).ok()?;
        let len = u32::from_le_bytes(bytes.get(..4)?.try_into().ok()?) as usize;
        let stored = bytes.get(4..4 + len)?;
        (stored == key.as_bytes()).then(|| bytes[4 + len..].to_vec())
    }

    fn write(&self, key: &str, payload: &[u8]) {
        let Some(path) = self.path_for(key) else { return };
        let result = std::fs::create_dir_all(path.parent().expect("cache entries have a parent")).and_then(|_| {
            write_atomic(&path, |w| {
                w.write_all(&(key.len() as u32).to_le_bytes())?;
                w.write_all(key.as_bytes())?;
                w.write_all(payload)
            })
        });
        if let Err(e) = result {
            log::warn!("cache write to {} failed: {e}; continuing without caching", path.display());
        }
    }

    /// Decoded cached value for `key`, or the producer's value, stored for next time.
    ///
    /// Entries that fail to decode are recomputed and overwritten.
    pub fn get_or_compute<T, E>(
        &self,
        key: &str,
        encode: impl Fn(&T) -> Vec<u8>,
        decode: impl Fn(&[u8]) -> Option<T>,
        produce: impl FnOnce() -> Result<T, E>,
    ) -> Result<T, E> {
        if let Some(bytes) = self.read(key) {
            match decode(&bytes) {
                Some(v) => return Ok(v),
                None => log::warn!("corrupt cache entry for `{key}`; recomputing"),
            }
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        let value = produce()?;
        self.write(key, &encode(&value));
        Ok(value)
    }
}
