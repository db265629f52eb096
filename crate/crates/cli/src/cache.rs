//! On-disk cache of small results (descriptors, lattice digests), keyed by
//! group fingerprint, command and parameters. Readers take a shared lock on
//! `.lock`, writers an exclusive one; records are written atomically.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_FORMAT: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Record<T> {
    format: u32,
    tool_version: String,
    key: String,
    payload: T,
}

pub struct Cache {
    dir: PathBuf,
}

fn key_of(fingerprint: &str, command: &str, params: &str) -> String {
    let mut h = Sha256::new();
    for part in [fingerprint, command, params] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl Cache {
    pub fn open(dir: &Path) -> std::io::Result<Cache> {
        fs::create_dir_all(dir)?;
        Ok(Cache {
            dir: dir.to_path_buf(),
        })
    }

    fn lock_file(&self) -> std::io::Result<File> {
        OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.dir.join(".lock"))
    }

    /// Returns `None` on a miss or on any unreadable or stale record.
    pub fn get<T: for<'de> Deserialize<'de>>(&self, fingerprint: &str, command: &str, params: &str) -> Option<T> {
        let key = key_of(fingerprint, command, params);
        let lock = self.lock_file().ok()?;
        lock.lock_shared().ok()?;
        let text = fs::read_to_string(self.dir.join(format!("{key}.json"))).ok();
        let _ = lock.unlock();
        let rec: Record<T> = serde_json::from_str(&text?).ok()?;
        (rec.format == CACHE_FORMAT && rec.tool_version == env!("CARGO_PKG_VERSION") && rec.key == key)
            .then_some(rec.payload)
    }

    pub fn put<T: Serialize>(&self, fingerprint: &str, command: &str, params: &str, payload: &T) -> std::io::Result<()> {
        let key = key_of(fingerprint, command, params);
        let rec = Record {
            format: CACHE_FORMAT,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            key: key.clone(),
            payload,
        };
        let body = serde_json::to_vec(&rec)?;
        let lock = self.lock_file()?;
        lock.lock()?;
        let tmp = self.dir.join(format!("{key}.tmp"));
        let result = (|| {
            let mut f = File::create(&tmp)?;
            f.write_all(&body)?;
            f.sync_all()?;
            fs::rename(&tmp, self.dir.join(format!("{key}.json")))
        })();
        let _ = lock.unlock();
        result
    }
}
