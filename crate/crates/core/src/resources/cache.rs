//! Content-addressed download cache: `<root>/<key>/blob` plus
//! `<root>/<key>/meta.json`, one lockfile per key.

use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub url: String,
    /// Digest of the stored blob.
    pub sha256: String,
    pub declared_sha256: Option<String>,
    pub size: u64,
    pub fetched_at: String,
}

pub(crate) enum StoreError {
    Io(io::Error),
    Mismatch { actual: String },
}

impl From<io::Error> for StoreError {
    fn from(e: io::Error) -> Self {
        StoreError::Io(e)
    }
}

/// Held while a key is being read or written.
pub(crate) struct KeyLock(#[allow(dead_code)] File);

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Cache {
        Cache { root: root.into() }
    }

    /// `$CROISSANT_FORGE_CACHE`, else `~/.cache/croissant-forge`.
    pub fn from_env() -> Cache {
        if let Some(dir) = std::env::var_os("CROISSANT_FORGE_CACHE") {
            return Cache::new(dir);
        }
        let home = std::env::var_os("HOME").map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
        Cache::new(home.join(".cache").join("croissant-forge"))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn key(url: &str, declared_sha256: Option<&str>) -> String {
        let mut h = Sha256::new();
        h.update(url.as_bytes());
        h.update(b"\n");
        h.update(declared_sha256.unwrap_or_default().as_bytes());
        hex::encode(h.finalize())
    }

    pub fn entry_dir(&self, key: &str) -> PathBuf {
        self.root.join(key)
    }

    pub fn blob_path(&self, key: &str) -> PathBuf {
        self.entry_dir(key).join("blob")
    }

    pub fn members_dir(&self, key: &str) -> PathBuf {
        self.entry_dir(key).join("members")
    }

    pub(crate) fn lock(&self, key: &str) -> io::Result<KeyLock> {
        fs::create_dir_all(&self.root)?;
        let f = File::options().create(true).truncate(false).write(true).open(self.root.join(format!("{key}.lock")))?;
        f.lock()?;
        Ok(KeyLock(f))
    }

    /// Metadata of a complete entry.
    pub fn lookup(&self, key: &str) -> Option<Meta> {
        if !self.blob_path(key).is_file() {
            return None;
        }
        let bytes = fs::read(self.entry_dir(key).join("meta.json")).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    /// Streams `reader` into the entry for `key`. The blob only becomes
    /// visible once its digest matches `declared`.
    pub(crate) fn store(
        &self,
        key: &str,
        url: &str,
        declared: Option<&str>,
        reader: &mut dyn Read,
    ) -> Result<Meta, StoreError> {
        let dir = self.entry_dir(key);
        fs::create_dir_all(&dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
        let (sha256, size) = copy_hashing(reader, tmp.as_file_mut())?;
        if declared.is_some_and(|d| d != sha256) {
            return Err(StoreError::Mismatch { actual: sha256 });
        }
        tmp.as_file_mut().sync_all()?;
        tmp.persist(self.blob_path(key)).map_err(|e| e.error)?;
        let meta = Meta {
            url: url.to_string(),
            sha256,
            declared_sha256: declared.map(str::to_string),
            size,
            fetched_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        write_atomic(&dir.join("meta.json"), &serde_json::to_vec_pretty(&meta).expect("meta serializes"))?;
        Ok(meta)
    }
}

/// Copies `reader` to `out`, returning the hex sha256 and byte count.
pub(crate) fn copy_hashing(reader: &mut dyn Read, out: &mut dyn Write) -> io::Result<(String, u64)> {
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 64 * 1024];
    let mut size = 0u64;
    loop {
        let n = match reader.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        };
        h.update(&buf[..n]);
        out.write_all(&buf[..n])?;
        size += n as u64;
    }
    out.flush()?;
    Ok((hex::encode(h.finalize()), size))
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut f = File::open(path)?;
    Ok(copy_hashing(&mut f, &mut io::sink())?.0)
}

/// Writes via a sibling temp file and rename, creating parent directories.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
