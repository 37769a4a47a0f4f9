//! Member enumeration and selective extraction for tar, gzipped tar, zip
//! and plain directories.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{self, BufReader, Read};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchiveKind {
    Tar,
    TarGz,
    Zip,
    Directory,
}

impl ArchiveKind {
    /// Archive kind for an encoding format (MIME parameters ignored).
    pub fn from_format(format: &str) -> Option<ArchiveKind> {
        let base = format.split(';').next().unwrap_or_default().trim().to_ascii_lowercase();
        Some(match base.as_str() {
            "application/x-tar" | "application/tar" => ArchiveKind::Tar,
            "application/gzip"
            | "application/x-gzip"
            | "application/x-gtar"
            | "application/x-tgz"
            | "application/tar+gzip" => ArchiveKind::TarGz,
            "application/zip" | "application/x-zip-compressed" => ArchiveKind::Zip,
            "inode/directory" => ArchiveKind::Directory,
            _ => return None,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ArchiveError {
    #[error("unsupported archive format `{0}`")]
    Unsupported(String),
    #[error("corrupt archive {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone)]
pub struct Archive {
    kind: ArchiveKind,
    path: PathBuf,
}

/// Normalizes a member name to a `/`-separated relative path. Directories
/// yield `None`; names escaping the archive root are corrupt.
pub(crate) fn normalize(raw: &str) -> Result<Option<String>, String> {
    let s = raw.replace('\\', "/");
    if s.ends_with('/') {
        return Ok(None);
    }
    if s.starts_with('/') {
        return Err(format!("absolute member path `{raw}`"));
    }
    let mut parts = Vec::new();
    for seg in s.split('/') {
        match seg {
            "" | "." => {}
            ".." => return Err(format!("member path `{raw}` leaves the archive")),
            seg => parts.push(seg),
        }
    }
    Ok((!parts.is_empty()).then(|| parts.join("/")))
}

impl Archive {
    /// Opens `path` as an archive of the given encoding format. Directories
    /// are always accepted.
    pub fn open(path: &Path, format: Option<&str>) -> Result<Archive, ArchiveError> {
        let kind = if path.is_dir() {
            ArchiveKind::Directory
        } else {
            match format.and_then(ArchiveKind::from_format) {
                Some(ArchiveKind::Directory) | None => {
                    return Err(ArchiveError::Unsupported(format.unwrap_or("<none>").to_string()))
                }
                Some(k) => k,
            }
        };
        Ok(Archive { kind, path: path.to_path_buf() })
    }

    pub fn kind(&self) -> ArchiveKind {
        self.kind
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn io(&self, source: io::Error) -> ArchiveError {
        ArchiveError::Io { path: self.path.clone(), source }
    }

    fn corrupt(&self, reason: impl ToString) -> ArchiveError {
        ArchiveError::Corrupt { path: self.path.clone(), reason: reason.to_string() }
    }

    fn tar_reader(&self) -> Result<Box<dyn Read>, ArchiveError> {
        let f = BufReader::new(File::open(&self.path).map_err(|e| self.io(e))?);
        Ok(match self.kind {
            ArchiveKind::TarGz => Box::new(flate2::read::MultiGzDecoder::new(f)),
            _ => Box::new(f),
        })
    }

    fn zip(&self) -> Result<zip::ZipArchive<BufReader<File>>, ArchiveError> {
        let f = BufReader::new(File::open(&self.path).map_err(|e| self.io(e))?);
        zip::ZipArchive::new(f).map_err(|e| self.corrupt(e))
    }

    /// Visits every file member in archive order (directories: lexicographic).
    /// The callback gets the normalized path and a reader over its content.
    fn for_each(&self, mut visit: impl FnMut(&str, &mut dyn Read) -> io::Result<()>) -> Result<(), ArchiveError> {
        match self.kind {
            ArchiveKind::Tar | ArchiveKind::TarGz => {
                let mut ar = tar::Archive::new(self.tar_reader()?);
                for entry in ar.entries().map_err(|e| self.corrupt(e))? {
                    let mut entry = entry.map_err(|e| self.corrupt(e))?;
                    if !entry.header().entry_type().is_file() {
                        continue;
                    }
                    let raw = entry.path().map_err(|e| self.corrupt(e))?.to_string_lossy().into_owned();
                    if let Some(name) = normalize(&raw).map_err(|e| self.corrupt(e))? {
                        visit(&name, &mut entry).map_err(|e| self.io(e))?;
                    }
                }
            }
            ArchiveKind::Zip => {
                let mut z = self.zip()?;
                for i in 0..z.len() {
                    let mut file = z.by_index(i).map_err(|e| self.corrupt(e))?;
                    if !file.is_file() {
                        continue;
                    }
                    let raw = file.name().map_err(|e| self.corrupt(e))?.into_owned();
                    if let Some(name) = normalize(&raw).map_err(|e| self.corrupt(e))? {
                        visit(&name, &mut file).map_err(|e| self.io(e))?;
                    }
                }
            }
            ArchiveKind::Directory => {
                for (name, path) in self.dir_members()? {
                    let mut f = File::open(&path).map_err(|e| self.io(e))?;
                    visit(&name, &mut f).map_err(|e| self.io(e))?;
                }
            }
        }
        Ok(())
    }

    fn dir_members(&self) -> Result<Vec<(String, PathBuf)>, ArchiveError> {
        let mut out = Vec::new();
        for entry in walkdir::WalkDir::new(&self.path).sort_by_file_name() {
            let entry = entry.map_err(|e| self.io(e.into()))?;
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry.path().strip_prefix(&self.path).expect("walk stays under root");
            let name = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            out.push((name, entry.into_path()));
        }
        Ok(out)
    }

    /// File member paths in archive order, without reading content.
    pub fn members(&self) -> Result<Vec<String>, ArchiveError> {
        match self.kind {
            ArchiveKind::Zip => {
                let mut z = self.zip()?;
                let mut ordered = Vec::with_capacity(z.len());
                for i in 0..z.len() {
                    let f = z.by_index_raw(i).map_err(|e| self.corrupt(e))?;
                    if f.is_file() {
                        let raw = f.name().map_err(|e| self.corrupt(e))?;
                        if let Some(name) = normalize(&raw).map_err(|e| self.corrupt(e))? {
                            ordered.push(name);
                        }
                    }
                }
                Ok(ordered)
            }
            ArchiveKind::Directory => Ok(self.dir_members()?.into_iter().map(|(n, _)| n).collect()),
            _ => {
                let mut out = Vec::new();
                self.for_each(|name, _| {
                    out.push(name.to_string());
                    Ok(())
                })?;
                Ok(out)
            }
        }
    }

    /// Makes the `wanted` members available on disk and returns where each
    /// one lives. Archive members land under `dest`; members already there
    /// are reused. Directory members are returned in place.
    pub fn extract(&self, wanted: &BTreeSet<String>, dest: &Path) -> Result<BTreeMap<String, PathBuf>, ArchiveError> {
        let mut found = BTreeMap::new();
        if self.kind == ArchiveKind::Directory {
            for name in wanted {
                let p = self.path.join(name);
                if p.is_file() {
                    found.insert(name.clone(), p);
                }
            }
            return Ok(found);
        }
        let missing: BTreeSet<&String> = wanted.iter().filter(|n| !dest.join(n.as_str()).is_file()).collect();
        for name in wanted {
            if !missing.contains(name) {
                found.insert(name.clone(), dest.join(name));
            }
        }
        if missing.is_empty() {
            return Ok(found);
        }
        self.for_each(|name, content| {
            if missing.contains(&name.to_string()) && !found.contains_key(name) {
                let target = dest.join(name);
                let dir = target.parent().expect("member has a parent");
                fs::create_dir_all(dir)?;
                let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
                io::copy(content, tmp.as_file_mut())?;
                tmp.persist(&target).map_err(|e| e.error)?;
                found.insert(name.to_string(), target);
            }
            Ok(())
        })?;
        Ok(found)
    }
}
