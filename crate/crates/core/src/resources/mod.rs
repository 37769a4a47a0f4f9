//! Turns the resource layer into local bytes: fetching FileObjects over
//! HTTP, `file:` or `data:` URLs, checksum verification, archive members,
//! and FileSet resolution.

mod archive;
mod cache;
mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use globset::{GlobBuilder, GlobSet, GlobSetBuilder};

pub use archive::{Archive, ArchiveError, ArchiveKind};
pub use cache::{sha256_file, Cache, Meta};
pub use config::{Config, ConfigError, HostConfig};

use crate::model::{DatasetModel, FileObject, FileSet, Resource};
use cache::StoreError;

/// A FileObject whose bytes are on local disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalResource {
    pub resource_id: String,
    pub local_path: PathBuf,
    /// A declared sha256 was checked and matched.
    pub verified: bool,
    pub encoding_format: Option<String>,
    /// Digest of the bytes; `None` for directories.
    pub sha256: Option<String>,
    key: String,
}

impl LocalResource {
    pub fn is_dir(&self) -> bool {
        self.local_path.is_dir()
    }
}

/// One member of a resolved FileSet.
#[derive(Debug, Clone, PartialEq)]
pub struct FileEntry {
    /// The FileSet (or FileObject) this entry belongs to.
    pub owner_id: String,
    /// The container the entry was found in.
    pub parent_id: String,
    /// Path within the archive or directory.
    pub member_path: String,
    /// Final path component.
    pub filename: String,
    /// Path relative to the archive root, `/`-separated.
    pub fullpath: String,
    pub local_path: PathBuf,
}

impl FileEntry {
    fn new(owner_id: &str, parent_id: &str, member: &str, local_path: PathBuf) -> FileEntry {
        FileEntry {
            owner_id: owner_id.to_string(),
            parent_id: parent_id.to_string(),
            member_path: member.to_string(),
            filename: member.rsplit('/').next().unwrap_or(member).to_string(),
            fullpath: member.to_string(),
            local_path,
        }
    }

    pub fn open(&self) -> io::Result<File> {
        File::open(&self.local_path)
    }

    pub fn read(&self) -> io::Result<Vec<u8>> {
        std::fs::read(&self.local_path)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error("fetching {url} failed: {cause}")]
    FetchFailed { url: String, cause: String },
    #[error("checksum mismatch for {resource}: expected {expected}, got {actual}")]
    ChecksumMismatch { resource: String, expected: String, actual: String },
    #[error("{archive} has no member `{path}`")]
    ArchiveMemberMissing { archive: String, path: String },
    #[error("invalid glob `{pattern}`: {reason}")]
    GlobInvalid { pattern: String, reason: String },
    #[error("{resource} is not an archive or directory (encodingFormat {format})")]
    NotAnArchive { resource: String, format: String },
    #[error("unsupported archive format `{0}`")]
    UnsupportedArchiveFormat(String),
    #[error("corrupt archive {resource}: {reason}")]
    CorruptArchive { resource: String, reason: String },
    #[error("no resource named `{0}`")]
    UnknownResource(String),
    #[error("{0} has no contentUrl")]
    MissingContentUrl(String),
    #[error("containedIn chain of {0} is cyclic or too deep")]
    ContainmentCycle(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl ResourceError {
    fn from_archive(resource: &str, e: ArchiveError) -> ResourceError {
        match e {
            ArchiveError::Unsupported(f) => ResourceError::UnsupportedArchiveFormat(f),
            ArchiveError::Corrupt { reason, .. } => {
                ResourceError::CorruptArchive { resource: resource.to_string(), reason }
            }
            ArchiveError::Io { path, source } => ResourceError::Io { path, source },
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ResourceError + '_ {
    move |source| ResourceError::Io { path: path.to_path_buf(), source }
}

enum Location {
    /// http(s) and data URLs, stored in the cache.
    Cached,
    Local(PathBuf),
}

const MAX_CONTAINMENT_DEPTH: usize = 8;

/// Fetches and resolves resources through a [`Cache`].
#[derive(Debug)]
pub struct Resolver {
    cache: Cache,
    base_dir: PathBuf,
    config: Config,
    parallelism: usize,
    agent: ureq::Agent,
}

impl Resolver {
    pub fn new(cache: Cache) -> Resolver {
        let agent_config = ureq::Agent::config_builder()
            .max_redirects(5)
            .http_status_as_error(false)
            .timeout_connect(Some(Duration::from_secs(30)))
            .build();
        Resolver {
            cache,
            base_dir: std::env::current_dir().unwrap_or_else(|_| PathBuf::from(".")),
            config: Config::default(),
            parallelism: 4,
            agent: ureq::Agent::new_with_config(agent_config),
        }
    }

    /// Directory that relative `contentUrl`s resolve against (usually the
    /// directory of the metadata file).
    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Resolver {
        self.base_dir = dir.into();
        self
    }

    pub fn with_config(mut self, config: Config) -> Resolver {
        self.config = config;
        self
    }

    pub fn with_parallelism(mut self, n: usize) -> Resolver {
        self.parallelism = n.max(1);
        self
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    fn locate(&self, url: &str) -> Result<Location, ResourceError> {
        let lower = url.to_ascii_lowercase();
        if ["http://", "https://", "data:"].iter().any(|p| lower.starts_with(p)) {
            Ok(Location::Cached)
        } else if lower.starts_with("file:") {
            let path = url::Url::parse(url).ok().and_then(|u| u.to_file_path().ok()).ok_or_else(|| {
                ResourceError::FetchFailed { url: url.to_string(), cause: "not a valid file URL".into() }
            })?;
            Ok(Location::Local(path))
        } else {
            Ok(Location::Local(self.base_dir.join(url)))
        }
    }

    /// Fetches a FileObject (and, for archive members, its container).
    pub fn fetch(&self, model: &DatasetModel, id: &str) -> Result<LocalResource, ResourceError> {
        self.fetch_depth(model, id, 0)
    }

    fn fetch_depth(&self, model: &DatasetModel, id: &str, depth: usize) -> Result<LocalResource, ResourceError> {
        if depth > MAX_CONTAINMENT_DEPTH {
            return Err(ResourceError::ContainmentCycle(id.to_string()));
        }
        let fo = match model.resource(id) {
            Some(Resource::FileObject(fo)) => fo,
            _ => return Err(ResourceError::UnknownResource(id.to_string())),
        };
        match &fo.contained_in {
            Some(parent_id) => {
                let parent = self.fetch_depth(model, parent_id, depth + 1)?;
                self.fetch_member(fo, &parent)
            }
            None => self.fetch_file_object(fo),
        }
    }

    /// Fetches a standalone FileObject.
    pub fn fetch_file_object(&self, fo: &FileObject) -> Result<LocalResource, ResourceError> {
        let url = fo.content_url.as_deref().ok_or_else(|| ResourceError::MissingContentUrl(fo.id.clone()))?;
        let declared = fo.sha256.as_deref();
        let done = |local_path: PathBuf, sha256: Option<String>, key: String| LocalResource {
            resource_id: fo.id.clone(),
            local_path,
            verified: declared.is_some(),
            encoding_format: fo.encoding_format.clone(),
            sha256,
            key,
        };
        match self.locate(url)? {
            Location::Local(path) => {
                let md = std::fs::metadata(&path).map_err(|e| ResourceError::FetchFailed {
                    url: url.to_string(),
                    cause: format!("{}: {e}", path.display()),
                })?;
                let canon = path.canonicalize().map_err(io_err(&path))?;
                if md.is_dir() {
                    if declared.is_some() {
                        return Err(ResourceError::FetchFailed {
                            url: url.to_string(),
                            cause: "a directory has no sha256".into(),
                        });
                    }
                    let key = Cache::key(&format!("dir:{}", canon.display()), None);
                    return Ok(done(canon, None, key));
                }
                let actual = sha256_file(&canon).map_err(io_err(&canon))?;
                check(&fo.id, declared, &actual)?;
                let mtime = md.modified().ok().and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok());
                let stamp = format!("file:{}#{}-{}", canon.display(), md.len(), mtime.map_or(0, |d| d.as_nanos()));
                let key = Cache::key(&stamp, declared);
                Ok(done(canon, Some(actual), key))
            }
            Location::Cached => {
                let key = Cache::key(url, declared);
                let lock_path = self.cache.root().to_path_buf();
                let _lock = self.cache.lock(&key).map_err(io_err(&lock_path))?;
                let meta = match self.cache.lookup(&key) {
                    Some(meta) => {
                        check(&fo.id, declared, &meta.sha256)?;
                        meta
                    }
                    None => {
                        let mut reader = self.open_remote(url)?;
                        match self.cache.store(&key, url, declared, &mut reader) {
                            Ok(meta) => meta,
                            Err(StoreError::Mismatch { actual }) => {
                                return Err(ResourceError::ChecksumMismatch {
                                    resource: fo.id.clone(),
                                    expected: declared.unwrap_or_default().to_string(),
                                    actual,
                                })
                            }
                            Err(StoreError::Io(e)) => {
                                return Err(ResourceError::FetchFailed { url: url.to_string(), cause: e.to_string() })
                            }
                        }
                    }
                };
                Ok(done(self.cache.blob_path(&key), Some(meta.sha256), key))
            }
        }
    }

    /// Reads a whole http(s) or data URL without caching it, e.g. a metadata
    /// document named on the command line.
    pub fn read_url(&self, url: &str) -> Result<Vec<u8>, ResourceError> {
        let mut bytes = Vec::new();
        self.open_remote(url)?
            .read_to_end(&mut bytes)
            .map_err(|e| ResourceError::FetchFailed { url: url.to_string(), cause: e.to_string() })?;
        Ok(bytes)
    }

    fn open_remote(&self, url: &str) -> Result<Box<dyn Read + Send>, ResourceError> {
        let failed = |cause: String| ResourceError::FetchFailed { url: url.to_string(), cause };
        if url.get(..5).is_some_and(|p| p.eq_ignore_ascii_case("data:")) {
            let data = data_url::DataUrl::process(url).map_err(|e| failed(format!("{e:?}")))?;
            let (bytes, _) = data.decode_to_vec().map_err(|e| failed(format!("{e:?}")))?;
            return Ok(Box::new(io::Cursor::new(bytes)));
        }
        let host = url::Url::parse(url).ok().and_then(|u| u.host_str().map(str::to_string));
        let mut req = self.agent.get(url);
        if let Some(token) = host.and_then(|h| self.config.token_for(&h)) {
            req = req.header("Authorization", format!("Bearer {token}"));
        }
        let resp = req.call().map_err(|e| failed(e.to_string()))?;
        let status = resp.status().as_u16();
        if status >= 400 {
            let hint = match status {
                401 | 403 => " (authentication required; configure a token for this host)",
                _ => "",
            };
            return Err(failed(format!("HTTP {status}{hint}")));
        }
        Ok(Box::new(resp.into_body().into_reader()))
    }

    fn open_archive_of(&self, res: &LocalResource) -> Result<Archive, ResourceError> {
        Archive::open(&res.local_path, res.encoding_format.as_deref()).map_err(|e| match e {
            ArchiveError::Unsupported(format) => {
                ResourceError::NotAnArchive { resource: res.resource_id.clone(), format }
            }
            other => ResourceError::from_archive(&res.resource_id, other),
        })
    }

    /// Makes `members` of `parent` available on disk.
    fn extract(
        &self,
        parent: &LocalResource,
        archive: &Archive,
        members: &BTreeSet<String>,
    ) -> Result<BTreeMap<String, PathBuf>, ResourceError> {
        let dest = self.cache.members_dir(&parent.key);
        let _lock = match archive.kind() {
            ArchiveKind::Directory => None,
            _ => Some(self.cache.lock(&parent.key).map_err(io_err(self.cache.root()))?),
        };
        archive.extract(members, &dest).map_err(|e| ResourceError::from_archive(&parent.resource_id, e))
    }

    /// Fetches a FileObject that lives inside `parent`.
    pub fn fetch_member(&self, fo: &FileObject, parent: &LocalResource) -> Result<LocalResource, ResourceError> {
        let url = fo.content_url.as_deref().ok_or_else(|| ResourceError::MissingContentUrl(fo.id.clone()))?;
        let missing =
            || ResourceError::ArchiveMemberMissing { archive: parent.resource_id.clone(), path: url.to_string() };
        let name = archive::normalize(url).ok().flatten().ok_or_else(missing)?;
        let archive = self.open_archive_of(parent)?;
        let wanted = BTreeSet::from([name.clone()]);
        let found = self.extract(parent, &archive, &wanted)?;
        let path = found.get(&name).cloned().ok_or_else(missing)?;
        let actual = sha256_file(&path).map_err(io_err(&path))?;
        check(&fo.id, fo.sha256.as_deref(), &actual)?;
        Ok(LocalResource {
            resource_id: fo.id.clone(),
            local_path: path,
            verified: fo.sha256.is_some(),
            encoding_format: fo.encoding_format.clone(),
            key: Cache::key(&format!("{}!{name}", parent.key), fo.sha256.as_deref()),
            sha256: Some(actual),
        })
    }

    /// Fetches several FileObjects with bounded parallelism. The first error
    /// (in `ids` order) wins.
    pub fn fetch_many(
        &self,
        model: &DatasetModel,
        ids: &[String],
    ) -> Result<BTreeMap<String, LocalResource>, ResourceError> {
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<Result<LocalResource, ResourceError>>>> =
            Mutex::new((0..ids.len()).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..self.parallelism.min(ids.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= ids.len() {
                        break;
                    }
                    let r = self.fetch(model, &ids[i]);
                    results.lock().unwrap()[i] = Some(r);
                });
            }
        });
        let mut out = BTreeMap::new();
        for (id, r) in ids.iter().zip(results.into_inner().unwrap()) {
            out.insert(id.clone(), r.expect("every index is processed")?);
        }
        Ok(out)
    }

    /// Members of `fs` inside one already-fetched container, ordered by
    /// fullpath.
    pub fn resolve_file_set(&self, fs: &FileSet, parent: &LocalResource) -> Result<Vec<FileEntry>, ResourceError> {
        let includes = glob_set(&fs.includes)?;
        let excludes = glob_set(&fs.excludes)?;
        let archive = self.open_archive_of(parent)?;
        let members = archive.members().map_err(|e| ResourceError::from_archive(&parent.resource_id, e))?;
        let matched: BTreeSet<String> =
            members.into_iter().filter(|m| includes.is_match(m) && !excludes.is_match(m)).collect();
        let found = self.extract(parent, &archive, &matched)?;
        Ok(found.into_iter().map(|(name, path)| FileEntry::new(&fs.id, &parent.resource_id, &name, path)).collect())
    }

    /// Fetches every container of the FileSet `id` and resolves its members.
    pub fn file_set_entries(&self, model: &DatasetModel, id: &str) -> Result<Vec<FileEntry>, ResourceError> {
        let fs = match model.resource(id) {
            Some(Resource::FileSet(fs)) => fs,
            _ => return Err(ResourceError::UnknownResource(id.to_string())),
        };
        let parents = self.fetch_many(model, &fs.contained_in)?;
        let mut entries = Vec::new();
        for parent_id in &fs.contained_in {
            entries.extend(self.resolve_file_set(fs, &parents[parent_id])?);
        }
        entries.sort_by(|a, b| a.fullpath.cmp(&b.fullpath));
        Ok(entries)
    }
}

fn check(resource: &str, declared: Option<&str>, actual: &str) -> Result<(), ResourceError> {
    match declared {
        Some(expected) if expected != actual => Err(ResourceError::ChecksumMismatch {
            resource: resource.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        }),
        _ => Ok(()),
    }
}

/// Compiles include/exclude patterns: `*` stays within a segment, `**`
/// crosses segments, anchored at the container root.
pub fn glob_set(patterns: &[String]) -> Result<GlobSet, ResourceError> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        crate::validate::check_glob(p).map_err(|reason| ResourceError::GlobInvalid { pattern: p.clone(), reason })?;
        let glob = GlobBuilder::new(p)
            .literal_separator(true)
            .build()
            .map_err(|e| ResourceError::GlobInvalid { pattern: p.clone(), reason: e.to_string() })?;
        b.add(glob);
    }
    b.build().map_err(|e| ResourceError::GlobInvalid { pattern: patterns.join(", "), reason: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn globs_respect_segments() {
        let s = glob_set(&["*.jpg".into()]).unwrap();
        assert!(s.is_match("a.jpg"));
        assert!(!s.is_match("dir/a.jpg"));
        let s = glob_set(&["**/*.json".into()]).unwrap();
        assert!(s.is_match("a/b/c.json"));
        assert!(s.is_match("c.json"));
        assert!(matches!(glob_set(&["[".into()]), Err(ResourceError::GlobInvalid { .. })));
    }

    #[test]
    fn data_urls_are_fetched_and_verified() {
        let dir = tempfile::tempdir().unwrap();
        let r = Resolver::new(Cache::new(dir.path()));
        // sha256("hello")
        let sha = "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824";
        let fo = FileObject {
            id: "x".into(),
            content_url: Some("data:text/plain;base64,aGVsbG8=".into()),
            sha256: Some(sha.into()),
            ..Default::default()
        };
        let local = r.fetch_file_object(&fo).unwrap();
        assert!(local.verified);
        assert_eq!(std::fs::read(&local.local_path).unwrap(), b"hello");
        let again = r.fetch_file_object(&fo).unwrap();
        assert_eq!(again, local);

        let bad = FileObject { sha256: Some(sha.replace('2', "3")), ..fo };
        assert!(matches!(r.fetch_file_object(&bad), Err(ResourceError::ChecksumMismatch { .. })));
    }
}
