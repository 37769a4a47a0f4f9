//! `croissant-forge.toml`: per-host bearer tokens for authenticated
//! downloads.
//!
//! ```toml
//! [hosts."huggingface.co"]
//! token_env = "HF_TOKEN"
//!
//! [hosts."data.example.org"]
//! token = "secret"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub hosts: BTreeMap<String, HostConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostConfig {
    /// Literal bearer token.
    pub token: Option<String>,
    /// Name of an environment variable holding the token; wins over `token`
    /// when set.
    pub token_env: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
}

impl Config {
    pub fn parse(text: &str, path: &Path) -> Result<Config, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Config::parse(&text, path)
    }

    /// `$CROISSANT_FORGE_CONFIG`, else `~/.config/croissant-forge/croissant-forge.toml`
    /// when it exists, else an empty config.
    pub fn discover() -> Result<Config, ConfigError> {
        if let Some(p) = std::env::var_os("CROISSANT_FORGE_CONFIG") {
            return Config::load(Path::new(&p));
        }
        match std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".config/croissant-forge/croissant-forge.toml")) {
            Some(p) if p.is_file() => Config::load(&p),
            _ => Ok(Config::default()),
        }
    }

    /// Bearer token for `host`, if configured.
    pub fn token_for(&self, host: &str) -> Option<String> {
        let h = self.hosts.get(host)?;
        h.token_env.as_ref().and_then(|v| std::env::var(v).ok()).or_else(|| h.token.clone())
    }
}
