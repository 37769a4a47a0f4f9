//! Documents named on the command line: a path, an http(s) URL, or `-`.

use std::io::Read;
use std::path::PathBuf;

use anyhow::{Context, Result};
use croissant_forge::model::{DatasetModel, Resource};
use croissant_forge::resources::{Cache, Config, Resolver};

pub fn is_url(arg: &str) -> bool {
    let lower = arg.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://")
}

/// A resolver whose relative paths resolve next to the document.
pub fn resolver_for(arg: &str) -> Result<Resolver> {
    let config = Config::discover().context("loading configuration")?;
    let mut resolver = Resolver::new(Cache::from_env()).with_config(config);
    if arg != "-" && !is_url(arg) {
        let parent = PathBuf::from(arg).parent().map(PathBuf::from).unwrap_or_default();
        if !parent.as_os_str().is_empty() {
            resolver = resolver.with_base_dir(parent);
        }
    }
    Ok(resolver)
}

pub fn read(arg: &str, resolver: &Resolver) -> Result<Vec<u8>> {
    if arg == "-" {
        let mut bytes = Vec::new();
        std::io::stdin().read_to_end(&mut bytes).context("reading stdin")?;
        Ok(bytes)
    } else if is_url(arg) {
        Ok(resolver.read_url(arg)?)
    } else {
        std::fs::read(arg).with_context(|| format!("cannot read {arg}"))
    }
}

/// Makes top-level relative contentUrls absolute against the URL the
/// document came from. Archive members keep their in-archive paths.
pub fn absolutize(model: &mut DatasetModel, document_url: &str) -> Result<()> {
    let base = url::Url::parse(document_url).with_context(|| format!("invalid URL {document_url}"))?;
    for resource in &mut model.resources {
        let Resource::FileObject(fo) = resource else { continue };
        if fo.contained_in.is_some() {
            continue;
        }
        if let Some(u) = &fo.content_url {
            if url::Url::parse(u).is_err() {
                fo.content_url = Some(base.join(u).with_context(|| format!("cannot resolve {u}"))?.to_string());
            }
        }
    }
    Ok(())
}
