use std::net::IpAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "croissant-forge", version, about = "Validate, inspect and load Croissant dataset descriptions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a document against the Croissant 1.0 rules.
    Validate(DocArgs),
    /// Summarize a document, or print its canonical form with --json.
    Inspect(DocArgs),
    /// Stream the records of a RecordSet as JSON lines.
    Records(RecordsArgs),
    /// Validate a corpus of documents and report aggregate metrics.
    Health(HealthArgs),
    /// Serve the editor API on a local port.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct DocArgs {
    /// Path, http(s) URL, or `-` for stdin.
    pub document: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Jsonl,
    Summary,
}

#[derive(Debug, Args)]
pub struct RecordsArgs {
    /// Path, http(s) URL, or `-` for stdin.
    pub document: String,
    /// RecordSet id or name; optional when the document has exactly one.
    #[arg(long)]
    pub record_set: Option<String>,
    #[arg(long)]
    pub limit: Option<usize>,
    /// Slice such as `default[:80%]` or `train[10:20]`.
    #[arg(long, conflicts_with = "split")]
    pub slice: Option<String>,
    /// Keep only records whose Split field equals this name.
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long, value_enum, default_value_t = Output::Jsonl)]
    pub output: Output,
    /// Abort on the first value that does not match its dataType.
    #[arg(long)]
    pub strict: bool,
    /// Emit the summary as JSON (JSON lines output is already JSON).
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct HealthArgs {
    /// A directory of documents, or a listing URL.
    pub source: String,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, default_value_t = croissant_forge::health::DEFAULT_WORKERS)]
    pub workers: usize,
    /// Listing adapter for URL sources: json-array or hf-like.
    #[arg(long, default_value = "json-array")]
    pub adapter: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8765)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: IpAddr,
    /// Open the editor in a browser once listening.
    #[arg(long)]
    pub open: bool,
    /// Directory with the built editor, served under `/`.
    #[arg(long)]
    pub assets: Option<PathBuf>,
    /// Directory that relative contentUrls resolve against in previews.
    #[arg(long)]
    pub base_dir: Option<PathBuf>,
    /// Largest accepted upload, in megabytes.
    #[arg(long, default_value_t = 100)]
    pub max_upload_mb: usize,
}
