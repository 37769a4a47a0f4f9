//! Record extraction: plans a RecordSet over fetched resources, then streams
//! typed records with joins, transforms, coercion and split slicing.

mod exec;
mod plan;
mod raw;
mod slice;
mod table;

use std::path::PathBuf;

pub use plan::{plan, FileUnit, JoinInfo, RecordPlan, SourceKey, SourceMode, SourcePlan};
pub use raw::{
    apply_transforms, coerce, CoercionFailed, CompiledTransform, Raw, TransformNotes, TransformTypeMismatch,
};
pub use slice::{Bound, SliceSyntax, SplitSlice};
pub use table::{Table, TableFormat};

use crate::model::Record;
use crate::resources::ResourceError;
use crate::validate::ValidationReport;

#[derive(Debug, thiserror::Error)]
pub enum RecordsError {
    #[error("the document does not validate: {}", .0.summary())]
    InvalidDocument(ValidationReport),
    #[error("no record set `{0}`")]
    RecordSetUnknown(String),
    #[error("join column `{column}` is missing from {resource}")]
    JoinColumnMissing { resource: String, column: String },
    #[error("column `{column}` is missing from {resource}")]
    ColumnMissing { resource: String, column: String },
    #[error("{origin} has unsupported encodingFormat `{format}`")]
    UnsupportedEncodingFormat { origin: String, format: String },
    #[error("{origin} with encodingFormat `{format}` cannot serve {extract} extraction")]
    EncodingMismatch { origin: String, format: String, extract: String },
    #[error("field `{field}`: {reason}")]
    UnsupportedSource { field: String, reason: String },
    #[error("{origin} is not joined to the driving source by any reference")]
    SourceNotJoined { origin: String },
    #[error("type mismatch in `{field}`: {reason}")]
    TypeMismatch { field: String, reason: String },
    #[error("record set `{0}` has no field typed cr:Split")]
    NoSplitField(String),
    #[error(transparent)]
    SliceSyntax(#[from] SliceSyntax),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("cannot read {resource}: {reason}")]
    Table { resource: String, reason: String },
    #[error("record {ordinal}: cannot read `{value}` as {data_type} in field `{field}`")]
    CoercionFailed { ordinal: usize, field: String, value: String, data_type: String },
    #[error("record {ordinal}: {source}")]
    AtRecord { ordinal: usize, source: Box<RecordsError> },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

/// Counters gathered while streaming.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RecordStats {
    /// Items read from the driving source.
    pub root_items: usize,
    /// Records produced after joins, before split filtering and slicing.
    pub records: usize,
    /// Records dropped by the split filter.
    pub filtered_out: usize,
    pub regex_misses: usize,
    /// Values nulled in lenient mode.
    pub coercion_failures: usize,
    pub duplicate_keys: usize,
    /// Files whose jsonPath match lists had different lengths.
    pub ragged_json_files: usize,
}

impl RecordStats {
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut note = |n: usize, what: &str| {
            if n > 0 {
                out.push(format!("{n} {what}"));
            }
        };
        note(self.regex_misses, "value(s) did not match a regex transform");
        note(self.coercion_failures, "value(s) could not be coerced and were set to null");
        note(self.duplicate_keys, "record(s) repeat a key");
        note(self.ragged_json_files, "file(s) had jsonPath matches of different lengths");
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReadOptions {
    /// Fail on the first coercion error instead of writing null.
    pub strict: bool,
    /// Split name, optionally sliced (`train[:80%]`).
    pub split: Option<SplitSlice>,
    pub limit: Option<usize>,
}

enum Window {
    Stream { skip: usize, take: Option<usize> },
    Pending(SplitSlice),
    Buffered(std::vec::IntoIter<Record>),
}

/// Records of a plan, after split filtering, slicing and limit.
pub struct Records<'p> {
    stream: exec::RecordStream<'p>,
    window: Window,
    limit: Option<usize>,
    emitted: usize,
    failed: bool,
}

impl Records<'_> {
    pub fn stats(&self) -> &RecordStats {
        &self.stream.stats
    }
}

impl Iterator for Records<'_> {
    type Item = Result<Record, RecordsError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.limit.is_some_and(|l| self.emitted >= l) {
            return None;
        }
        if let Window::Pending(slice) = &self.window {
            let slice = slice.clone();
            let mut all = Vec::new();
            for r in self.stream.by_ref() {
                match r {
                    Ok(r) => all.push(r),
                    Err(e) => {
                        self.failed = true;
                        return Some(Err(e));
                    }
                }
            }
            let range = slice.range(all.len());
            let picked: Vec<Record> = all.drain(range).collect();
            self.window = Window::Buffered(picked.into_iter());
        }
        let item = match &mut self.window {
            Window::Buffered(it) => it.next().map(Ok),
            Window::Stream { skip, take } => loop {
                if *take == Some(0) {
                    break None;
                }
                match self.stream.next() {
                    Some(Ok(_)) if *skip > 0 => *skip -= 1,
                    Some(Ok(r)) => {
                        if let Some(t) = take {
                            *t -= 1;
                        }
                        break Some(Ok(r));
                    }
                    other => break other,
                }
            },
            Window::Pending(_) => unreachable!(),
        };
        match &item {
            Some(Ok(_)) => self.emitted += 1,
            Some(Err(_)) => self.failed = true,
            None => {}
        }
        item
    }
}

/// Streams the records of `plan`.
pub fn read_records<'p>(plan: &'p RecordPlan, options: &ReadOptions) -> Result<Records<'p>, RecordsError> {
    let filter = match &options.split {
        Some(s) if !is_whole_set(plan, &s.name) => {
            let field =
                plan.split_field.clone().ok_or_else(|| RecordsError::NoSplitField(plan.record_set_id.clone()))?;
            Some((field, s.name.clone()))
        }
        _ => None,
    };
    let window = match &options.split {
        Some(s) if s.needs_total() => Window::Pending(s.clone()),
        Some(s) => {
            let r = s.range(usize::MAX);
            Window::Stream { skip: r.start, take: (r.end != usize::MAX).then(|| r.end - r.start) }
        }
        None => Window::Stream { skip: 0, take: None },
    };
    Ok(Records {
        stream: exec::RecordStream::new(plan, options.strict, filter),
        window,
        limit: options.limit,
        emitted: 0,
        failed: false,
    })
}

fn is_whole_set(plan: &RecordPlan, name: &str) -> bool {
    name == "default" || name == plan.record_set_id || plan.record_set_id.rsplit('/').next() == Some(name)
}
