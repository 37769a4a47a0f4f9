//! Compiles a RecordSet into an executable plan: which source drives
//! iteration, how each field reads its value, and how other sources are
//! joined in.

use std::collections::HashMap;
use std::path::PathBuf;

use serde_json::Value as Json;

use super::raw::CompiledTransform;
use super::table::{Table, TableFormat};
use super::RecordsError;
use crate::jsonpath::JsonPath;
use crate::model::{
    DataType, DatasetModel, Extract, FieldDef, FileProperty, RecordSetDef, ReferenceSpec, Resource, SemanticRole,
    SourceKind, SourceSpec,
};
use crate::resources::{Resolver, ResourceError};

pub type SourceKey = (SourceKind, String);

/// How a source yields items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceMode {
    /// One item per file.
    File,
    /// One item per table row.
    Table(TableFormat),
    /// One item per text line.
    Lines,
    /// One item per jsonPath match index; paths are zipped.
    JsonPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileUnit {
    pub filename: String,
    pub fullpath: String,
    pub local_path: PathBuf,
}

/// Decoded content of one file of a source.
#[derive(Debug, Clone)]
pub(crate) enum Loaded {
    File,
    Table(Table),
    Lines(Vec<String>),
    /// Matches per jsonPath of the source, plus the zipped item count.
    Json {
        matches: Vec<Vec<Json>>,
        count: usize,
        ragged: bool,
    },
}

impl Loaded {
    pub(crate) fn count(&self) -> usize {
        match self {
            Loaded::File => 1,
            Loaded::Table(t) => t.len(),
            Loaded::Lines(l) => l.len(),
            Loaded::Json { count, .. } => *count,
        }
    }
}

#[derive(Debug)]
pub struct SourcePlan {
    pub key: SourceKey,
    pub mode: SourceMode,
    pub encoding_format: Option<String>,
    pub files: Vec<FileUnit>,
    pub(crate) json_paths: Vec<JsonPath>,
    /// Content of every file, for all sources but a FileSet root.
    pub(crate) preloaded: Option<Vec<Loaded>>,
}

impl SourcePlan {
    pub fn describe(&self) -> String {
        format!("{} `{}`", self.key.0.key(), self.key.1)
    }
}

/// Where one value comes from.
#[derive(Debug, Clone)]
pub(crate) struct Access {
    pub source: usize,
    pub extract: Extract,
    pub json_path: Option<usize>,
    pub transforms: Vec<CompiledTransform>,
}

#[derive(Debug, Clone)]
pub(crate) struct Leaf {
    pub field_id: String,
    pub access: Access,
    pub value_type: Option<DataType>,
}

#[derive(Debug, Clone)]
pub(crate) enum Program {
    Leaf(usize),
    Geo { latitude: Box<Program>, longitude: Box<Program> },
    Group(Vec<(String, Program)>),
}

/// Position of an item inside a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct ItemRef {
    pub file: usize,
    pub pos: usize,
}

#[derive(Debug)]
pub(crate) enum JoinStep {
    /// Binds `target` to every item whose key equals the probe value.
    Bind { probe: Access, target: usize, index: HashMap<String, Vec<ItemRef>> },
    /// Keeps environments where both (already bound) sides agree.
    Filter { left: Access, right: Access },
}

/// Human-readable summary of one join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinInfo {
    /// Field whose value drives the join.
    pub field: String,
    /// Source bound (or filtered) by the join.
    pub target: SourceKey,
    /// Column or field matched on the other side.
    pub on: String,
    pub filter_only: bool,
}

#[derive(Debug)]
pub(crate) struct InlineField {
    pub id: String,
    pub name: Option<String>,
    pub value_type: Option<DataType>,
    pub sub_fields: Vec<InlineField>,
}

/// An executable RecordSet.
#[derive(Debug)]
pub struct RecordPlan {
    pub record_set_id: String,
    /// Index into `sources` of the driving source; `None` for inline data.
    pub root: Option<usize>,
    pub sources: Vec<SourcePlan>,
    pub joins: Vec<JoinInfo>,
    /// FileObjects and FileSets fetched while planning.
    pub prefetched: Vec<String>,
    pub key: Vec<String>,
    pub(crate) leaves: Vec<Leaf>,
    pub(crate) fields: Vec<(String, Program)>,
    pub(crate) steps: Vec<JoinStep>,
    pub(crate) inline: Option<(Vec<Json>, Vec<InlineField>)>,
    /// Top-level field typed `cr:Split`, if any.
    pub(crate) split_field: Option<String>,
}

impl RecordPlan {
    pub fn root_source(&self) -> Option<&SourceKey> {
        self.root.map(|r| &self.sources[r].key)
    }

    pub fn field_ids(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|(id, _)| id.as_str())
    }
}

fn is_unsupported_format(format: &str) -> bool {
    let base = format.split(';').next().unwrap_or_default().trim().to_ascii_lowercase();
    base.starts_with("audio/") || base.contains("parquet")
}

fn is_json_format(format: &str) -> bool {
    let base = format.split(';').next().unwrap_or_default().trim().to_ascii_lowercase();
    base == "application/json" || base.ends_with("+json")
}

#[derive(Default)]
struct SourceBuilder {
    key: Option<SourceKey>,
    columns: bool,
    json_paths: Vec<String>,
    lines: bool,
    content_transformed: bool,
}

#[derive(Default)]
struct Registry {
    sources: Vec<SourceBuilder>,
}

impl Registry {
    fn require(&mut self, key: &SourceKey, extract: &Extract) -> (usize, Option<usize>) {
        let idx = match self.sources.iter().position(|s| s.key.as_ref() == Some(key)) {
            Some(i) => i,
            None => {
                self.sources.push(SourceBuilder { key: Some(key.clone()), ..Default::default() });
                self.sources.len() - 1
            }
        };
        let s = &mut self.sources[idx];
        let path_idx = match extract {
            Extract::Column(_) => {
                s.columns = true;
                None
            }
            Extract::FileProperty(FileProperty::Lines) => {
                s.lines = true;
                None
            }
            Extract::FileProperty(_) => None,
            Extract::JsonPath(p) => Some(match s.json_paths.iter().position(|q| q == p) {
                Some(i) => i,
                None => {
                    s.json_paths.push(p.clone());
                    s.json_paths.len() - 1
                }
            }),
        };
        (idx, path_idx)
    }
}

struct Planner<'m> {
    model: &'m DatasetModel,
    rs: &'m RecordSetDef,
    registry: Registry,
    leaves: Vec<Leaf>,
    /// (left access, right access, field id, description of the right side)
    constraints: Vec<(Access, Access, String, String)>,
}

impl<'m> Planner<'m> {
    fn access(&mut self, field_id: &str, src: &SourceSpec) -> Result<Access, RecordsError> {
        let unsupported = |reason: String| RecordsError::UnsupportedSource { field: field_id.to_string(), reason };
        if src.kind == SourceKind::Field {
            return Err(unsupported(format!(
                "sourcing from another field (`{}`) is not supported; reference it instead",
                src.target
            )));
        }
        let extract = src
            .extract
            .clone()
            .ok_or_else(|| unsupported("a file source needs a column, fileProperty or jsonPath".into()))?;
        let transforms = src
            .transforms
            .iter()
            .map(CompiledTransform::compile)
            .collect::<Result<Vec<_>, _>>()
            .map_err(unsupported)?;
        let key = (src.kind, src.target.clone());
        let (source, json_path) = self.registry.require(&key, &extract);
        if extract == Extract::FileProperty(FileProperty::Content) && !transforms.is_empty() {
            self.registry.sources[source].content_transformed = true;
        }
        Ok(Access { source, extract, json_path, transforms })
    }

    fn program(&mut self, f: &FieldDef) -> Result<Program, RecordsError> {
        if let Some(src) = &f.source {
            let access = self.access(&f.id, src)?;
            if self.registry.sources[access.source].content_transformed {
                return Err(RecordsError::TypeMismatch {
                    field: f.id.clone(),
                    reason: "transforms apply to text, not file content".into(),
                });
            }
            self.leaves.push(Leaf { field_id: f.id.clone(), access, value_type: f.value_type().cloned() });
            let leaf = self.leaves.len() - 1;
            if let Some(r) = &f.references {
                self.reference(f, leaf, r)?;
            }
            return Ok(Program::Leaf(leaf));
        }
        let mut children = Vec::new();
        for sub in &f.sub_fields {
            children.push((sub.id.clone(), self.program(sub)?, sub.semantic_role));
        }
        if f.references.is_some() {
            return Err(RecordsError::UnsupportedSource {
                field: f.id.clone(),
                reason: "only fields with a source can carry references".into(),
            });
        }
        let role = |r: SemanticRole| children.iter().position(|(_, _, role)| *role == Some(r));
        if f.has_type(&DataType::GeoCoordinates) && children.len() == 2 {
            if let (Some(lat), Some(lon)) = (role(SemanticRole::Latitude), role(SemanticRole::Longitude)) {
                for (_, p, _) in &children {
                    if let Program::Leaf(l) = p {
                        self.leaves[*l].value_type.get_or_insert(DataType::Float);
                    }
                }
                let mut progs: Vec<Option<Program>> = children.into_iter().map(|(_, p, _)| Some(p)).collect();
                return Ok(Program::Geo {
                    latitude: Box::new(progs[lat].take().unwrap()),
                    longitude: Box::new(progs[lon].take().unwrap()),
                });
            }
        }
        Ok(Program::Group(children.into_iter().map(|(id, p, _)| (id, p)).collect()))
    }

    fn reference(&mut self, f: &FieldDef, leaf: usize, r: &ReferenceSpec) -> Result<(), RecordsError> {
        let (right, on) = match r {
            ReferenceSpec::Column { file_object, column } => {
                let key = (SourceKind::FileObject, file_object.clone());
                let extract = Extract::Column(column.clone());
                let (source, _) = self.registry.require(&key, &extract);
                (Access { source, extract, json_path: None, transforms: Vec::new() }, format!("{file_object}.{column}"))
            }
            ReferenceSpec::Field(target) => {
                let (_, g) = self.model.field(target).ok_or_else(|| RecordsError::UnsupportedSource {
                    field: f.id.clone(),
                    reason: format!("referenced field `{target}` does not exist"),
                })?;
                let src = g.source.as_ref().ok_or_else(|| RecordsError::UnsupportedSource {
                    field: f.id.clone(),
                    reason: format!("referenced field `{target}` has no source"),
                })?;
                (self.access(target, src)?, target.clone())
            }
        };
        let left = self.leaves[leaf].access.clone();
        self.constraints.push((left, right, f.id.clone(), on));
        Ok(())
    }
}

fn file_unit_for(content_url: &str, member: bool, local_path: PathBuf) -> FileUnit {
    let trimmed = content_url.split(['?', '#']).next().unwrap_or(content_url);
    let fullpath = if member { trimmed.trim_start_matches("./").to_string() } else { trimmed.to_string() };
    let filename = fullpath.rsplit('/').next().unwrap_or(&fullpath).to_string();
    FileUnit { filename, fullpath, local_path }
}

pub(crate) fn load_file(plan: &SourcePlan, file: usize) -> Result<Loaded, RecordsError> {
    let unit = &plan.files[file];
    let table_err = |reason: String| RecordsError::Table { resource: unit.fullpath.clone(), reason };
    Ok(match plan.mode {
        SourceMode::File => Loaded::File,
        SourceMode::Table(format) => Loaded::Table(Table::read(&unit.local_path, format).map_err(table_err)?),
        SourceMode::Lines => {
            let text = std::fs::read_to_string(&unit.local_path).map_err(|e| table_err(e.to_string()))?;
            Loaded::Lines(text.lines().map(str::to_string).collect())
        }
        SourceMode::JsonPath => {
            let bytes = std::fs::read(&unit.local_path).map_err(|e| table_err(e.to_string()))?;
            let doc: Json = serde_json::from_slice(&bytes).map_err(|e| table_err(e.to_string()))?;
            let matches: Vec<Vec<Json>> =
                plan.json_paths.iter().map(|p| p.select(&doc).into_iter().cloned().collect()).collect();
            let count = matches.iter().map(Vec::len).max().unwrap_or(0);
            let ragged = matches.iter().any(|m| m.len() != count);
            Loaded::Json { matches, count, ragged }
        }
    })
}

/// Plans `record_set` (id or name). The document must validate; every
/// resource the plan reads is fetched and every join column is checked.
pub fn plan(model: &DatasetModel, record_set: &str, resolver: &Resolver) -> Result<RecordPlan, RecordsError> {
    let report = crate::validate::validate(model);
    if !report.passed {
        return Err(RecordsError::InvalidDocument(report));
    }
    let rs = model
        .record_set(record_set)
        .or_else(|| model.record_sets.iter().find(|rs| rs.name.as_deref() == Some(record_set)))
        .ok_or_else(|| RecordsError::RecordSetUnknown(record_set.to_string()))?;
    let split_field = rs.fields.iter().find(|f| f.has_type(&DataType::Split)).map(|f| f.id.clone());

    if let Some(data) = &rs.data {
        let rows = match data {
            Json::Array(items) => items.clone(),
            other => vec![other.clone()],
        };
        fn inline(f: &FieldDef) -> InlineField {
            InlineField {
                id: f.id.clone(),
                name: f.name.clone(),
                value_type: f.value_type().cloned(),
                sub_fields: f.sub_fields.iter().map(inline).collect(),
            }
        }
        return Ok(RecordPlan {
            record_set_id: rs.id.clone(),
            root: None,
            sources: Vec::new(),
            joins: Vec::new(),
            prefetched: Vec::new(),
            key: rs.key.clone(),
            leaves: Vec::new(),
            fields: Vec::new(),
            steps: Vec::new(),
            inline: Some((rows, rs.fields.iter().map(inline).collect())),
            split_field,
        });
    }

    let mut p = Planner { model, rs, registry: Registry::default(), leaves: Vec::new(), constraints: Vec::new() };
    let mut fields = Vec::new();
    for f in &rs.fields {
        let prog = p.program(f)?;
        fields.push((f.id.clone(), prog));
    }

    // Root: the source feeding the most top-level fields; ties go to the
    // source that appears first.
    let mut counts: Vec<usize> = vec![0; p.registry.sources.len()];
    let mut first_seen: Vec<usize> = Vec::new();
    fn leaf_sources(prog: &Program, leaves: &[Leaf], out: &mut Vec<usize>) {
        match prog {
            Program::Leaf(l) => {
                if !out.contains(&leaves[*l].access.source) {
                    out.push(leaves[*l].access.source);
                }
            }
            Program::Geo { latitude, longitude } => {
                leaf_sources(latitude, leaves, out);
                leaf_sources(longitude, leaves, out);
            }
            Program::Group(children) => children.iter().for_each(|(_, c)| leaf_sources(c, leaves, out)),
        }
    }
    for (_, prog) in &fields {
        let mut srcs = Vec::new();
        leaf_sources(prog, &p.leaves, &mut srcs);
        for s in srcs {
            counts[s] += 1;
            if !first_seen.contains(&s) {
                first_seen.push(s);
            }
        }
    }
    let root = first_seen
        .iter()
        .copied()
        .fold(None, |best: Option<usize>, s| match best {
            Some(b) if counts[b] >= counts[s] => Some(b),
            _ => Some(s),
        })
        .ok_or_else(|| RecordsError::UnsupportedSource {
            field: rs.id.clone(),
            reason: "the record set has no sourced fields".into(),
        })?;

    // Finalize modes and fetch.
    let mut sources = Vec::new();
    let mut fetch_ids = Vec::new();
    for b in &p.registry.sources {
        let key = b.key.clone().unwrap();
        if key.0 == SourceKind::FileObject && !fetch_ids.contains(&key.1) {
            fetch_ids.push(key.1.clone());
        }
    }
    let fetched = resolver.fetch_many(model, &fetch_ids)?;
    let mut prefetched = fetch_ids.clone();
    for (i, b) in p.registry.sources.iter().enumerate() {
        let key = b.key.clone().unwrap();
        let resource = model.resource(&key.1).ok_or_else(|| ResourceError::UnknownResource(key.1.clone()))?;
        let format = resource.encoding_format().map(str::to_string);
        let fmt = format.as_deref().unwrap_or("<none>");
        let describe = || format!("{} `{}`", key.0.key(), key.1);
        if is_unsupported_format(fmt) {
            return Err(RecordsError::UnsupportedEncodingFormat { origin: describe(), format: fmt.to_string() });
        }
        let mismatch = |extract: &str| RecordsError::EncodingMismatch {
            origin: describe(),
            format: fmt.to_string(),
            extract: extract.to_string(),
        };
        let mode = match (b.columns, !b.json_paths.is_empty(), b.lines) {
            (false, false, false) => SourceMode::File,
            (true, false, false) => SourceMode::Table(TableFormat::from_format(fmt).ok_or_else(|| mismatch("column"))?),
            (false, true, false) if is_json_format(fmt) => SourceMode::JsonPath,
            (false, true, false) => return Err(mismatch("jsonPath")),
            (false, false, true) => SourceMode::Lines,
            _ => return Err(mismatch("a mix of column, jsonPath and lines")),
        };
        let json_paths = b
            .json_paths
            .iter()
            .map(|s| JsonPath::parse(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| RecordsError::UnsupportedSource { field: describe(), reason: e.to_string() })?;
        let files = match resource {
            Resource::FileObject(fo) => {
                let local = &fetched[&fo.id];
                vec![file_unit_for(
                    fo.content_url.as_deref().unwrap_or(&fo.id),
                    fo.contained_in.is_some(),
                    local.local_path.clone(),
                )]
            }
            Resource::FileSet(_) => {
                prefetched.push(key.1.clone());
                resolver
                    .file_set_entries(model, &key.1)?
                    .into_iter()
                    .map(|e| FileUnit { filename: e.filename, fullpath: e.fullpath, local_path: e.local_path })
                    .collect()
            }
        };
        let mut sp = SourcePlan { key, mode, encoding_format: format, files, json_paths, preloaded: None };
        if !(i == root && sp.key.0 == SourceKind::FileSet) {
            let loaded = (0..sp.files.len()).map(|f| load_file(&sp, f)).collect::<Result<Vec<_>, _>>()?;
            sp.preloaded = Some(loaded);
        }
        sources.push(sp);
    }

    // Column checks for every preloaded table.
    let check_column = |access: &Access, join: bool| -> Result<(), RecordsError> {
        let sp: &SourcePlan = &sources[access.source];
        if let (Extract::Column(c), Some(loaded)) = (&access.extract, &sp.preloaded) {
            for (file, l) in loaded.iter().enumerate() {
                if let Loaded::Table(t) = l {
                    if t.column(c).is_none() {
                        let resource = format!("{} ({})", sp.key.1, sp.files[file].fullpath);
                        return Err(if join {
                            RecordsError::JoinColumnMissing { resource, column: c.clone() }
                        } else {
                            RecordsError::ColumnMissing { resource, column: c.clone() }
                        });
                    }
                }
            }
        }
        Ok(())
    };
    for (left, right, _, _) in &p.constraints {
        check_column(left, true)?;
        check_column(right, true)?;
    }
    for leaf in &p.leaves {
        check_column(&leaf.access, false)?;
    }

    // Order joins: repeatedly take the first constraint with a bound side.
    let mut bound = vec![false; sources.len()];
    bound[root] = true;
    let mut pending: Vec<(Access, Access, String, String)> = p.constraints;
    let mut steps = Vec::new();
    let mut joins = Vec::new();
    while !pending.is_empty() {
        let Some(pos) = pending.iter().position(|(l, r, _, _)| bound[l.source] || bound[r.source]) else {
            let (l, _, _, _) = &pending[0];
            return Err(RecordsError::SourceNotJoined { origin: sources[l.source].describe() });
        };
        let (left, right, field, on) = pending.remove(pos);
        match (bound[left.source], bound[right.source]) {
            (true, true) => {
                joins.push(JoinInfo { field, target: sources[right.source].key.clone(), on, filter_only: true });
                steps.push(JoinStep::Filter { left, right });
            }
            (probe_bound_left, _) => {
                let (probe, build) = if probe_bound_left { (left, right) } else { (right, left) };
                let target = build.source;
                let index = build_index(&sources[target], &build)?;
                bound[target] = true;
                joins.push(JoinInfo { field, target: sources[target].key.clone(), on, filter_only: false });
                steps.push(JoinStep::Bind { probe, target, index });
            }
        }
    }
    if let Some(unbound) = bound.iter().position(|b| !b) {
        return Err(RecordsError::SourceNotJoined { origin: sources[unbound].describe() });
    }

    Ok(RecordPlan {
        record_set_id: rs.id.clone(),
        root: Some(root),
        sources,
        joins,
        prefetched,
        key: p.rs.key.clone(),
        leaves: p.leaves,
        fields,
        steps,
        inline: None,
        split_field,
    })
}

fn build_index(sp: &SourcePlan, access: &Access) -> Result<HashMap<String, Vec<ItemRef>>, RecordsError> {
    let loaded = sp.preloaded.as_ref().expect("join targets are preloaded");
    let mut index: HashMap<String, Vec<ItemRef>> = HashMap::new();
    for (file, l) in loaded.iter().enumerate() {
        for pos in 0..l.count() {
            let item = ItemRef { file, pos };
            let raw = super::exec::extract(sp, l, item, access)?;
            let mut notes = super::raw::TransformNotes::default();
            let raw = super::raw::apply_transforms(raw, &access.transforms, &mut notes)
                .map_err(|e| RecordsError::TypeMismatch { field: sp.describe(), reason: e.to_string() })?;
            if let Some(k) = raw.key_text() {
                index.entry(k).or_default().push(item);
            }
        }
    }
    Ok(index)
}
