//! Streaming execution of a [`RecordPlan`].

use std::collections::{HashSet, VecDeque};

use serde_json::Value as Json;

use super::plan::{load_file, Access, InlineField, ItemRef, Leaf, Loaded, Program, RecordPlan, SourcePlan};
use super::raw::{apply_transforms, coerce, Raw, TransformNotes};
use super::{RecordStats, RecordsError};
use crate::model::{Extract, FileProperty, Record, Value};

/// Reads one raw value for `item` of `sp`, before transforms.
pub(crate) fn extract(sp: &SourcePlan, loaded: &Loaded, item: ItemRef, access: &Access) -> Result<Raw, RecordsError> {
    let unit = &sp.files[item.file];
    Ok(match (&access.extract, loaded) {
        (Extract::FileProperty(FileProperty::Filename), _) => Raw::Text(unit.filename.clone()),
        (Extract::FileProperty(FileProperty::Fullpath), _) => Raw::Text(unit.fullpath.clone()),
        (Extract::FileProperty(FileProperty::Content), _) => {
            let data = std::fs::read(&unit.local_path)
                .map_err(|source| RecordsError::Io { path: unit.local_path.clone(), source })?;
            Raw::Bytes { data, mime: sp.encoding_format.clone() }
        }
        (Extract::FileProperty(FileProperty::Lines), Loaded::Lines(lines)) => Raw::Text(lines[item.pos].clone()),
        (Extract::Column(c), Loaded::Table(t)) => {
            let col = t.column(c).ok_or_else(|| RecordsError::ColumnMissing {
                resource: format!("{} ({})", sp.key.1, unit.fullpath),
                column: c.clone(),
            })?;
            t.cell(item.pos, col).clone()
        }
        (Extract::JsonPath(_), Loaded::Json { matches, .. }) => {
            let idx = access.json_path.expect("jsonPath accesses carry an index");
            matches[idx].get(item.pos).cloned().map_or(Raw::Missing, Raw::Json)
        }
        (e, _) => unreachable!("source mode does not serve {e:?}"),
    })
}

type Env = Vec<Option<ItemRef>>;

/// Records in root order, before slicing.
pub(crate) struct RecordStream<'p> {
    plan: &'p RecordPlan,
    strict: bool,
    split: Option<(String, String)>,
    file: usize,
    pos: usize,
    /// Current root file when the root is not preloaded.
    root_loaded: Option<Loaded>,
    queue: VecDeque<Record>,
    seen_keys: HashSet<String>,
    pub(crate) stats: RecordStats,
    done: bool,
}

impl<'p> RecordStream<'p> {
    pub(crate) fn new(plan: &'p RecordPlan, strict: bool, split: Option<(String, String)>) -> Self {
        let mut stats = RecordStats::default();
        if let Some(root) = plan.root {
            if let Some(loaded) = &plan.sources[root].preloaded {
                stats.ragged_json_files +=
                    loaded.iter().filter(|l| matches!(l, Loaded::Json { ragged: true, .. })).count();
            }
        }
        RecordStream {
            plan,
            strict,
            split,
            file: 0,
            pos: 0,
            root_loaded: None,
            queue: VecDeque::new(),
            seen_keys: HashSet::new(),
            stats,
            done: false,
        }
    }

    fn loaded(&self, source: usize, file: usize) -> &Loaded {
        match &self.plan.sources[source].preloaded {
            Some(all) => &all[file],
            None => self.root_loaded.as_ref().expect("root file is loaded"),
        }
    }

    fn raw(&self, access: &Access, env: &Env, notes: &mut TransformNotes) -> Result<Raw, RecordsError> {
        let item = env[access.source].expect("joined sources are bound");
        let sp = &self.plan.sources[access.source];
        let raw = extract(sp, self.loaded(access.source, item.file), item, access)?;
        apply_transforms(raw, &access.transforms, notes)
            .map_err(|e| RecordsError::TypeMismatch { field: sp.describe(), reason: e.to_string() })
    }

    /// Next root item, loading root files as needed.
    fn next_root(&mut self) -> Result<Option<ItemRef>, RecordsError> {
        let root = self.plan.root.expect("file-backed plan");
        let sp = &self.plan.sources[root];
        while self.file < sp.files.len() {
            let count = match &sp.preloaded {
                Some(all) => all[self.file].count(),
                None => {
                    if self.root_loaded.is_none() {
                        let loaded = load_file(sp, self.file)?;
                        if matches!(loaded, Loaded::Json { ragged: true, .. }) {
                            self.stats.ragged_json_files += 1;
                        }
                        self.root_loaded = Some(loaded);
                    }
                    self.root_loaded.as_ref().unwrap().count()
                }
            };
            if self.pos < count {
                let item = ItemRef { file: self.file, pos: self.pos };
                self.pos += 1;
                return Ok(Some(item));
            }
            self.file += 1;
            self.pos = 0;
            self.root_loaded = None;
        }
        Ok(None)
    }

    fn expand(&mut self, item: ItemRef) -> Result<(), RecordsError> {
        let plan = self.plan;
        let root = plan.root.unwrap();
        let mut env: Env = vec![None; plan.sources.len()];
        env[root] = Some(item);
        let mut envs = vec![env];
        let mut scratch = TransformNotes::default();
        for step in &plan.steps {
            let mut next = Vec::new();
            for env in envs {
                match step {
                    super::plan::JoinStep::Bind { probe, target, index } => {
                        let Some(key) = self.raw(probe, &env, &mut scratch)?.key_text() else { continue };
                        for hit in index.get(&key).into_iter().flatten() {
                            let mut e = env.clone();
                            e[*target] = Some(*hit);
                            next.push(e);
                        }
                    }
                    super::plan::JoinStep::Filter { left, right } => {
                        let l = self.raw(left, &env, &mut scratch)?.key_text();
                        let r = self.raw(right, &env, &mut scratch)?.key_text();
                        if l.is_some() && l == r {
                            next.push(env);
                        }
                    }
                }
            }
            envs = next;
        }
        for env in envs {
            let mut record = Record::new();
            for (id, prog) in &plan.fields {
                let v = self.value(prog, &env)?;
                record.insert(id.clone(), v);
            }
            self.push(record);
        }
        Ok(())
    }

    fn leaf(&mut self, leaf: &Leaf, env: &Env) -> Result<Value, RecordsError> {
        let mut notes = TransformNotes::default();
        let raw = self.raw(&leaf.access, env, &mut notes)?;
        self.stats.regex_misses += notes.regex_misses;
        match coerce(raw, leaf.value_type.as_ref()) {
            Ok(v) => Ok(v),
            Err(e) if self.strict => Err(RecordsError::CoercionFailed {
                ordinal: self.stats.root_items.saturating_sub(1),
                field: leaf.field_id.clone(),
                value: e.value,
                data_type: e.data_type,
            }),
            Err(_) => {
                self.stats.coercion_failures += 1;
                Ok(Value::Null)
            }
        }
    }

    fn value(&mut self, prog: &Program, env: &Env) -> Result<Value, RecordsError> {
        let plan = self.plan;
        Ok(match prog {
            Program::Leaf(l) => self.leaf(&plan.leaves[*l], env)?,
            Program::Geo { latitude, longitude } => {
                let lat = self.value(latitude, env)?;
                let lon = self.value(longitude, env)?;
                match (as_f64(&lat), as_f64(&lon)) {
                    (Some(latitude), Some(longitude)) => Value::Geo { latitude, longitude },
                    _ => Value::Null,
                }
            }
            Program::Group(children) => {
                let mut r = Record::new();
                for (id, c) in children {
                    let v = self.value(c, env)?;
                    r.insert(id.clone(), v);
                }
                Value::Record(r)
            }
        })
    }

    fn push(&mut self, record: Record) {
        self.stats.records += 1;
        if let Some((field, want)) = &self.split {
            let keep = record.get(field).and_then(split_text).is_some_and(|t| split_matches(&t, want));
            if !keep {
                self.stats.filtered_out += 1;
                return;
            }
        }
        if !self.plan.key.is_empty() {
            let parts: Vec<Json> =
                self.plan.key.iter().map(|k| find_value(&record, k).map_or(Json::Null, Value::to_json)).collect();
            if parts.iter().any(|p| !p.is_null()) && !self.seen_keys.insert(Json::Array(parts).to_string()) {
                self.stats.duplicate_keys += 1;
            }
        }
        self.queue.push_back(record);
    }

    fn inline_rows(&mut self) {
        let plan = self.plan;
        let (rows, fields) = plan.inline.as_ref().unwrap();
        for (i, row) in rows.iter().enumerate() {
            self.stats.root_items = i + 1;
            let record = inline_record(row, fields, &mut self.stats);
            self.push(record);
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Int(i) => Some(*i as f64),
        _ => None,
    }
}

fn split_text(v: &Value) -> Option<String> {
    match v {
        Value::Text(s) => Some(s.clone()),
        Value::Null => None,
        other => Some(other.to_json().to_string()),
    }
}

/// Split values may be bare names or IRIs ending in the name.
fn split_matches(value: &str, want: &str) -> bool {
    value == want || value.rsplit(['/', ':', '#']).next() == Some(want)
}

fn find_value<'r>(record: &'r Record, id: &str) -> Option<&'r Value> {
    record.get(id).or_else(|| {
        record.iter().find_map(|(_, v)| match v {
            Value::Record(inner) => find_value(inner, id),
            _ => None,
        })
    })
}

fn inline_record(row: &Json, fields: &[InlineField], stats: &mut RecordStats) -> Record {
    let mut record = Record::new();
    for f in fields {
        let local = f.id.rsplit('/').next().unwrap_or(&f.id);
        let v = row.get(&f.id).or_else(|| f.name.as_deref().and_then(|n| row.get(n))).or_else(|| row.get(local));
        let value = match v {
            None => Value::Null,
            Some(obj @ Json::Object(_)) if !f.sub_fields.is_empty() => {
                Value::Record(inline_record(obj, &f.sub_fields, stats))
            }
            Some(j) => coerce(Raw::Json(j.clone()), f.value_type.as_ref()).unwrap_or_else(|_| {
                stats.coercion_failures += 1;
                Value::Null
            }),
        };
        record.insert(f.id.clone(), value);
    }
    record
}

impl Iterator for RecordStream<'_> {
    type Item = Result<Record, RecordsError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(r) = self.queue.pop_front() {
                return Some(Ok(r));
            }
            if self.done {
                return None;
            }
            if self.plan.inline.is_some() {
                self.inline_rows();
                self.done = true;
                continue;
            }
            let item = match self.next_root() {
                Ok(Some(item)) => item,
                Ok(None) => {
                    self.done = true;
                    continue;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            };
            self.stats.root_items += 1;
            let ordinal = self.stats.root_items - 1;
            if let Err(e) = self.expand(item) {
                self.done = true;
                self.queue.clear();
                return Some(Err(match e {
                    e @ RecordsError::CoercionFailed { .. } => e,
                    other => RecordsError::AtRecord { ordinal, source: Box::new(other) },
                }));
            }
        }
    }
}
