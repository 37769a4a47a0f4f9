use std::collections::BTreeSet;

use serde_json::{json, Map, Value as Json};

use super::*;
use crate::graph::{self, GraphError, InlinePolicy, Literal, Node, NodeGraph, PropertyValue};
use crate::vocab::{DATASET, FIELD, FILE_OBJECT, FILE_SET, RECORD_SET};

const ENTITY_TYPES: &[&str] = &[DATASET, FILE_OBJECT, FILE_SET, RECORD_SET, FIELD];

const DATASET_KEYS: &[&str] = &[
    "sc:name",
    "sc:description",
    "dct:conformsTo",
    "sc:license",
    "sc:url",
    "cr:citeAs",
    "sc:creator",
    "sc:publisher",
    "sc:datePublished",
    "sc:inLanguage",
    "sc:version",
    "cr:isLiveDataset",
    "sc:distribution",
    "cr:recordSet",
];
const FILE_OBJECT_KEYS: &[&str] =
    &["sc:name", "sc:description", "sc:contentUrl", "sc:encodingFormat", "sc:sha256", "cr:containedIn"];
const FILE_SET_KEYS: &[&str] =
    &["sc:name", "sc:description", "cr:containedIn", "cr:includes", "cr:excludes", "sc:encodingFormat"];
const RECORD_SET_KEYS: &[&str] = &["sc:name", "sc:description", "cr:key", "cr:field", "cr:dataType", "cr:data"];
const FIELD_KEYS: &[&str] = &["sc:name", "sc:description", "cr:dataType", "cr:source", "cr:references", "cr:subField"];
const EXTRACT_KEYS: &[&str] = &["cr:column", "cr:fileProperty", "cr:jsonPath"];

/// Maps a graph onto the typed model. All shape problems are collected and
/// returned together.
pub fn from_graph(graph: &NodeGraph) -> Result<DatasetModel, ShapeErrors> {
    let mut b = Builder { graph, errors: Vec::new(), visited: BTreeSet::new(), emitted: BTreeSet::new() };
    let model = b.dataset();
    for node in graph.nodes() {
        let is_entity = node.types.iter().any(|t| ENTITY_TYPES[1..].contains(&t.as_str()));
        if is_entity && !b.visited.contains(&node.id) {
            b.fail(&node.id, "not reachable from the dataset");
        }
    }
    if b.errors.is_empty() {
        Ok(model)
    } else {
        b.errors.sort();
        b.errors.dedup();
        Err(ShapeErrors(b.errors))
    }
}

struct Builder<'g> {
    graph: &'g NodeGraph,
    errors: Vec<ShapeError>,
    visited: BTreeSet<String>,
    emitted: BTreeSet<String>,
}

fn path(id: &str, key: &str) -> String {
    format!("{id}.{}", vocab::local_name(key))
}

fn literal_text(v: &PropertyValue) -> Option<String> {
    match v {
        PropertyValue::Literal(Literal::Text(s)) => Some(s.clone()),
        PropertyValue::Literal(Literal::Number(n)) => Some(n.to_string()),
        PropertyValue::Literal(Literal::Bool(b)) => Some(b.to_string()),
        _ => None,
    }
}

impl<'g> Builder<'g> {
    fn fail(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.errors.push(ShapeError { path: path.into(), reason: reason.into() });
    }

    fn single<'n>(&mut self, node: &'n Node, key: &str) -> Option<&'n PropertyValue> {
        match node.values(key) {
            [] => None,
            [one] => Some(one),
            _ => {
                self.fail(path(&node.id, key), "expected a single value");
                None
            }
        }
    }

    fn text(&mut self, node: &Node, key: &str) -> Option<String> {
        let v = self.single(node, key)?;
        let text = literal_text(v);
        if text.is_none() {
            self.fail(path(&node.id, key), "expected text");
        }
        text
    }

    /// Text, or the id of a reference (`{"@id": "https://..."}`).
    fn text_or_id(&mut self, node: &Node, key: &str) -> Option<String> {
        match self.single(node, key)? {
            PropertyValue::Ref(id) => Some(id.clone()),
            v => {
                let text = literal_text(v);
                if text.is_none() {
                    self.fail(path(&node.id, key), "expected text");
                }
                text
            }
        }
    }

    fn texts(&mut self, node: &Node, key: &str) -> Vec<String> {
        let mut out = Vec::new();
        for v in node.values(key) {
            match literal_text(v) {
                Some(t) => out.push(t),
                None => self.fail(path(&node.id, key), "expected text values"),
            }
        }
        out
    }

    /// Ids given either as references or as plain text.
    fn ids(&mut self, node: &Node, key: &str) -> Vec<String> {
        let mut out = Vec::new();
        for v in node.values(key) {
            match v {
                PropertyValue::Ref(id) | PropertyValue::Literal(Literal::Text(id)) => out.push(id.clone()),
                _ => self.fail(path(&node.id, key), "expected a reference"),
            }
        }
        out
    }

    fn agents(&mut self, node: &Node, key: &str) -> Vec<String> {
        let mut out = Vec::new();
        for v in node.values(key) {
            let name = match v {
                PropertyValue::Ref(id) => {
                    self.graph.node(id).and_then(|agent| agent.values("sc:name").first()).and_then(literal_text)
                }
                other => literal_text(other),
            };
            match name {
                Some(n) => out.push(n),
                None => self.fail(path(&node.id, key), "agents must be text or carry a name"),
            }
        }
        out
    }

    fn extras(&mut self, node: &Node, typed: &[&str], skip_rai: bool) -> Extras {
        let mut out = Extras::new();
        for (key, values) in &node.properties {
            if typed.contains(&key.as_str()) || (skip_rai && key.starts_with("rai:")) {
                continue;
            }
            let json = graph::emit_property(
                self.graph,
                &mut self.emitted,
                key,
                values,
                InlinePolicy::UnlessTyped(ENTITY_TYPES),
            );
            out.insert(key.clone(), json);
        }
        out
    }

    /// Resolves a reference to an entity node, marking it visited.
    fn entity(&mut self, owner: &str, key: &str, value: &PropertyValue) -> Option<&'g Node> {
        let Some(id) = value.as_ref_id() else {
            self.fail(path(owner, key), "expected a node");
            return None;
        };
        let Some(node) = self.graph.node(id) else {
            self.fail(path(owner, key), format!("`{id}` is not defined in the document"));
            return None;
        };
        if !self.visited.insert(id.to_string()) {
            self.fail(id, "referenced more than once");
            return None;
        }
        Some(node)
    }

    /// Resolves a reference to an anonymous structure (source, extract, ...).
    fn structure(&mut self, owner: &str, key: &str) -> Option<&'g Node> {
        let graph = self.graph;
        let owner_node = graph.node(owner)?;
        let v = self.single(owner_node, key)?;
        match v.as_ref_id().and_then(|id| graph.node(id)) {
            Some(n) => Some(n),
            None => {
                self.fail(path(owner, key), "expected an object");
                None
            }
        }
    }

    fn reject_unknown(&mut self, owner: &str, what: &str, node: &Node, allowed: &[&str]) {
        for key in node.properties.keys() {
            if !allowed.contains(&key.as_str()) {
                self.fail(path(owner, what), format!("unsupported property `{}`", vocab::local_name(key)));
            }
        }
    }

    fn dataset(&mut self) -> DatasetModel {
        let root = self.graph.root_node();
        self.visited.insert(root.id.clone());
        let metadata = DatasetMetadata {
            id: root.id.clone(),
            name: self.text(root, "sc:name").unwrap_or_default(),
            description: self.text(root, "sc:description").unwrap_or_default(),
            conforms_to: self.text_or_id(root, "dct:conformsTo").unwrap_or_default(),
            license: self.ids(root, "sc:license"),
            url: self.text_or_id(root, "sc:url"),
            cite_as: self.text(root, "cr:citeAs"),
            creator: self.agents(root, "sc:creator"),
            publisher: self.agents(root, "sc:publisher"),
            date_published: self.text(root, "sc:datePublished"),
            in_language: self.texts(root, "sc:inLanguage"),
            version: self.text(root, "sc:version"),
            is_live_dataset: match self.single(root, "cr:isLiveDataset") {
                None => None,
                Some(PropertyValue::Literal(Literal::Bool(b))) => Some(*b),
                Some(_) => {
                    self.fail(path(&root.id, "cr:isLiveDataset"), "expected a boolean");
                    None
                }
            },
            extras: self.extras(root, DATASET_KEYS, true),
        };

        let mut resources = Vec::new();
        for v in root.values("sc:distribution") {
            let Some(node) = self.entity(&root.id, "sc:distribution", v) else { continue };
            match (node.has_type(FILE_OBJECT), node.has_type(FILE_SET)) {
                (true, false) => resources.push(Resource::FileObject(self.file_object(node))),
                (false, true) => resources.push(Resource::FileSet(self.file_set(node))),
                _ => self.fail(&node.id, "distribution entries must be exactly one of FileObject or FileSet"),
            }
        }

        let mut record_sets = Vec::new();
        for v in root.values("cr:recordSet") {
            let Some(node) = self.entity(&root.id, "cr:recordSet", v) else { continue };
            if node.has_type(RECORD_SET) {
                record_sets.push(self.record_set(node));
            } else {
                self.fail(&node.id, "recordSet entries must be typed RecordSet");
            }
        }

        DatasetModel { metadata, resources, record_sets, rai: self.rai(root) }
    }

    fn rai(&mut self, root: &Node) -> Option<RaiBlock> {
        let mut block = RaiBlock::default();
        let mut any = false;
        for (key, values) in root.properties.iter().filter(|(k, _)| k.starts_with("rai:")) {
            any = true;
            let texts: Option<Vec<String>> = values.iter().map(|v| v.as_text().map(str::to_string)).collect();
            match (block.slot(key).is_some(), texts) {
                (true, Some(texts)) => *block.slot(key).unwrap() = texts,
                _ => {
                    let json = graph::emit_property(
                        self.graph,
                        &mut self.emitted,
                        key,
                        values,
                        InlinePolicy::UnlessTyped(ENTITY_TYPES),
                    );
                    block.extras.insert(key.clone(), json);
                }
            }
        }
        any.then_some(block)
    }

    fn file_object(&mut self, node: &Node) -> FileObject {
        let contained_in = match self.ids(node, "cr:containedIn").as_slice() {
            [] => None,
            [one] => Some(one.clone()),
            _ => {
                self.fail(path(&node.id, "cr:containedIn"), "a FileObject lives in at most one parent");
                None
            }
        };
        FileObject {
            id: node.id.clone(),
            name: self.text(node, "sc:name"),
            description: self.text(node, "sc:description"),
            content_url: self.text_or_id(node, "sc:contentUrl"),
            encoding_format: self.text(node, "sc:encodingFormat"),
            sha256: self.text(node, "sc:sha256"),
            contained_in,
            extras: self.extras(node, FILE_OBJECT_KEYS, false),
        }
    }

    fn file_set(&mut self, node: &Node) -> FileSet {
        FileSet {
            id: node.id.clone(),
            name: self.text(node, "sc:name"),
            description: self.text(node, "sc:description"),
            contained_in: self.ids(node, "cr:containedIn"),
            includes: self.texts(node, "cr:includes"),
            excludes: self.texts(node, "cr:excludes"),
            encoding_format: self.text(node, "sc:encodingFormat"),
            extras: self.extras(node, FILE_SET_KEYS, false),
        }
    }

    fn data_types(&mut self, node: &Node) -> Vec<DataType> {
        self.ids(node, "cr:dataType").iter().map(|s| DataType::parse(s)).collect()
    }

    fn record_set(&mut self, node: &Node) -> RecordSetDef {
        let data = match node.values("cr:data") {
            [] => None,
            [PropertyValue::Literal(Literal::Json(v))] => Some(v.clone()),
            _ => {
                self.fail(path(&node.id, "cr:data"), "expected inline JSON records");
                None
            }
        };
        let mut fields = Vec::new();
        for v in node.values("cr:field") {
            let Some(field_node) = self.entity(&node.id, "cr:field", v) else { continue };
            if let Some(f) = self.field(field_node, data.is_some(), false) {
                fields.push(f);
            }
        }
        RecordSetDef {
            id: node.id.clone(),
            name: self.text(node, "sc:name"),
            description: self.text(node, "sc:description"),
            key: self.ids(node, "cr:key"),
            fields,
            data_types: self.data_types(node),
            data,
            extras: self.extras(node, RECORD_SET_KEYS, false),
        }
    }

    fn field(&mut self, node: &Node, inline_data: bool, geo_parent: bool) -> Option<FieldDef> {
        if !node.has_type(FIELD) {
            self.fail(&node.id, "fields must be typed Field");
            return None;
        }
        let data_types = self.data_types(node);
        let is_geo = data_types.contains(&DataType::GeoCoordinates);
        let mut sub_fields = Vec::new();
        for v in node.values("cr:subField") {
            let Some(sub) = self.entity(&node.id, "cr:subField", v) else { continue };
            if let Some(f) = self.field(sub, inline_data, is_geo) {
                sub_fields.push(f);
            }
        }
        let source = if node.properties.contains_key("cr:source") { self.source(&node.id) } else { None };
        let has_source = node.properties.contains_key("cr:source");
        if has_source && !sub_fields.is_empty() {
            self.fail(&node.id, "a field has either a source or subFields, not both");
        }
        if !has_source && sub_fields.is_empty() && !inline_data {
            self.fail(&node.id, "a field needs a source or subFields");
        }
        let references = if node.properties.contains_key("cr:references") { self.references(&node.id) } else { None };
        let semantic_role = if geo_parent {
            if node.id.ends_with("/latitude") {
                Some(SemanticRole::Latitude)
            } else if node.id.ends_with("/longitude") {
                Some(SemanticRole::Longitude)
            } else {
                None
            }
        } else {
            None
        };
        Some(FieldDef {
            id: node.id.clone(),
            name: self.text(node, "sc:name"),
            description: self.text(node, "sc:description"),
            data_types,
            source,
            references,
            sub_fields,
            semantic_role,
            extras: self.extras(node, FIELD_KEYS, false),
        })
    }

    fn target(&mut self, owner: &str, what: &str, node: &Node, kinds: &[SourceKind]) -> Option<(SourceKind, String)> {
        let mut found = Vec::new();
        for &kind in kinds {
            let key = format!("cr:{}", kind.key());
            for id in self.ids(node, &key) {
                found.push((kind, id));
            }
        }
        if found.len() == 1 {
            found.pop()
        } else {
            let names: Vec<&str> = kinds.iter().map(|k| k.key()).collect();
            self.fail(path(owner, what), format!("must name exactly one of {}", names.join(", ")));
            None
        }
    }

    fn source(&mut self, owner: &str) -> Option<SourceSpec> {
        let node = self.structure(owner, "cr:source")?;
        let target =
            self.target(owner, "cr:source", node, &[SourceKind::FileObject, SourceKind::FileSet, SourceKind::Field]);
        let inline = self.extract_from(owner, "cr:source", node);
        let nested = match node.properties.contains_key("cr:extract") {
            true => self.structure(&node.id, "cr:extract").and_then(|ex| {
                self.reject_unknown(owner, "cr:extract", ex, EXTRACT_KEYS);
                self.extract_from(owner, "cr:extract", ex)
            }),
            false => None,
        };
        let extract = match (inline, nested) {
            (Some(_), Some(_)) => {
                self.fail(path(owner, "cr:source"), "extraction given twice");
                None
            }
            (a, b) => a.or(b),
        };
        let mut transforms = Vec::new();
        for v in node.values("cr:transform") {
            match v.as_ref_id().and_then(|id| self.graph.node(id)) {
                Some(t) => {
                    if let Some(t) = self.transform(owner, t) {
                        transforms.push(t);
                    }
                }
                None => self.fail(path(owner, "cr:transform"), "expected an object"),
            }
        }
        let mut allowed = vec!["cr:fileObject", "cr:fileSet", "cr:field", "cr:extract", "cr:transform"];
        allowed.extend_from_slice(EXTRACT_KEYS);
        self.reject_unknown(owner, "cr:source", node, &allowed);
        let (kind, target) = target?;
        Some(SourceSpec { kind, target, extract, transforms })
    }

    fn extract_from(&mut self, owner: &str, what: &str, node: &Node) -> Option<Extract> {
        let mut found = Vec::new();
        if let Some(c) = self.text(node, "cr:column") {
            found.push(Extract::Column(c));
        }
        if let Some(p) = self.text(node, "cr:fileProperty") {
            match FileProperty::parse(&p) {
                Some(p) => found.push(Extract::FileProperty(p)),
                None => self.fail(path(owner, what), format!("unknown fileProperty `{p}`")),
            }
        }
        if let Some(j) = self.text(node, "cr:jsonPath") {
            found.push(Extract::JsonPath(j));
        }
        if found.len() > 1 {
            self.fail(path(owner, what), "more than one extraction given");
            return None;
        }
        found.pop()
    }

    fn transform(&mut self, owner: &str, node: &Node) -> Option<Transform> {
        self.reject_unknown(owner, "cr:transform", node, &["cr:regex", "cr:replace", "cr:separator"]);
        let mut found = Vec::new();
        if let Some(r) = self.text(node, "cr:regex") {
            found.push(Transform::Regex(r));
        }
        if let Some(s) = self.text(node, "cr:separator") {
            found.push(Transform::Separator(s));
        }
        match self.single(node, "cr:replace") {
            None => {}
            Some(PropertyValue::Ref(id)) => {
                let spec = self.graph.node(id);
                let find = spec.and_then(|s| self.text(s, "cr:find"));
                let with = spec.and_then(|s| self.text(s, "cr:with"));
                match (find, with) {
                    (Some(find), Some(with)) => found.push(Transform::Replace { find, with }),
                    _ => self.fail(path(owner, "cr:transform"), "replace needs both `find` and `with`"),
                }
            }
            Some(_) => self.fail(path(owner, "cr:transform"), "replace takes an object with `find` and `with`"),
        }
        if found.len() != 1 {
            self.fail(path(owner, "cr:transform"), "each transform holds exactly one of regex, replace, separator");
            return None;
        }
        found.pop()
    }

    fn references(&mut self, owner: &str) -> Option<ReferenceSpec> {
        let node = self.structure(owner, "cr:references")?;
        let mut allowed = vec!["cr:fileObject", "cr:field", "cr:extract"];
        allowed.extend_from_slice(EXTRACT_KEYS);
        self.reject_unknown(owner, "cr:references", node, &allowed);
        let (kind, target) = self.target(owner, "cr:references", node, &[SourceKind::FileObject, SourceKind::Field])?;
        match kind {
            SourceKind::Field => Some(ReferenceSpec::Field(target)),
            _ => {
                let column = self.text(node, "cr:column").or_else(|| {
                    let ex = self.graph.node(node.values("cr:extract").first()?.as_ref_id()?)?;
                    self.text(ex, "cr:column")
                });
                match column {
                    Some(column) => Some(ReferenceSpec::Column { file_object: target, column }),
                    None => {
                        self.fail(path(owner, "cr:references"), "a fileObject reference needs a column");
                        None
                    }
                }
            }
        }
    }
}

/// Builds the graph of a model. Never fails for models produced by
/// [`from_graph`]; hand-built models with clashing ids are rejected.
pub fn to_graph(model: &DatasetModel) -> Result<NodeGraph, GraphError> {
    graph::load_value(&to_json(model))
}

fn one_or_many(mut items: Vec<Json>) -> Json {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Json::Array(items)
    }
}

fn texts_json(items: &[String]) -> Json {
    one_or_many(items.iter().map(|s| json!(s)).collect())
}

fn stub(id: &str) -> Json {
    json!({ "@id": id })
}

struct Obj(Map<String, Json>);

impl Obj {
    fn new(ty: &str, id: &str) -> Self {
        let mut m = Map::new();
        m.insert("@type".into(), json!(ty));
        m.insert("@id".into(), json!(id));
        Obj(m)
    }

    fn opt(&mut self, key: &str, v: &Option<String>) -> &mut Self {
        if let Some(v) = v {
            self.0.insert(key.into(), json!(v));
        }
        self
    }

    fn nonempty(&mut self, key: &str, v: &str) -> &mut Self {
        if !v.is_empty() {
            self.0.insert(key.into(), json!(v));
        }
        self
    }

    fn list(&mut self, key: &str, items: &[String]) -> &mut Self {
        if !items.is_empty() {
            self.0.insert(key.into(), texts_json(items));
        }
        self
    }

    fn put(&mut self, key: &str, v: Json) -> &mut Self {
        self.0.insert(key.into(), v);
        self
    }

    fn extras(&mut self, extras: &Extras) -> &mut Self {
        for (k, v) in extras {
            self.0.insert(k.clone(), v.clone());
        }
        self
    }

    fn done(&mut self) -> Json {
        Json::Object(std::mem::take(&mut self.0))
    }
}

/// Serializes a model as a Croissant JSON-LD document.
pub fn to_json(model: &DatasetModel) -> Json {
    let m = &model.metadata;
    let mut root = Obj::new(DATASET, &m.id);
    root.nonempty("name", &m.name)
        .nonempty("description", &m.description)
        .nonempty("dct:conformsTo", &m.conforms_to)
        .list("license", &m.license)
        .opt("url", &m.url)
        .opt("citeAs", &m.cite_as)
        .list("creator", &m.creator)
        .list("publisher", &m.publisher)
        .opt("datePublished", &m.date_published)
        .list("inLanguage", &m.in_language)
        .opt("version", &m.version);
    if let Some(live) = m.is_live_dataset {
        root.put("isLiveDataset", json!(live));
    }
    if !model.resources.is_empty() {
        root.put("distribution", Json::Array(model.resources.iter().map(resource_json).collect()));
    }
    if !model.record_sets.is_empty() {
        root.put("recordSet", Json::Array(model.record_sets.iter().map(record_set_json).collect()));
    }
    if let Some(rai) = &model.rai {
        for (key, values) in rai.entries() {
            root.list(key, values);
        }
        root.extras(&rai.extras);
    }
    root.extras(&m.extras);
    root.done()
}

fn resource_json(r: &Resource) -> Json {
    match r {
        Resource::FileObject(fo) => {
            let mut o = Obj::new(FILE_OBJECT, &fo.id);
            o.opt("name", &fo.name)
                .opt("description", &fo.description)
                .opt("contentUrl", &fo.content_url)
                .opt("encodingFormat", &fo.encoding_format)
                .opt("sha256", &fo.sha256);
            if let Some(parent) = &fo.contained_in {
                o.put("containedIn", stub(parent));
            }
            o.extras(&fo.extras).done()
        }
        Resource::FileSet(fs) => {
            let mut o = Obj::new(FILE_SET, &fs.id);
            o.opt("name", &fs.name).opt("description", &fs.description);
            if !fs.contained_in.is_empty() {
                o.put("containedIn", one_or_many(fs.contained_in.iter().map(|p| stub(p)).collect()));
            }
            o.list("includes", &fs.includes)
                .list("excludes", &fs.excludes)
                .opt("encodingFormat", &fs.encoding_format)
                .extras(&fs.extras)
                .done()
        }
    }
}

fn data_types_json(types: &[DataType]) -> Json {
    one_or_many(types.iter().map(|t| json!(t.iri())).collect())
}

fn record_set_json(rs: &RecordSetDef) -> Json {
    let mut o = Obj::new(RECORD_SET, &rs.id);
    o.opt("name", &rs.name).opt("description", &rs.description).list("key", &rs.key);
    if !rs.data_types.is_empty() {
        o.put("dataType", data_types_json(&rs.data_types));
    }
    if !rs.fields.is_empty() {
        o.put("field", Json::Array(rs.fields.iter().map(field_json).collect()));
    }
    if let Some(data) = &rs.data {
        o.put("data", data.clone());
    }
    o.extras(&rs.extras).done()
}

fn extract_json(ex: &Extract) -> Json {
    match ex {
        Extract::Column(c) => json!({ "column": c }),
        Extract::FileProperty(p) => json!({ "fileProperty": p.as_str() }),
        Extract::JsonPath(p) => json!({ "jsonPath": p }),
    }
}

fn transform_json(t: &Transform) -> Json {
    match t {
        Transform::Regex(r) => json!({ "regex": r }),
        Transform::Replace { find, with } => json!({ "replace": { "find": find, "with": with } }),
        Transform::Separator(s) => json!({ "separator": s }),
    }
}

fn field_json(f: &FieldDef) -> Json {
    let mut o = Obj::new(FIELD, &f.id);
    o.opt("name", &f.name).opt("description", &f.description);
    if !f.data_types.is_empty() {
        o.put("dataType", data_types_json(&f.data_types));
    }
    if let Some(src) = &f.source {
        let mut s = Map::new();
        s.insert(src.kind.key().into(), stub(&src.target));
        if let Some(ex) = &src.extract {
            s.insert("extract".into(), extract_json(ex));
        }
        if !src.transforms.is_empty() {
            s.insert("transform".into(), one_or_many(src.transforms.iter().map(transform_json).collect()));
        }
        o.put("source", Json::Object(s));
    }
    match &f.references {
        Some(ReferenceSpec::Column { file_object, column }) => {
            o.put("references", json!({ "fileObject": stub(file_object), "column": column }));
        }
        Some(ReferenceSpec::Field(id)) => {
            o.put("references", json!({ "field": stub(id) }));
        }
        None => {}
    }
    if !f.sub_fields.is_empty() {
        o.put("subField", Json::Array(f.sub_fields.iter().map(field_json).collect()));
    }
    o.extras(&f.extras).done()
}
