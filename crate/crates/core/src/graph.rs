//! Croissant JSON-LD documents as a flat graph of nodes.
//!
//! Croissant pins its `@context`, so loading is a table-driven compaction of
//! keys rather than general JSON-LD expansion. Nested objects carrying `@id`
//! become nodes of their own, objects without one become blank nodes named
//! `_:b<n>` in depth-first document order, and every property value is either
//! a literal or a reference to a node id.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde_json::{Map, Value};

use crate::vocab::{self, KeyResolution};

/// A literal property value.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Null,
    Bool(bool),
    Number(serde_json::Number),
    Text(String),
    /// Opaque JSON (`@json` values, nested arrays, inline data).
    Json(Value),
}

/// A property value: a literal or a reference to another node.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    Literal(Literal),
    Ref(String),
}

impl PropertyValue {
    pub fn text(s: impl Into<String>) -> Self {
        PropertyValue::Literal(Literal::Text(s.into()))
    }

    pub fn reference(id: impl Into<String>) -> Self {
        PropertyValue::Ref(id.into())
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            PropertyValue::Literal(Literal::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_ref_id(&self) -> Option<&str> {
        match self {
            PropertyValue::Ref(id) => Some(id),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Node {
    pub id: String,
    /// Compact type names, e.g. `cr:FileObject`.
    pub types: Vec<String>,
    /// Compact property name to values, in document order.
    pub properties: BTreeMap<String, Vec<PropertyValue>>,
}

impl Node {
    pub fn new(id: impl Into<String>) -> Self {
        Node { id: id.into(), ..Default::default() }
    }

    pub fn with_type(mut self, ty: impl Into<String>) -> Self {
        self.types.push(ty.into());
        self
    }

    pub fn has_type(&self, ty: &str) -> bool {
        self.types.iter().any(|t| t == ty)
    }

    pub fn values(&self, key: &str) -> &[PropertyValue] {
        self.properties.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn set(&mut self, key: impl Into<String>, values: Vec<PropertyValue>) {
        self.properties.insert(key.into(), values);
    }

    pub fn is_blank(&self) -> bool {
        is_blank_id(&self.id)
    }
}

pub fn is_blank_id(id: &str) -> bool {
    id.starts_with("_:")
}

/// Non-fatal findings from loading.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GraphWarning {
    /// A key that is neither prefixed, a context term, nor an absolute IRI.
    UnknownContextTerm { node: String, key: String },
    /// A JSON-LD keyword this loader does not interpret; it was dropped.
    IgnoredKeyword { node: String, keyword: String },
}

impl std::fmt::Display for GraphWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphWarning::UnknownContextTerm { node, key } => {
                write!(f, "unknown term `{key}` on node `{node}` kept verbatim")
            }
            GraphWarning::IgnoredKeyword { node, keyword } => {
                write!(f, "keyword `{keyword}` on node `{node}` ignored")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("malformed JSON: {0}")]
    MalformedJson(#[from] serde_json::Error),
    #[error("no node is typed sc:Dataset")]
    NoDatasetNode,
    #[error("more than one node is typed sc:Dataset: {0:?}")]
    MultipleDatasetNodes(Vec<String>),
    #[error("node id `{0}` is defined more than once")]
    DuplicateId(String),
    #[error("invalid node at {at}: {reason}")]
    InvalidNode { at: String, reason: String },
}

/// Normalized node set of one Croissant document.
#[derive(Debug, Clone)]
pub struct NodeGraph {
    nodes: BTreeMap<String, Node>,
    root: String,
    context_version: String,
    warnings: Vec<GraphWarning>,
}

/// Graphs compare by content; load warnings are diagnostics only.
impl PartialEq for NodeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.context_version == other.context_version && self.nodes == other.nodes
    }
}

impl NodeGraph {
    /// Builds a graph from nodes, checking the identity and root invariants.
    pub fn from_nodes(nodes: impl IntoIterator<Item = Node>) -> Result<Self, GraphError> {
        let mut map = BTreeMap::new();
        for node in nodes {
            if map.contains_key(&node.id) {
                return Err(GraphError::DuplicateId(node.id));
            }
            map.insert(node.id.clone(), node);
        }
        Self::assemble(map, Vec::new())
    }

    fn assemble(nodes: BTreeMap<String, Node>, mut warnings: Vec<GraphWarning>) -> Result<Self, GraphError> {
        let datasets: Vec<&Node> = nodes.values().filter(|n| n.has_type(vocab::DATASET)).collect();
        let root = match datasets.as_slice() {
            [] => return Err(GraphError::NoDatasetNode),
            [one] => one.id.clone(),
            many => return Err(GraphError::MultipleDatasetNodes(many.iter().map(|n| n.id.clone()).collect())),
        };
        let context_version = nodes[&root]
            .values("dct:conformsTo")
            .iter()
            .find_map(|v| match v {
                PropertyValue::Literal(Literal::Text(s)) | PropertyValue::Ref(s) => Some(s.clone()),
                _ => None,
            })
            .unwrap_or_default();
        warnings.sort();
        warnings.dedup();
        Ok(NodeGraph { nodes, root, context_version, warnings })
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn root_node(&self) -> &Node {
        &self.nodes[&self.root]
    }

    /// Value of `dct:conformsTo` on the dataset node, empty when absent.
    pub fn context_version(&self) -> &str {
        &self.context_version
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn warnings(&self) -> &[GraphWarning] {
        &self.warnings
    }
}

/// Parses Croissant JSON-LD text into a [`NodeGraph`].
pub fn load_document(bytes: &[u8]) -> Result<NodeGraph, GraphError> {
    let doc: Value = serde_json::from_slice(bytes)?;
    load_value(&doc)
}

/// Same as [`load_document`] for an already parsed JSON value.
pub fn load_value(doc: &Value) -> Result<NodeGraph, GraphError> {
    let mut loader = Loader::new(doc);
    match doc {
        Value::Object(obj) if obj.contains_key("@graph") => match &obj["@graph"] {
            Value::Array(items) => loader.ingest_top_level(items)?,
            other => loader.ingest_top_level(std::slice::from_ref(other))?,
        },
        Value::Object(_) => loader.ingest_top_level(std::slice::from_ref(doc))?,
        Value::Array(items) => loader.ingest_top_level(items)?,
        _ => return Err(GraphError::NoDatasetNode),
    }
    NodeGraph::assemble(loader.nodes, loader.warnings)
}

struct Loader {
    nodes: BTreeMap<String, Node>,
    defined: HashSet<String>,
    reserved: HashSet<String>,
    next_blank: usize,
    warnings: Vec<GraphWarning>,
}

impl Loader {
    fn new(doc: &Value) -> Self {
        let mut reserved = HashSet::new();
        collect_ids(doc, &mut reserved);
        Loader { nodes: BTreeMap::new(), defined: HashSet::new(), reserved, next_blank: 0, warnings: Vec::new() }
    }

    fn fresh_blank(&mut self) -> String {
        loop {
            let id = format!("_:b{}", self.next_blank);
            self.next_blank += 1;
            if !self.reserved.contains(&id) {
                self.reserved.insert(id.clone());
                return id;
            }
        }
    }

    fn ingest_top_level(&mut self, items: &[Value]) -> Result<(), GraphError> {
        for (i, item) in items.iter().enumerate() {
            match item {
                Value::Object(obj) => {
                    self.ingest_node(obj, &format!("@graph[{i}]"))?;
                }
                _ => {
                    return Err(GraphError::InvalidNode {
                        at: format!("@graph[{i}]"),
                        reason: "top-level entries must be objects".into(),
                    })
                }
            }
        }
        Ok(())
    }

    fn ingest_node(&mut self, obj: &Map<String, Value>, at: &str) -> Result<String, GraphError> {
        let id = match obj.get("@id") {
            Some(Value::String(id)) => id.clone(),
            Some(_) => return Err(GraphError::InvalidNode { at: at.into(), reason: "@id must be a string".into() }),
            None => self.fresh_blank(),
        };
        if !self.defined.insert(id.clone()) {
            return Err(GraphError::DuplicateId(id));
        }
        let mut node = self.nodes.remove(&id).unwrap_or_else(|| Node::new(id.clone()));
        // Reserve the slot so children see the id as taken.
        self.nodes.insert(id.clone(), Node::new(id.clone()));

        match obj.get("@type") {
            None => {}
            Some(Value::String(t)) => node.types.push(vocab::compact_type(t)),
            Some(Value::Array(ts)) => {
                for t in ts {
                    match t {
                        Value::String(t) => node.types.push(vocab::compact_type(t)),
                        _ => {
                            return Err(GraphError::InvalidNode {
                                at: format!("{at}/@type"),
                                reason: "types must be strings".into(),
                            })
                        }
                    }
                }
            }
            Some(_) => {
                return Err(GraphError::InvalidNode {
                    at: format!("{at}/@type"),
                    reason: "@type must be a string".into(),
                })
            }
        }

        for (key, value) in obj {
            if matches!(key.as_str(), "@id" | "@type" | "@context") {
                continue;
            }
            if key.starts_with('@') {
                self.warnings.push(GraphWarning::IgnoredKeyword { node: id.clone(), keyword: key.clone() });
                continue;
            }
            let (compact, resolution) = vocab::compact_key(key);
            if resolution == KeyResolution::Unknown {
                self.warnings.push(GraphWarning::UnknownContextTerm { node: id.clone(), key: key.clone() });
            }
            let child_at = format!("{at}/{key}");
            let values = if vocab::JSON_LITERAL_KEYS.contains(&compact.as_str()) {
                vec![PropertyValue::Literal(Literal::Json(value.clone()))]
            } else {
                self.convert_values(value, &child_at)?
            };
            node.properties.entry(compact).or_default().extend(values);
        }
        self.nodes.insert(id.clone(), node);
        Ok(id)
    }

    fn convert_values(&mut self, value: &Value, at: &str) -> Result<Vec<PropertyValue>, GraphError> {
        match value {
            Value::Array(items) => items
                .iter()
                .enumerate()
                .map(|(i, item)| match item {
                    Value::Array(_) => Ok(PropertyValue::Literal(Literal::Json(item.clone()))),
                    _ => self.convert_item(item, &format!("{at}[{i}]")),
                })
                .collect(),
            Value::Object(obj) if obj.contains_key("@list") => {
                let list = obj["@list"].clone();
                self.convert_values(&list, at)
            }
            _ => Ok(vec![self.convert_item(value, at)?]),
        }
    }

    fn convert_item(&mut self, value: &Value, at: &str) -> Result<PropertyValue, GraphError> {
        let literal = match value {
            Value::Null => Literal::Null,
            Value::Bool(b) => Literal::Bool(*b),
            Value::Number(n) => Literal::Number(n.clone()),
            Value::String(s) => Literal::Text(s.clone()),
            Value::Array(_) => Literal::Json(value.clone()),
            Value::Object(obj) => {
                if let Some(v) = obj.get("@value") {
                    let is_json = obj.get("@type").and_then(Value::as_str) == Some("@json");
                    return Ok(PropertyValue::Literal(match v {
                        _ if is_json => Literal::Json(v.clone()),
                        Value::Null => Literal::Null,
                        Value::Bool(b) => Literal::Bool(*b),
                        Value::Number(n) => Literal::Number(n.clone()),
                        Value::String(s) => Literal::Text(s.clone()),
                        other => Literal::Json(other.clone()),
                    }));
                }
                if obj.len() == 1 {
                    if let Some(Value::String(id)) = obj.get("@id") {
                        if is_blank_id(id) && !self.nodes.contains_key(id) {
                            self.nodes.insert(id.clone(), Node::new(id.clone()));
                        }
                        return Ok(PropertyValue::Ref(id.clone()));
                    }
                }
                return Ok(PropertyValue::Ref(self.ingest_node(obj, at)?));
            }
        };
        Ok(PropertyValue::Literal(literal))
    }
}

fn collect_ids(value: &Value, ids: &mut HashSet<String>) {
    match value {
        Value::Object(obj) => {
            if let Some(Value::String(id)) = obj.get("@id") {
                ids.insert(id.clone());
            }
            obj.values().for_each(|v| collect_ids(v, ids));
        }
        Value::Array(items) => items.iter().for_each(|v| collect_ids(v, ids)),
        _ => {}
    }
}

/// Serializes a graph deterministically.
///
/// Keys are ordered `@type`, `@id`, `name`, `description`, then the rest
/// lexicographically by their surface form. Blank nodes are always inlined;
/// named nodes are inlined at their first reference under an owning property
/// (`distribution`, `recordSet`, `field`, `subField`) and appear as `{"@id"}`
/// stubs everywhere else. Nodes never reached that way are emitted after the
/// dataset in a top-level `@graph` array.
pub fn to_canonical_json(graph: &NodeGraph) -> Vec<u8> {
    serde_json::to_vec_pretty(&to_canonical_value(graph)).expect("serializing a JSON value cannot fail")
}

pub fn to_canonical_value(graph: &NodeGraph) -> Value {
    let mut emitter = Emitter { graph, emitted: BTreeSet::new() };
    let root = emitter.emit_node(graph.root());
    let mut orphans = Vec::new();
    for id in graph.nodes.keys() {
        if !emitter.emitted.contains(id) {
            orphans.push(emitter.emit_node(id));
        }
    }
    if orphans.is_empty() {
        root
    } else {
        let mut all = vec![root];
        all.extend(orphans);
        let mut doc = Map::new();
        doc.insert("@graph".into(), Value::Array(all));
        Value::Object(doc)
    }
}

/// Which referenced nodes get inlined when emitting property values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum InlinePolicy {
    /// Blank nodes, plus named nodes under owning properties.
    Canonical,
    /// Blank nodes, plus named nodes that carry none of the given types.
    UnlessTyped(&'static [&'static str]),
}

/// Emits one property value list as JSON, sharing `emitted` across calls so
/// each node is inlined at most once.
pub(crate) fn emit_property(
    graph: &NodeGraph,
    emitted: &mut BTreeSet<String>,
    key: &str,
    values: &[PropertyValue],
    policy: InlinePolicy,
) -> Value {
    emit_values(&graph.nodes, emitted, key, values, policy)
}

struct Emitter<'a> {
    graph: &'a NodeGraph,
    emitted: BTreeSet<String>,
}

impl Emitter<'_> {
    fn emit_node(&mut self, id: &str) -> Value {
        emit_node(&self.graph.nodes, &mut self.emitted, id, InlinePolicy::Canonical)
    }
}

fn emit_node(nodes: &BTreeMap<String, Node>, emitted: &mut BTreeSet<String>, id: &str, policy: InlinePolicy) -> Value {
    emitted.insert(id.to_string());
    let node = &nodes[id];
    let mut out = Map::new();
    match node.types.as_slice() {
        [] => {}
        [one] => {
            out.insert("@type".into(), Value::String(one.clone()));
        }
        many => {
            out.insert("@type".into(), Value::Array(many.iter().cloned().map(Value::String).collect()));
        }
    }
    out.insert("@id".into(), Value::String(node.id.clone()));

    let mut entries: Vec<(&str, &str, &Vec<PropertyValue>)> =
        node.properties.iter().map(|(k, v)| (vocab::surface_key(k), k.as_str(), v)).collect();
    entries.sort_by(|a, b| key_rank(a.0).cmp(&key_rank(b.0)).then_with(|| a.0.cmp(b.0)));
    for (surface, compact, values) in entries {
        let value = emit_values(nodes, emitted, compact, values, policy);
        out.insert(surface.to_string(), value);
    }
    Value::Object(out)
}

fn key_rank(surface: &str) -> u8 {
    match surface {
        "name" => 0,
        "description" => 1,
        _ => 2,
    }
}

fn emit_values(
    nodes: &BTreeMap<String, Node>,
    emitted: &mut BTreeSet<String>,
    key: &str,
    values: &[PropertyValue],
    policy: InlinePolicy,
) -> Value {
    if vocab::JSON_LITERAL_KEYS.contains(&key) {
        if let [PropertyValue::Literal(Literal::Json(v))] = values {
            return v.clone();
        }
    }
    let owning = vocab::CONTAINMENT_KEYS.contains(&key);
    let mut out: Vec<Value> = values
        .iter()
        .map(|v| match v {
            PropertyValue::Literal(lit) => literal_to_json(lit),
            PropertyValue::Ref(id) => {
                let inline = match nodes.get(id) {
                    Some(node) if !emitted.contains(id) => {
                        let has_content = !node.types.is_empty() || !node.properties.is_empty();
                        node.is_blank()
                            || match policy {
                                InlinePolicy::Canonical => owning && has_content,
                                InlinePolicy::UnlessTyped(types) => {
                                    has_content && !node.types.iter().any(|t| types.contains(&t.as_str()))
                                }
                            }
                    }
                    _ => false,
                };
                if inline {
                    emit_node(nodes, emitted, id, policy)
                } else {
                    let mut stub = Map::new();
                    stub.insert("@id".into(), Value::String(id.clone()));
                    Value::Object(stub)
                }
            }
        })
        .collect();
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        Value::Array(out)
    }
}

fn literal_to_json(lit: &Literal) -> Value {
    match lit {
        Literal::Null => Value::Null,
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Number(n) => Value::Number(n.clone()),
        Literal::Text(s) => Value::String(s.clone()),
        Literal::Json(v) => {
            let mut obj = Map::new();
            obj.insert("@value".into(), v.clone());
            obj.insert("@type".into(), Value::String("@json".into()));
            Value::Object(obj)
        }
    }
}
