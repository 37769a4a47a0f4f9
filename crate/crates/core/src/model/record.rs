use base64::Engine;
use chrono::{NaiveDate, NaiveDateTime};
use indexmap::IndexMap;
use serde_json::{json, Map};

/// A typed field value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Date(NaiveDate),
    DateTime(NaiveDateTime),
    Bytes {
        data: Vec<u8>,
        mime: Option<String>,
    },
    /// XYWH: top-left corner, width, height.
    BoundingBox {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
    },
    Geo {
        latitude: f64,
        longitude: f64,
    },
    List(Vec<Value>),
    Record(Record),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// JSON form used by record output. Bytes become `{"$bytes": <base64>}`.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Bool(b) => json!(b),
            Value::Int(i) => json!(i),
            Value::Float(f) => float_json(*f),
            Value::Text(s) => json!(s),
            Value::Date(d) => json!(d.format("%Y-%m-%d").to_string()),
            Value::DateTime(dt) => json!(dt.format("%Y-%m-%dT%H:%M:%S%.f").to_string()),
            Value::Bytes { data, .. } => {
                json!({ "$bytes": base64::engine::general_purpose::STANDARD.encode(data) })
            }
            Value::BoundingBox { x, y, w, h } => {
                serde_json::Value::Array(vec![float_json(*x), float_json(*y), float_json(*w), float_json(*h)])
            }
            Value::Geo { latitude, longitude } => {
                json!({ "latitude": float_json(*latitude), "longitude": float_json(*longitude) })
            }
            Value::List(items) => serde_json::Value::Array(items.iter().map(Value::to_json).collect()),
            Value::Record(r) => r.to_json(),
        }
    }
}

fn float_json(f: f64) -> serde_json::Value {
    serde_json::Number::from_f64(f).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null)
}

/// One row of a record set, keyed by fully-qualified field id in
/// declaration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    values: IndexMap<String, Value>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, field_id: impl Into<String>, value: Value) {
        self.values.insert(field_id.into(), value);
    }

    pub fn get(&self, field_id: &str) -> Option<&Value> {
        self.values.get(field_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut out = Map::new();
        for (k, v) in &self.values {
            out.insert(k.clone(), v.to_json());
        }
        serde_json::Value::Object(out)
    }
}

impl FromIterator<(String, Value)> for Record {
    fn from_iter<T: IntoIterator<Item = (String, Value)>>(iter: T) -> Self {
        Record { values: iter.into_iter().collect() }
    }
}
