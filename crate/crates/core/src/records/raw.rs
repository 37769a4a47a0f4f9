//! Raw extracted values, transforms, and typed coercion.

use std::borrow::Cow;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde_json::Value as Json;

use crate::model::{DataType, Transform, Value};

/// A value as extracted, before coercion.
#[derive(Debug, Clone, PartialEq)]
pub enum Raw {
    /// No value: a regex that did not match, a short jsonPath match list.
    Missing,
    Text(String),
    Bytes {
        data: Vec<u8>,
        mime: Option<String>,
    },
    Json(Json),
    List(Vec<Raw>),
}

impl Raw {
    fn text(&self) -> Option<Cow<'_, str>> {
        match self {
            Raw::Text(s) => Some(Cow::Borrowed(s)),
            Raw::Json(Json::String(s)) => Some(Cow::Borrowed(s)),
            Raw::Json(j @ (Json::Number(_) | Json::Bool(_))) => Some(Cow::Owned(j.to_string())),
            _ => None,
        }
    }

    /// Text used to match join keys; `None` never matches.
    pub fn key_text(&self) -> Option<String> {
        match self {
            Raw::Missing | Raw::Json(Json::Null) => None,
            Raw::Bytes { .. } => None,
            Raw::Json(j @ (Json::Array(_) | Json::Object(_))) => Some(j.to_string()),
            Raw::List(items) => Some(items.iter().filter_map(Raw::key_text).collect::<Vec<_>>().join("\u{1f}")),
            other => other.text().map(Cow::into_owned),
        }
    }

    /// Short rendering for diagnostics.
    pub fn describe(&self) -> String {
        let s = match self {
            Raw::Missing => "<missing>".to_string(),
            Raw::Text(s) => s.clone(),
            Raw::Bytes { data, .. } => format!("<{} bytes>", data.len()),
            Raw::Json(j) => j.to_string(),
            Raw::List(items) => format!("[{}]", items.iter().map(Raw::describe).collect::<Vec<_>>().join(", ")),
        };
        match s.char_indices().nth(60) {
            Some((i, _)) => format!("{}...", &s[..i]),
            None => s,
        }
    }
}

#[derive(Debug, Clone)]
pub enum CompiledTransform {
    Regex(regex::Regex),
    Replace { find: String, with: String },
    Separator(String),
}

impl CompiledTransform {
    pub fn compile(t: &Transform) -> Result<CompiledTransform, String> {
        Ok(match t {
            Transform::Regex(p) => CompiledTransform::Regex(crate::validate::check_regex(p)?),
            Transform::Replace { find, with } => {
                if find.is_empty() {
                    return Err("replace needs a non-empty `find`".into());
                }
                CompiledTransform::Replace { find: find.clone(), with: with.clone() }
            }
            Transform::Separator(s) => {
                if s.is_empty() {
                    return Err("separator must not be empty".into());
                }
                CompiledTransform::Separator(s.clone())
            }
        })
    }
}

/// What happened while transforming one value.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct TransformNotes {
    pub regex_misses: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot apply a text transform to {0}")]
pub struct TransformTypeMismatch(pub String);

/// Applies transforms left to right; lists are transformed element-wise.
pub fn apply_transforms(
    v: Raw,
    ts: &[CompiledTransform],
    notes: &mut TransformNotes,
) -> Result<Raw, TransformTypeMismatch> {
    ts.iter().try_fold(v, |v, t| apply_one(v, t, notes))
}

fn apply_one(v: Raw, t: &CompiledTransform, notes: &mut TransformNotes) -> Result<Raw, TransformTypeMismatch> {
    if let Raw::List(items) = v {
        return items.into_iter().map(|i| apply_one(i, t, notes)).collect::<Result<_, _>>().map(Raw::List);
    }
    if matches!(v, Raw::Missing | Raw::Json(Json::Null)) {
        return Ok(v);
    }
    let Some(text) = v.text() else {
        return Err(TransformTypeMismatch(v.describe()));
    };
    Ok(match t {
        CompiledTransform::Regex(re) => match re.captures(&text).and_then(|c| c.get(1)) {
            Some(m) => Raw::Text(m.as_str().to_string()),
            None => {
                notes.regex_misses += 1;
                Raw::Missing
            }
        },
        CompiledTransform::Replace { find, with } => Raw::Text(text.replace(find.as_str(), with)),
        CompiledTransform::Separator(sep) => {
            Raw::List(text.split(sep.as_str()).map(|s| Raw::Text(s.to_string())).collect())
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot read `{value}` as {data_type}")]
pub struct CoercionFailed {
    pub value: String,
    pub data_type: String,
}

fn fail(v: &Raw, t: &str) -> CoercionFailed {
    CoercionFailed { value: v.describe(), data_type: t.to_string() }
}

fn parse_int(s: &str) -> Option<i64> {
    s.parse::<i64>().ok()
}

fn parse_float(s: &str) -> Option<f64> {
    let ok = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'-' | b'+' | b'.' | b'e' | b'E'));
    if ok {
        s.parse::<f64>().ok()
    } else {
        None
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

fn parse_date(s: &str) -> Option<Value> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(Value::Date(d));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(Value::DateTime(dt));
        }
    }
    DateTime::parse_from_rfc3339(s).ok().map(|dt| Value::DateTime(dt.naive_utc()))
}

fn json_number(j: &Json) -> Option<f64> {
    match j {
        Json::Number(n) => n.as_f64(),
        Json::String(s) => parse_float(s.trim()),
        _ => None,
    }
}

fn numbers(v: &Raw) -> Option<Vec<f64>> {
    match v {
        Raw::Json(Json::Array(items)) => items.iter().map(json_number).collect(),
        Raw::List(items) => items.iter().map(|i| i.text().and_then(|t| parse_float(t.trim()))).collect(),
        other => {
            let text = other.text()?;
            let t = text.trim();
            if t.starts_with('[') {
                let j: Json = serde_json::from_str(t).ok()?;
                return numbers(&Raw::Json(j));
            }
            t.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).map(parse_float).collect()
        }
    }
}

/// Natural typed form of an untyped JSON value.
fn from_json(j: Json) -> Value {
    match j {
        Json::Null => Value::Null,
        Json::Bool(b) => Value::Bool(b),
        Json::Number(n) => match n.as_i64() {
            Some(i) => Value::Int(i),
            None => Value::Float(n.as_f64().unwrap_or(f64::NAN)),
        },
        Json::String(s) => Value::Text(s),
        Json::Array(items) => Value::List(items.into_iter().map(from_json).collect()),
        obj @ Json::Object(_) => Value::Text(obj.to_string()),
    }
}

/// Coerces a raw value to `t` (the field's value type; `None` keeps the
/// natural form). Empty text is null for every non-text type.
pub fn coerce(v: Raw, t: Option<&DataType>) -> Result<Value, CoercionFailed> {
    use DataType as D;
    if matches!(v, Raw::Missing | Raw::Json(Json::Null)) {
        return Ok(Value::Null);
    }
    let texty = matches!(t, None | Some(D::Text | D::Url | D::Other(_)));
    if !texty && v.text().is_some_and(|s| s.is_empty()) {
        return Ok(Value::Null);
    }
    match (t, v) {
        (Some(D::BoundingBox), v) => match numbers(&v).as_deref() {
            Some(&[x, y, w, h]) => Ok(Value::BoundingBox { x, y, w, h }),
            _ => Err(fail(&v, "cr:BoundingBox")),
        },
        (Some(D::GeoCoordinates), v) => {
            if let Raw::Json(Json::Object(m)) = &v {
                let lat = m.get("latitude").and_then(json_number);
                let lon = m.get("longitude").and_then(json_number);
                if let (Some(latitude), Some(longitude)) = (lat, lon) {
                    return Ok(Value::Geo { latitude, longitude });
                }
            }
            match numbers(&v).as_deref() {
                Some(&[latitude, longitude]) => Ok(Value::Geo { latitude, longitude }),
                _ => Err(fail(&v, "sc:GeoCoordinates")),
            }
        }
        (t, Raw::List(items)) => items.into_iter().map(|i| coerce(i, t)).collect::<Result<_, _>>().map(Value::List),
        (Some(t), Raw::Json(Json::Array(items))) if !matches!(t, D::Text) => {
            items.into_iter().map(|i| coerce(Raw::Json(i), Some(t))).collect::<Result<_, _>>().map(Value::List)
        }
        (None, Raw::Json(j)) => Ok(from_json(j)),
        (_, Raw::Bytes { data, mime }) => match t {
            Some(D::Text) => String::from_utf8(data).map(Value::Text).map_err(|e| CoercionFailed {
                value: format!("<{} bytes>", e.as_bytes().len()),
                data_type: "sc:Text".into(),
            }),
            None | Some(D::ImageObject | D::Other(_)) => Ok(Value::Bytes { data, mime }),
            Some(other) => {
                Err(CoercionFailed { value: format!("<{} bytes>", data.len()), data_type: other.to_string() })
            }
        },
        (Some(t), v) => {
            let text = v.text().ok_or_else(|| fail(&v, t.iri()))?;
            let out = match t {
                D::Integer => match &v {
                    Raw::Json(Json::Number(n)) => n
                        .as_i64()
                        .or_else(|| n.as_f64().filter(|f| f.fract() == 0.0 && f.abs() < 9.0e15).map(|f| f as i64)),
                    _ => parse_int(&text),
                }
                .map(Value::Int),
                D::Float => match &v {
                    Raw::Json(Json::Number(n)) => n.as_f64(),
                    _ => parse_float(&text),
                }
                .map(Value::Float),
                D::Boolean => match &v {
                    Raw::Json(Json::Bool(b)) => Some(*b),
                    _ => parse_bool(&text),
                }
                .map(Value::Bool),
                D::Date => parse_date(&text),
                _ => Some(Value::Text(text.into_owned())),
            };
            out.ok_or_else(|| fail(&v, t.iri()))
        }
        (None, v) => Ok(v.text().map(|t| Value::Text(t.into_owned())).unwrap_or(Value::Null)),
    }
}
