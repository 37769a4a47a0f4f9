//! The JSONPath subset used by `extract.jsonPath`: `$`, `.name`, `['name']`,
//! `[n]`, `[*]` and `.*`. Recursive descent, filters, slices and negative
//! indexes are rejected at parse time.

use std::fmt;
use std::str::FromStr;

use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Key(String),
    Index(usize),
    Wildcard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonPath {
    segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid JSONPath `{path}` at offset {offset}: {reason}")]
pub struct JsonPathError {
    pub path: String,
    pub offset: usize,
    pub reason: &'static str,
}

impl JsonPath {
    pub fn parse(path: &str) -> Result<JsonPath, JsonPathError> {
        let err = |offset, reason| JsonPathError { path: path.to_string(), offset, reason };
        let bytes = path.as_bytes();
        if bytes.first() != Some(&b'$') {
            return Err(err(0, "must start with `$`"));
        }
        let mut segments = Vec::new();
        let mut i = 1;
        while i < bytes.len() {
            match bytes[i] {
                b'.' => {
                    i += 1;
                    match bytes.get(i) {
                        Some(b'.') => return Err(err(i, "recursive descent is not supported")),
                        Some(b'*') => {
                            segments.push(Segment::Wildcard);
                            i += 1;
                        }
                        _ => {
                            let end = path[i..].find(['.', '[']).map_or(path.len(), |n| i + n);
                            if end == i {
                                return Err(err(i, "empty member name"));
                            }
                            segments.push(Segment::Key(path[i..end].to_string()));
                            i = end;
                        }
                    }
                }
                b'[' => {
                    let close = path[i..].find(']').map(|n| i + n).ok_or_else(|| err(i, "unclosed `[`"))?;
                    let inner = path[i + 1..close].trim();
                    let seg = if inner == "*" {
                        Segment::Wildcard
                    } else if let Some(name) = quoted(inner) {
                        Segment::Key(name.to_string())
                    } else if !inner.is_empty() && inner.bytes().all(|b| b.is_ascii_digit()) {
                        Segment::Index(inner.parse().map_err(|_| err(i + 1, "index out of range"))?)
                    } else if inner.starts_with('?') {
                        return Err(err(i + 1, "filters are not supported"));
                    } else if inner.contains(':') {
                        return Err(err(i + 1, "slices are not supported"));
                    } else if inner.starts_with('-') {
                        return Err(err(i + 1, "negative indexes are not supported"));
                    } else {
                        return Err(err(i + 1, "expected a quoted name, an index or `*`"));
                    };
                    segments.push(seg);
                    i = close + 1;
                }
                _ => return Err(err(i, "expected `.` or `[`")),
            }
        }
        Ok(JsonPath { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// All matches in document order.
    pub fn select<'a>(&self, root: &'a Value) -> Vec<&'a Value> {
        let mut current = vec![root];
        for seg in &self.segments {
            let mut next = Vec::new();
            for v in current {
                match (seg, v) {
                    (Segment::Key(k), Value::Object(m)) => next.extend(m.get(k)),
                    (Segment::Index(n), Value::Array(a)) => next.extend(a.get(*n)),
                    (Segment::Wildcard, Value::Array(a)) => next.extend(a.iter()),
                    (Segment::Wildcard, Value::Object(m)) => next.extend(m.values()),
                    _ => {}
                }
            }
            current = next;
        }
        current
    }
}

fn quoted(s: &str) -> Option<&str> {
    let b = s.as_bytes();
    if b.len() >= 2 && (b[0] == b'\'' || b[0] == b'"') && b[b.len() - 1] == b[0] {
        Some(&s[1..s.len() - 1])
    } else {
        None
    }
}

impl FromStr for JsonPath {
    type Err = JsonPathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        JsonPath::parse(s)
    }
}

impl fmt::Display for JsonPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("$")?;
        for seg in &self.segments {
            match seg {
                Segment::Key(k) => write!(f, "['{k}']")?,
                Segment::Index(n) => write!(f, "[{n}]")?,
                Segment::Wildcard => f.write_str("[*]")?,
            }
        }
        Ok(())
    }
}
