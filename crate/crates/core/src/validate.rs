//! Conformance checks over a [`DatasetModel`] and the machine-readable
//! report they produce. Validation never touches the network or the disk.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::graph::{self, GraphError};
use crate::jsonpath::JsonPath;
use crate::model::{
    self, DatasetModel, Extract, FieldDef, RecordSetDef, ReferenceSpec, Resource, SourceKind, Transform,
};
use crate::vocab::{self, KeyResolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    RequiredMissing,
    RecommendedMissing,
    RefUnresolved,
    KeyNotAField,
    Sha256Malformed,
    JoinColumnUnknownFormat,
    ConformsToUnsupported,
    UnknownProperty,
    GlobInvalid,
    RegexInvalid,
    JsonpathInvalid,
    /// The bytes are not a loadable JSON-LD document.
    DocumentMalformed,
    /// The graph cannot be mapped onto the dataset model.
    ShapeInvalid,
}

/// One row of the rule table.
pub struct Rule {
    pub code: IssueCode,
    pub severity: Severity,
    pub summary: &'static str,
}

pub const RULES: &[Rule] = &[
    Rule { code: IssueCode::RequiredMissing, severity: Severity::Error, summary: "a required property is absent" },
    Rule {
        code: IssueCode::RecommendedMissing,
        severity: Severity::Warning,
        summary: "a recommended dataset property is absent",
    },
    Rule {
        code: IssueCode::RefUnresolved,
        severity: Severity::Error,
        summary: "a reference names no resource or field of the right kind",
    },
    Rule { code: IssueCode::KeyNotAField, severity: Severity::Error, summary: "a record-set key names no field of it" },
    Rule {
        code: IssueCode::Sha256Malformed,
        severity: Severity::Error,
        summary: "sha256 is not 64 lowercase hex digits",
    },
    Rule {
        code: IssueCode::JoinColumnUnknownFormat,
        severity: Severity::Warning,
        summary: "a column reference points at a FileObject without a tabular encoding format",
    },
    Rule {
        code: IssueCode::ConformsToUnsupported,
        severity: Severity::Warning,
        summary: "conformsTo names a version other than Croissant 1.0",
    },
    Rule {
        code: IssueCode::UnknownProperty,
        severity: Severity::Warning,
        summary: "an unrecognized rai: property (other unknown terms are reported as info)",
    },
    Rule {
        code: IssueCode::GlobInvalid,
        severity: Severity::Error,
        summary: "an includes/excludes pattern is invalid",
    },
    Rule {
        code: IssueCode::RegexInvalid,
        severity: Severity::Error,
        summary: "a regex transform does not compile or has no capture group",
    },
    Rule { code: IssueCode::JsonpathInvalid, severity: Severity::Error, summary: "a jsonPath extraction is invalid" },
    Rule {
        code: IssueCode::DocumentMalformed,
        severity: Severity::Error,
        summary: "the document is not valid JSON-LD with exactly one dataset node",
    },
    Rule {
        code: IssueCode::ShapeInvalid,
        severity: Severity::Error,
        summary: "a node has a structure the dataset model cannot represent",
    },
];

/// Dataset properties whose absence is an error.
pub const REQUIRED: &[&str] = &["name", "description", "conformsTo"];
/// Dataset properties whose absence is a warning.
pub const RECOMMENDED: &[&str] = &["license", "url", "citeAs", "datePublished"];

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::RequiredMissing => "REQUIRED_MISSING",
            IssueCode::RecommendedMissing => "RECOMMENDED_MISSING",
            IssueCode::RefUnresolved => "REF_UNRESOLVED",
            IssueCode::KeyNotAField => "KEY_NOT_A_FIELD",
            IssueCode::Sha256Malformed => "SHA256_MALFORMED",
            IssueCode::JoinColumnUnknownFormat => "JOIN_COLUMN_UNKNOWN_FORMAT",
            IssueCode::ConformsToUnsupported => "CONFORMS_TO_UNSUPPORTED",
            IssueCode::UnknownProperty => "UNKNOWN_PROPERTY",
            IssueCode::GlobInvalid => "GLOB_INVALID",
            IssueCode::RegexInvalid => "REGEX_INVALID",
            IssueCode::JsonpathInvalid => "JSONPATH_INVALID",
            IssueCode::DocumentMalformed => "DOCUMENT_MALFORMED",
            IssueCode::ShapeInvalid => "SHAPE_INVALID",
        }
    }

    /// Default severity from the rule table.
    pub fn severity(self) -> Severity {
        RULES.iter().find(|r| r.code == self).map(|r| r.severity).unwrap()
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub code: IssueCode,
    pub severity: Severity,
    /// `<entity>.<property>`, or the entity alone.
    pub path: String,
    pub message: String,
    #[serde(skip)]
    sort_key: (String, String),
}

impl PartialEq for ValidationIssue {
    fn eq(&self, other: &Self) -> bool {
        (self.code, self.severity, &self.path, &self.message)
            == (other.code, other.severity, &other.path, &other.message)
    }
}

impl Eq for ValidationIssue {}

impl ValidationIssue {
    pub fn new(code: IssueCode, entity: &str, property: Option<&str>, message: impl Into<String>) -> Self {
        Self::with_severity(code, code.severity(), entity, property, message)
    }

    pub fn with_severity(
        code: IssueCode,
        severity: Severity,
        entity: &str,
        property: Option<&str>,
        message: impl Into<String>,
    ) -> Self {
        let path = match property {
            Some(p) => format!("{entity}.{p}"),
            None => entity.to_string(),
        };
        ValidationIssue {
            code,
            severity,
            path,
            message: message.into(),
            sort_key: (entity.to_string(), property.unwrap_or_default().to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub error: usize,
    pub warning: usize,
    pub info: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub counts: Counts,
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    /// Orders issues by (entity, property, code) and derives the summary.
    pub fn new(mut issues: Vec<ValidationIssue>) -> Self {
        issues.sort_by(|a, b| {
            (&a.sort_key, a.code.as_str(), &a.message).cmp(&(&b.sort_key, b.code.as_str(), &b.message))
        });
        issues.dedup();
        let mut counts = Counts::default();
        for i in &issues {
            match i.severity {
                Severity::Error => counts.error += 1,
                Severity::Warning => counts.warning += 1,
                Severity::Info => counts.info += 1,
            }
        }
        ValidationReport { passed: counts.error == 0, counts, issues }
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn codes(&self) -> Vec<IssueCode> {
        self.issues.iter().map(|i| i.code).collect()
    }

    /// One-line verdict such as `passed (1 warning)`.
    pub fn summary(&self) -> String {
        let plural = |n: usize, w: &str| format!("{n} {w}{}", if n == 1 { "" } else { "s" });
        let mut parts = Vec::new();
        if self.counts.error > 0 {
            parts.push(plural(self.counts.error, "error"));
        }
        if self.counts.warning > 0 {
            parts.push(plural(self.counts.warning, "warning"));
        }
        if self.counts.info > 0 {
            parts.push(plural(self.counts.info, "note"));
        }
        let verdict = if self.passed { "passed" } else { "failed" };
        if parts.is_empty() {
            verdict.to_string()
        } else {
            format!("{verdict} ({})", parts.join(", "))
        }
    }
}

/// Compact JSON: `{"passed":..,"counts":{..},"issues":[..]}`.
pub fn report_to_json(report: &ValidationReport) -> Vec<u8> {
    serde_json::to_vec(report).expect("report serializes")
}

/// Loads, maps and validates a document. Documents that cannot be loaded or
/// mapped yield `Err` with a failing report.
pub fn load_and_validate(bytes: &[u8]) -> Result<(DatasetModel, ValidationReport), ValidationReport> {
    let graph = graph::load_document(bytes).map_err(|e| graph_error_report(&e))?;
    let model = model::from_graph(&graph).map_err(|errs| {
        ValidationReport::new(
            errs.0
                .iter()
                .map(|e| ValidationIssue::new(IssueCode::ShapeInvalid, &e.path, None, e.reason.clone()))
                .collect(),
        )
    })?;
    let report = validate(&model);
    Ok((model, report))
}

pub fn graph_error_report(e: &GraphError) -> ValidationReport {
    ValidationReport::new(vec![ValidationIssue::new(IssueCode::DocumentMalformed, "document", None, e.to_string())])
}

/// Runs every rule. Total: all findings go into the report.
pub fn validate(model: &DatasetModel) -> ValidationReport {
    let mut v = Validator { model, issues: Vec::new() };
    v.dataset();
    for r in &model.resources {
        v.resource(r);
    }
    for rs in &model.record_sets {
        v.record_set(rs);
    }
    ValidationReport::new(v.issues)
}

struct Validator<'m> {
    model: &'m DatasetModel,
    issues: Vec<ValidationIssue>,
}

fn is_sha256(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

/// Glob syntax accepted by `includes`/`excludes`.
pub fn check_glob(pattern: &str) -> Result<(), String> {
    if pattern.is_empty() {
        return Err("empty pattern".into());
    }
    if pattern.starts_with('/') || pattern.split('/').any(|seg| seg == "..") {
        return Err("patterns are relative to the container and may not leave it".into());
    }
    globset::GlobBuilder::new(pattern).literal_separator(true).build().map(drop).map_err(|e| e.to_string())
}

/// Regex syntax accepted by the `regex` transform.
pub fn check_regex(pattern: &str) -> Result<regex::Regex, String> {
    let re = regex::Regex::new(pattern).map_err(|e| e.to_string())?;
    if re.captures_len() < 2 {
        return Err("needs a capture group".into());
    }
    Ok(re)
}

impl<'m> Validator<'m> {
    fn push(&mut self, code: IssueCode, entity: &str, property: Option<&str>, message: impl Into<String>) {
        self.issues.push(ValidationIssue::new(code, entity, property, message));
    }

    fn dataset_entity(&self) -> &'m str {
        let id = &self.model.metadata.id;
        if graph::is_blank_id(id) {
            "dataset"
        } else {
            id
        }
    }

    fn dataset(&mut self) {
        let m = &self.model.metadata;
        let entity = self.dataset_entity();
        let present = |prop: &str| match prop {
            "name" => !m.name.trim().is_empty(),
            "description" => !m.description.trim().is_empty(),
            "conformsTo" => !m.conforms_to.is_empty(),
            "license" => !m.license.is_empty(),
            "url" => m.url.is_some(),
            "citeAs" => m.cite_as.is_some(),
            "datePublished" => m.date_published.is_some(),
            "creator" => !m.creator.is_empty(),
            _ => true,
        };
        for prop in REQUIRED {
            if !present(prop) {
                self.push(IssueCode::RequiredMissing, entity, Some(prop), format!("dataset `{prop}` is required"));
            }
        }
        for prop in RECOMMENDED {
            if !present(prop) {
                self.push(
                    IssueCode::RecommendedMissing,
                    entity,
                    Some(prop),
                    format!("dataset `{prop}` is recommended"),
                );
            }
        }
        if !m.conforms_to.is_empty() && m.conforms_to != vocab::CROISSANT_1_0 {
            self.push(
                IssueCode::ConformsToUnsupported,
                entity,
                Some("conformsTo"),
                format!("`{}` is not {}", m.conforms_to, vocab::CROISSANT_1_0),
            );
        }
        self.extras(entity, m.extras.keys());
        if let Some(rai) = &self.model.rai {
            for key in rai.extras.keys() {
                if !vocab::RAI_TERMS.contains(&key.as_str()) {
                    self.push(
                        IssueCode::UnknownProperty,
                        entity,
                        Some(key),
                        format!("`{key}` is not a known RAI attribute"),
                    );
                }
            }
        }
    }

    fn extras<'k>(&mut self, entity: &str, keys: impl Iterator<Item = &'k String>) {
        for key in keys {
            if vocab::compact_key(key).1 == KeyResolution::Unknown {
                self.issues.push(ValidationIssue::with_severity(
                    IssueCode::UnknownProperty,
                    Severity::Info,
                    entity,
                    Some(key),
                    format!("`{key}` is not in the Croissant context and is kept verbatim"),
                ));
            }
        }
    }

    fn expect_resource(&mut self, entity: &str, property: &str, target: &str, kind: SourceKind) {
        let ok = self.model.resource(target).is_some_and(|r| r.kind() == kind);
        if !ok {
            let what = match self.model.resource(target) {
                Some(r) => format!("`{target}` is a {}, not a {}", r.kind().key(), kind.key()),
                None => format!("no {} named `{target}`", kind.key()),
            };
            self.push(IssueCode::RefUnresolved, entity, Some(property), what);
        }
    }

    fn resource(&mut self, r: &Resource) {
        match r {
            Resource::FileObject(fo) => {
                if fo.content_url.is_none() {
                    self.push(IssueCode::RequiredMissing, &fo.id, Some("contentUrl"), "FileObject needs a contentUrl");
                }
                if fo.encoding_format.is_none() {
                    self.push(
                        IssueCode::RequiredMissing,
                        &fo.id,
                        Some("encodingFormat"),
                        "FileObject needs an encodingFormat",
                    );
                }
                if let Some(sha) = &fo.sha256 {
                    if !is_sha256(sha) {
                        self.push(
                            IssueCode::Sha256Malformed,
                            &fo.id,
                            Some("sha256"),
                            "expected 64 lowercase hexadecimal digits",
                        );
                    }
                }
                if let Some(parent) = &fo.contained_in {
                    self.expect_resource(&fo.id, "containedIn", parent, SourceKind::FileObject);
                }
                self.extras(&fo.id, fo.extras.keys());
            }
            Resource::FileSet(fs) => {
                if fs.contained_in.is_empty() {
                    self.push(IssueCode::RequiredMissing, &fs.id, Some("containedIn"), "FileSet needs containedIn");
                }
                if fs.includes.is_empty() {
                    self.push(IssueCode::RequiredMissing, &fs.id, Some("includes"), "FileSet needs includes");
                }
                if fs.encoding_format.is_none() {
                    self.push(
                        IssueCode::RequiredMissing,
                        &fs.id,
                        Some("encodingFormat"),
                        "FileSet needs an encodingFormat",
                    );
                }
                for parent in &fs.contained_in {
                    self.expect_resource(&fs.id, "containedIn", parent, SourceKind::FileObject);
                }
                for (prop, patterns) in [("includes", &fs.includes), ("excludes", &fs.excludes)] {
                    for p in patterns {
                        if let Err(e) = check_glob(p) {
                            self.push(IssueCode::GlobInvalid, &fs.id, Some(prop), format!("`{p}`: {e}"));
                        }
                    }
                }
                self.extras(&fs.id, fs.extras.keys());
            }
        }
    }

    fn record_set(&mut self, rs: &RecordSetDef) {
        for key in &rs.key {
            if rs.find_field(key).is_none() {
                self.push(
                    IssueCode::KeyNotAField,
                    &rs.id,
                    Some("key"),
                    format!("`{key}` is not a field of `{}`", rs.id),
                );
            }
        }
        self.extras(&rs.id, rs.extras.keys());
        for f in &rs.fields {
            self.field(f);
        }
    }

    fn field_exists(&self, id: &str) -> bool {
        self.model.field(id).is_some()
    }

    fn field(&mut self, f: &FieldDef) {
        if let Some(src) = &f.source {
            match src.kind {
                SourceKind::FileObject | SourceKind::FileSet => {
                    self.expect_resource(&f.id, "source", &src.target, src.kind);
                    if src.extract.is_none() {
                        self.push(
                            IssueCode::RequiredMissing,
                            &f.id,
                            Some("extract"),
                            "a file source needs a column, fileProperty or jsonPath",
                        );
                    }
                }
                SourceKind::Field => {
                    if !self.field_exists(&src.target) {
                        self.push(
                            IssueCode::RefUnresolved,
                            &f.id,
                            Some("source"),
                            format!("no field named `{}`", src.target),
                        );
                    }
                }
            }
            if let Some(Extract::JsonPath(p)) = &src.extract {
                if let Err(e) = JsonPath::parse(p) {
                    self.push(IssueCode::JsonpathInvalid, &f.id, Some("extract"), e.to_string());
                }
            }
            for t in &src.transforms {
                if let Transform::Regex(p) = t {
                    if let Err(e) = check_regex(p) {
                        self.push(IssueCode::RegexInvalid, &f.id, Some("transform"), format!("`{p}`: {e}"));
                    }
                }
            }
        }
        match &f.references {
            Some(ReferenceSpec::Column { file_object, .. }) => {
                self.expect_resource(&f.id, "references", file_object, SourceKind::FileObject);
                if let Some(fo) = self.model.file_object(file_object) {
                    let tabular = fo.encoding_format.as_deref().is_some_and(vocab::is_tabular_format);
                    if !tabular {
                        self.push(
                            IssueCode::JoinColumnUnknownFormat,
                            &f.id,
                            Some("references"),
                            format!("`{file_object}` has no tabular encodingFormat to read columns from"),
                        );
                    }
                }
            }
            Some(ReferenceSpec::Field(target)) if !self.field_exists(target) => {
                self.push(IssueCode::RefUnresolved, &f.id, Some("references"), format!("no field named `{target}`"));
            }
            Some(ReferenceSpec::Field(_)) | None => {}
        }
        self.extras(&f.id, f.extras.keys());
        for sub in &f.sub_fields {
            self.field(sub);
        }
    }
}

/// Rule table and attribute metadata for authoring tools.
pub fn schema() -> serde_json::Value {
    json!({
        "conformsTo": vocab::CROISSANT_1_0,
        "required": REQUIRED,
        "recommended": RECOMMENDED,
        "rules": RULES.iter().map(|r| json!({
            "code": r.code.as_str(),
            "severity": r.severity.as_str(),
            "summary": r.summary,
        })).collect::<Vec<_>>(),
        "rai": vocab::RAI_TERMS,
        "dataTypes": model::DataType::all().map(|t| t.iri()).collect::<Vec<_>>(),
        "fileProperties": ["content", "filename", "fullpath", "lines"],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(doc: &str) -> ValidationReport {
        match load_and_validate(doc.as_bytes()) {
            Ok((_, r)) | Err(r) => r,
        }
    }

    const BASE: &str = r#""@type":"sc:Dataset","name":"n","description":"d",
        "dct:conformsTo":"http://mlcommons.org/croissant/1.0","license":"l","url":"u","citeAs":"c",
        "datePublished":"2024-01-01""#;

    #[test]
    fn empty_report_json() {
        assert_eq!(
            String::from_utf8(report_to_json(&ValidationReport::new(vec![]))).unwrap(),
            r#"{"passed":true,"counts":{"error":0,"warning":0,"info":0},"issues":[]}"#
        );
    }

    #[test]
    fn complete_dataset_is_clean() {
        let r = report(&format!("{{{BASE}}}"));
        assert!(r.issues.is_empty(), "{r:?}");
        assert_eq!(r.summary(), "passed");
    }

    #[test]
    fn missing_name_is_required_error() {
        let r =
            report(r#"{"@type":"sc:Dataset","description":"d","dct:conformsTo":"http://mlcommons.org/croissant/1.0"}"#);
        assert!(!r.passed);
        assert_eq!(r.errors().map(|i| i.path.as_str()).collect::<Vec<_>>(), ["dataset.name"]);
        assert_eq!(r.counts.warning, 4);
    }

    #[test]
    fn severity_matches_error_set() {
        let error_set = [
            IssueCode::RequiredMissing,
            IssueCode::RefUnresolved,
            IssueCode::KeyNotAField,
            IssueCode::Sha256Malformed,
            IssueCode::GlobInvalid,
            IssueCode::RegexInvalid,
            IssueCode::JsonpathInvalid,
            IssueCode::DocumentMalformed,
            IssueCode::ShapeInvalid,
        ];
        for r in RULES {
            assert_eq!(r.severity == Severity::Error, error_set.contains(&r.code), "{}", r.code);
        }
    }

    #[test]
    fn unknown_terms_and_rai_keys() {
        let r = report(&format!(r#"{{{BASE},"wibble":1,"rai:dataUseCases":"x","rai:madeUp":"y"}}"#));
        let got: Vec<(&str, Severity)> = r.issues.iter().map(|i| (i.path.as_str(), i.severity)).collect();
        assert_eq!(got, [("dataset.rai:madeUp", Severity::Warning), ("dataset.wibble", Severity::Info)]);
        assert!(r.passed);
    }

    #[test]
    fn issues_sort_by_entity_property_code() {
        let doc = format!(
            r#"{{{BASE},"distribution":[
                {{"@id":"z","@type":"cr:FileObject","contentUrl":"z.csv","encodingFormat":"text/csv","sha256":"ABC"}},
                {{"@id":"a","@type":"cr:FileSet","containedIn":{{"@id":"nope"}},"includes":"[","encodingFormat":"image/jpeg"}}]}}"#
        );
        let r = report(&doc);
        let got: Vec<(&str, &str)> = r.issues.iter().map(|i| (i.path.as_str(), i.code.as_str())).collect();
        assert_eq!(
            got,
            [("a.containedIn", "REF_UNRESOLVED"), ("a.includes", "GLOB_INVALID"), ("z.sha256", "SHA256_MALFORMED")]
        );
    }

    #[test]
    fn malformed_and_shape_errors_fail() {
        assert_eq!(report("{").codes(), [IssueCode::DocumentMalformed]);
        let r = report(&format!(
            r#"{{{BASE},"recordSet":[{{"@id":"r","@type":"cr:RecordSet","field":[{{"@id":"r/f","@type":"cr:Field"}}]}}]}}"#
        ));
        assert_eq!(r.codes(), [IssueCode::ShapeInvalid]);
        assert_eq!(r.issues[0].path, "r/f");
    }

    #[test]
    fn regex_needs_a_group_and_globs_stay_inside() {
        assert!(check_regex("([^/]*)\\.jpg").is_ok());
        assert!(check_regex("\\.jpg").is_err());
        assert!(check_regex("(").is_err());
        assert!(check_glob("**/*.json").is_ok());
        assert!(check_glob("../x").is_err());
        assert!(check_glob("/abs/*").is_err());
        assert!(check_glob("a[").is_err());
    }

    #[test]
    fn summary_counts_warnings() {
        let r = ValidationReport::new(vec![ValidationIssue::new(IssueCode::RecommendedMissing, "d", Some("url"), "m")]);
        assert_eq!(r.summary(), "passed (1 warning)");
    }
}
