//! Typed four-layer view of a Croissant document: dataset metadata,
//! resources, record sets with their fields, and the RAI block.

mod convert;
mod record;

use std::collections::BTreeMap;
use std::fmt;

pub use convert::{from_graph, to_graph, to_json};
pub use record::{Record, Value};

use crate::vocab;

/// Properties an entity carries beyond the typed ones, keyed by compact name.
/// Values are stored in their canonical JSON form.
pub type Extras = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetModel {
    pub metadata: DatasetMetadata,
    pub resources: Vec<Resource>,
    pub record_sets: Vec<RecordSetDef>,
    pub rai: Option<RaiBlock>,
}

impl DatasetModel {
    pub fn resource(&self, id: &str) -> Option<&Resource> {
        self.resources.iter().find(|r| r.id() == id)
    }

    pub fn file_object(&self, id: &str) -> Option<&FileObject> {
        match self.resource(id) {
            Some(Resource::FileObject(fo)) => Some(fo),
            _ => None,
        }
    }

    pub fn record_set(&self, id: &str) -> Option<&RecordSetDef> {
        self.record_sets.iter().find(|rs| rs.id == id)
    }

    pub fn file_objects(&self) -> impl Iterator<Item = &FileObject> {
        self.resources.iter().filter_map(|r| match r {
            Resource::FileObject(fo) => Some(fo),
            Resource::FileSet(_) => None,
        })
    }

    pub fn file_sets(&self) -> impl Iterator<Item = &FileSet> {
        self.resources.iter().filter_map(|r| match r {
            Resource::FileSet(fs) => Some(fs),
            Resource::FileObject(_) => None,
        })
    }

    /// Total number of fields, sub-fields included.
    pub fn field_count(&self) -> usize {
        self.record_sets.iter().map(|rs| rs.fields.iter().map(FieldDef::count).sum::<usize>()).sum()
    }

    /// Finds a field anywhere in the dataset by id.
    pub fn field(&self, id: &str) -> Option<(&RecordSetDef, &FieldDef)> {
        self.record_sets.iter().find_map(|rs| rs.find_field(id).map(|f| (rs, f)))
    }
}

/// Dataset-level attributes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetMetadata {
    /// Node id of the dataset; blank (`_:b0`) when the document gave none.
    pub id: String,
    /// Empty when absent.
    pub name: String,
    /// Empty when absent.
    pub description: String,
    /// Empty when absent.
    pub conforms_to: String,
    pub license: Vec<String>,
    pub url: Option<String>,
    pub cite_as: Option<String>,
    pub creator: Vec<String>,
    pub publisher: Vec<String>,
    pub date_published: Option<String>,
    pub in_language: Vec<String>,
    pub version: Option<String>,
    pub is_live_dataset: Option<bool>,
    pub extras: Extras,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resource {
    FileObject(FileObject),
    FileSet(FileSet),
}

impl Resource {
    pub fn id(&self) -> &str {
        match self {
            Resource::FileObject(fo) => &fo.id,
            Resource::FileSet(fs) => &fs.id,
        }
    }

    pub fn encoding_format(&self) -> Option<&str> {
        match self {
            Resource::FileObject(fo) => fo.encoding_format.as_deref(),
            Resource::FileSet(fs) => fs.encoding_format.as_deref(),
        }
    }

    pub fn kind(&self) -> SourceKind {
        match self {
            Resource::FileObject(_) => SourceKind::FileObject,
            Resource::FileSet(_) => SourceKind::FileSet,
        }
    }
}

/// A single file, either downloadable or a member of another FileObject.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FileObject {
    pub id: String,
    pub name: Option<String>,
    pub description: Option<String>,
    /// URL, local path, or (with `contained_in`) a path inside the parent.
    pub content_url: Option<String>,
    pub encoding_format: Option<String>,
    pub sha256: Option<String>,
    pub contained_in: Option<String>,
    pub extras: Extras,
}

/// Files selected by glob patterns inside one or more FileObjects.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FileSet {
    pub id: String,
    pub name: Option<String>,
    pub description: Option<String>,
    pub contained_in: Vec<String>,
    pub includes: Vec<String>,
    pub excludes: Vec<String>,
    pub encoding_format: Option<String>,
    pub extras: Extras,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RecordSetDef {
    pub id: String,
    pub name: Option<String>,
    pub description: Option<String>,
    /// Field ids forming the record key.
    pub key: Vec<String>,
    pub fields: Vec<FieldDef>,
    pub data_types: Vec<DataType>,
    /// Inline records (`data`), keyed by field id.
    pub data: Option<serde_json::Value>,
    pub extras: Extras,
}

impl RecordSetDef {
    /// Depth-first search over fields and sub-fields.
    pub fn find_field(&self, id: &str) -> Option<&FieldDef> {
        fn walk<'a>(fields: &'a [FieldDef], id: &str) -> Option<&'a FieldDef> {
            fields.iter().find_map(|f| if f.id == id { Some(f) } else { walk(&f.sub_fields, id) })
        }
        walk(&self.fields, id)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldDef {
    pub id: String,
    pub name: Option<String>,
    pub description: Option<String>,
    pub data_types: Vec<DataType>,
    pub source: Option<SourceSpec>,
    pub references: Option<ReferenceSpec>,
    pub sub_fields: Vec<FieldDef>,
    /// Role implied by the id suffix under a typed parent; derived, never
    /// serialized.
    pub semantic_role: Option<SemanticRole>,
    pub extras: Extras,
}

impl FieldDef {
    fn count(&self) -> usize {
        1 + self.sub_fields.iter().map(FieldDef::count).sum::<usize>()
    }

    pub fn has_type(&self, ty: &DataType) -> bool {
        self.data_types.contains(ty)
    }

    /// The data type that drives value coercion. `Label` and `Split` only
    /// annotate a value and never decide its representation.
    pub fn value_type(&self) -> Option<&DataType> {
        self.data_types.iter().find(|t| !matches!(t, DataType::Label | DataType::Split))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemanticRole {
    Latitude,
    Longitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceKind {
    FileObject,
    FileSet,
    /// A field of another record set.
    Field,
}

impl SourceKind {
    pub fn key(self) -> &'static str {
        match self {
            SourceKind::FileObject => "fileObject",
            SourceKind::FileSet => "fileSet",
            SourceKind::Field => "field",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub target: String,
    pub extract: Option<Extract>,
    pub transforms: Vec<Transform>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileProperty {
    Content,
    Filename,
    Fullpath,
    Lines,
}

impl FileProperty {
    pub fn as_str(self) -> &'static str {
        match self {
            FileProperty::Content => "content",
            FileProperty::Filename => "filename",
            FileProperty::Fullpath => "fullpath",
            FileProperty::Lines => "lines",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "content" => FileProperty::Content,
            "filename" => FileProperty::Filename,
            "fullpath" => FileProperty::Fullpath,
            "lines" => FileProperty::Lines,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Extract {
    Column(String),
    FileProperty(FileProperty),
    JsonPath(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    /// Keeps the first capture group of the first match.
    Regex(String),
    /// Replaces every occurrence of `find`.
    Replace { find: String, with: String },
    /// Splits text into a list.
    Separator(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSpec {
    /// The field equals `column` of a tabular FileObject.
    Column { file_object: String, column: String },
    /// The field equals another field.
    Field(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DataType {
    Text,
    Integer,
    Float,
    Boolean,
    Date,
    ImageObject,
    GeoCoordinates,
    BoundingBox,
    Label,
    Split,
    Url,
    /// Any other class, in compact form when it falls in a known namespace.
    Other(String),
}

const DATA_TYPES: &[(DataType, &str)] = &[
    (DataType::Text, "sc:Text"),
    (DataType::Integer, "sc:Integer"),
    (DataType::Float, "sc:Float"),
    (DataType::Boolean, "sc:Boolean"),
    (DataType::Date, "sc:Date"),
    (DataType::ImageObject, "sc:ImageObject"),
    (DataType::GeoCoordinates, "sc:GeoCoordinates"),
    (DataType::BoundingBox, "cr:BoundingBox"),
    (DataType::Label, "cr:Label"),
    (DataType::Split, "cr:Split"),
    (DataType::Url, "sc:URL"),
];

impl DataType {
    /// Canonical compact IRI.
    pub fn iri(&self) -> &str {
        match self {
            DataType::Other(iri) => iri,
            known => DATA_TYPES.iter().find(|(t, _)| t == known).map(|(_, iri)| *iri).unwrap(),
        }
    }

    /// Accepts compact, bare, or full IRIs.
    pub fn parse(s: &str) -> DataType {
        let compact = vocab::compact_iri(s).unwrap_or_else(|| s.to_string());
        let found = DATA_TYPES
            .iter()
            .find(|(_, iri)| *iri == compact || iri.split_once(':').map(|(_, local)| local) == Some(compact.as_str()));
        match found {
            Some((t, _)) => t.clone(),
            None => DataType::Other(compact),
        }
    }

    pub fn all() -> impl Iterator<Item = &'static DataType> {
        DATA_TYPES.iter().map(|(t, _)| t)
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.iri())
    }
}

/// Responsible-AI documentation attached to the dataset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RaiBlock {
    pub data_collection: Vec<String>,
    pub data_collection_timeframe: Vec<String>,
    pub data_annotation_platform: Vec<String>,
    pub annotator_demographics: Vec<String>,
    pub data_use_cases: Vec<String>,
    pub personal_sensitive_information: Vec<String>,
    /// `rai:` properties outside the typed set, or typed ones with non-text
    /// values.
    pub extras: Extras,
}

impl RaiBlock {
    pub(crate) fn slot(&mut self, key: &str) -> Option<&mut Vec<String>> {
        Some(match key {
            "rai:dataCollection" => &mut self.data_collection,
            "rai:dataCollectionTimeframe" => &mut self.data_collection_timeframe,
            "rai:dataAnnotationPlatform" => &mut self.data_annotation_platform,
            "rai:annotatorDemographics" => &mut self.annotator_demographics,
            "rai:dataUseCases" => &mut self.data_use_cases,
            "rai:personalSensitiveInformation" => &mut self.personal_sensitive_information,
            _ => return None,
        })
    }

    /// Typed attributes in table order, paired with their compact key.
    pub fn entries(&self) -> [(&'static str, &[String]); 6] {
        [
            ("rai:dataCollection", &self.data_collection),
            ("rai:dataCollectionTimeframe", &self.data_collection_timeframe),
            ("rai:dataAnnotationPlatform", &self.data_annotation_platform),
            ("rai:annotatorDemographics", &self.annotator_demographics),
            ("rai:dataUseCases", &self.data_use_cases),
            ("rai:personalSensitiveInformation", &self.personal_sensitive_information),
        ]
    }

    pub fn is_empty(&self) -> bool {
        self.entries().iter().all(|(_, v)| v.is_empty()) && self.extras.is_empty()
    }
}

/// A structurally impossible node found while building the model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ShapeError {
    /// `<entity id>.<property>`, or the entity id alone.
    pub path: String,
    pub reason: String,
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

/// Every shape error of a document, reported together.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ShapeErrors(pub Vec<ShapeError>);

impl fmt::Display for ShapeErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} shape error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "; {e}")?;
        }
        Ok(())
    }
}
