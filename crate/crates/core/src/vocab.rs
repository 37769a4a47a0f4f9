//! Fixed Croissant vocabulary: namespace prefixes, bare terms, and the
//! property tables shared by the graph loader, the model, and the validator.

/// IRI of the only conformance level this toolkit fully supports.
pub const CROISSANT_1_0: &str = "http://mlcommons.org/croissant/1.0";

/// Namespace prefixes, longest IRI first so `rai:` wins over `cr:`.
pub const PREFIXES: &[(&str, &str)] = &[
    ("rai", "http://mlcommons.org/croissant/RAI/"),
    ("cr", "http://mlcommons.org/croissant/"),
    ("dct", "http://purl.org/dc/terms/"),
    ("sc", "https://schema.org/"),
    ("sc", "http://schema.org/"),
];

/// Bare property terms of the canonical context and their compact form.
pub const TERMS: &[(&str, &str)] = &[
    ("alternateName", "sc:alternateName"),
    ("citation", "sc:citation"),
    ("citeAs", "cr:citeAs"),
    ("column", "cr:column"),
    ("conformsTo", "dct:conformsTo"),
    ("containedIn", "cr:containedIn"),
    ("contentSize", "sc:contentSize"),
    ("contentUrl", "sc:contentUrl"),
    ("creator", "sc:creator"),
    ("data", "cr:data"),
    ("dataType", "cr:dataType"),
    ("dateCreated", "sc:dateCreated"),
    ("dateModified", "sc:dateModified"),
    ("datePublished", "sc:datePublished"),
    ("description", "sc:description"),
    ("distribution", "sc:distribution"),
    ("email", "sc:email"),
    ("encodingFormat", "sc:encodingFormat"),
    ("equivalentProperty", "cr:equivalentProperty"),
    ("examples", "cr:examples"),
    ("excludes", "cr:excludes"),
    ("extract", "cr:extract"),
    ("field", "cr:field"),
    ("fileObject", "cr:fileObject"),
    ("fileProperty", "cr:fileProperty"),
    ("fileSet", "cr:fileSet"),
    ("find", "cr:find"),
    ("format", "cr:format"),
    ("identifier", "sc:identifier"),
    ("includes", "cr:includes"),
    ("inLanguage", "sc:inLanguage"),
    ("isLiveDataset", "cr:isLiveDataset"),
    ("jsonPath", "cr:jsonPath"),
    ("key", "cr:key"),
    ("keywords", "sc:keywords"),
    ("license", "sc:license"),
    ("md5", "cr:md5"),
    ("name", "sc:name"),
    ("parentField", "cr:parentField"),
    ("path", "cr:path"),
    ("publisher", "sc:publisher"),
    ("recordSet", "cr:recordSet"),
    ("references", "cr:references"),
    ("regex", "cr:regex"),
    ("repeated", "cr:repeated"),
    ("replace", "cr:replace"),
    ("sameAs", "sc:sameAs"),
    ("separator", "cr:separator"),
    ("sha256", "sc:sha256"),
    ("source", "cr:source"),
    ("subField", "cr:subField"),
    ("transform", "cr:transform"),
    ("url", "sc:url"),
    ("version", "sc:version"),
    ("with", "cr:with"),
];

/// Bare class names accepted in `@type`.
pub const TYPE_TERMS: &[(&str, &str)] = &[
    ("Dataset", "sc:Dataset"),
    ("Field", "cr:Field"),
    ("FileObject", "cr:FileObject"),
    ("FileSet", "cr:FileSet"),
    ("Organization", "sc:Organization"),
    ("Person", "sc:Person"),
    ("RecordSet", "cr:RecordSet"),
];

/// Properties whose value is an opaque JSON literal rather than node data.
pub const JSON_LITERAL_KEYS: &[&str] = &["cr:data", "cr:examples"];

/// Properties that own the nodes they reference; canonical output inlines
/// named nodes only under these.
pub const CONTAINMENT_KEYS: &[&str] = &["sc:distribution", "cr:recordSet", "cr:field", "cr:subField"];

pub const DATASET: &str = "sc:Dataset";
pub const FILE_OBJECT: &str = "cr:FileObject";
pub const FILE_SET: &str = "cr:FileSet";
pub const RECORD_SET: &str = "cr:RecordSet";
pub const FIELD: &str = "cr:Field";

/// Encoding formats whose content can be read as rows with named columns.
pub const TABULAR_FORMATS: &[&str] = &[
    "text/csv",
    "text/tab-separated-values",
    "application/json",
    "application/jsonlines",
    "application/x-ndjson",
    "application/x-jsonlines",
];

/// Whether `format` (parameters such as `; charset=utf-8` ignored) is tabular.
pub fn is_tabular_format(format: &str) -> bool {
    let base = format.split(';').next().unwrap_or_default().trim().to_ascii_lowercase();
    TABULAR_FORMATS.contains(&base.as_str())
}

/// Responsible-AI attributes understood by the model.
pub const RAI_TERMS: &[&str] = &[
    "rai:dataCollection",
    "rai:dataCollectionTimeframe",
    "rai:dataAnnotationPlatform",
    "rai:annotatorDemographics",
    "rai:dataUseCases",
    "rai:personalSensitiveInformation",
];

/// How a property key resolved against the fixed context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyResolution {
    /// A known prefix or a term of the canonical context.
    Known,
    /// An absolute IRI outside the known namespaces, kept verbatim.
    AbsoluteIri,
    /// Neither; kept verbatim and reported.
    Unknown,
}

fn has_known_prefix(s: &str) -> bool {
    match s.split_once(':') {
        Some((prefix, rest)) => !rest.starts_with("//") && PREFIXES.iter().any(|(p, _)| *p == prefix),
        None => false,
    }
}

fn is_absolute_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    let scheme_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok && (rest.starts_with("//") || matches!(scheme, "urn" | "mailto" | "data"))
}

/// Compacts an IRI that falls into one of the known namespaces.
pub fn compact_iri(iri: &str) -> Option<String> {
    PREFIXES.iter().find_map(|(prefix, ns)| iri.strip_prefix(ns).map(|local| format!("{prefix}:{local}")))
}

/// Resolves a document key to its compact form.
pub fn compact_key(key: &str) -> (String, KeyResolution) {
    if has_known_prefix(key) {
        return (key.to_string(), KeyResolution::Known);
    }
    if let Some(compact) = compact_iri(key) {
        return (compact, KeyResolution::Known);
    }
    if is_absolute_iri(key) {
        return (key.to_string(), KeyResolution::AbsoluteIri);
    }
    match TERMS.iter().find(|(bare, _)| *bare == key) {
        Some((_, compact)) => (compact.to_string(), KeyResolution::Known),
        None => (key.to_string(), KeyResolution::Unknown),
    }
}

/// Resolves an `@type` value to its compact form; unknown names are kept.
pub fn compact_type(name: &str) -> String {
    if has_known_prefix(name) {
        return name.to_string();
    }
    if let Some(compact) = compact_iri(name) {
        return compact;
    }
    TYPE_TERMS
        .iter()
        .find(|(bare, _)| *bare == name)
        .map(|(_, compact)| compact.to_string())
        .unwrap_or_else(|| name.to_string())
}

/// Surface form used when serializing a compact key. `sc:` and `cr:` terms
/// of the canonical context are written bare; everything else stays compact.
pub fn surface_key(compact: &str) -> &str {
    if compact == "dct:conformsTo" {
        return compact;
    }
    TERMS.iter().find(|(_, c)| *c == compact).map(|(bare, _)| *bare).unwrap_or(compact)
}

/// Local name of a compact key, as used in validation paths.
pub fn local_name(compact: &str) -> &str {
    match compact.split_once(':') {
        Some((prefix, local)) if prefix != "rai" && PREFIXES.iter().any(|(p, _)| *p == prefix) => local,
        _ => compact,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_compact_from_every_surface_form() {
        assert_eq!(compact_key("name"), ("sc:name".into(), KeyResolution::Known));
        assert_eq!(compact_key("sc:name"), ("sc:name".into(), KeyResolution::Known));
        assert_eq!(compact_key("https://schema.org/name"), ("sc:name".into(), KeyResolution::Known));
        assert_eq!(compact_key("http://schema.org/name"), ("sc:name".into(), KeyResolution::Known));
        assert_eq!(
            compact_key("http://mlcommons.org/croissant/RAI/dataUseCases"),
            ("rai:dataUseCases".into(), KeyResolution::Known)
        );
        assert_eq!(compact_key("citeAs"), ("cr:citeAs".into(), KeyResolution::Known));
        assert_eq!(
            compact_key("http://example.org/thing"),
            ("http://example.org/thing".into(), KeyResolution::AbsoluteIri)
        );
        assert_eq!(compact_key("wibble"), ("wibble".into(), KeyResolution::Unknown));
        assert_eq!(compact_key("ex:wibble"), ("ex:wibble".into(), KeyResolution::Unknown));
    }

    #[test]
    fn every_term_round_trips_through_its_surface_form() {
        for (_, compact) in TERMS {
            let surface = surface_key(compact);
            assert_eq!(compact_key(surface).0, *compact, "{compact}");
        }
    }

    #[test]
    fn types_compact() {
        assert_eq!(compact_type("Dataset"), "sc:Dataset");
        assert_eq!(compact_type("cr:FileSet"), "cr:FileSet");
        assert_eq!(compact_type("http://mlcommons.org/croissant/RecordSet"), "cr:RecordSet");
        assert_eq!(compact_type("Thing"), "Thing");
    }

    #[test]
    fn local_names_strip_known_prefixes_except_rai() {
        assert_eq!(local_name("cr:containedIn"), "containedIn");
        assert_eq!(local_name("rai:dataUseCases"), "rai:dataUseCases");
        assert_eq!(local_name("wibble"), "wibble");
    }
}
