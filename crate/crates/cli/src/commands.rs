use std::fmt::Write as _;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use croissant_forge::health::{self, ScanOptions, ADAPTERS};
use croissant_forge::model::{DatasetModel, FieldDef, Resource};
use croissant_forge::records::{self, ReadOptions, SplitSlice};
use croissant_forge::resources::Config;
use croissant_forge::validate::{self, ValidationReport};
use croissant_forge::{graph, vocab};

use crate::args::{Cli, Command, DocArgs, HealthArgs, Output, RecordsArgs};
use crate::exit::{Invalid, Usage, INVALID, SUCCESS};
use crate::{input, serve};

/// Runs one subcommand and returns its exit code.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate(a) => validate(a),
        Command::Inspect(a) => inspect(a),
        Command::Records(a) => records(a),
        Command::Health(a) => health(a),
        Command::Serve(a) => serve::run(a),
    }
}

fn emit(bytes: &[u8]) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(bytes)?;
    if !bytes.ends_with(b"\n") {
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn print_issues(report: &ValidationReport, to: &mut dyn Write) -> io::Result<()> {
    for i in &report.issues {
        writeln!(to, "{:<7} {} {}: {}", i.severity.as_str(), i.code.as_str(), i.path, i.message)?;
    }
    Ok(())
}

fn load(arg: &str) -> Result<(Vec<u8>, croissant_forge::resources::Resolver)> {
    let resolver = input::resolver_for(arg)?;
    let bytes = input::read(arg, &resolver)?;
    Ok((bytes, resolver))
}

fn validate(a: DocArgs) -> Result<u8> {
    let (bytes, _) = load(&a.document)?;
    let report = match validate::load_and_validate(&bytes) {
        Ok((_, r)) | Err(r) => r,
    };
    if a.json {
        emit(&validate::report_to_json(&report))?;
    } else {
        let mut out = io::stdout().lock();
        print_issues(&report, &mut out)?;
        writeln!(out, "{}", report.summary())?;
    }
    Ok(if report.passed { SUCCESS } else { INVALID })
}

/// Loads a document that must validate; issues go to stderr otherwise.
fn load_valid(bytes: &[u8]) -> Result<(DatasetModel, ValidationReport)> {
    let (model, report) = validate::load_and_validate(bytes).map_err(|r| invalid(&r))?;
    if !report.passed {
        return Err(invalid(&report).into());
    }
    Ok((model, report))
}

fn invalid(report: &ValidationReport) -> Invalid {
    let _ = print_issues(report, &mut io::stderr());
    Invalid(format!("the document does not validate: {}", report.summary()))
}

fn plural(n: usize, word: &str) -> String {
    format!("{n} {word}{}", if n == 1 { "" } else { "s" })
}

fn type_names(f: &FieldDef) -> String {
    let names: Vec<String> =
        f.data_types.iter().map(|t| vocab::compact_iri(t.iri()).unwrap_or_else(|| t.iri().to_string())).collect();
    if names.is_empty() {
        "-".to_string()
    } else {
        names.join(", ")
    }
}

fn summary(m: &DatasetModel, report: &ValidationReport) -> String {
    let md = &m.metadata;
    let or_dash = |s: &str| if s.is_empty() { "-".to_string() } else { s.to_string() };
    let mut s = String::new();
    let _ = writeln!(s, "name:        {}", or_dash(&md.name));
    let _ = writeln!(s, "description: {}", or_dash(md.description.lines().next().unwrap_or("")));
    let _ = writeln!(s, "license:     {}", or_dash(&md.license.join(", ")));
    let _ = writeln!(s, "conformsTo:  {}", or_dash(&md.conforms_to));
    let _ = writeln!(s, "validation:  {}", report.summary());

    let _ = writeln!(
        s,
        "\nresources: {}, {}",
        plural(m.file_objects().count(), "FileObject"),
        plural(m.file_sets().count(), "FileSet")
    );
    for r in &m.resources {
        match r {
            Resource::FileObject(fo) => {
                let inside = fo.contained_in.as_deref().map(|p| format!(" (in {p})")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "  FileObject  {}  {}  {}{inside}",
                    fo.id,
                    fo.encoding_format.as_deref().unwrap_or("-"),
                    fo.content_url.as_deref().unwrap_or("-"),
                );
            }
            Resource::FileSet(fs) => {
                let _ = writeln!(
                    s,
                    "  FileSet     {}  {}  {} (in {})",
                    fs.id,
                    fs.encoding_format.as_deref().unwrap_or("-"),
                    fs.includes.join(" "),
                    fs.contained_in.join(", "),
                );
            }
        }
    }

    let _ = writeln!(s, "\nrecord sets: {}", plural(m.record_sets.len(), "RecordSet"));
    for rs in &m.record_sets {
        let subs: usize = rs.fields.iter().map(|f| f.sub_fields.len()).sum();
        let mut counts = plural(rs.fields.len(), "field");
        if subs > 0 {
            counts = format!("{counts}, {}", plural(subs, "subField"));
        }
        let _ = writeln!(s, "  {}  {counts}", rs.id);
        for f in &rs.fields {
            let _ = writeln!(s, "    {}  {}", f.id, type_names(f));
            for sub in &f.sub_fields {
                let _ = writeln!(s, "      {}  {}", sub.id, type_names(sub));
            }
        }
    }
    s
}

fn inspect(a: DocArgs) -> Result<u8> {
    let (bytes, _) = load(&a.document)?;
    if a.json {
        let graph = graph::load_document(&bytes).map_err(|e| invalid(&validate::graph_error_report(&e)))?;
        emit(&graph::to_canonical_json(&graph))?;
        return Ok(SUCCESS);
    }
    let (model, report) = validate::load_and_validate(&bytes).map_err(|r| invalid(&r))?;
    emit(summary(&model, &report).as_bytes())?;
    Ok(if report.passed { SUCCESS } else { INVALID })
}

fn pick_record_set(m: &DatasetModel, wanted: Option<String>) -> Result<String> {
    if let Some(w) = wanted {
        return Ok(w);
    }
    match m.record_sets.as_slice() {
        [only] => Ok(only.id.clone()),
        [] => Err(Usage("the document has no record sets".into()).into()),
        many => {
            let ids: Vec<&str> = many.iter().map(|r| r.id.as_str()).collect();
            Err(Usage(format!("choose a record set with --record-set: {}", ids.join(", "))).into())
        }
    }
}

fn records(a: RecordsArgs) -> Result<u8> {
    let (bytes, resolver) = load(&a.document)?;
    let (mut model, _) = load_valid(&bytes)?;
    if input::is_url(&a.document) {
        input::absolutize(&mut model, &a.document)?;
    }
    let record_set = pick_record_set(&model, a.record_set)?;
    let split = match (a.slice, a.split) {
        (Some(expr), _) => Some(SplitSlice::parse(&expr).map_err(|e| Usage(e.to_string()))?),
        (None, Some(name)) => Some(SplitSlice { name, start: None, end: None }),
        (None, None) => None,
    };
    let plan = records::plan(&model, &record_set, &resolver)?;
    let options = ReadOptions { strict: a.strict, split, limit: a.limit };
    let mut stream = records::read_records(&plan, &options)?;

    let mut out = BufWriter::new(io::stdout().lock());
    let mut count = 0usize;
    let mut first = None;
    let mut failure = None;
    for r in stream.by_ref() {
        let record = match r {
            Ok(r) => r,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        count += 1;
        match a.output {
            Output::Jsonl => {
                let written = serde_json::to_writer(&mut out, &record.to_json())
                    .map_err(io::Error::from)
                    .and_then(|_| out.write_all(b"\n"));
                match written {
                    Err(e) if e.kind() == io::ErrorKind::BrokenPipe => return Ok(SUCCESS),
                    other => other?,
                }
            }
            Output::Summary if first.is_none() => first = Some(record.to_json()),
            Output::Summary => {}
        }
    }
    if a.output == Output::Summary {
        if a.json {
            let doc = serde_json::json!({
                "recordSet": plan.record_set_id,
                "records": count,
                "first": first,
                "stats": stream.stats(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        } else {
            writeln!(out, "{}: {}", plan.record_set_id, plural(count, "record"))?;
            if let Some(f) = first {
                writeln!(out, "first: {f}")?;
            }
        }
    }
    out.flush()?;
    for w in stream.stats().warnings() {
        eprintln!("warning: {w}");
    }
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(SUCCESS),
    }
}

fn health(a: HealthArgs) -> Result<u8> {
    let options = ScanOptions {
        workers: a.workers.max(1),
        limit: a.limit,
        config: Config::discover().context("loading configuration")?,
    };
    let report = if input::is_url(&a.source) {
        let adapter = health::adapter(&a.adapter).ok_or_else(|| {
            Usage(format!("unknown adapter `{}`; expected one of {}", a.adapter, ADAPTERS.join(", ")))
        })?;
        health::scan_listing(&a.source, adapter.as_ref(), &options)?
    } else {
        let dir = Path::new(&a.source);
        if !dir.is_dir() {
            return Err(io::Error::new(io::ErrorKind::NotFound, format!("{} is not a directory", a.source)).into());
        }
        health::scan_directory(dir, &options)?
    };
    if a.json {
        emit(&health::report_to_json(&report))?;
    } else {
        emit(health::report_to_table(&report).as_bytes())?;
    }
    Ok(SUCCESS)
}
