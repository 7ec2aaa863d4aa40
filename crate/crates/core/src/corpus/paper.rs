//! Paper records and JSON Lines ingestion.
//!
//! Two record schemas are accepted. The native schema is the one this crate
//! writes: `{"id", "title", "abstract", "venue", "year", "references"}` where
//! `abstract` is either plain text or an inverted `{token: [positions]}` map.
//! The `dblp` schema reads the public citation dumps, which use numeric ids,
//! `venue` objects with a `raw` field and `indexed_abstract` blocks.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// A paper's metadata record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub venue: String,
    pub year: i32,
    /// Outgoing citations. Ids may point outside the loaded corpus.
    pub references: Vec<String>,
}

impl Paper {
    /// The text that is tokenized for indexing and querying.
    pub fn text(&self) -> String {
        if self.abstract_text.is_empty() {
            self.title.clone()
        } else {
            format!("{} {}", self.title, self.abstract_text)
        }
    }
}

/// Input record layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecordSchema {
    #[default]
    Native,
    Dblp,
}

impl FromStr for RecordSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "native" => Ok(Self::Native),
            "dblp" => Ok(Self::Dblp),
            _ => Err(Error::UnknownSchema(s.to_string())),
        }
    }
}

impl fmt::Display for RecordSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Native => f.write_str("native"),
            Self::Dblp => f.write_str("dblp"),
        }
    }
}

/// A line that could not be parsed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineError {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

/// Result of one ingestion pass.
#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub papers: Vec<Paper>,
    /// Records without an id or a title.
    pub dropped: usize,
    /// Records whose id was already seen; the first occurrence is kept.
    pub duplicates: usize,
    pub errors: Vec<LineError>,
}

impl IngestReport {
    pub fn error_count(&self) -> usize {
        self.errors.len()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AbstractField {
    Text(String),
    Inverted(BTreeMap<String, Vec<u32>>),
}

impl AbstractField {
    fn into_text(self) -> String {
        match self {
            AbstractField::Text(s) => s,
            AbstractField::Inverted(map) => reconstruct_inverted(map.iter().map(|(t, p)| (t.as_str(), p.as_slice()))),
        }
    }
}

#[derive(Deserialize)]
struct NativeRecord {
    id: Option<String>,
    title: Option<String>,
    #[serde(rename = "abstract")]
    abstract_text: Option<AbstractField>,
    venue: Option<String>,
    year: Option<i32>,
    #[serde(default)]
    references: Vec<String>,
}

/// Rebuilds running text from a position-indexed abstract.
pub fn reconstruct_inverted<'a, I>(entries: I) -> String
where
    I: IntoIterator<Item = (&'a str, &'a [u32])>,
{
    let mut slots: Vec<(u32, &str)> =
        entries.into_iter().flat_map(|(token, positions)| positions.iter().map(move |&p| (p, token))).collect();
    slots.sort_unstable();
    let mut out = String::new();
    for (_, token) in slots {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(token);
    }
    out
}

/// Parsed record before validation; `None` id/title means "drop".
struct RawRecord {
    id: Option<String>,
    title: Option<String>,
    abstract_text: String,
    venue: String,
    year: i32,
    references: Vec<String>,
}

fn parse_native(line: &str) -> std::result::Result<RawRecord, String> {
    let rec: NativeRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    Ok(RawRecord {
        id: rec.id,
        title: rec.title,
        abstract_text: rec.abstract_text.map(AbstractField::into_text).unwrap_or_default(),
        venue: rec.venue.unwrap_or_default(),
        year: rec.year.unwrap_or(0),
        references: rec.references,
    })
}

fn value_as_id(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn inverted_from_value(v: &Value) -> std::result::Result<String, String> {
    let map = v.as_object().ok_or("inverted abstract is not an object")?;
    let mut entries = Vec::with_capacity(map.len());
    for (token, positions) in map {
        let positions = positions
            .as_array()
            .ok_or_else(|| format!("positions for `{token}` are not an array"))?
            .iter()
            .map(|p| p.as_u64().map(|p| p as u32).ok_or_else(|| format!("bad position for `{token}`")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        entries.push((token.as_str(), positions));
    }
    Ok(reconstruct_inverted(entries.iter().map(|(t, p)| (*t, p.as_slice()))))
}

fn parse_dblp(line: &str) -> std::result::Result<RawRecord, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let obj = value.as_object().ok_or("record is not a JSON object")?;

    let id = obj.get("id").and_then(value_as_id);
    let title = obj.get("title").and_then(Value::as_str).map(str::to_string);

    let abstract_text = match (obj.get("abstract"), obj.get("indexed_abstract")) {
        (Some(Value::String(s)), _) => s.clone(),
        (Some(v @ Value::Object(_)), _) => inverted_from_value(v)?,
        (_, Some(Value::Object(ia))) => match ia.get("InvertedIndex") {
            Some(inv) => inverted_from_value(inv)?,
            None => inverted_from_value(&Value::Object(ia.clone()))?,
        },
        _ => String::new(),
    };

    let venue = match obj.get("venue") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Object(v)) => v.get("raw").and_then(Value::as_str).unwrap_or_default().to_string(),
        _ => String::new(),
    };

    let year = match obj.get("year") {
        Some(Value::Number(n)) => n.as_i64().ok_or("year is not an integer")? as i32,
        Some(Value::String(s)) => s.trim().parse().map_err(|_| format!("bad year `{s}`"))?,
        _ => 0,
    };

    let references = match obj.get("references") {
        Some(Value::Array(refs)) => refs
            .iter()
            .map(|r| value_as_id(r).ok_or_else(|| "reference is not a string or number".to_string()))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        Some(Value::Null) | None => Vec::new(),
        Some(_) => return Err("references is not an array".into()),
    };

    Ok(RawRecord { id, title, abstract_text, venue, year, references })
}

fn clean_references(id: &str, refs: Vec<String>) -> Vec<String> {
    let mut seen = HashSet::with_capacity(refs.len());
    refs.into_iter().filter(|r| r != id && !r.is_empty()).filter(|r| seen.insert(r.clone())).collect()
}

/// Reads one record per line. Malformed lines are reported with their line
/// number and skipped; blank lines are ignored.
pub fn ingest_papers<R: BufRead>(mut source: R, schema: RecordSchema) -> Result<IngestReport> {
    let mut report = IngestReport::default();
    let mut seen_ids = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0;

    loop {
        buf.clear();
        if source.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = match std::str::from_utf8(&buf) {
            Ok(s) => s.trim(),
            Err(e) => {
                report.errors.push(LineError { line: line_no, message: format!("invalid UTF-8: {e}") });
                continue;
            }
        };
        if line.is_empty() {
            continue;
        }

        let parsed = match schema {
            RecordSchema::Native => parse_native(line),
            RecordSchema::Dblp => parse_dblp(line),
        };
        let raw = match parsed {
            Ok(raw) => raw,
            Err(message) => {
                report.errors.push(LineError { line: line_no, message });
                continue;
            }
        };

        let (Some(id), Some(title)) =
            (raw.id.filter(|s| !s.trim().is_empty()), raw.title.filter(|s| !s.trim().is_empty()))
        else {
            report.dropped += 1;
            continue;
        };
        if !seen_ids.insert(id.clone()) {
            report.duplicates += 1;
            continue;
        }
        let references = clean_references(&id, raw.references);
        report.papers.push(Paper {
            id,
            title,
            abstract_text: raw.abstract_text,
            venue: raw.venue,
            year: raw.year,
            references,
        });
    }

    if !report.errors.is_empty() {
        log::warn!("skipped {} malformed record(s)", report.errors.len());
    }
    Ok(report)
}

pub fn read_papers_file(path: impl AsRef<Path>, schema: RecordSchema) -> Result<IngestReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    ingest_papers(BufReader::new(file), schema)
}

/// Writes papers in the native schema, one JSON object per line.
pub fn write_papers<W: Write>(papers: &[Paper], mut out: W) -> Result<()> {
    for paper in papers {
        serde_json::to_writer(&mut out, paper)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
