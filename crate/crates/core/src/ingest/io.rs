//! Corpus and mention readers/writers. CSV and JSON-lines carry the same
//! field names; empty CSV cells mean a missing optional. Malformed rows
//! become [`SchemaViolation`]s instead of aborting the load.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{IngestError, MentionEvent, PaperRecord, SchemaViolation, YearMonth};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" | "ndjson" => Ok(Format::JsonLines),
            other => Err(format!("unknown format {other:?} (expected csv or jsonl)")),
        }
    }
}

impl Format {
    /// Guess from a file extension; defaults to CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => Format::JsonLines,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Default)]
pub struct CorpusLoad {
    pub records: Vec<PaperRecord>,
    pub violations: Vec<SchemaViolation>,
}

#[derive(Debug, Default)]
pub struct MentionLoad {
    pub events: Vec<MentionEvent>,
    pub violations: Vec<SchemaViolation>,
}

const CORPUS_COLUMNS: [&str; 13] = [
    "paper_id",
    "doi",
    "title",
    "pub_year",
    "venue",
    "discipline",
    "retraction_year",
    "retraction_month",
    "retraction_reason",
    "n_authors",
    "journal_rank",
    "subject_area",
    "citations_by_year",
];

const MENTION_COLUMNS: [&str; 5] = ["paper_id", "year", "month", "source_type", "weight"];

/// Typed row shared by both formats; the JSON-lines files are exactly this
/// shape, one object per line.
#[derive(Debug, Serialize, Deserialize)]
struct RawPaper {
    paper_id: String,
    #[serde(default)]
    doi: Option<String>,
    title: String,
    pub_year: i32,
    venue: String,
    discipline: String,
    #[serde(default)]
    retraction_year: Option<i32>,
    #[serde(default)]
    retraction_month: Option<u8>,
    #[serde(default)]
    retraction_reason: Option<String>,
    #[serde(default)]
    n_authors: Option<u32>,
    #[serde(default)]
    journal_rank: Option<f64>,
    #[serde(default)]
    subject_area: Option<String>,
    #[serde(default)]
    citations_by_year: BTreeMap<i32, u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawMention {
    paper_id: String,
    year: i32,
    month: u8,
    source_type: String,
    weight: f64,
}

fn violation(row: usize, field: &str, reason: impl Into<String>) -> SchemaViolation {
    SchemaViolation {
        row,
        field: field.into(),
        reason: reason.into(),
    }
}

fn finalize_paper(raw: RawPaper, row: usize) -> Result<PaperRecord, SchemaViolation> {
    let retraction_date = match (raw.retraction_year, raw.retraction_month) {
        (None, None) => None,
        (Some(y), Some(m)) => Some(YearMonth::new(y, m).ok_or_else(|| {
            violation(row, "retraction_month", format!("month {m} outside 1..=12"))
        })?),
        (Some(_), None) => {
            return Err(violation(row, "retraction_month", "year given without month"))
        }
        (None, Some(_)) => {
            return Err(violation(row, "retraction_year", "month given without year"))
        }
    };
    if raw.paper_id.is_empty() {
        return Err(violation(row, "paper_id", "must be non-empty"));
    }
    if let Some(rank) = raw.journal_rank {
        if !rank.is_finite() {
            return Err(violation(row, "journal_rank", "must be finite"));
        }
    }
    let record = PaperRecord {
        paper_id: raw.paper_id,
        doi: raw.doi.filter(|s| !s.is_empty()),
        title: raw.title,
        pub_year: raw.pub_year,
        venue: raw.venue,
        discipline: raw.discipline,
        retraction_date,
        retraction_reason: raw.retraction_reason.filter(|s| !s.is_empty()),
        n_authors: raw.n_authors,
        journal_rank: raw.journal_rank,
        subject_area: raw.subject_area.filter(|s| !s.is_empty()),
        citations_by_year: raw.citations_by_year,
    };
    record
        .check_invariants()
        .map_err(|(field, reason)| violation(row, &field, reason))?;
    Ok(record)
}

fn finalize_mention(raw: RawMention, row: usize) -> Result<MentionEvent, SchemaViolation> {
    let timestamp = YearMonth::new(raw.year, raw.month)
        .ok_or_else(|| violation(row, "month", format!("month {} outside 1..=12", raw.month)))?;
    if raw.paper_id.is_empty() {
        return Err(violation(row, "paper_id", "must be non-empty"));
    }
    let event = MentionEvent {
        paper_id: raw.paper_id,
        timestamp,
        source_type: raw.source_type,
        weight: raw.weight,
    };
    event
        .check_invariants()
        .map_err(|(field, reason)| violation(row, &field, reason))?;
    Ok(event)
}

fn opt_cell(cell: &str) -> Option<&str> {
    let trimmed = cell.trim();
    (!trimmed.is_empty()).then_some(trimmed)
}

fn parse_cell<T: FromStr>(
    cell: &str,
    row: usize,
    field: &str,
) -> Result<T, SchemaViolation>
where
    T::Err: std::fmt::Display,
{
    cell.trim()
        .parse::<T>()
        .map_err(|e| violation(row, field, format!("cannot parse {cell:?}: {e}")))
}

fn parse_opt_cell<T: FromStr>(
    cell: &str,
    row: usize,
    field: &str,
) -> Result<Option<T>, SchemaViolation>
where
    T::Err: std::fmt::Display,
{
    match opt_cell(cell) {
        None => Ok(None),
        Some(s) => parse_cell(s, row, field).map(Some),
    }
}

fn parse_citation_map(cell: &str, row: usize) -> Result<BTreeMap<i32, u32>, SchemaViolation> {
    let mut map = BTreeMap::new();
    if cell.trim().is_empty() {
        return Ok(map);
    }
    for part in cell.trim().split(';') {
        let (year_s, count_s) = part.split_once(':').ok_or_else(|| {
            violation(row, "citations_by_year", format!("entry {part:?} is not year:count"))
        })?;
        let year: i32 = parse_cell(year_s, row, "citations_by_year")?;
        let count: u32 = parse_cell(count_s, row, "citations_by_year")?;
        if map.insert(year, count).is_some() {
            return Err(violation(
                row,
                "citations_by_year",
                format!("duplicate year {year}"),
            ));
        }
    }
    Ok(map)
}

fn encode_citation_map(map: &BTreeMap<i32, u32>) -> String {
    map.iter()
        .map(|(y, c)| format!("{y}:{c}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn csv_paper_row(rec: &csv::StringRecord, row: usize) -> Result<RawPaper, SchemaViolation> {
    let cell = |i: usize| rec.get(i).unwrap_or("");
    Ok(RawPaper {
        paper_id: cell(0).trim().to_string(),
        doi: opt_cell(cell(1)).map(str::to_string),
        title: cell(2).trim().to_string(),
        pub_year: parse_cell(cell(3), row, "pub_year")?,
        venue: cell(4).trim().to_string(),
        discipline: cell(5).trim().to_string(),
        retraction_year: parse_opt_cell(cell(6), row, "retraction_year")?,
        retraction_month: parse_opt_cell(cell(7), row, "retraction_month")?,
        retraction_reason: opt_cell(cell(8)).map(str::to_string),
        n_authors: parse_opt_cell(cell(9), row, "n_authors")?,
        journal_rank: parse_opt_cell(cell(10), row, "journal_rank")?,
        subject_area: opt_cell(cell(11)).map(str::to_string),
        citations_by_year: parse_citation_map(cell(12), row)?,
    })
}

fn open_reader(path: &Path) -> Result<std::fs::File, IngestError> {
    std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            IngestError::FileNotFound(path.display().to_string())
        } else {
            IngestError::Io(e)
        }
    })
}

fn check_header(rec: &csv::StringRecord, expected: &[&str]) -> Result<(), IngestError> {
    let got: Vec<&str> = rec.iter().map(str::trim).collect();
    if got != expected {
        return Err(IngestError::Format(format!(
            "unexpected header {got:?}, expected {expected:?}"
        )));
    }
    Ok(())
}

/// Load a corpus file. Row-level problems land in
/// [`CorpusLoad::violations`]; file-level problems (missing file,
/// malformed header) are hard errors.
pub fn load_corpus(path: &Path, format: Format) -> Result<CorpusLoad, IngestError> {
    let file = open_reader(path)?;
    let mut load = CorpusLoad::default();
    match format {
        Format::Csv => {
            let mut rdr = csv::Reader::from_reader(file);
            check_header(rdr.headers().map_err(|e| IngestError::Format(e.to_string()))?,
                &CORPUS_COLUMNS)?;
            for (i, result) in rdr.records().enumerate() {
                let row = i + 1;
                let parsed = result
                    .map_err(|e| violation(row, "<record>", e.to_string()))
                    .and_then(|rec| csv_paper_row(&rec, row))
                    .and_then(|raw| finalize_paper(raw, row));
                match parsed {
                    Ok(record) => load.records.push(record),
                    Err(v) => load.violations.push(v),
                }
            }
        }
        Format::JsonLines => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let row = i + 1;
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = serde_json::from_str::<RawPaper>(&line)
                    .map_err(|e| violation(row, "<record>", e.to_string()))
                    .and_then(|raw| finalize_paper(raw, row));
                match parsed {
                    Ok(record) => load.records.push(record),
                    Err(v) => load.violations.push(v),
                }
            }
        }
    }
    Ok(load)
}

/// Load a mention stream; same error discipline as [`load_corpus`].
pub fn load_mentions(path: &Path, format: Format) -> Result<MentionLoad, IngestError> {
    let file = open_reader(path)?;
    let mut load = MentionLoad::default();
    match format {
        Format::Csv => {
            let mut rdr = csv::Reader::from_reader(file);
            check_header(rdr.headers().map_err(|e| IngestError::Format(e.to_string()))?,
                &MENTION_COLUMNS)?;
            for (i, result) in rdr.records().enumerate() {
                let row = i + 1;
                let parsed = result
                    .map_err(|e| violation(row, "<record>", e.to_string()))
                    .and_then(|rec| {
                        let cell = |i: usize| rec.get(i).unwrap_or("");
                        Ok(RawMention {
                            paper_id: cell(0).trim().to_string(),
                            year: parse_cell(cell(1), row, "year")?,
                            month: parse_cell(cell(2), row, "month")?,
                            source_type: cell(3).trim().to_string(),
                            weight: parse_cell(cell(4), row, "weight")?,
                        })
                    })
                    .and_then(|raw| finalize_mention(raw, row));
                match parsed {
                    Ok(event) => load.events.push(event),
                    Err(v) => load.violations.push(v),
                }
            }
        }
        Format::JsonLines => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let row = i + 1;
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = serde_json::from_str::<RawMention>(&line)
                    .map_err(|e| violation(row, "<record>", e.to_string()))
                    .and_then(|raw| finalize_mention(raw, row));
                match parsed {
                    Ok(event) => load.events.push(event),
                    Err(v) => load.violations.push(v),
                }
            }
        }
    }
    Ok(load)
}

fn paper_to_raw(r: &PaperRecord) -> RawPaper {
    RawPaper {
        paper_id: r.paper_id.clone(),
        doi: r.doi.clone(),
        title: r.title.clone(),
        pub_year: r.pub_year,
        venue: r.venue.clone(),
        discipline: r.discipline.clone(),
        retraction_year: r.retraction_date.map(|d| d.year),
        retraction_month: r.retraction_date.map(|d| d.month),
        retraction_reason: r.retraction_reason.clone(),
        n_authors: r.n_authors,
        journal_rank: r.journal_rank,
        subject_area: r.subject_area.clone(),
        citations_by_year: r.citations_by_year.clone(),
    }
}

pub fn write_corpus_csv<W: Write>(out: W, records: &[PaperRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CORPUS_COLUMNS)?;
    for r in records {
        let opt_num = |v: Option<String>| v.unwrap_or_default();
        w.write_record([
            r.paper_id.clone(),
            r.doi.clone().unwrap_or_default(),
            r.title.clone(),
            r.pub_year.to_string(),
            r.venue.clone(),
            r.discipline.clone(),
            opt_num(r.retraction_date.map(|d| d.year.to_string())),
            opt_num(r.retraction_date.map(|d| d.month.to_string())),
            r.retraction_reason.clone().unwrap_or_default(),
            opt_num(r.n_authors.map(|n| n.to_string())),
            opt_num(r.journal_rank.map(|j| j.to_string())),
            r.subject_area.clone().unwrap_or_default(),
            encode_citation_map(&r.citations_by_year),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_corpus_jsonl<W: Write>(mut out: W, records: &[PaperRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, &paper_to_raw(r))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_mentions_csv<W: Write>(out: W, events: &[MentionEvent]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MENTION_COLUMNS)?;
    for e in events {
        w.write_record([
            e.paper_id.clone(),
            e.timestamp.year.to_string(),
            e.timestamp.month.to_string(),
            e.source_type.clone(),
            e.weight.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mentions_jsonl<W: Write>(mut out: W, events: &[MentionEvent]) -> std::io::Result<()> {
    for e in events {
        let raw = RawMention {
            paper_id: e.paper_id.clone(),
            year: e.timestamp.year,
            month: e.timestamp.month,
            source_type: e.source_type.clone(),
            weight: e.weight,
        };
        serde_json::to_writer(&mut out, &raw)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
