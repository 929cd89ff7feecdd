//! CSV ingestion and emission.

use std::fs::{self, File};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use otdc_core::dist::{Attribute, Schema, Tuple};
use otdc_core::fairness::{Group, ScoreRecord, ScoreTable};

/// A header plus rows of trimmed string values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Tuple>,
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn describe(path: &Path, e: csv::Error) -> anyhow::Error {
    match e.position() {
        Some(p) => anyhow!("{}: line {}: {e}", path.display(), p.line()),
        None => anyhow!("{}: {e}", path.display()),
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut rdr = reader(path)?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| describe(path, e))?
        .iter()
        .map(String::from)
        .collect();
    if header.is_empty() || header.iter().any(String::is_empty) {
        bail!("{}: line 1: header has an empty column name", path.display());
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| describe(path, e))?;
        if rec.iter().any(str::is_empty) {
            bail!("{}: line {}: empty value", path.display(), line_of(&rec));
        }
        rows.push(Tuple(rec.iter().map(String::from).collect()));
    }
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(Table { header, rows })
}

pub fn write_table(path: &Path, header: &[String], rows: &[Tuple]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.values())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `name=v1,v2,...` lines; attributes must match the data header in
/// order.
pub fn read_schema(path: &Path, header: &[String]) -> Result<Schema> {
    let text = fs::read_to_string(path).with_context(|| format!("reading schema {}", path.display()))?;
    let mut attrs = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, values) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}: line {}: expected name=v1,v2,...", path.display(), k + 1))?;
        let values: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
        attrs.push(Attribute::new(name.trim(), values).with_context(|| format!("{}: line {}", path.display(), k + 1))?);
    }
    let schema = Schema::new(attrs)?;
    let names: Vec<&str> = schema.names();
    if names != header.iter().map(String::as_str).collect::<Vec<_>>() {
        bail!(
            "{}: attributes [{}] do not match data header [{}]",
            path.display(),
            names.join(","),
            header.join(",")
        );
    }
    Ok(schema)
}

/// Declared schema when given, otherwise inferred from the rows.
pub fn schema_for(schema_path: Option<&Path>, header: &[String], rows: &[Tuple]) -> Result<Schema> {
    let schema = match schema_path {
        Some(p) => read_schema(p, header)?,
        None => Schema::infer(header, rows)?,
    };
    for (k, r) in rows.iter().enumerate() {
        schema
            .codes(r)
            .with_context(|| format!("data row {} (line {})", k + 1, k + 2))?;
    }
    Ok(schema)
}

/// Score file with its raw records, kept for re-emission.
pub struct ScoreFile {
    pub header: Vec<String>,
    pub raw: Vec<Vec<String>>,
    pub score_col: usize,
    pub table: ScoreTable,
}

fn parse_label(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

pub fn read_scores(path: &Path) -> Result<ScoreFile> {
    let mut rdr = reader(path)?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| describe(path, e))?
        .iter()
        .map(String::from)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| anyhow!("{}: missing column `{name}`", path.display()))
    };
    let (id, score, group, label) = (col("id")?, col("score")?, col("group")?, col("label")?);
    let mut raw = Vec::new();
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| describe(path, e))?;
        let line = line_of(&rec);
        let at = |k: usize| rec.get(k).unwrap_or_default();
        let s: f64 = at(score)
            .parse()
            .map_err(|_| anyhow!("{}: line {line}: bad score `{}`", path.display(), at(score)))?;
        let g: Group = at(group)
            .parse()
            .map_err(|e| anyhow!("{}: line {line}: {e}", path.display()))?;
        let l = parse_label(at(label))
            .ok_or_else(|| anyhow!("{}: line {line}: bad label `{}`", path.display(), at(label)))?;
        records.push(ScoreRecord::new(at(id), s, g, l));
        raw.push(rec.iter().map(String::from).collect());
    }
    if records.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    let table = ScoreTable::new(records).with_context(|| format!("in {}", path.display()))?;
    Ok(ScoreFile {
        header,
        raw,
        score_col: score,
        table,
    })
}

/// Writes the original score file with its score column replaced.
pub fn write_scores(path: &Path, file: &ScoreFile, scores: &ScoreTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&file.header)?;
    for (raw, rec) in file.raw.iter().zip(scores.records()) {
        let mut out = raw.clone();
        if out[file.score_col].parse::<f64>().ok() != Some(rec.score) {
            out[file.score_col] = crate::report::format_float(rec.score);
        }
        w.write_record(&out)?;
    }
    w.flush()?;
    Ok(())
}
