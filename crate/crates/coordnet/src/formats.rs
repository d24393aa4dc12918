//! CSV schemas for everything the CLI reads or writes.
//!
//! Floats use Rust's shortest round-trip formatting, absent values are empty
//! cells and days are ISO dates (UTC).

use std::collections::BTreeSet;
use std::io::{BufRead, Read, Write};

use coordnet_core::graph::{DailyShare, DuplicateShare};
use coordnet_core::socio::{characteristic_index, LexiconEntry, Provenance, N_CHARACTERISTICS, REGISTRY};
use coordnet_core::stats::CorrelationMatrix;
use coordnet_core::{CharacteristicTable, Cluster, CoordinationEdge, DailyVolume, Detector, Lexicon, SECONDS_PER_DAY};

use crate::error::{Error, Result};

/// Shortest round-trip form; exponent notation outside [1e-5, 1e16).
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        // no "-0"
        "0".into()
    } else if a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// UTC day index as `YYYY-MM-DD`.
pub fn fmt_day(day: i64) -> String {
    chrono::DateTime::from_timestamp(day * SECONDS_PER_DAY, 0)
        .map(|d| d.date_naive().to_string())
        .unwrap_or_else(|| day.to_string())
}

fn csv_err(file: &str, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(file, io),
        other => Error::format(file, format!("{other:?}")),
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).from_writer(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>, file: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(file, e))
}

fn row<W: Write, I, S>(w: &mut csv::Writer<W>, file: &str, cells: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(cells).map_err(|e| csv_err(file, e))
}

pub const EDGE_HEADER: [&str; 5] = ["account_a", "account_b", "detector", "score", "evidence"];

pub fn write_edges(w: impl Write, edges: &[CoordinationEdge]) -> Result<()> {
    let file = "edges";
    let mut w = writer(w);
    row(&mut w, file, EDGE_HEADER)?;
    for e in edges {
        row(&mut w, file, [e.a.as_str(), e.b.as_str(), e.detector.as_str(), &fmt_f64(e.score), &e.evidence])?;
    }
    finish(w, file)
}

pub fn read_edges(r: impl Read, file: &str) -> Result<Vec<CoordinationEdge>> {
    let mut rd = csv::ReaderBuilder::new().from_reader(r);
    let header = rd.headers().map_err(|e| csv_err(file, e))?.clone();
    if header.iter().collect::<Vec<_>>() != EDGE_HEADER {
        return Err(Error::format(file, format!("expected header {}", EDGE_HEADER.join(","))));
    }
    let mut edges = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(file, e))?;
        let line = i + 2;
        let bad = |m: String| Error::format(file, format!("line {line}: {m}"));
        let detector = Detector::parse(&rec[2]).ok_or_else(|| bad(format!("unknown detector {:?}", &rec[2])))?;
        let score: f64 = rec[3].parse().map_err(|_| bad(format!("bad score {:?}", &rec[3])))?;
        let edge = CoordinationEdge::new(&rec[0], &rec[1], detector, score, &rec[4])
            .ok_or_else(|| bad("self-pair edge".into()))?;
        edges.push(edge);
    }
    coordnet_core::detectors::canonicalize_edges(&mut edges);
    Ok(edges)
}

pub fn write_flagged(mut w: impl Write, accounts: &BTreeSet<String>) -> Result<()> {
    for a in accounts {
        writeln!(w, "{a}").map_err(|e| Error::io("flagged", e))?;
    }
    w.flush().map_err(|e| Error::io("flagged", e))
}

pub fn read_flagged(r: impl BufRead, file: &str) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for line in r.lines() {
        let line = line.map_err(|e| Error::io(file, e))?;
        let t = line.trim();
        if !t.is_empty() {
            out.insert(t.to_string());
        }
    }
    Ok(out)
}

/// `cluster_id,size,label,member_ids...` with one member per trailing cell.
pub fn write_clusters(w: impl Write, clusters: &[Cluster]) -> Result<()> {
    let file = "clusters";
    let mut w = writer(w);
    row(&mut w, file, ["cluster_id", "size", "label", "member_ids"])?;
    for c in clusters {
        let mut cells = vec![c.id.to_string(), c.size().to_string(), c.label.clone()];
        cells.extend(c.members.iter().cloned());
        row(&mut w, file, &cells)?;
    }
    finish(w, file)
}

pub fn write_daily_volume(w: impl Write, volumes: &[DailyVolume]) -> Result<()> {
    let file = "daily_volume";
    let mut w = writer(w);
    row(&mut w, file, ["day", "original", "reply", "retweet"])?;
    for v in volumes {
        row(&mut w, file, [fmt_day(v.day), v.original.to_string(), v.reply.to_string(), v.retweet.to_string()])?;
    }
    finish(w, file)
}

pub fn write_activity_shares(w: impl Write, shares: &[DailyShare]) -> Result<()> {
    let file = "activity_shares";
    let mut w = writer(w);
    row(&mut w, file, ["day", "original", "reply", "retweet"])?;
    for s in shares {
        row(&mut w, file, [fmt_day(s.day), fmt_opt(s.original), fmt_opt(s.reply), fmt_opt(s.retweet)])?;
    }
    finish(w, file)
}

/// `group,account_id,share,n_originals`; `group` is `coordinated` or `other`.
pub fn write_duplicate_shares(w: impl Write, groups: &[(&str, &[DuplicateShare])]) -> Result<()> {
    let file = "duplicate_shares";
    let mut w = writer(w);
    row(&mut w, file, ["group", "account_id", "share", "n_originals"])?;
    for (group, shares) in groups {
        for s in *shares {
            row(&mut w, file, [group.to_string(), s.account_id.clone(), fmt_opt(s.share), s.n_originals.to_string()])?;
        }
    }
    finish(w, file)
}

/// Square matrix with registry names on both axes.
pub fn write_matrix(w: impl Write, values: &[Vec<Option<f64>>]) -> Result<()> {
    let file = "matrix";
    let mut w = writer(w);
    let mut header = vec!["characteristic".to_string()];
    header.extend(REGISTRY.iter().map(|c| c.name.to_string()));
    row(&mut w, file, &header)?;
    for (i, r) in values.iter().enumerate() {
        let mut cells = vec![REGISTRY[i].name.to_string()];
        cells.extend(r.iter().map(|v| fmt_opt(*v)));
        row(&mut w, file, &cells)?;
    }
    finish(w, file)
}

pub fn write_correlation(rho: impl Write, p: impl Write, m: &CorrelationMatrix) -> Result<()> {
    write_matrix(rho, &m.rho)?;
    write_matrix(p, &m.p)
}

/// One row of the delta table.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub cluster: String,
    pub characteristic: usize,
    pub delta: f64,
    pub se: Option<f64>,
    pub p: Option<f64>,
}

pub fn write_deltas(w: impl Write, rows: &[DeltaRow]) -> Result<()> {
    let file = "deltas";
    let mut w = writer(w);
    row(&mut w, file, ["cluster", "characteristic", "delta", "se", "p"])?;
    for r in rows {
        row(
            &mut w,
            file,
            [r.cluster.clone(), REGISTRY[r.characteristic].name.into(), fmt_f64(r.delta), fmt_opt(r.se), fmt_opt(r.p)],
        )?;
    }
    finish(w, file)
}

/// Generic table writer for the smaller report sections.
pub fn write_table(w: impl Write, file: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(w);
    row(&mut w, file, header)?;
    for r in rows {
        row(&mut w, file, r)?;
    }
    finish(w, file)
}

pub fn write_confidences(w: impl Write, table: &CharacteristicTable) -> Result<()> {
    let file = "confidences";
    let mut w = writer(w);
    let mut header = vec!["tweet_id"];
    header.extend(REGISTRY.iter().map(|c| c.name));
    row(&mut w, file, &header)?;
    for (id, values) in table.rows() {
        let mut cells = vec![id.clone()];
        cells.extend(values.iter().map(|v| fmt_f64(*v)));
        row(&mut w, file, &cells)?;
    }
    finish(w, file)
}

/// Reads `tweet_id,<characteristic columns>`. Columns may come in any order
/// but every registered characteristic must be present; empty cells count as
/// missing and default to 0.0. An empty file yields an empty table.
pub fn read_confidences(r: impl Read, file: &str) -> Result<CharacteristicTable> {
    let mut table = CharacteristicTable::new(Provenance::External);
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = rd.headers().map_err(|e| csv_err(file, e))?.clone();
    if header.is_empty() {
        return Ok(table);
    }
    if &header[0] != "tweet_id" {
        return Err(Error::format(file, "first column must be tweet_id"));
    }
    let mut columns = Vec::with_capacity(header.len() - 1);
    let mut seen = [false; N_CHARACTERISTICS];
    for name in header.iter().skip(1) {
        let idx = characteristic_index(name).ok_or_else(|| Error::format(file, format!("unknown column {name:?}")))?;
        if seen[idx] {
            return Err(Error::format(file, format!("duplicate column for {}", REGISTRY[idx].name)));
        }
        seen[idx] = true;
        columns.push(idx);
    }
    let absent: Vec<&str> = REGISTRY.iter().zip(seen).filter(|(_, s)| !s).map(|(c, _)| c.name).collect();
    if !absent.is_empty() {
        return Err(Error::format(file, format!("missing columns: {}", absent.join(", "))));
    }
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(file, e))?;
        let line = i + 2;
        let mut values = [None; N_CHARACTERISTICS];
        for (cell, &idx) in rec.iter().skip(1).zip(&columns) {
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                Error::format(file, format!("line {line}, column {}: not a number {cell:?}", REGISTRY[idx].name))
            })?;
            values[idx] = Some(v);
        }
        table.insert(&rec[0], &values).map_err(|e| match e {
            coordnet_core::Error::ConfidenceRange { tweet_id, column, value } => Error::format(
                file,
                format!("line {line} (tweet {tweet_id}), column {column}: value {value} outside [0,1]"),
            ),
            coordnet_core::Error::DuplicateTweet(id) => {
                Error::format(file, format!("line {line}: duplicate tweet_id {id:?}"))
            }
            other => other.into(),
        })?;
    }
    Ok(table)
}

/// Reads `characteristic,phrase,weight[,language]`.
pub fn read_lexicon(r: impl Read, file: &str) -> Result<Lexicon> {
    let mut rd = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);
    let header = rd.headers().map_err(|e| csv_err(file, e))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() < 3 || names[..3] != ["characteristic", "phrase", "weight"] {
        return Err(Error::format(file, "expected header characteristic,phrase,weight[,language]"));
    }
    let mut entries = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(file, e))?;
        let line = i + 2;
        if rec.len() < 3 {
            return Err(Error::format(file, format!("line {line}: expected at least 3 cells")));
        }
        let weight: f64 =
            rec[2].parse().map_err(|_| Error::format(file, format!("line {line}: bad weight {:?}", &rec[2])))?;
        let entry = LexiconEntry::new(&rec[0], &rec[1], weight, rec.get(3))
            .map_err(|e| Error::format(file, format!("line {line}: {e}")))?;
        entries.push(entry);
    }
    Ok(Lexicon::new(entries))
}
