//! `stats` subcommand: run one test on columns of a CSV file.

use std::io::Read;

use coordnet_core::stats::{
    bootstrap_se, cohens_kappa, mann_whitney_u_with, reshuffle_eval, roc_auc, spearman_with, Alternative, MwuOptions,
};
use coordnet_core::StatResult;
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatTest {
    Spearman,
    MannWhitney,
    Roc,
    Kappa,
    Bootstrap,
    Reshuffle,
}

#[derive(Debug, Clone)]
pub struct StatsArgs {
    pub test: StatTest,
    /// First column (values, or scores for roc/reshuffle).
    pub x: Option<String>,
    /// Second column (values, or 0/1 labels for roc/reshuffle).
    pub y: Option<String>,
    /// Annotator columns for kappa.
    pub columns: Vec<String>,
    pub alternative: Alternative,
    pub resamples: usize,
    pub splits: usize,
    pub train_frac: f64,
    pub seed: u64,
}

/// Header plus raw string cells.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    file: String,
}

impl Table {
    fn read(r: impl Read, file: &str) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(r);
        let header = rd
            .headers()
            .map_err(|e| Error::format(file, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| Error::format(file, e.to_string()))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Self { header, rows, file: file.into() })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::format(&self.file, format!("no column {name:?}")))
    }

    fn cell(&self, row: usize, col: usize) -> &str {
        self.rows[row].get(col).map(String::as_str).unwrap_or("")
    }

    fn parse_num(&self, row: usize, col: usize) -> Result<Option<f64>> {
        let c = self.cell(row, col);
        if c.is_empty() {
            return Ok(None);
        }
        c.parse().map(Some).map_err(|_| {
            Error::format(&self.file, format!("line {}, column {}: not a number {c:?}", row + 2, self.header[col]))
        })
    }

    fn parse_label(&self, row: usize, col: usize) -> Result<Option<bool>> {
        match self.cell(row, col).to_ascii_lowercase().as_str() {
            "" => Ok(None),
            "1" | "true" => Ok(Some(true)),
            "0" | "false" => Ok(Some(false)),
            other => Err(Error::format(
                &self.file,
                format!("line {}, column {}: not a 0/1 label {other:?}", row + 2, self.header[col]),
            )),
        }
    }

    /// Non-empty values of one column.
    fn column(&self, name: &str) -> Result<Vec<f64>> {
        let c = self.index(name)?;
        let mut out = Vec::new();
        for r in 0..self.rows.len() {
            if let Some(v) = self.parse_num(r, c)? {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Rows where both columns are present.
    fn pairs(&self, x: &str, y: &str) -> Result<(Vec<f64>, Vec<f64>)> {
        let (cx, cy) = (self.index(x)?, self.index(y)?);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for r in 0..self.rows.len() {
            if let (Some(u), Some(v)) = (self.parse_num(r, cx)?, self.parse_num(r, cy)?) {
                a.push(u);
                b.push(v);
            }
        }
        Ok((a, b))
    }

    fn scored(&self, score: &str, label: &str) -> Result<Vec<(f64, bool)>> {
        let (cs, cl) = (self.index(score)?, self.index(label)?);
        let mut out = Vec::new();
        for r in 0..self.rows.len() {
            if let (Some(s), Some(l)) = (self.parse_num(r, cs)?, self.parse_label(r, cl)?) {
                out.push((s, l));
            }
        }
        Ok(out)
    }
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Config(format!("this test needs {flag}")))
}

fn result_json(r: &StatResult) -> Value {
    json!({
        "method": r.method,
        "statistic": r.statistic,
        "p_value": r.p_value,
        "se": r.se,
        "n": r.n,
    })
}

pub fn run(args: &StatsArgs, input: impl Read, file: &str) -> Result<Value> {
    let t = Table::read(input, file)?;
    let value = match args.test {
        StatTest::Spearman => {
            let (a, b) = t.pairs(need(&args.x, "--x")?, need(&args.y, "--y")?)?;
            result_json(&spearman_with(&a, &b, args.alternative)?)
        }
        StatTest::MannWhitney => {
            let a = t.column(need(&args.x, "--x")?)?;
            let b = t.column(need(&args.y, "--y")?)?;
            let opts = MwuOptions { alternative: args.alternative, ..MwuOptions::default() };
            result_json(&mann_whitney_u_with(&a, &b, opts)?)
        }
        StatTest::Roc => {
            let rows = t.scored(need(&args.x, "--x")?, need(&args.y, "--y")?)?;
            let (s, l): (Vec<f64>, Vec<bool>) = rows.into_iter().unzip();
            result_json(&roc_auc(&s, &l)?)
        }
        StatTest::Kappa => {
            if args.columns.len() < 2 {
                return Err(Error::Config("kappa needs at least two --columns".into()));
            }
            let cols: Vec<usize> = args.columns.iter().map(|c| t.index(c)).collect::<Result<_>>()?;
            let mut items = Vec::with_capacity(t.rows.len());
            for r in 0..t.rows.len() {
                items.push(cols.iter().map(|&c| t.parse_label(r, c)).collect::<Result<Vec<_>>>()?);
            }
            result_json(&cohens_kappa(&items)?)
        }
        StatTest::Bootstrap => {
            let v = t.column(need(&args.x, "--x")?)?;
            let se = bootstrap_se(&v, args.resamples, args.seed)?;
            json!({
                "method": "bootstrap_se_of_mean",
                "se": se,
                "n": v.len(),
                "resamples": args.resamples,
                "seed": args.seed,
            })
        }
        StatTest::Reshuffle => {
            let rows = t.scored(need(&args.x, "--x")?, need(&args.y, "--y")?)?;
            let r = reshuffle_eval(&rows, args.splits, args.train_frac, args.seed)?;
            json!({
                "method": "reshuffle_auc",
                "mean_auc": r.mean_auc,
                "se": r.se,
                "splits": r.aucs.len(),
                "skipped": r.skipped,
                "aucs": r.aucs,
                "seed": r.seed,
            })
        }
    };
    Ok(value)
}
