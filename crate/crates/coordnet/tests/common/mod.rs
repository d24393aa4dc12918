//! Fixture builders and CLI helpers for the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coordnet::ingest::record_to_json;
use coordnet_core::TweetRecord;

#[path = "../../../core/tests/support/mod.rs"]
pub mod support;

pub const GOLDEN_CONFIG: &str = r#"
hashtag_k = 5
retweet_top_frac = 0.05
retweet_min = 3
time_bin_minutes = 30
time_threshold = 0.9
time_min = 3
story_hashtags = ["MacronLeaks", "Bayrougate", "Macrongate"]
bootstrap_resamples = 200
top_clusters = 3
seed = 11
"#;

const WORDS: [&str; 16] = [
    "votez", "macron", "vote for", "never vote", "economy", "immigration", "fake news", "hope", "hate", "proud",
    "russia", "lol", "merci", "leaks", "démocratie", "peur",
];

/// Exactly 1,000 records with texts, mixed languages and some story tags.
pub fn golden_records() -> Vec<TweetRecord> {
    let mut records = support::random_corpus(77, 95);
    assert!(records.len() >= 1000, "generator gave {}", records.len());
    records.truncate(1000);
    let langs = ["fr", "en", "fr", "und"];
    let story = ["MacronLeaks", "Bayrougate", "Macrongate"];
    for (i, r) in records.iter_mut().enumerate() {
        r.language = langs[i % langs.len()].into();
        let a = WORDS[i % WORDS.len()];
        let b = WORDS[(i * 7 + 3) % WORDS.len()];
        r.text = format!("{a} {b} @u{:03} http://t.co/x{i}", i % 50);
        if i % 9 == 0 {
            // repeated text for duplicate shares
            r.text = "Votez pour le changement!".into();
        }
        if r.kind == coordnet_core::TweetKind::Original && i % 5 == 0 {
            r.hashtags.push(story[i % 3].into());
        }
    }
    records
}

/// JSONL with every other timestamp written as an ISO-8601 string.
pub fn raw_jsonl(records: &[TweetRecord]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        let mut v: serde_json::Value = serde_json::from_str(&record_to_json(r)).unwrap();
        if i % 2 == 1 {
            let iso = chrono::DateTime::from_timestamp(r.timestamp, 0).unwrap().to_rfc3339();
            v["timestamp"] = serde_json::Value::String(iso);
        }
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_coordnet")
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

pub fn cli_ok(args: &[&str]) -> serde_json::Value {
    let out = cli(args);
    assert!(
        out.status.success(),
        "coordnet {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("summary json")
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs ingest, detect, cluster, score and report into `root`.
pub fn full_pipeline(input: &Path, config: &Path, root: &Path, threads: usize) -> PathBuf {
    let t = threads.to_string();
    let g = |name: &str| root.join(name);
    let common = ["--config", s(config), "--threads", &t];
    let run = |extra: &[&str]| {
        let mut args: Vec<&str> = common.to_vec();
        args.extend_from_slice(extra);
        cli_ok(&args)
    };
    run(&["ingest", s(input), "--out", s(&g("ingest"))]);
    let corpus = g("ingest").join("corpus.jsonl");
    run(&["detect", s(&corpus), "--out", s(&g("detect"))]);
    let edges = g("detect").join("edges.csv");
    run(&["cluster", s(&corpus), s(&edges), "--out", s(&g("cluster"))]);
    run(&["score", s(&corpus), "--out", s(&g("score"))]);
    let conf = g("score").join("confidences.csv");
    run(&["report", s(&corpus), s(&edges), "--confidences", s(&conf), "--out", s(&g("report"))]);
    root.to_path_buf()
}

/// Relative path and bytes of every file under `root`, sorted.
pub fn snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}
