mod common;

use std::collections::BTreeSet;
use std::fs;

use common::{cli, cli_ok, s, write};

const ORIGINAL_A: &str = r##"{"tweet_id":"1","account_id":"alice","timestamp":"2017-05-05T10:00:00Z","kind":"original","text":"Votez!","hashtags":["#A","b","c","d","e"],"language":"fr"}"##;
const ORIGINAL_B: &str = r##"{"tweet_id":"2","account_id":"bob","timestamp":1493978500,"kind":"original","text":"Votez!","hashtags":["a","B","c","d","e","f"],"language":"fr"}"##;
const ORIGINAL_C: &str = r##"{"tweet_id":"3","account_id":"carol","timestamp":1493978600,"kind":"original","text":"hello","hashtags":["a","b","c","d"],"language":"en"}"##;
const RETWEET: &str = r##"{"tweet_id":"4","account_id":"dave","timestamp":1493978700,"kind":"retweet","text":"RT","retweeted_tweet_id":"1","retweeted_account_id":"alice"}"##;

fn corpus_text() -> String {
    [ORIGINAL_A, ORIGINAL_B, ORIGINAL_C, RETWEET].join("\n") + "\n"
}

#[test]
fn ingest_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write(&input, &corpus_text());
    let a = cli_ok(&["ingest", s(&input), "--out", s(&dir.path().join("a"))]);
    let b = cli_ok(&["ingest", s(&input), "--out", s(&dir.path().join("b"))]);
    assert_eq!(a["records"], 4);
    assert_eq!(a["manifest_digest"], b["manifest_digest"]);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["counts"]["records"], 4);
    assert_eq!(manifest["inputs"][0]["name"], "in.jsonl");
    let artifacts: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/artifacts.json")).unwrap()).unwrap();
    assert_eq!(artifacts["manifest_digest"], a["manifest_digest"]);
    assert_eq!(
        fs::read_to_string(dir.path().join("a/daily_volume.csv")).unwrap(),
        "day,original,reply,retweet\n2017-05-05,3,0,1\n"
    );
}

#[test]
fn strict_mode_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write(&input, &format!("{ORIGINAL_A}\n{{\"tweet_id\":\"9\"}}\n{ORIGINAL_B}\n"));
    let out = cli(&["--strict", "ingest", s(&input), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = cli(&["--strict", "--json-errors", "ingest", s(&input), "--out", s(&dir.path().join("o"))]);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["line"], 2);
    assert_eq!(err["error"], "parse");

    let lenient = cli_ok(&["ingest", s(&input), "--out", s(&dir.path().join("o"))]);
    assert_eq!(lenient["skipped"], 1);
    assert_eq!(lenient["records"], 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    let out = cli(&["ingest", s(&missing), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.jsonl"));

    let cfg = dir.path().join("bad.toml");
    write(&cfg, "hashtag_k = 1\n");
    let out = cli(&["--config", s(&cfg), "ingest", s(&missing), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));

    let out = cli(&["--threads", "0", "ingest", s(&missing), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
}

fn ingest(dir: &std::path::Path) -> std::path::PathBuf {
    let input = dir.join("in.jsonl");
    write(&input, &corpus_text());
    cli_ok(&["ingest", s(&input), "--out", s(&dir.join("ing"))]);
    dir.join("ing/corpus.jsonl")
}

#[test]
fn detect_finds_planted_pair() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest(dir.path());
    let out = dir.path().join("det");
    let summary = cli_ok(&["detect", s(&corpus), "--out", s(&out)]);
    assert_eq!(summary["union"]["edges"], 1);
    assert_eq!(
        fs::read_to_string(out.join("edges.csv")).unwrap(),
        "account_a,account_b,detector,score,evidence\nalice,bob,hashtag,1,a|b|c|d|e\n"
    );
    assert_eq!(fs::read_to_string(out.join("flagged.txt")).unwrap(), "alice\nbob\n");

    let off = dir.path().join("off");
    let summary = cli_ok(&["detect", s(&corpus), "--out", s(&off), "--disable", "hashtag"]);
    assert_eq!(summary["union"]["edges"], 0);
    assert_eq!(summary["detectors"]["hashtag"]["enabled"], false);
    assert_eq!(fs::read_to_string(off.join("edges_hashtag.csv")).unwrap().lines().count(), 1);
}

fn read_set(path: &std::path::Path) -> BTreeSet<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn overlap_counts_match_set_intersections() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let config = dir.path().join("c.toml");
    write(&input, &common::raw_jsonl(&common::golden_records()));
    write(&config, common::GOLDEN_CONFIG);
    cli_ok(&["--config", s(&config), "ingest", s(&input), "--out", s(&dir.path().join("ing"))]);
    let out = dir.path().join("det");
    let summary =
        cli_ok(&["--config", s(&config), "detect", s(&dir.path().join("ing/corpus.jsonl")), "--out", s(&out)]);
    let mut nonzero = 0;
    for o in summary["overlap"].as_array().unwrap() {
        let a = read_set(&out.join(format!("flagged_{}.txt", o["a"].as_str().unwrap())));
        let b = read_set(&out.join(format!("flagged_{}.txt", o["b"].as_str().unwrap())));
        let expected = a.intersection(&b).count();
        assert_eq!(o["flagged"], expected);
        nonzero += usize::from(expected > 0);
    }
    assert!(nonzero > 0);
}

#[test]
fn cluster_and_report_with_empty_confidences() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest(dir.path());
    cli_ok(&["detect", s(&corpus), "--out", s(&dir.path().join("det"))]);
    let edges = dir.path().join("det/edges.csv");
    let c = cli_ok(&["cluster", s(&corpus), s(&edges), "--out", s(&dir.path().join("cl"))]);
    assert_eq!(c["sizes"], serde_json::json!([2]));
    assert_eq!(
        fs::read_to_string(dir.path().join("cl/clusters.csv")).unwrap(),
        "cluster_id,size,label,member_ids\n0,2,a,alice,bob\n"
    );

    let conf = dir.path().join("empty.csv");
    write(&conf, "");
    let r = cli_ok(&[
        "report",
        s(&corpus),
        s(&edges),
        "--confidences",
        s(&conf),
        "--out",
        s(&dir.path().join("rep")),
        "--story",
        "A",
    ]);
    assert_eq!(r["user_share"], 0.5);
    // carol also uses #a but is not coordinated
    assert_eq!(r["story"]["share"], 2.0 / 3.0);
    assert_eq!(r["interactions"]["retweets_from_outside"], 1);
    assert!(r["socio"].is_null());
    assert!(r["notices"].to_string().contains("omitted"));
    assert!(!dir.path().join("rep/deltas.csv").exists());
}

#[test]
fn score_then_report_socio_sections() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest(dir.path());
    cli_ok(&["detect", s(&corpus), "--out", s(&dir.path().join("det"))]);
    let scored = cli_ok(&["score", s(&corpus), "--out", s(&dir.path().join("sc"))]);
    assert_eq!(scored["scored"], 4);
    let conf = fs::read_to_string(dir.path().join("sc/confidences.csv")).unwrap();
    // "Votez" in French tweets hits the vote_for lexicon entry
    assert!(conf.lines().nth(1).unwrap().starts_with("1,0.7,"), "{conf}");
    let r = cli_ok(&[
        "report",
        s(&corpus),
        s(&dir.path().join("det/edges.csv")),
        "--confidences",
        s(&dir.path().join("sc/confidences.csv")),
        "--out",
        s(&dir.path().join("rep")),
    ]);
    assert_eq!(r["socio"]["vote_for_rate"]["coordinated"], 1.0);
    assert_eq!(r["socio"]["vote_for_rate"]["other"], 0.0);
    let deltas = fs::read_to_string(dir.path().join("rep/deltas.csv")).unwrap();
    assert!(deltas.starts_with("cluster,characteristic,delta,se,p\ncluster_0,vote_for,0.7,"), "{deltas}");
}

#[test]
fn stats_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write(&data, "x,y,label\n1,2,1\n2,1,0\n3,4,1\n4,3,0\n5,5,1\n");
    let v = cli_ok(&["stats", "spearman", s(&data), "--x", "x", "--y", "y"]);
    assert_eq!(v["statistic"], 0.8);
    let v = cli_ok(&["stats", "roc", s(&data), "--x", "x", "--y", "label"]);
    assert_eq!(v["n"], serde_json::json!([3, 2]));
    let a = cli_ok(&["--seed", "5", "stats", "bootstrap", s(&data), "--x", "x", "--resamples", "500"]);
    let b = cli_ok(&["--seed", "5", "stats", "bootstrap", s(&data), "--x", "x", "--resamples", "500"]);
    assert_eq!(a, b);
    let out = cli(&["stats", "spearman", s(&data), "--x", "x", "--y", "missing"]);
    assert_eq!(out.status.code(), Some(1));
}
