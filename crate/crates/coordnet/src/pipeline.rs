//! The CLI stages as library functions. Each one reads its inputs, writes an
//! output directory with a manifest and returns a JSON summary for stdout.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use coordnet_core::detectors::{
    canonicalize_edges, detect_hashtag_coordination, detect_retweet_coordination, detect_time_coordination,
    flagged_accounts, DetectorOutput,
};
use coordnet_core::graph::{activity_shares, duplicate_shares, labeled_clusters, retweet_interactions};
use coordnet_core::socio::{binarize, score_corpus, N_CHARACTERISTICS, REGISTRY};
use coordnet_core::stats::{
    cluster_deltas, confidence_label_correlation, daily_mean_confidence, language_mix, mann_whitney_u,
    mean_language_share, median, spearman_matrix, DeltaOptions,
};
use coordnet_core::{CharacteristicTable, CoordinationEdge, CoordinationGraph, Corpus, Detector, Lexicon, NormalizeOptions};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::formats::{self, fmt_day, fmt_opt, DeltaRow};
use crate::ingest;
use crate::manifest::{OutputDir, RunManifest};

/// Built-in lexicon used when `score` gets no lexicon file.
pub const DEFAULT_LEXICON: &str = include_str!("../assets/default_lexicon.csv");

/// File names inside an output directory.
pub mod names {
    pub const CORPUS: &str = "corpus.jsonl";
    pub const DAILY_VOLUME: &str = "daily_volume.csv";
    pub const EDGES: &str = "edges.csv";
    pub const FLAGGED: &str = "flagged.txt";
    pub const OVERLAP: &str = "overlap.json";
    pub const CLUSTERS: &str = "clusters.csv";
    pub const CONFIDENCES: &str = "confidences.csv";
    pub const SUMMARY: &str = "summary.json";
}

fn open(path: &Path) -> Result<BufReader<File>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.display().to_string()));
    }
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn load_corpus(path: &Path, strict: bool) -> Result<(Corpus, usize)> {
    let out = ingest::parse_corpus(open(path)?, strict).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        other => other,
    })?;
    Ok((out.corpus, out.skipped))
}

fn load_edges(path: &Path) -> Result<Vec<CoordinationEdge>> {
    formats::read_edges(open(path)?, &path.display().to_string())
}

fn record_corpus(manifest: &mut RunManifest, corpus: &Corpus) {
    manifest.corpus_span = corpus.time_span();
    manifest.count("records", corpus.len());
    manifest.count("accounts", corpus.account_index().len());
}

pub struct IngestArgs {
    pub input: PathBuf,
    pub out: PathBuf,
    pub strict: bool,
}

/// Parses raw JSONL into the canonical cache plus daily volumes.
pub fn cmd_ingest(args: &IngestArgs, cfg: &Config) -> Result<Value> {
    let outcome = ingest::parse_corpus(open(&args.input)?, args.strict)?;
    let corpus = &outcome.corpus;
    let mut out = OutputDir::create(&args.out)?;
    out.write_with(names::CORPUS, |w| {
        ingest::write_records(corpus.records(), w).map_err(|e| Error::io(names::CORPUS, e))
    })?;
    out.write_with(names::DAILY_VOLUME, |w| formats::write_daily_volume(w, &corpus.daily_volume()))?;
    let mut manifest = RunManifest::new("ingest", cfg.seed, cfg);
    manifest.add_input(&args.input)?;
    record_corpus(&mut manifest, corpus);
    manifest.count("skipped_lines", outcome.skipped);
    let digest = out.finish(&manifest)?;
    let skipped: Vec<Value> = outcome.skipped_examples.iter().map(|(l, m)| json!({"line": l, "error": m})).collect();
    Ok(json!({
        "records": corpus.len(),
        "accounts": corpus.account_index().len(),
        "skipped": outcome.skipped,
        "skipped_examples": skipped,
        "manifest_digest": digest,
    }))
}

pub struct DetectArgs {
    pub corpus: PathBuf,
    pub out: PathBuf,
    pub strict: bool,
}

#[derive(Serialize)]
struct DetectorSummary {
    enabled: bool,
    edges: usize,
    flagged: usize,
    eligible: usize,
    candidate_pairs: usize,
    cutoff: Option<f64>,
}

#[derive(Serialize)]
struct Overlap {
    a: &'static str,
    b: &'static str,
    flagged: usize,
    pairs: usize,
}

/// Runs the enabled detectors; disabled ones yield empty outputs.
pub fn run_detectors(corpus: &Corpus, cfg: &Config) -> Result<BTreeMap<Detector, DetectorOutput>> {
    let dc = cfg.detector_config();
    dc.validate()?;
    let mut outputs = BTreeMap::new();
    for d in Detector::ALL {
        let out = if !cfg.enabled(d) {
            DetectorOutput::default()
        } else {
            match d {
                Detector::Hashtag => DetectorOutput::from_hashtag_edges(detect_hashtag_coordination(corpus, &dc)),
                Detector::Retweet => detect_retweet_coordination(corpus, &dc),
                Detector::Time => detect_time_coordination(corpus, &dc),
            }
        };
        outputs.insert(d, out);
    }
    Ok(outputs)
}

pub fn union_edges(outputs: &BTreeMap<Detector, DetectorOutput>) -> Vec<CoordinationEdge> {
    let mut all: Vec<CoordinationEdge> = outputs.values().flat_map(|o| o.edges.iter().cloned()).collect();
    canonicalize_edges(&mut all);
    all
}

fn pair_set(edges: &[CoordinationEdge]) -> BTreeSet<(&str, &str)> {
    edges.iter().map(|e| (e.a.as_str(), e.b.as_str())).collect()
}

pub fn cmd_detect(args: &DetectArgs, cfg: &Config) -> Result<Value> {
    let (corpus, _) = load_corpus(&args.corpus, args.strict)?;
    let outputs = run_detectors(&corpus, cfg)?;
    let union = union_edges(&outputs);
    let flagged = flagged_accounts(&union);

    let mut out = OutputDir::create(&args.out)?;
    let mut manifest = RunManifest::new("detect", cfg.seed, cfg);
    manifest.add_input(&args.corpus)?;
    record_corpus(&mut manifest, &corpus);
    let mut per = BTreeMap::new();
    for (d, o) in &outputs {
        let name = d.as_str();
        out.write_with(&format!("edges_{name}.csv"), |w| formats::write_edges(w, &o.edges))?;
        out.write_with(&format!("flagged_{name}.txt"), |w| formats::write_flagged(w, &o.flagged))?;
        manifest.count(&format!("edges_{name}"), o.edges.len());
        manifest.count(&format!("flagged_{name}"), o.flagged.len());
        per.insert(
            name,
            DetectorSummary {
                enabled: cfg.enabled(*d),
                edges: o.edges.len(),
                flagged: o.flagged.len(),
                eligible: o.eligible,
                candidate_pairs: o.candidate_pairs,
                cutoff: o.cutoff,
            },
        );
    }
    let mut overlaps = Vec::new();
    for (i, a) in Detector::ALL.iter().enumerate() {
        for b in &Detector::ALL[i + 1..] {
            let (oa, ob) = (&outputs[a], &outputs[b]);
            overlaps.push(Overlap {
                a: a.as_str(),
                b: b.as_str(),
                flagged: oa.flagged.intersection(&ob.flagged).count(),
                pairs: pair_set(&oa.edges).intersection(&pair_set(&ob.edges)).count(),
            });
        }
    }
    out.write_with(names::EDGES, |w| formats::write_edges(w, &union))?;
    out.write_with(names::FLAGGED, |w| formats::write_flagged(w, &flagged))?;
    manifest.count("edges_union", union.len());
    manifest.count("flagged_union", flagged.len());
    let summary = json!({
        "detectors": per,
        "overlap": overlaps,
        "union": {"edges": union.len(), "flagged": flagged.len()},
    });
    out.write_json(names::OVERLAP, &summary)?;
    let digest = out.finish(&manifest)?;
    let mut summary = summary;
    summary["manifest_digest"] = json!(digest);
    Ok(summary)
}

pub struct ClusterArgs {
    pub corpus: PathBuf,
    pub edges: PathBuf,
    pub out: PathBuf,
    pub strict: bool,
}

pub fn cmd_cluster(args: &ClusterArgs, cfg: &Config) -> Result<Value> {
    let (corpus, _) = load_corpus(&args.corpus, args.strict)?;
    let edges = load_edges(&args.edges)?;
    let clusters = labeled_clusters(&CoordinationGraph::from_edges(edges), &corpus);
    let mut out = OutputDir::create(&args.out)?;
    out.write_with(names::CLUSTERS, |w| formats::write_clusters(w, &clusters))?;
    let mut manifest = RunManifest::new("cluster", cfg.seed, cfg);
    manifest.add_input(&args.corpus)?;
    manifest.add_input(&args.edges)?;
    record_corpus(&mut manifest, &corpus);
    manifest.count("clusters", clusters.len());
    let digest = out.finish(&manifest)?;
    let sizes: Vec<usize> = clusters.iter().map(|c| c.size()).collect();
    Ok(json!({"clusters": clusters.len(), "sizes": sizes, "manifest_digest": digest}))
}

pub struct ScoreArgs {
    pub corpus: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub out: PathBuf,
    pub strict: bool,
}

pub fn default_lexicon() -> Lexicon {
    formats::read_lexicon(DEFAULT_LEXICON.as_bytes(), "default_lexicon.csv").expect("built-in lexicon is valid")
}

pub fn cmd_score(args: &ScoreArgs, cfg: &Config) -> Result<Value> {
    let (corpus, _) = load_corpus(&args.corpus, args.strict)?;
    let lexicon = match &args.lexicon {
        Some(p) => formats::read_lexicon(open(p)?, &p.display().to_string())?,
        None => default_lexicon(),
    };
    let table = score_corpus(&corpus, &lexicon);
    let mut out = OutputDir::create(&args.out)?;
    out.write_with(names::CONFIDENCES, |w| formats::write_confidences(w, &table))?;
    let mut manifest = RunManifest::new("score", cfg.seed, cfg);
    manifest.add_input(&args.corpus)?;
    if let Some(p) = &args.lexicon {
        manifest.add_input(p)?;
    }
    record_corpus(&mut manifest, &corpus);
    manifest.count("lexicon_entries", lexicon.entries().len());
    manifest.count("scored_tweets", table.len());
    let digest = out.finish(&manifest)?;
    Ok(json!({"scored": table.len(), "lexicon_entries": lexicon.entries().len(), "manifest_digest": digest}))
}

pub struct ReportArgs {
    pub corpus: PathBuf,
    pub edges: PathBuf,
    pub confidences: PathBuf,
    pub out: PathBuf,
    pub strict: bool,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Story share: of tweets carrying any configured story hashtag, the
/// fraction authored by coordinated accounts.
pub fn story_share(corpus: &Corpus, coordinated: &BTreeSet<String>, story: &BTreeSet<String>) -> (usize, usize, Option<f64>) {
    let mut total = 0;
    let mut coord = 0;
    for r in corpus.records() {
        if r.hashtags.iter().any(|t| story.contains(t)) {
            total += 1;
            if coordinated.contains(&r.account_id) {
                coord += 1;
            }
        }
    }
    (coord, total, ratio(coord, total))
}

/// Tweet ids, in corpus order, authored by `accounts` and present in the table.
fn scored_tweets<'a>(corpus: &'a Corpus, table: &CharacteristicTable, keep: impl Fn(&str) -> bool) -> Vec<&'a str> {
    corpus
        .records()
        .iter()
        .filter(|r| keep(&r.account_id) && table.get(&r.tweet_id).is_some())
        .map(|r| r.tweet_id.as_str())
        .collect()
}

/// Writes the full report bundle.
pub fn cmd_report(args: &ReportArgs, cfg: &Config) -> Result<Value> {
    let (corpus, _) = load_corpus(&args.corpus, args.strict)?;
    let edges = load_edges(&args.edges)?;
    let table = formats::read_confidences(open(&args.confidences)?, &args.confidences.display().to_string())?;
    let mut out = OutputDir::create(&args.out)?;
    let mut manifest = RunManifest::new("report", cfg.seed, cfg);
    for p in [&args.corpus, &args.edges, &args.confidences] {
        manifest.add_input(p)?;
    }
    record_corpus(&mut manifest, &corpus);
    let mut notices: Vec<String> = Vec::new();

    let coordinated = flagged_accounts(&edges);
    let others: BTreeSet<String> =
        corpus.account_index().keys().filter(|a| !coordinated.contains(*a)).cloned().collect();
    let n_accounts = corpus.account_index().len();
    manifest.count("coordinated_accounts", coordinated.len());

    out.write_with("daily_volume.csv", |w| formats::write_daily_volume(w, &corpus.daily_volume()))?;
    out.write_with("activity_shares.csv", |w| {
        formats::write_activity_shares(w, &activity_shares(&corpus, &coordinated))
    })?;

    let dup_coord = duplicate_shares(&corpus, &coordinated, NormalizeOptions::ALL, cfg.scope());
    let dup_other = duplicate_shares(&corpus, &others, NormalizeOptions::ALL, cfg.scope());
    out.write_with("duplicate_shares.csv", |w| {
        formats::write_duplicate_shares(w, &[("coordinated", &dup_coord), ("other", &dup_other)])
    })?;
    let defined = |v: &[coordnet_core::graph::DuplicateShare]| -> Vec<f64> { v.iter().filter_map(|s| s.share).collect() };
    let (dc, dother) = (defined(&dup_coord), defined(&dup_other));
    let dup_test = if dc.is_empty() || dother.is_empty() {
        notices.push("duplicate-share test skipped: a group has no accounts with original tweets".into());
        None
    } else {
        Some(mann_whitney_u(&dc, &dother)?)
    };

    let graph = CoordinationGraph::from_edges(edges.clone());
    let clusters = labeled_clusters(&graph, &corpus);
    out.write_with("clusters.csv", |w| formats::write_clusters(w, &clusters))?;
    manifest.count("clusters", clusters.len());

    let inter = retweet_interactions(&corpus, &coordinated);
    let interactions = json!({
        "intra_retweets": inter.intra_retweets,
        "retweets_from_outside": inter.retweets_from_outside,
        "retweets_of_coordinated_content": inter.retweets_of_coordinated_content(),
        "replies_from_outside": inter.replies_from_outside,
        "coordinated_retweet_actions": inter.coordinated_retweet_actions,
        "intra_share": inter.intra_share,
        "intra_share_of_actions": inter.intra_share_of_actions,
    });
    out.write_json("interactions.json", &interactions)?;

    let mut lang_rows = Vec::new();
    for (group, accounts) in [("coordinated", &coordinated), ("other", &others)] {
        let mix = language_mix(&corpus, accounts);
        let langs: BTreeSet<&String> = mix.values().flat_map(|m| m.keys()).collect();
        for l in langs {
            lang_rows.push(vec![group.to_string(), l.clone(), fmt_opt(mean_language_share(&mix, l))]);
        }
    }
    out.write_with("language_mix.csv", |w| {
        formats::write_table(w, "language_mix", &["group", "language", "mean_share"], &lang_rows)
    })?;

    let story = cfg.story_set();
    let (story_coord, story_total, story_value) = story_share(&corpus, &coordinated, &story);
    if story.is_empty() {
        notices.push("story share not computed: no story_hashtags configured".into());
    }

    let socio = if table.is_empty() {
        notices.push("confidence table is empty: socio-linguistic sections omitted".into());
        Value::Null
    } else {
        socio_sections(&mut out, &mut notices, &corpus, &table, &clusters, &edges, &coordinated, cfg)?
    };

    let summary = json!({
        "records": corpus.len(),
        "accounts": n_accounts,
        "coordinated_accounts": coordinated.len(),
        "user_share": ratio(coordinated.len(), n_accounts),
        "edges": edges.len(),
        "clusters": clusters.len(),
        "largest_cluster": clusters.first().map(|c| c.size()),
        "story": {
            "hashtags": story,
            "tweets": story_total,
            "coordinated_tweets": story_coord,
            "share": story_value,
        },
        "interactions": interactions,
        "duplicate_shares": {
            "coordinated_median": median(&dc),
            "other_median": median(&dother),
            "mann_whitney_u": dup_test.as_ref().and_then(|t| t.statistic),
            "p": dup_test.as_ref().and_then(|t| t.p_value),
            "method": dup_test.as_ref().map(|t| t.method),
        },
        "socio": socio,
        "seed": cfg.seed,
        "notices": notices,
    });
    out.write_json(names::SUMMARY, &summary)?;
    let digest = out.finish(&manifest)?;
    let mut summary = summary;
    summary["manifest_digest"] = json!(digest);
    Ok(summary)
}

/// Correlations, deltas, daily series and label checks.
#[allow(clippy::too_many_arguments)]
fn socio_sections(
    out: &mut OutputDir,
    notices: &mut Vec<String>,
    corpus: &Corpus,
    table: &CharacteristicTable,
    clusters: &[coordnet_core::Cluster],
    edges: &[CoordinationEdge],
    coordinated: &BTreeSet<String>,
    cfg: &Config,
) -> Result<Value> {
    let uncovered = table.uncovered(corpus.records().iter().map(|r| r.tweet_id.as_str()));
    if uncovered > 0 {
        notices.push(format!("{uncovered} tweets have no confidence row and are left out of socio-linguistic sections"));
    }
    if table.missing_cells() > 0 {
        notices.push(format!("{} empty confidence cells defaulted to 0", table.missing_cells()));
    }

    let columns: Vec<Vec<f64>> = (0..N_CHARACTERISTICS).map(|c| table.column(c)).collect();
    if table.len() >= 3 {
        let m = spearman_matrix(&columns)?;
        out.write_with("correlation_rho.csv", |w| formats::write_matrix(w, &m.rho))?;
        out.write_with("correlation_p.csv", |w| formats::write_matrix(w, &m.p))?;
    } else {
        notices.push("correlation matrices skipped: fewer than 3 scored tweets".into());
    }

    let baseline = scored_tweets(corpus, table, |a| !coordinated.contains(a));
    let mut groups: Vec<(String, BTreeSet<String>)> = clusters
        .iter()
        .take(cfg.top_clusters)
        .map(|c| (format!("cluster_{}", c.id), c.members.iter().cloned().collect()))
        .collect();
    for d in Detector::ALL {
        let own: Vec<CoordinationEdge> = edges.iter().filter(|e| e.detector == d).cloned().collect();
        if !own.is_empty() {
            groups.push((format!("detector_{}", d.as_str()), flagged_accounts(&own)));
        }
    }
    groups.push(("coordinated".into(), coordinated.clone()));
    let opts = DeltaOptions { resamples: cfg.bootstrap_resamples, seed: cfg.seed };
    let mut delta_rows = Vec::new();
    for (name, members) in &groups {
        let tweets = scored_tweets(corpus, table, |a| members.contains(a));
        if tweets.is_empty() || baseline.is_empty() {
            notices.push(format!("deltas for {name} skipped: no scored tweets on one side"));
            continue;
        }
        for d in cluster_deltas(table, &tweets, &baseline, opts)? {
            delta_rows.push(DeltaRow {
                cluster: name.clone(),
                characteristic: d.characteristic,
                delta: d.delta,
                se: d.se,
                p: d.p,
            });
        }
    }
    out.write_with("deltas.csv", |w| formats::write_deltas(w, &delta_rows))?;

    let mut daily_rows = Vec::new();
    for (group, want) in [("coordinated", true), ("other", false)] {
        let include = |r: &coordnet_core::TweetRecord| {
            coordinated.contains(&r.account_id) == want && table.get(&r.tweet_id).is_some()
        };
        let series: Vec<_> = (0..N_CHARACTERISTICS).map(|c| daily_mean_confidence(corpus, table, include, c)).collect();
        for (c, s) in series.iter().enumerate() {
            for m in s {
                daily_rows.push(vec![
                    fmt_day(m.day),
                    group.to_string(),
                    REGISTRY[c].name.to_string(),
                    fmt_opt(m.mean),
                    m.n.to_string(),
                ]);
            }
        }
    }
    out.write_with("daily_confidence.csv", |w| {
        formats::write_table(w, "daily_confidence", &["day", "group", "characteristic", "mean", "n"], &daily_rows)
    })?;

    let labels = binarize(table, cfg.binarize_threshold)?;
    let rate = |ids: &[&str], c: usize| -> Option<f64> {
        let hits = ids.iter().filter(|id| labels.rows[**id][c]).count();
        ratio(hits, ids.len())
    };
    let coord_tweets = scored_tweets(corpus, table, |a| coordinated.contains(a));
    let rate_rows: Vec<Vec<String>> = (0..N_CHARACTERISTICS)
        .map(|c| {
            vec![REGISTRY[c].name.to_string(), fmt_opt(rate(&coord_tweets, c)), fmt_opt(rate(&baseline, c))]
        })
        .collect();
    out.write_with("label_rates.csv", |w| {
        formats::write_table(w, "label_rates", &["characteristic", "coordinated", "other"], &rate_rows)
    })?;

    let check = confidence_label_correlation(corpus, table, cfg.binarize_threshold);
    let check_rows: Vec<Vec<String>> =
        check.iter().enumerate().map(|(c, v)| vec![REGISTRY[c].name.to_string(), fmt_opt(*v)]).collect();
    out.write_with("binarization_check.csv", |w| {
        formats::write_table(w, "binarization_check", &["characteristic", "spearman"], &check_rows)
    })?;
    let defined: Vec<f64> = check.iter().flatten().copied().collect();

    let vote_for = 0;
    Ok(json!({
        "provenance": table.provenance().as_str(),
        "scored_tweets": table.len(),
        "uncovered_tweets": uncovered,
        "missing_cells": table.missing_cells(),
        "binarize_threshold": cfg.binarize_threshold,
        "vote_for_rate": {
            "coordinated": rate(&coord_tweets, vote_for),
            "other": rate(&baseline, vote_for),
        },
        "binarization_median_spearman": median(&defined),
        "delta_rows": delta_rows.len(),
        "resamples": cfg.bootstrap_resamples,
    }))
}
