//! Corpus generators and brute-force reference implementations shared by
//! the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use coordnet_core::detectors::tfidf_weight;
use coordnet_core::rng::stream_rng;
use coordnet_core::{DetectorConfig, TweetKind, TweetRecord};
use rand::Rng;

pub fn record(id: &str, account: &str, ts: i64, kind: TweetKind) -> TweetRecord {
    TweetRecord {
        tweet_id: id.into(),
        account_id: account.into(),
        timestamp: ts,
        kind,
        text: String::new(),
        hashtags: Vec::new(),
        language: "fr".into(),
        retweeted_tweet_id: None,
        retweeted_account_id: None,
        mentions: Vec::new(),
        in_reply_to_account_id: None,
    }
}

pub fn original(id: &str, account: &str, ts: i64, tags: &[String]) -> TweetRecord {
    let mut r = record(id, account, ts, TweetKind::Original);
    r.hashtags = tags.to_vec();
    r
}

pub fn retweet(id: &str, account: &str, ts: i64, target: &str, target_account: &str) -> TweetRecord {
    let mut r = record(id, account, ts, TweetKind::Retweet);
    r.retweeted_tweet_id = Some(target.into());
    r.retweeted_account_id = Some(target_account.into());
    r
}

/// Small thresholds so random corpora have plenty of eligible accounts.
pub fn small_config() -> DetectorConfig {
    DetectorConfig {
        hashtag_k: 5,
        retweet_top_frac: 0.05,
        retweet_min: 3,
        time_bin_minutes: 30,
        time_threshold: 0.9,
        time_min: 3,
    }
}

const T0: i64 = 1_493_596_800; // 2017-05-01T00:00:00Z

/// Random corpus over `n_accounts` accounts. About a third of the accounts
/// sit in small groups that reuse a shared tag run, shared retweet targets
/// and shared posting times (some in lockstep), so every detector has positives; the rest post
/// noise drawn from small pools so that chance overlaps occur too.
pub fn random_corpus(seed: u64, n_accounts: usize) -> Vec<TweetRecord> {
    let mut rng = stream_rng(seed, 0);
    let vocab: Vec<String> = (0..9).map(|i| format!("tag{i}")).collect();
    let mut records = Vec::new();
    let mut account = 0;
    let mut group_id = 0;
    while account < n_accounts {
        let grouped = rng.random_bool(0.35);
        let size = if grouped { rng.random_range(2..=5) } else { 1 };
        let template_tags: Vec<String> = (0..6).map(|i| format!("g{group_id}t{i}")).collect();
        let template_ids: Vec<String> = (0..6).map(|i| format!("g{group_id}rt{i}")).collect();
        let template_times: Vec<i64> = (0..10).map(|_| T0 + rng.random_range(0..3 * 86_400)).collect();
        // lockstep groups post their j-th tweet at the j-th shared time
        let lockstep = grouped && rng.random_bool(0.5);
        let group_tweets = rng.random_range(4..=20);
        for _ in 0..size.min(n_accounts - account) {
            let name = format!("u{account:03}");
            let n_tweets = if lockstep { group_tweets } else { rng.random_range(2..=20) };
            for j in 0..n_tweets {
                let id = format!("{name}_{j}");
                let use_template = grouped && rng.random_bool(0.6);
                let ts = if lockstep {
                    template_times[j % template_times.len()] + rng.random_range(0..60)
                } else if use_template {
                    template_times[rng.random_range(0..template_times.len())] + rng.random_range(0..60)
                } else {
                    T0 + rng.random_range(0..3 * 86_400)
                };
                let r = match rng.random_range(0..3) {
                    0 => {
                        let tags: Vec<String> = if use_template {
                            let start = rng.random_range(0..=1);
                            template_tags[start..start + 5].to_vec()
                        } else {
                            let n = rng.random_range(0..=7);
                            (0..n).map(|_| vocab[rng.random_range(0..vocab.len())].clone()).collect()
                        };
                        original(&id, &name, ts, &tags)
                    }
                    1 => {
                        let target = if use_template {
                            template_ids[rng.random_range(0..template_ids.len())].clone()
                        } else {
                            format!("pool{}", rng.random_range(0..40))
                        };
                        let src = format!("src{}", target.len() % 7);
                        retweet(&id, &name, ts, &target, &src)
                    }
                    _ => {
                        let mut r = record(&id, &name, ts, TweetKind::Reply);
                        r.mentions = vec![format!("u{:03}", rng.random_range(0..n_accounts))];
                        r
                    }
                };
                records.push(r);
            }
            account += 1;
        }
        group_id += 1;
    }
    records
}

/// Canonical `(a, b)` with `a < b`.
fn pair(x: &str, y: &str) -> (String, String) {
    if x < y {
        (x.into(), y.into())
    } else {
        (y.into(), x.into())
    }
}

/// Every (account pair, shared k-gram) by comparing all pairs of accounts'
/// k-gram sets.
pub fn brute_hashtag_edges(records: &[TweetRecord], k: usize) -> BTreeSet<(String, String, String)> {
    let mut keys: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for r in records {
        let entry = keys.entry(&r.account_id).or_default();
        if r.kind == TweetKind::Original && r.hashtags.len() >= k {
            for w in r.hashtags.windows(k) {
                entry.insert(w.join("|"));
            }
        }
    }
    let accounts: Vec<&&str> = keys.keys().collect();
    let mut out = BTreeSet::new();
    for (i, a) in accounts.iter().enumerate() {
        for b in &accounts[i + 1..] {
            for key in keys[**a].intersection(&keys[**b]) {
                let (x, y) = pair(a, b);
                out.insert((x, y, key.clone()));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terms {
    RetweetIds,
    TimeBins,
}

/// Term frequencies of eligible accounts, with terms as sortable strings
/// (time bins zero-padded so string order equals numeric order).
fn term_frequencies(records: &[TweetRecord], terms: Terms, cfg: &DetectorConfig) -> BTreeMap<String, BTreeMap<String, u64>> {
    let mut tf: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let bin = i64::from(cfg.time_bin_minutes) * 60;
    for r in records {
        let term = match terms {
            Terms::RetweetIds => match &r.retweeted_tweet_id {
                Some(id) if r.kind == TweetKind::Retweet => id.clone(),
                _ => continue,
            },
            Terms::TimeBins => {
                let b = r.timestamp.div_euclid(bin);
                assert!(b >= 0, "generator keeps timestamps positive");
                format!("{b:020}")
            }
        };
        *tf.entry(r.account_id.clone()).or_default().entry(term).or_default() += 1;
        *counts.entry(r.account_id.clone()).or_default() += 1;
    }
    let min = match terms {
        Terms::RetweetIds => cfg.retweet_min,
        Terms::TimeBins => cfg.time_min,
    };
    tf.retain(|a, _| counts[a] > min);
    tf
}

/// Cosine for every pair of eligible accounts with a positive dot product,
/// computed on dense TF-IDF vectors.
pub fn brute_cosines(records: &[TweetRecord], terms: Terms, cfg: &DetectorConfig) -> Vec<(String, String, f64)> {
    let tf = term_frequencies(records, terms, cfg);
    let vocab: BTreeSet<&String> = tf.values().flat_map(|m| m.keys()).collect();
    let vocab: Vec<&String> = vocab.into_iter().collect();
    let n = tf.len() as u64;
    let df: Vec<u64> = vocab.iter().map(|t| tf.values().filter(|m| m.contains_key(*t)).count() as u64).collect();
    let accounts: Vec<&String> = tf.keys().collect();
    let dense: Vec<Vec<f64>> = accounts
        .iter()
        .map(|a| {
            vocab
                .iter()
                .zip(&df)
                .map(|(t, &d)| match tf[*a].get(*t) {
                    Some(&c) => tfidf_weight(c, d, n).unwrap(),
                    None => 0.0,
                })
                .collect()
        })
        .collect();
    let norms: Vec<f64> = dense.iter().map(|v| v.iter().map(|w| w * w).sum::<f64>().sqrt()).collect();
    let mut out = Vec::new();
    for i in 0..accounts.len() {
        for j in i + 1..accounts.len() {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let dot: f64 = dense[i].iter().zip(&dense[j]).map(|(x, y)| x * y).sum();
            if dot > 0.0 {
                let c = (dot / (norms[i] * norms[j])).clamp(0.0, 1.0);
                out.push((accounts[i].clone(), accounts[j].clone(), c));
            }
        }
    }
    out
}

/// Retweet-detector pairs: similarities at or above the top-fraction
/// nearest-rank cutoff.
pub fn brute_retweet_pairs(records: &[TweetRecord], cfg: &DetectorConfig) -> BTreeSet<(String, String)> {
    let sims = brute_cosines(records, Terms::RetweetIds, cfg);
    if sims.is_empty() {
        return BTreeSet::new();
    }
    let mut sorted: Vec<f64> = sims.iter().map(|s| s.2).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let k = ((cfg.retweet_top_frac * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let cutoff = sorted[k - 1];
    sims.into_iter().filter(|s| s.2 >= cutoff).map(|s| (s.0, s.1)).collect()
}

/// Time-detector pairs: similarity strictly above the threshold.
pub fn brute_time_pairs(records: &[TweetRecord], cfg: &DetectorConfig) -> BTreeSet<(String, String)> {
    brute_cosines(records, Terms::TimeBins, cfg)
        .into_iter()
        .filter(|s| s.2 > cfg.time_threshold)
        .map(|s| (s.0, s.1))
        .collect()
}

pub fn edge_pairs(edges: &[coordnet_core::CoordinationEdge]) -> BTreeSet<(String, String)> {
    edges.iter().map(|e| (e.a.clone(), e.b.clone())).collect()
}

/// Accounts named `c{cluster}_{member}` post one original each carrying the
/// cluster's own five-tag run; `n_accounts` in total, the rest background
/// accounts `b{j}` whose tags overlap the runs in at most four consecutive
/// positions. Returns the records and the planted member lists.
pub fn planted_corpus(seed: u64, n_accounts: usize, sizes: &[usize]) -> (Vec<TweetRecord>, Vec<Vec<String>>) {
    let mut rng = stream_rng(seed, 1);
    let runs: Vec<Vec<String>> =
        (0..sizes.len()).map(|c| (0..5).map(|t| format!("c{c}x{t}")).collect()).collect();
    let mut records = Vec::new();
    let mut clusters = Vec::new();
    let mut next_id = 0u64;
    let id = |n: &mut u64| {
        *n += 1;
        format!("t{n}")
    };
    for (c, &size) in sizes.iter().enumerate() {
        let mut members = Vec::with_capacity(size);
        for m in 0..size {
            let name = format!("c{c}_{m}");
            let ts = T0 + rng.random_range(0..7 * 86_400);
            records.push(original(&id(&mut next_id), &name, ts, &runs[c]));
            let noise: Vec<String> = (0..3).map(|_| format!("v{}", rng.random_range(0..50))).collect();
            records.push(original(&id(&mut next_id), &name, ts + 60, &noise));
            members.push(name);
        }
        members.sort();
        clusters.push(members);
    }
    let planted: usize = sizes.iter().sum();
    for j in 0..n_accounts.saturating_sub(planted) {
        let name = format!("b{j}");
        let ts = T0 + rng.random_range(0..7 * 86_400);
        let c = rng.random_range(0..runs.len());
        let own = format!("own{j}");
        let tags: Vec<String> = if rng.random_bool(0.5) {
            let mut t = runs[c][..4].to_vec();
            t.push(own);
            t
        } else {
            let mut t = vec![own];
            t.extend_from_slice(&runs[c][1..]);
            t
        };
        records.push(original(&id(&mut next_id), &name, ts, &tags));
        let n = rng.random_range(0..=4);
        let noise: Vec<String> = (0..n).map(|_| format!("v{}", rng.random_range(0..50))).collect();
        records.push(original(&id(&mut next_id), &name, ts + 30, &noise));
        if rng.random_bool(0.3) {
            let target = format!("t{}", rng.random_range(1..=next_id.max(1)));
            records.push(retweet(&id(&mut next_id), &name, ts + 90, &target, "c0_0"));
        }
    }
    (records, clusters)
}
