use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{bootstrap_se, mann_whitney_u, mean, spearman};
use crate::corpus::{Corpus, TweetRecord};
use crate::error::{Error, Result};
use crate::socio::{CharacteristicTable, N_CHARACTERISTICS};

const BASELINE_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaOptions {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        Self { resamples: 1000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicDelta {
    pub characteristic: usize,
    /// mean(cluster) - mean(baseline)
    pub delta: f64,
    /// Bootstrap SEs of both means in quadrature.
    pub se: Option<f64>,
    /// Two-sided Mann-Whitney p of cluster vs baseline confidences.
    pub p: Option<f64>,
    pub n_cluster: usize,
    pub n_baseline: usize,
}

/// Per-characteristic difference of mean confidence between a cluster's
/// tweets and baseline tweets. Tweets missing from the table score 0.0.
pub fn cluster_deltas(
    table: &CharacteristicTable,
    cluster_tweets: &[&str],
    baseline_tweets: &[&str],
    opts: DeltaOptions,
) -> Result<Vec<CharacteristicDelta>> {
    if cluster_tweets.is_empty() || baseline_tweets.is_empty() {
        return Err(Error::EmptySample);
    }
    let rows = |ids: &[&str]| -> Vec<[f64; N_CHARACTERISTICS]> { ids.iter().map(|id| *table.get_or_zero(id)).collect() };
    let cluster = rows(cluster_tweets);
    let baseline = rows(baseline_tweets);
    let side_se = |v: &[f64], seed: u64| -> Option<f64> {
        (v.len() >= 2).then(|| bootstrap_se(v, opts.resamples, seed).expect("validated sample size"))
    };
    let mut out = Vec::with_capacity(N_CHARACTERISTICS);
    for c in 0..N_CHARACTERISTICS {
        let a: Vec<f64> = cluster.iter().map(|r| r[c]).collect();
        let b: Vec<f64> = baseline.iter().map(|r| r[c]).collect();
        let delta = mean(&a).expect("non-empty") - mean(&b).expect("non-empty");
        let se = match (side_se(&a, opts.seed), side_se(&b, opts.seed ^ BASELINE_SEED_MIX)) {
            (Some(x), Some(y)) => Some(libm::sqrt(x * x + y * y)),
            _ => None,
        };
        let p = mann_whitney_u(&a, &b)?.p_value;
        out.push(CharacteristicDelta {
            characteristic: c,
            delta,
            se,
            p,
            n_cluster: a.len(),
            n_baseline: b.len(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailyMean {
    pub day: i64,
    /// `None` when no selected tweet falls on the day.
    pub mean: Option<f64>,
    pub n: usize,
}

/// Per UTC day of the corpus, mean confidence of one characteristic over the
/// selected tweets.
pub fn daily_mean_confidence(
    corpus: &Corpus,
    table: &CharacteristicTable,
    include: impl Fn(&TweetRecord) -> bool,
    characteristic: usize,
) -> Vec<DailyMean> {
    corpus
        .day_index()
        .iter()
        .map(|(&day, idx)| {
            let values: Vec<f64> = idx
                .iter()
                .map(|&i| &corpus.records()[i])
                .filter(|r| include(r))
                .map(|r| table.get_or_zero(&r.tweet_id)[characteristic])
                .collect();
            DailyMean { day, mean: mean(&values), n: values.len() }
        })
        .collect()
}

/// Per account, the fraction of its tweets carrying each language tag.
pub fn language_mix(corpus: &Corpus, accounts: &BTreeSet<String>) -> BTreeMap<String, BTreeMap<String, f64>> {
    accounts
        .iter()
        .filter_map(|a| {
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            let mut n = 0usize;
            for r in corpus.account_records(a) {
                *counts.entry(r.language.clone()).or_default() += 1;
                n += 1;
            }
            (n > 0).then(|| {
                let fractions = counts.into_iter().map(|(l, c)| (l, c as f64 / n as f64)).collect();
                (a.clone(), fractions)
            })
        })
        .collect()
}

/// Mean over accounts of the fraction of tweets in `language`.
pub fn mean_language_share(mix: &BTreeMap<String, BTreeMap<String, f64>>, language: &str) -> Option<f64> {
    let shares: Vec<f64> = mix.values().map(|m| m.get(language).copied().unwrap_or(0.0)).collect();
    mean(&shares)
}

/// Spearman correlation, per characteristic, between the daily mean
/// confidence and the daily share of binarized labels over all tweets in the
/// table. `None` where fewer than 3 days exist or a series is constant.
pub fn confidence_label_correlation(corpus: &Corpus, table: &CharacteristicTable, threshold: f64) -> Vec<Option<f64>> {
    let mut days: Vec<Vec<&[f64; N_CHARACTERISTICS]>> = Vec::new();
    for idx in corpus.day_index().values() {
        let rows: Vec<_> = idx.iter().filter_map(|&i| table.get(&corpus.records()[i].tweet_id)).collect();
        if !rows.is_empty() {
            days.push(rows);
        }
    }
    (0..N_CHARACTERISTICS)
        .map(|c| {
            let conf: Vec<f64> = days
                .iter()
                .map(|rows| rows.iter().map(|r| r[c]).sum::<f64>() / rows.len() as f64)
                .collect();
            let label: Vec<f64> = days
                .iter()
                .map(|rows| rows.iter().filter(|r| r[c] >= threshold).count() as f64 / rows.len() as f64)
                .collect();
            spearman(&conf, &label).ok().and_then(|r| r.statistic)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::original;
    use crate::socio::Provenance;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;

    fn table_with(values: &[(String, f64)]) -> CharacteristicTable {
        let mut t = CharacteristicTable::new(Provenance::External);
        for (id, v) in values {
            t.insert_full(id, [*v; N_CHARACTERISTICS]).unwrap();
        }
        t
    }

    #[test]
    fn same_sample_zero_delta() {
        let vals: Vec<(String, f64)> = (0..20).map(|i| (format!("t{i}"), (i % 5) as f64 / 5.0)).collect();
        let t = table_with(&vals);
        let ids: Vec<&str> = vals.iter().map(|v| v.0.as_str()).collect();
        let d = cluster_deltas(&t, &ids, &ids, DeltaOptions { resamples: 100, seed: 1 }).unwrap();
        assert_eq!(d.len(), N_CHARACTERISTICS);
        for x in d {
            assert_eq!(x.delta, 0.0);
            assert!(x.p.unwrap() > 0.99);
            assert!(x.se.unwrap() > 0.0);
        }
    }

    #[test]
    fn extreme_delta() {
        let mut vals: Vec<(String, f64)> = (0..10).map(|i| (format!("c{i}"), 1.0)).collect();
        vals.extend((0..10).map(|i| (format!("b{i}"), 0.0)));
        let t = table_with(&vals);
        let c: Vec<&str> = vals[..10].iter().map(|v| v.0.as_str()).collect();
        let b: Vec<&str> = vals[10..].iter().map(|v| v.0.as_str()).collect();
        let d = cluster_deltas(&t, &c, &b, DeltaOptions::default()).unwrap();
        assert_eq!(d[0].delta, 1.0);
        assert_eq!(d[0].se, Some(0.0));
        // smallest p over any arrangement of ten vs ten tied groups
        assert!(d[0].p.unwrap() < 1e-4);
        assert!(cluster_deltas(&t, &[], &b, DeltaOptions::default()).is_err());
    }

    #[test]
    fn vote_for_binarized_rates() {
        // 35% of cluster tweets and 8.2% of baseline tweets carry the label
        let mut vals = Vec::new();
        for i in 0..1000 {
            vals.push((format!("c{i}"), if i < 350 { 1.0 } else { 0.0 }));
            vals.push((format!("b{i}"), if i < 82 { 1.0 } else { 0.0 }));
        }
        let t = table_with(&vals);
        let c: Vec<&str> = vals.iter().filter(|v| v.0.starts_with('c')).map(|v| v.0.as_str()).collect();
        let b: Vec<&str> = vals.iter().filter(|v| v.0.starts_with('b')).map(|v| v.0.as_str()).collect();
        let d = cluster_deltas(&t, &c, &b, DeltaOptions { resamples: 50, seed: 0 }).unwrap();
        assert!((d[0].delta - 0.268).abs() < 1e-12);
    }

    #[test]
    fn daily_means() {
        let day = crate::SECONDS_PER_DAY;
        let c = Corpus::new(vec![
            original("a", "x", 10, &[]),
            original("b", "y", day + 10, &[]),
            original("c", "x", 2 * day + 10, &[]),
            original("d", "x", 2 * day + 20, &[]),
        ])
        .unwrap();
        let t = table_with(&[("a".into(), 0.6), ("c".into(), 0.2), ("d".into(), 0.9)]);
        let s = daily_mean_confidence(&c, &t, |r| r.account_id == "x", 0);
        assert_eq!(s[0].mean, Some(0.6));
        assert_eq!(s[1].mean, None);
        assert!((s[2].mean.unwrap() - 0.55).abs() < 1e-15);
    }

    #[test]
    fn planted_peak_is_argmax() {
        let day = crate::SECONDS_PER_DAY;
        let mut recs = Vec::new();
        let mut vals = Vec::new();
        for d in 0..20i64 {
            for k in 0..5 {
                let id = format!("{d}-{k}");
                recs.push(original(&id, "m", d * day + k, &[]));
                vals.push((id, if d == 13 { 0.9 } else { 0.1 + 0.01 * d as f64 }));
            }
        }
        let c = Corpus::new(recs).unwrap();
        let t = table_with(&vals);
        let s = daily_mean_confidence(&c, &t, |_| true, 0);
        let best = s.iter().max_by(|a, b| a.mean.unwrap().total_cmp(&b.mean.unwrap())).unwrap();
        assert_eq!(best.day, 13);
    }

    #[test]
    fn language_fractions() {
        let mut recs = Vec::new();
        for (i, lang) in ["fr", "fr", "fr", "en"].iter().enumerate() {
            let mut t = original(&format!("a{i}"), "a", 0, &[]);
            t.language = lang.to_string();
            recs.push(t);
        }
        let mut t = original("b0", "b", 0, &[]);
        t.language = "fr".into();
        recs.push(t);
        let c = Corpus::new(recs).unwrap();
        let accounts: BTreeSet<String> = ["a", "b", "ghost"].iter().map(|s| s.to_string()).collect();
        let mix = language_mix(&c, &accounts);
        assert_eq!(mix["a"]["fr"], 0.75);
        assert_eq!(mix["a"]["en"], 0.25);
        assert_eq!(mix["b"]["fr"], 1.0);
        assert!(!mix.contains_key("ghost"));
        assert_eq!(mean_language_share(&mix, "fr"), Some(0.875));
        for m in mix.values() {
            assert!((m.values().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn binarized_series_track_confidences() {
        let day = crate::SECONDS_PER_DAY;
        let mut recs = Vec::new();
        let mut vals = Vec::new();
        for d in 0..10i64 {
            for k in 0..10i64 {
                let id = format!("{d}-{k}");
                recs.push(original(&id, "m", d * day + k, &[]));
                // more tweets above threshold on later days
                vals.push((id, if k < d { 0.9 } else { 0.1 }));
            }
        }
        let c = Corpus::new(recs).unwrap();
        let t = table_with(&vals);
        let rho = confidence_label_correlation(&c, &t, 0.5);
        assert_eq!(rho.len(), N_CHARACTERISTICS);
        assert!((rho[0].unwrap() - 1.0).abs() < 1e-12);
    }
}
