//! The three coordination heuristics.
//!
//! * hashtag: accounts whose original tweets share a contiguous run of
//!   `hashtag_k` hashtags, found through an inverted index keyed by k-gram.
//! * retweet: TF-IDF vectors over retweeted tweet ids; the most similar
//!   `retweet_top_frac` of candidate pairs are coordinated.
//! * time: TF-IDF vectors over tweet-time bins; pairs above
//!   `time_threshold` cosine are coordinated.
//!
//! Candidate pairs for the cosine detectors come from an inverted index over
//! terms, so pairs with no shared term (cosine 0) are never scored.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{Corpus, TweetKind, TweetRecord};
use crate::error::{Error, Result};

/// Joins the tags of a hashtag k-gram key.
pub const KEY_SEPARATOR: char = '|';

/// Evidence string for cosine-similarity edges.
pub const COSINE_EVIDENCE: &str = "cosine";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Detector {
    Hashtag,
    Retweet,
    Time,
}

impl Detector {
    pub const ALL: [Detector; 3] = [Detector::Hashtag, Detector::Retweet, Detector::Time];

    pub fn as_str(self) -> &'static str {
        match self {
            Detector::Hashtag => "hashtag",
            Detector::Retweet => "retweet",
            Detector::Time => "time",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.as_str() == s)
    }
}

/// Undirected evidence link, stored with `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinationEdge {
    pub a: String,
    pub b: String,
    pub detector: Detector,
    pub score: f64,
    pub evidence: String,
}

impl CoordinationEdge {
    /// Canonicalizes endpoint order. Returns `None` for self-pairs.
    pub fn new(x: &str, y: &str, detector: Detector, score: f64, evidence: &str) -> Option<Self> {
        let (a, b) = match x.cmp(y) {
            core::cmp::Ordering::Less => (x, y),
            core::cmp::Ordering::Greater => (y, x),
            core::cmp::Ordering::Equal => return None,
        };
        Some(Self {
            a: a.to_string(),
            b: b.to_string(),
            detector,
            score: score.clamp(0.0, 1.0),
            evidence: evidence.to_string(),
        })
    }

    fn sort_key(&self) -> (&str, &str, Detector, &str) {
        (&self.a, &self.b, self.detector, &self.evidence)
    }
}

/// Sorts edges canonically and drops duplicate (a, b, detector, evidence).
pub fn canonicalize_edges(edges: &mut Vec<CoordinationEdge>) {
    edges.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    edges.dedup_by(|x, y| x.sort_key() == y.sort_key());
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub hashtag_k: usize,
    pub retweet_top_frac: f64,
    pub retweet_min: usize,
    pub time_bin_minutes: u32,
    pub time_threshold: f64,
    pub time_min: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            hashtag_k: 5,
            retweet_top_frac: 0.005,
            retweet_min: 10,
            time_bin_minutes: 30,
            time_threshold: 0.99,
            time_min: 10,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hashtag_k < 2 {
            return Err(Error::Config(format!("hashtag_k must be >= 2, got {}", self.hashtag_k)));
        }
        if !(self.retweet_top_frac > 0.0 && self.retweet_top_frac < 1.0) {
            return Err(Error::Config(format!(
                "retweet_top_frac must be in (0,1), got {}",
                self.retweet_top_frac
            )));
        }
        if !(self.time_threshold > 0.0 && self.time_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "time_threshold must be in (0,1], got {}",
                self.time_threshold
            )));
        }
        if self.retweet_min < 1 || self.time_min < 1 || self.time_bin_minutes < 1 {
            return Err(Error::Config(
                "retweet_min, time_min and time_bin_minutes must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// All contiguous length-`k` windows over an ordered tag list.
pub fn hashtag_windows<S: AsRef<str>>(hashtags: &[S], k: usize) -> BTreeSet<String> {
    if k == 0 || hashtags.len() < k {
        return BTreeSet::new();
    }
    hashtags
        .windows(k)
        .map(|w| {
            let mut key = String::new();
            for (i, tag) in w.iter().enumerate() {
                if i > 0 {
                    key.push(KEY_SEPARATOR);
                }
                key.push_str(tag.as_ref());
            }
            key
        })
        .collect()
}

/// Hashtag k-gram keys of a tweet; only original tweets carry keys.
pub fn hashtag_key_set(tweet: &TweetRecord, k: usize) -> BTreeSet<String> {
    if tweet.kind != TweetKind::Original {
        return BTreeSet::new();
    }
    hashtag_windows(&tweet.hashtags, k)
}

/// Streaming inverted index from hashtag k-gram to the accounts using it.
///
/// Memory is the index itself: one interned id per account and one posting
/// list per key.
#[derive(Debug, Default)]
pub struct HashtagIndex {
    k: usize,
    account_ids: BTreeMap<String, u32>,
    account_names: Vec<String>,
    postings: BTreeMap<String, Vec<u32>>,
}

impl HashtagIndex {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    fn intern(&mut self, account: &str) -> u32 {
        if let Some(&id) = self.account_ids.get(account) {
            return id;
        }
        let id = self.account_names.len() as u32;
        self.account_names.push(account.to_string());
        self.account_ids.insert(account.to_string(), id);
        id
    }

    /// Adds one original tweet's hashtags.
    pub fn add_original<S: AsRef<str>>(&mut self, account: &str, hashtags: &[S]) {
        if hashtags.len() < self.k {
            return;
        }
        let keys = hashtag_windows(hashtags, self.k);
        let id = self.intern(account);
        for key in keys {
            let list = self.postings.entry(key).or_default();
            if list.last() != Some(&id) {
                list.push(id);
            }
        }
    }

    pub fn add(&mut self, tweet: &TweetRecord) {
        if tweet.kind == TweetKind::Original {
            self.add_original(&tweet.account_id, &tweet.hashtags);
        }
    }

    pub fn key_count(&self) -> usize {
        self.postings.len()
    }

    pub fn posting_count(&self) -> usize {
        self.postings.values().map(Vec::len).sum()
    }

    /// One edge per (account pair, shared key), canonically sorted.
    pub fn edges(&self) -> Vec<CoordinationEdge> {
        let mut edges = Vec::new();
        for (key, ids) in &self.postings {
            if ids.len() < 2 {
                continue;
            }
            let mut names: Vec<&str> = ids
                .iter()
                .map(|&i| self.account_names[i as usize].as_str())
                .collect();
            names.sort_unstable();
            names.dedup();
            for (i, a) in names.iter().enumerate() {
                for b in &names[i + 1..] {
                    edges.extend(CoordinationEdge::new(a, b, Detector::Hashtag, 1.0, key));
                }
            }
        }
        canonicalize_edges(&mut edges);
        edges
    }
}

pub fn detect_hashtag_coordination(corpus: &Corpus, cfg: &DetectorConfig) -> Vec<CoordinationEdge> {
    let mut index = HashtagIndex::new(cfg.hashtag_k);
    for r in corpus.records() {
        index.add(r);
    }
    index.edges()
}

/// TF-IDF weight: `tf * ln((1 + n_docs) / (1 + df))`.
pub fn tfidf_weight(tf: u64, df: u64, n_docs: u64) -> Result<f64> {
    if tf < 1 || df < 1 || df > n_docs {
        return Err(Error::Domain(format!(
            "tfidf requires tf>=1 and 1<=df<=n_docs (tf={tf}, df={df}, n_docs={n_docs})"
        )));
    }
    let idf = libm::log((1.0 + n_docs as f64) / (1.0 + df as f64));
    Ok(tf as f64 * idf)
}

/// Sparse non-negative vector over term ids, sorted by term.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl SparseVector {
    /// Drops zero weights and sorts by term. Duplicate terms are summed.
    pub fn new(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_by_key(|&(t, _)| t);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (t, w) in entries {
            match merged.last_mut() {
                Some((lt, lw)) if *lt == t => *lw += w,
                _ => merged.push((t, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0.0);
        let norm = libm::sqrt(merged.iter().map(|&(_, w)| w * w).sum::<f64>());
        Self {
            entries: merged,
            norm,
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut sum = 0.0;
        while i < self.entries.len() && j < other.entries.len() {
            let (ti, wi) = self.entries[i];
            let (tj, wj) = other.entries[j];
            match ti.cmp(&tj) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    sum += wi * wj;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }
}

pub fn cosine(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    if u.norm() <= 0.0 || v.norm() <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(cosine_from_dot(u.dot(v), u.norm(), v.norm()))
}

fn cosine_from_dot(dot: f64, nu: f64, nv: f64) -> f64 {
    (dot / (nu * nv)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// Retweeted tweet ids, over accounts with more than `retweet_min` retweets.
    RetweetedId,
    /// Tweet-time bins, over accounts with more than `time_min` tweets.
    TimeBin,
}

/// Per-account TF-IDF vectors plus the term dictionary (term id = index).
#[derive(Debug, Clone, Default)]
pub struct AccountVectors {
    pub accounts: Vec<String>,
    pub vectors: Vec<SparseVector>,
    pub terms: Vec<String>,
}

impl AccountVectors {
    pub fn get(&self, account: &str) -> Option<&SparseVector> {
        let i = self.accounts.binary_search_by(|a| a.as_str().cmp(account)).ok()?;
        Some(&self.vectors[i])
    }

    pub fn into_map(self) -> BTreeMap<String, SparseVector> {
        self.accounts.into_iter().zip(self.vectors).collect()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Term<'a> {
    Id(&'a str),
    Bin(i64),
}

impl Term<'_> {
    fn label(&self) -> String {
        match self {
            Term::Id(s) => s.to_string(),
            Term::Bin(b) => format!("{b}"),
        }
    }
}

/// Builds eligible accounts' TF-IDF vectors. Accounts are sorted by id;
/// term ids follow the sorted order of the underlying terms.
pub fn build_account_vectors(corpus: &Corpus, term: TermKind, cfg: &DetectorConfig) -> AccountVectors {
    let bin_seconds = i64::from(cfg.time_bin_minutes) * 60;
    let mut docs: Vec<(String, BTreeMap<Term<'_>, u64>)> = Vec::new();
    for (account, idx) in corpus.account_index() {
        let records = idx.iter().map(|&i| &corpus.records()[i]);
        let mut tf: BTreeMap<Term<'_>, u64> = BTreeMap::new();
        let mut n = 0usize;
        match term {
            TermKind::RetweetedId => {
                for r in records.filter(|r| r.kind == TweetKind::Retweet) {
                    if let Some(id) = r.retweeted_tweet_id.as_deref() {
                        *tf.entry(Term::Id(id)).or_default() += 1;
                        n += 1;
                    }
                }
                if n <= cfg.retweet_min {
                    continue;
                }
            }
            TermKind::TimeBin => {
                for r in records {
                    *tf.entry(Term::Bin(r.timestamp.div_euclid(bin_seconds))).or_default() += 1;
                    n += 1;
                }
                if n <= cfg.time_min {
                    continue;
                }
            }
        }
        docs.push((account.clone(), tf));
    }

    let mut df: BTreeMap<Term<'_>, u64> = BTreeMap::new();
    for (_, tf) in &docs {
        for t in tf.keys() {
            *df.entry(t.clone()).or_default() += 1;
        }
    }
    let term_ids: BTreeMap<&Term<'_>, u32> = df.keys().enumerate().map(|(i, t)| (t, i as u32)).collect();
    let n_docs = docs.len() as u64;

    let mut out = AccountVectors {
        terms: df.keys().map(Term::label).collect(),
        ..AccountVectors::default()
    };
    for (account, tf) in &docs {
        let entries = tf
            .iter()
            .map(|(t, &count)| {
                let w = tfidf_weight(count, df[t], n_docs).expect("df within corpus bounds");
                (term_ids[t], w)
            })
            .collect();
        out.accounts.push(account.clone());
        out.vectors.push(SparseVector::new(entries));
    }
    out
}

/// Cosine of every pair of vectors sharing at least one term, as
/// `(i, j, cosine)` with `i < j`, sorted by `(i, j)`. Zero-norm vectors are
/// skipped.
pub fn candidate_pair_similarities(vectors: &[SparseVector]) -> Vec<(u32, u32, f64)> {
    let n_terms = vectors
        .iter()
        .flat_map(|v| v.entries().iter().map(|&(t, _)| t as usize + 1))
        .max()
        .unwrap_or(0);
    let mut postings: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_terms];
    for (i, v) in vectors.iter().enumerate() {
        if v.norm() <= 0.0 {
            continue;
        }
        for &(t, w) in v.entries() {
            postings[t as usize].push((i as u32, w));
        }
    }
    let ctx = PairScorer {
        vectors,
        postings: &postings,
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..vectors.len())
            .into_par_iter()
            .map_init(|| Scratch::new(vectors.len()), |s, u| ctx.score_row(u, s))
            .flatten_iter()
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = Scratch::new(vectors.len());
        (0..vectors.len())
            .flat_map(|u| ctx.score_row(u, &mut scratch))
            .collect()
    }
}

struct Scratch {
    acc: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            acc: vec![0.0; n],
            seen: vec![false; n],
            touched: Vec::new(),
        }
    }
}

struct PairScorer<'a> {
    vectors: &'a [SparseVector],
    postings: &'a [Vec<(u32, f64)>],
}

impl PairScorer<'_> {
    // Accumulates dot products term by term in ascending term order, which
    // is the same summation order as `SparseVector::dot`.
    fn score_row(&self, u: usize, s: &mut Scratch) -> Vec<(u32, u32, f64)> {
        let vu = &self.vectors[u];
        if vu.norm() <= 0.0 {
            return Vec::new();
        }
        for &(t, wu) in vu.entries() {
            let list = &self.postings[t as usize];
            let start = list.partition_point(|&(v, _)| v as usize <= u);
            for &(v, wv) in &list[start..] {
                let vi = v as usize;
                if !s.seen[vi] {
                    s.seen[vi] = true;
                    s.touched.push(v);
                }
                s.acc[vi] += wu * wv;
            }
        }
        s.touched.sort_unstable();
        let row = s
            .touched
            .iter()
            .map(|&v| {
                let vi = v as usize;
                let c = cosine_from_dot(s.acc[vi], vu.norm(), self.vectors[vi].norm());
                (u as u32, v, c)
            })
            .collect();
        for &v in &s.touched {
            s.acc[v as usize] = 0.0;
            s.seen[v as usize] = false;
        }
        s.touched.clear();
        row
    }
}

/// Edges and flagged accounts of one detector run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectorOutput {
    pub edges: Vec<CoordinationEdge>,
    pub flagged: BTreeSet<String>,
    /// Eligible accounts (documents).
    pub eligible: usize,
    /// Pairs with at least one shared term.
    pub candidate_pairs: usize,
    /// Similarity cutoff actually applied, when one exists.
    pub cutoff: Option<f64>,
}

impl DetectorOutput {
    fn from_edges(edges: Vec<CoordinationEdge>, eligible: usize, candidate_pairs: usize, cutoff: Option<f64>) -> Self {
        let flagged = flagged_accounts(&edges);
        Self {
            edges,
            flagged,
            eligible,
            candidate_pairs,
            cutoff,
        }
    }

    pub fn from_hashtag_edges(edges: Vec<CoordinationEdge>) -> Self {
        Self::from_edges(edges, 0, 0, None)
    }
}

/// Endpoints of all edges.
pub fn flagged_accounts(edges: &[CoordinationEdge]) -> BTreeSet<String> {
    edges
        .iter()
        .flat_map(|e| [e.a.clone(), e.b.clone()])
        .collect()
}

/// Nearest-rank cutoff for the top `frac` of `sims`: with the list sorted
/// descending, the value at rank `max(1, ceil(frac * len))`.
pub fn top_fraction_cutoff(sims: &[f64], frac: f64) -> Option<f64> {
    if sims.is_empty() {
        return None;
    }
    let mut sorted: Vec<f64> = sims.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let k = (libm::ceil(frac * sorted.len() as f64) as usize).clamp(1, sorted.len());
    Some(sorted[k - 1])
}

pub fn detect_retweet_coordination(corpus: &Corpus, cfg: &DetectorConfig) -> DetectorOutput {
    let vectors = build_account_vectors(corpus, TermKind::RetweetedId, cfg);
    let pairs = candidate_pair_similarities(&vectors.vectors);
    let sims: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    let Some(cutoff) = top_fraction_cutoff(&sims, cfg.retweet_top_frac) else {
        return DetectorOutput::from_edges(Vec::new(), vectors.accounts.len(), 0, None);
    };
    let edges = pairs_to_edges(&vectors, &pairs, Detector::Retweet, |s| s >= cutoff);
    DetectorOutput::from_edges(edges, vectors.accounts.len(), pairs.len(), Some(cutoff))
}

pub fn detect_time_coordination(corpus: &Corpus, cfg: &DetectorConfig) -> DetectorOutput {
    let vectors = build_account_vectors(corpus, TermKind::TimeBin, cfg);
    let pairs = candidate_pair_similarities(&vectors.vectors);
    let threshold = cfg.time_threshold;
    let edges = pairs_to_edges(&vectors, &pairs, Detector::Time, |s| s > threshold);
    DetectorOutput::from_edges(edges, vectors.accounts.len(), pairs.len(), Some(threshold))
}

fn pairs_to_edges(
    vectors: &AccountVectors,
    pairs: &[(u32, u32, f64)],
    detector: Detector,
    keep: impl Fn(f64) -> bool,
) -> Vec<CoordinationEdge> {
    let mut edges: Vec<CoordinationEdge> = pairs
        .iter()
        .filter(|p| keep(p.2))
        .filter_map(|&(i, j, s)| {
            CoordinationEdge::new(
                &vectors.accounts[i as usize],
                &vectors.accounts[j as usize],
                detector,
                s,
                COSINE_EVIDENCE,
            )
        })
        .collect();
    canonicalize_edges(&mut edges);
    edges
}
