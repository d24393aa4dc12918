//! In-memory tweet corpus with per-account and per-day indices.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::SECONDS_PER_DAY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TweetKind {
    Original,
    Reply,
    Retweet,
}

impl TweetKind {
    pub const ALL: [TweetKind; 3] = [TweetKind::Original, TweetKind::Reply, TweetKind::Retweet];

    pub fn as_str(self) -> &'static str {
        match self {
            TweetKind::Original => "original",
            TweetKind::Reply => "reply",
            TweetKind::Retweet => "retweet",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "original" => Some(TweetKind::Original),
            "reply" => Some(TweetKind::Reply),
            "retweet" => Some(TweetKind::Retweet),
            _ => None,
        }
    }

    pub(crate) fn slot(self) -> usize {
        self as usize
    }
}

/// One message in the corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub account_id: String,
    /// UTC seconds since the epoch.
    pub timestamp: i64,
    pub kind: TweetKind,
    pub text: String,
    /// Lowercased, in-text order, repeats allowed.
    pub hashtags: Vec<String>,
    pub language: String,
    pub retweeted_tweet_id: Option<String>,
    pub retweeted_account_id: Option<String>,
    pub mentions: Vec<String>,
    /// Reply target when the producer supplies one; otherwise the first
    /// mention of a reply is taken as its target.
    pub in_reply_to_account_id: Option<String>,
}

impl TweetRecord {
    pub fn validate(&self) -> Result<()> {
        let is_retweet = self.kind == TweetKind::Retweet;
        if is_retweet != self.retweeted_tweet_id.is_some() {
            return Err(Error::InvalidRecord {
                tweet_id: self.tweet_id.clone(),
                reason: "kind=retweet must coincide with retweeted_tweet_id".into(),
            });
        }
        if self.account_id.is_empty() {
            return Err(Error::InvalidRecord {
                tweet_id: self.tweet_id.clone(),
                reason: "empty account_id".into(),
            });
        }
        Ok(())
    }

    pub fn day(&self) -> i64 {
        self.timestamp.div_euclid(SECONDS_PER_DAY)
    }

    /// The account this reply answers, if it is a reply.
    pub fn reply_target(&self) -> Option<&str> {
        if self.kind != TweetKind::Reply {
            return None;
        }
        self.in_reply_to_account_id
            .as_deref()
            .or_else(|| self.mentions.first().map(String::as_str))
    }
}

/// Validated records plus account and UTC-day indices. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    records: Vec<TweetRecord>,
    account_index: BTreeMap<String, Vec<usize>>,
    day_index: BTreeMap<i64, Vec<usize>>,
}

impl Corpus {
    pub fn new(records: Vec<TweetRecord>) -> Result<Self> {
        for r in &records {
            r.validate()?;
        }
        let mut account_index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut day_index: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            match account_index.get_mut(r.account_id.as_str()) {
                Some(v) => v.push(i),
                None => {
                    account_index.insert(r.account_id.clone(), alloc::vec![i]);
                }
            }
            day_index.entry(r.day()).or_default().push(i);
        }
        Ok(Self {
            records,
            account_index,
            day_index,
        })
    }

    pub fn records(&self) -> &[TweetRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn account_index(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.account_index
    }

    pub fn day_index(&self) -> &BTreeMap<i64, Vec<usize>> {
        &self.day_index
    }

    pub fn accounts(&self) -> impl Iterator<Item = &str> {
        self.account_index.keys().map(String::as_str)
    }

    pub fn account_records<'a>(&'a self, account: &str) -> impl Iterator<Item = &'a TweetRecord> {
        self.account_index
            .get(account)
            .into_iter()
            .flatten()
            .map(move |&i| &self.records[i])
    }

    /// Per-day record counts by kind, in day order.
    pub fn daily_volume(&self) -> Vec<DailyVolume> {
        self.day_index
            .iter()
            .map(|(&day, idx)| {
                let mut counts = [0usize; 3];
                for &i in idx {
                    counts[self.records[i].kind.slot()] += 1;
                }
                DailyVolume {
                    day,
                    original: counts[0],
                    reply: counts[1],
                    retweet: counts[2],
                }
            })
            .collect()
    }

    /// Earliest and latest timestamps.
    pub fn time_span(&self) -> Option<(i64, i64)> {
        let min = self.records.iter().map(|r| r.timestamp).min()?;
        let max = self.records.iter().map(|r| r.timestamp).max()?;
        Some((min, max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DailyVolume {
    /// Days since the epoch (UTC).
    pub day: i64,
    pub original: usize,
    pub reply: usize,
    pub retweet: usize,
}

impl DailyVolume {
    pub fn total(&self) -> usize {
        self.original + self.reply + self.retweet
    }
}
