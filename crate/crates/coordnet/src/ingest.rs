//! Line-delimited JSON tweet records: parsing, validation and the canonical
//! cache format.
//!
//! Each input line is one object with the fields `tweet_id`, `account_id`,
//! `timestamp` (ISO-8601 string or epoch seconds), `kind`
//! (`original`/`reply`/`retweet`), `text`, `hashtags`, `language`,
//! `retweeted_tweet_id`, `retweeted_account_id` and `mentions`. Unknown
//! fields are ignored. Hashtags are lowercased and stripped of a leading `#`.

use std::fmt;
use std::io::{BufRead, Write};

use chrono::{DateTime, NaiveDateTime};
use coordnet_core::detectors::HashtagIndex;
use coordnet_core::{Corpus, TweetKind, TweetRecord};
use rayon::prelude::*;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lines parsed per parallel batch.
const BATCH_LINES: usize = 16_384;

#[derive(Debug, Deserialize)]
struct RawRecord {
    tweet_id: String,
    account_id: String,
    timestamp: Timestamp,
    kind: String,
    #[serde(default)]
    text: String,
    #[serde(default)]
    hashtags: Vec<String>,
    #[serde(default)]
    language: Option<String>,
    #[serde(default)]
    retweeted_tweet_id: Option<String>,
    #[serde(default)]
    retweeted_account_id: Option<String>,
    #[serde(default)]
    mentions: Vec<String>,
    #[serde(default)]
    in_reply_to_account_id: Option<String>,
}

#[derive(Debug)]
struct Timestamp(std::result::Result<i64, String>);

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Timestamp;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("epoch seconds or an ISO-8601 timestamp")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Timestamp, E> {
                Ok(Timestamp(Ok(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Timestamp, E> {
                Ok(Timestamp(i64::try_from(v).map_err(|_| format!("timestamp {v} out of range"))))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Timestamp, E> {
                Ok(Timestamp(if v.is_finite() && v.abs() < 1e15 {
                    Ok(v.floor() as i64)
                } else {
                    Err(format!("timestamp {v} out of range"))
                }))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Timestamp, E> {
                Ok(Timestamp(parse_timestamp(v)))
            }
        }
        d.deserialize_any(V)
    }
}

/// Parses epoch seconds or an ISO-8601 instant into UTC seconds. Instants
/// without an offset are taken as UTC.
pub fn parse_timestamp(s: &str) -> std::result::Result<i64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Ok(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(dt.and_utc().timestamp());
        }
    }
    if let Ok(dt) = DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y") {
        return Ok(dt.timestamp());
    }
    Err(format!("unparseable timestamp {s:?}"))
}

fn normalize_hashtag(tag: &str) -> String {
    tag.trim().trim_start_matches('#').to_lowercase()
}

/// Parses and validates one JSON line.
pub fn parse_record(line: &str) -> std::result::Result<TweetRecord, String> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let timestamp = raw.timestamp.0?;
    let kind = TweetKind::parse(&raw.kind).ok_or_else(|| format!("unknown kind {:?}", raw.kind))?;
    let record = TweetRecord {
        tweet_id: raw.tweet_id,
        account_id: raw.account_id,
        timestamp,
        kind,
        text: raw.text,
        hashtags: raw.hashtags.iter().map(|t| normalize_hashtag(t)).filter(|t| !t.is_empty()).collect(),
        language: raw.language.filter(|l| !l.is_empty()).unwrap_or_else(|| "und".into()),
        retweeted_tweet_id: raw.retweeted_tweet_id,
        retweeted_account_id: raw.retweeted_account_id,
        mentions: raw.mentions,
        in_reply_to_account_id: raw.in_reply_to_account_id,
    };
    record.validate().map_err(|e| e.to_string())?;
    Ok(record)
}

/// Result of parsing a record stream.
#[derive(Debug)]
pub struct ParseOutcome {
    pub corpus: Corpus,
    /// Malformed lines skipped in lenient mode.
    pub skipped: usize,
    /// First few skipped lines with their reasons.
    pub skipped_examples: Vec<(usize, String)>,
}

const MAX_EXAMPLES: usize = 10;

/// Streams `reader` in batches, parsing each batch in parallel, and hands
/// every record to `sink` in input order. Blank lines are ignored.
fn for_each_record(
    reader: impl BufRead,
    strict: bool,
    mut sink: impl FnMut(TweetRecord),
) -> Result<(usize, Vec<(usize, String)>)> {
    let mut skipped = 0;
    let mut examples = Vec::new();
    let mut lines = reader.lines();
    let mut line_no = 0usize;
    loop {
        let mut batch: Vec<(usize, String)> = Vec::with_capacity(BATCH_LINES);
        for line in lines.by_ref() {
            line_no += 1;
            let line = line.map_err(|e| Error::io("<input>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            batch.push((line_no, line));
            if batch.len() == BATCH_LINES {
                break;
            }
        }
        if batch.is_empty() {
            break;
        }
        let parsed: Vec<(usize, std::result::Result<TweetRecord, String>)> =
            batch.par_iter().map(|(n, l)| (*n, parse_record(l))).collect();
        for (n, r) in parsed {
            match r {
                Ok(rec) => sink(rec),
                Err(message) if strict => return Err(Error::Parse { line: n, message }),
                Err(message) => {
                    skipped += 1;
                    if examples.len() < MAX_EXAMPLES {
                        examples.push((n, message));
                    }
                }
            }
        }
    }
    Ok((skipped, examples))
}

/// Parses a JSONL record stream into a corpus. In strict mode the first
/// malformed line aborts with its 1-based line number.
pub fn parse_corpus(reader: impl BufRead, strict: bool) -> Result<ParseOutcome> {
    let mut records = Vec::new();
    let (skipped, skipped_examples) = for_each_record(reader, strict, |r| records.push(r))?;
    let corpus = Corpus::new(records)?;
    Ok(ParseOutcome { corpus, skipped, skipped_examples })
}

/// Counters from a streaming hashtag pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamStats {
    pub records: usize,
    pub skipped: usize,
}

/// Feeds original tweets straight into a hashtag index without keeping the
/// records, so memory is bounded by the index.
pub fn stream_hashtag_index(reader: impl BufRead, k: usize, strict: bool) -> Result<(HashtagIndex, StreamStats)> {
    let mut index = HashtagIndex::new(k);
    let mut records = 0;
    let (skipped, _) = for_each_record(reader, strict, |r| {
        records += 1;
        index.add(&r);
    })?;
    Ok((index, StreamStats { records, skipped }))
}

#[derive(Serialize)]
struct CacheRecord<'a> {
    tweet_id: &'a str,
    account_id: &'a str,
    timestamp: i64,
    kind: &'static str,
    text: &'a str,
    hashtags: &'a [String],
    language: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    retweeted_tweet_id: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    retweeted_account_id: Option<&'a str>,
    mentions: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    in_reply_to_account_id: Option<&'a str>,
}

/// Serializes one record as a canonical JSON line (epoch-second timestamp).
pub fn record_to_json(r: &TweetRecord) -> String {
    let c = CacheRecord {
        tweet_id: &r.tweet_id,
        account_id: &r.account_id,
        timestamp: r.timestamp,
        kind: r.kind.as_str(),
        text: &r.text,
        hashtags: &r.hashtags,
        language: &r.language,
        retweeted_tweet_id: r.retweeted_tweet_id.as_deref(),
        retweeted_account_id: r.retweeted_account_id.as_deref(),
        mentions: &r.mentions,
        in_reply_to_account_id: r.in_reply_to_account_id.as_deref(),
    };
    serde_json::to_string(&c).expect("record serializes")
}

pub fn write_records<'a>(records: impl IntoIterator<Item = &'a TweetRecord>, mut w: impl Write) -> std::io::Result<()> {
    for r in records {
        w.write_all(record_to_json(r).as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
