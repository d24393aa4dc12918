//! Socio-linguistic characteristics: the registry, per-tweet confidence
//! tables, a lexicon scorer, and binarization.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Corpus, TweetRecord};
use crate::error::{Error, Result};
use crate::text::{normalize_text, tokens, NormalizeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Attitude,
    Concern,
    Emotion,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Attitude => "attitude",
            Group::Concern => "concern",
            Group::Emotion => "emotion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Characteristic {
    pub group: Group,
    pub name: &'static str,
}

const fn ch(group: Group, name: &'static str) -> Characteristic {
    Characteristic { group, name }
}

/// Number of registered characteristics.
pub const N_CHARACTERISTICS: usize = 24;

/// Fixed registry; column order of every confidence table.
pub const REGISTRY: [Characteristic; N_CHARACTERISTICS] = [
    ch(Group::Attitude, "vote_for"),
    ch(Group::Attitude, "vote_against"),
    ch(Group::Attitude, "moral"),
    ch(Group::Attitude, "immoral"),
    ch(Group::Concern, "economy"),
    ch(Group::Concern, "terrorism"),
    ch(Group::Concern, "religion"),
    ch(Group::Concern, "immigration"),
    ch(Group::Concern, "international_alliances"),
    ch(Group::Concern, "russia_relations"),
    ch(Group::Concern, "national_identity"),
    ch(Group::Concern, "environment"),
    ch(Group::Concern, "misinformation"),
    ch(Group::Concern, "democracy"),
    ch(Group::Emotion, "anger_hate"),
    ch(Group::Emotion, "embarrassment_shame"),
    ch(Group::Emotion, "admiration_love"),
    ch(Group::Emotion, "optimism_hope"),
    ch(Group::Emotion, "joy_happiness"),
    ch(Group::Emotion, "pride_national"),
    ch(Group::Emotion, "fear_pessimism"),
    ch(Group::Emotion, "amusement"),
    ch(Group::Emotion, "positive_other"),
    ch(Group::Emotion, "negative_other"),
];

/// Alternative column names accepted on load.
const ALIASES: [(&str, &str); 1] = [("sarcasm", "amusement")];

/// Registry index of a characteristic name (or alias).
pub fn characteristic_index(name: &str) -> Option<usize> {
    let name = ALIASES
        .iter()
        .find(|(alias, _)| *alias == name)
        .map_or(name, |(_, canonical)| *canonical);
    REGISTRY.iter().position(|c| c.name == name)
}

pub type Confidences = [f64; N_CHARACTERISTICS];

const ZERO: Confidences = [0.0; N_CHARACTERISTICS];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    External,
    Lexicon,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::External => "external",
            Provenance::Lexicon => "lexicon",
        }
    }
}

/// Per-tweet confidences in [0,1] for every registered characteristic.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicTable {
    rows: BTreeMap<String, Confidences>,
    provenance: Provenance,
    missing_cells: usize,
}

impl CharacteristicTable {
    pub fn new(provenance: Provenance) -> Self {
        Self {
            rows: BTreeMap::new(),
            provenance,
            missing_cells: 0,
        }
    }

    /// Adds a row. Absent cells become 0.0 and are counted.
    pub fn insert(&mut self, tweet_id: &str, values: &[Option<f64>; N_CHARACTERISTICS]) -> Result<()> {
        if self.rows.contains_key(tweet_id) {
            return Err(Error::DuplicateTweet(tweet_id.to_string()));
        }
        let mut row = ZERO;
        for (i, v) in values.iter().enumerate() {
            match *v {
                Some(x) if (0.0..=1.0).contains(&x) => row[i] = x,
                Some(x) => {
                    return Err(Error::ConfidenceRange {
                        tweet_id: tweet_id.to_string(),
                        column: REGISTRY[i].name.to_string(),
                        value: x,
                    })
                }
                None => self.missing_cells += 1,
            }
        }
        self.rows.insert(tweet_id.to_string(), row);
        Ok(())
    }

    pub fn insert_full(&mut self, tweet_id: &str, values: Confidences) -> Result<()> {
        self.insert(tweet_id, &values.map(Some))
    }

    pub fn get(&self, tweet_id: &str) -> Option<&Confidences> {
        self.rows.get(tweet_id)
    }

    /// Row for a tweet, or all zeros when the table does not cover it.
    pub fn get_or_zero(&self, tweet_id: &str) -> &Confidences {
        self.rows.get(tweet_id).unwrap_or(&ZERO)
    }

    pub fn rows(&self) -> &BTreeMap<String, Confidences> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Cells defaulted to 0.0 because the source row lacked them.
    pub fn missing_cells(&self) -> usize {
        self.missing_cells
    }

    /// How many of `tweet_ids` have no row.
    pub fn uncovered<'a>(&self, tweet_ids: impl IntoIterator<Item = &'a str>) -> usize {
        tweet_ids.into_iter().filter(|id| !self.rows.contains_key(*id)).count()
    }

    /// One column, in tweet-id order.
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.values().map(|r| r[index]).collect()
    }
}

/// Binary labels derived from a confidence table.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelTable {
    pub rows: BTreeMap<String, [bool; N_CHARACTERISTICS]>,
    pub threshold: f64,
}

/// Label is set iff confidence >= threshold.
pub fn binarize(table: &CharacteristicTable, threshold: f64) -> Result<LabelTable> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!("binarize threshold must be in (0,1), got {threshold}")));
    }
    let rows = table
        .rows
        .iter()
        .map(|(id, row)| (id.clone(), row.map(|c| c >= threshold)))
        .collect();
    Ok(LabelTable { rows, threshold })
}

/// Normalization used to match lexicon phrases against tweets.
pub const LEXICON_NORMALIZATION: NormalizeOptions = NormalizeOptions {
    strip_urls: true,
    replace_mentions: true,
    strip_hashtag_marks: true,
    lowercase: true,
    strip_punct_nonascii: false,
};

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub characteristic: usize,
    pub phrase: String,
    pub weight: f64,
    /// Only applies to tweets with this language tag, when set.
    pub language: Option<String>,
    tokens: Vec<String>,
}

impl LexiconEntry {
    pub fn new(characteristic: &str, phrase: &str, weight: f64, language: Option<&str>) -> Result<Self> {
        let index = characteristic_index(characteristic)
            .ok_or_else(|| Error::UnknownCharacteristic(characteristic.to_string()))?;
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::Domain(format!("lexicon weight must be in (0,1], got {weight}")));
        }
        let phrase = normalize_text(phrase, LEXICON_NORMALIZATION);
        let tokens: Vec<String> = tokens(&phrase).map(str::to_string).collect();
        if tokens.is_empty() {
            return Err(Error::Domain(format!("empty lexicon phrase for {characteristic}")));
        }
        Ok(Self {
            characteristic: index,
            phrase,
            weight,
            language: language.filter(|l| !l.is_empty()).map(str::to_string),
            tokens,
        })
    }

    fn matches(&self, tweet_tokens: &[&str], language: &str) -> bool {
        if self.language.as_deref().is_some_and(|l| l != language) {
            return false;
        }
        let n = self.tokens.len();
        tweet_tokens.len() >= n
            && tweet_tokens
                .windows(n)
                .any(|w| w.iter().zip(&self.tokens).all(|(a, b)| *a == b))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexiconEntry>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }
}

/// Noisy-OR of matched phrase weights per characteristic. Each entry counts
/// once however often it occurs.
pub fn lexicon_score(tweet: &TweetRecord, lexicon: &Lexicon) -> Confidences {
    let text = normalize_text(&tweet.text, LEXICON_NORMALIZATION);
    let toks: Vec<&str> = tokens(&text).collect();
    let mut miss = [1.0f64; N_CHARACTERISTICS];
    for e in &lexicon.entries {
        if e.matches(&toks, &tweet.language) {
            miss[e.characteristic] *= 1.0 - e.weight;
        }
    }
    miss.map(|m| (1.0 - m).clamp(0.0, 1.0))
}

/// Scores every record with the lexicon.
pub fn score_corpus(corpus: &Corpus, lexicon: &Lexicon) -> CharacteristicTable {
    #[cfg(feature = "parallel")]
    let scored: Vec<Confidences> = {
        use rayon::prelude::*;
        corpus.records().par_iter().map(|r| lexicon_score(r, lexicon)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let scored: Vec<Confidences> = corpus.records().iter().map(|r| lexicon_score(r, lexicon)).collect();

    let mut table = CharacteristicTable::new(Provenance::Lexicon);
    for (r, row) in corpus.records().iter().zip(scored) {
        // a repeated tweet id keeps its first score
        table.rows.entry(r.tweet_id.clone()).or_insert(row);
    }
    table
}
