//! Run configuration: a flat TOML key-value file, every key optional.
//!
//! ```toml
//! hashtag_k = 5
//! retweet_top_frac = 0.005
//! retweet_min = 10
//! time_bin_minutes = 30
//! time_threshold = 0.99
//! time_min = 10
//! detectors = ["hashtag", "retweet", "time"]
//! story_hashtags = ["macronleaks", "bayrougate", "macrongate"]
//! binarize_threshold = 0.5
//! bootstrap_resamples = 1000
//! duplicate_scope = "account"
//! top_clusters = 5
//! seed = 0
//! ```

use std::path::Path;

use coordnet_core::graph::DuplicateScope;
use coordnet_core::{Detector, DetectorConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub hashtag_k: usize,
    pub retweet_top_frac: f64,
    pub retweet_min: usize,
    pub time_bin_minutes: u32,
    pub time_threshold: f64,
    pub time_min: usize,
    /// Detectors to run; the others produce empty outputs.
    pub detectors: Vec<String>,
    /// Hashtags (without `#`, any case) defining the story for the story share.
    pub story_hashtags: Vec<String>,
    pub binarize_threshold: f64,
    pub bootstrap_resamples: usize,
    /// `account` or `corpus`.
    pub duplicate_scope: String,
    /// Largest clusters that get their own delta rows.
    pub top_clusters: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        let d = DetectorConfig::default();
        Self {
            hashtag_k: d.hashtag_k,
            retweet_top_frac: d.retweet_top_frac,
            retweet_min: d.retweet_min,
            time_bin_minutes: d.time_bin_minutes,
            time_threshold: d.time_threshold,
            time_min: d.time_min,
            detectors: Detector::ALL.iter().map(|d| d.as_str().to_string()).collect(),
            story_hashtags: Vec::new(),
            binarize_threshold: 0.5,
            bootstrap_resamples: 1000,
            duplicate_scope: "account".into(),
            top_clusters: 5,
            seed: 0,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn detector_config(&self) -> DetectorConfig {
        DetectorConfig {
            hashtag_k: self.hashtag_k,
            retweet_top_frac: self.retweet_top_frac,
            retweet_min: self.retweet_min,
            time_bin_minutes: self.time_bin_minutes,
            time_threshold: self.time_threshold,
            time_min: self.time_min,
        }
    }

    pub fn enabled(&self, detector: Detector) -> bool {
        self.detectors.iter().any(|d| d == detector.as_str())
    }

    pub fn scope(&self) -> DuplicateScope {
        match self.duplicate_scope.as_str() {
            "corpus" => DuplicateScope::Corpus,
            _ => DuplicateScope::Account,
        }
    }

    /// Story hashtags in the form stored on records.
    pub fn story_set(&self) -> std::collections::BTreeSet<String> {
        self.story_hashtags
            .iter()
            .map(|t| t.trim().trim_start_matches('#').to_lowercase())
            .filter(|t| !t.is_empty())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.detector_config().validate()?;
        for d in &self.detectors {
            if Detector::parse(d).is_none() {
                return Err(Error::Config(format!("unknown detector {d:?}")));
            }
        }
        if !(self.binarize_threshold > 0.0 && self.binarize_threshold < 1.0) {
            return Err(Error::Config(format!(
                "binarize_threshold must be in (0,1), got {}",
                self.binarize_threshold
            )));
        }
        if self.bootstrap_resamples < 2 {
            return Err(Error::Config("bootstrap_resamples must be >= 2".into()));
        }
        if !matches!(self.duplicate_scope.as_str(), "account" | "corpus") {
            return Err(Error::Config(format!(
                "duplicate_scope must be \"account\" or \"corpus\", got {:?}",
                self.duplicate_scope
            )));
        }
        Ok(())
    }
}
