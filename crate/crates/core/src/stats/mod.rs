//! Rank statistics, resampling, agreement and the aggregate comparisons
//! built on them.

use alloc::vec::Vec;

mod aggregate;
mod kappa;
mod mwu;
mod rank;
mod resample;
mod roc;
pub mod special;

pub use aggregate::{
    cluster_deltas, confidence_label_correlation, daily_mean_confidence, language_mix, mean_language_share,
    CharacteristicDelta, DailyMean, DeltaOptions,
};
pub use kappa::{cohens_kappa, kappa_from_table, kappa_pair, mean_kappa};
pub use mwu::{mann_whitney_exact_p, mann_whitney_u, mann_whitney_u_with, u_distribution, MwuOptions};
pub use rank::{average_ranks, median, pearson, spearman, spearman_exact, spearman_matrix, spearman_with, CorrelationMatrix};
pub use resample::{bootstrap_means, bootstrap_se, reshuffle_eval, ReshuffleResult};
pub use roc::roc_auc;

/// Sidedness of a test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// First sample tends smaller / correlation negative.
    Less,
    /// First sample tends larger / correlation positive.
    Greater,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatResult {
    /// `None` when undefined (e.g. correlation of a constant series).
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub n: Vec<usize>,
    pub se: Option<f64>,
    pub method: &'static str,
}

impl StatResult {
    pub(crate) fn new(statistic: Option<f64>, p_value: Option<f64>, n: Vec<usize>, method: &'static str) -> Self {
        Self {
            statistic,
            p_value: p_value.map(|p| p.clamp(0.0, 1.0)),
            n,
            se: None,
            method,
        }
    }
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    libm::sqrt(ss / (n - 1) as f64)
}
