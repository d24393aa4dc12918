use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{mean, roc_auc, sample_sd};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Mean of each of `resamples` with-replacement resamples. Resample `b`
/// draws from stream `b` of `seed`.
pub fn bootstrap_means(values: &[f64], resamples: usize, seed: u64) -> Vec<f64> {
    let one = |b: usize| {
        let mut rng = stream_rng(seed, b as u64);
        let n = values.len();
        let mut sum = 0.0;
        for _ in 0..n {
            sum += values[rng.random_range(0..n)];
        }
        sum / n as f64
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..resamples).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..resamples).map(one).collect()
    }
}

/// Bootstrap standard error of the mean: the sample standard deviation of
/// the resampled means.
pub fn bootstrap_se(values: &[f64], resamples: usize, seed: u64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: values.len() });
    }
    if resamples == 0 {
        return Err(Error::Domain("bootstrap needs at least one resample".into()));
    }
    Ok(sample_sd(&bootstrap_means(values, resamples, seed)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReshuffleResult {
    /// AUC per evaluated split, in split order.
    pub aucs: Vec<f64>,
    pub mean_auc: Option<f64>,
    /// Standard error of the mean AUC across evaluated splits.
    pub se: Option<f64>,
    /// Splits whose held-out part lacked a class.
    pub skipped: usize,
    pub seed: u64,
}

/// Repeated random train/held-out splits; AUC of the fixed scores on each
/// held-out part.
pub fn reshuffle_eval(rows: &[(f64, bool)], splits: usize, train_frac: f64, seed: u64) -> Result<ReshuffleResult> {
    if rows.len() < 4 {
        return Err(Error::TooFewObservations { needed: 4, got: rows.len() });
    }
    let positives = rows.iter().filter(|r| r.1).count();
    if positives == 0 || positives == rows.len() {
        return Err(Error::SingleClass { positives, negatives: rows.len() - positives });
    }
    if !(0.0..1.0).contains(&train_frac) {
        return Err(Error::Domain(alloc::format!("train_frac must be in [0,1), got {train_frac}")));
    }
    let train = libm::floor(train_frac * rows.len() as f64) as usize;
    let mut aucs = Vec::with_capacity(splits);
    let mut skipped = 0;
    for split in 0..splits {
        let mut rng = stream_rng(seed, split as u64);
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        idx.shuffle(&mut rng);
        let held = &idx[train..];
        let scores: Vec<f64> = held.iter().map(|&i| rows[i].0).collect();
        let labels: Vec<bool> = held.iter().map(|&i| rows[i].1).collect();
        match roc_auc(&scores, &labels) {
            Ok(r) => aucs.push(r.statistic.expect("auc is always defined")),
            Err(Error::SingleClass { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let mean_auc = mean(&aucs);
    let se = (!aucs.is_empty()).then(|| sample_sd(&aucs) / libm::sqrt(aucs.len() as f64));
    Ok(ReshuffleResult { aucs, mean_auc, se, skipped, seed })
}
