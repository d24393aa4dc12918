use alloc::vec;
use alloc::vec::Vec;

use super::StatResult;
use crate::error::{Error, Result};

/// ROC-AUC: the share of (positive, negative) pairs where the positive
/// scores higher, ties counting one half.
///
/// Computed by a sort-and-sweep over tie groups, in integer arithmetic up to
/// the final division.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<StatResult> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch { left: scores.len(), right: labels.len() });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("NaN score".into()));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass { positives, negatives });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // twice the Mann-Whitney U of the positives: 2 * wins + ties
    let mut doubled: u128 = 0;
    let mut negatives_below: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u128, 0u128);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if labels[order[j]] {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        doubled += 2 * pos * negatives_below + pos * neg;
        negatives_below += neg;
        i = j;
    }
    let auc = doubled as f64 / (2.0 * positives as f64 * negatives as f64);
    Ok(StatResult::new(Some(auc), None, vec![positives, negatives], "roc_auc"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = roc_auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(r.statistic, Some(1.0));
        let r = roc_auc(&[0.5; 6], &[true, false, true, false, true, false]).unwrap();
        assert_eq!(r.statistic, Some(0.5));
        // pairs: 0.9>0.6, 0.9>0.1, 0.4<0.6, 0.4>0.1
        let r = roc_auc(&[0.9, 0.4, 0.6, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(r.statistic, Some(0.75));
        assert_eq!(r.n, vec![2, 2]);
    }

    #[test]
    fn single_class_rejected() {
        assert_eq!(
            roc_auc(&[0.1, 0.2], &[true, true]).unwrap_err(),
            Error::SingleClass { positives: 2, negatives: 0 }
        );
    }
}
