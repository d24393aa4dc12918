use alloc::vec;
use alloc::vec::Vec;

use super::StatResult;
use crate::error::{Error, Result};

/// Cohen's kappa from a 2x2 contingency table `[[yes/yes, yes/no], [no/yes, no/no]]`
/// (rows: first annotator, columns: second). `None` when chance agreement is 1.
pub fn kappa_from_table(table: [[u64; 2]; 2]) -> Option<f64> {
    let n = table[0][0] + table[0][1] + table[1][0] + table[1][1];
    if n == 0 {
        return None;
    }
    let agree = table[0][0] + table[1][1];
    let rows = [table[0][0] + table[0][1], table[1][0] + table[1][1]];
    let cols = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
    let chance = (rows[0] * cols[0] + rows[1] * cols[1]) as i128;
    // (p_o - p_e) / (1 - p_e), scaled by n^2 to stay in integers
    let num = n as i128 * agree as i128 - chance;
    let den = (n as i128) * (n as i128) - chance;
    (den != 0).then(|| num as f64 / den as f64)
}

/// Kappa between two annotators over the items both labeled.
pub fn kappa_pair(a: &[Option<bool>], b: &[Option<bool>]) -> Option<f64> {
    let mut t = [[0u64; 2]; 2];
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            t[usize::from(!*x)][usize::from(!*y)] += 1;
        }
    }
    kappa_from_table(t)
}

/// Unweighted mean pairwise kappa. `items[i][k]` is annotator `k`'s label
/// for item `i` (`None` if not annotated).
pub fn cohens_kappa(items: &[Vec<Option<bool>>]) -> Result<StatResult> {
    let annotators = items.iter().map(Vec::len).max().unwrap_or(0);
    if annotators < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: annotators });
    }
    let column = |k: usize| -> Vec<Option<bool>> { items.iter().map(|row| row.get(k).copied().flatten()).collect() };
    let columns: Vec<Vec<Option<bool>>> = (0..annotators).map(column).collect();
    let mut values = Vec::new();
    let mut overlaps = 0;
    for j in 0..annotators {
        for k in j + 1..annotators {
            let overlap = columns[j].iter().zip(&columns[k]).filter(|(x, y)| x.is_some() && y.is_some()).count();
            if overlap == 0 {
                continue;
            }
            overlaps += 1;
            if let Some(v) = kappa_pair(&columns[j], &columns[k]) {
                values.push(v);
            }
        }
    }
    if overlaps == 0 {
        return Err(Error::Domain("no annotator pair shares an item".into()));
    }
    Ok(StatResult::new(mean_kappa(&values), None, vec![items.len(), annotators], "cohens_kappa"))
}

/// Unweighted mean of defined kappas (e.g. over the characteristics of a group).
pub fn mean_kappa(values: &[f64]) -> Option<f64> {
    super::mean(values)
}
