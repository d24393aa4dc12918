use alloc::vec;
use alloc::vec::Vec;

use super::special::{student_t_sf, student_t_two_sided};
use super::{Alternative, StatResult};
use crate::error::{Error, Result};

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean((i+1)..=j)
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

/// Sizes of groups of tied values (groups of size 1 included).
pub(crate) fn tie_groups(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        out.push(j - i);
        i = j;
    }
    out
}

/// Pearson correlation; `None` if either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::TooFewObservations { needed: 3, got: x.len() });
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN in correlation input".into()));
    }
    Ok(())
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<StatResult> {
    spearman_with(x, y, Alternative::TwoSided)
}

/// Spearman's rho with a t-approximation p-value on `n - 2` degrees of
/// freedom. `|rho| = 1` gives p = 0 (two-sided).
pub fn spearman_with(x: &[f64], y: &[f64], alternative: Alternative) -> Result<StatResult> {
    check_pair(x, y)?;
    let n = x.len();
    let rho = pearson(&average_ranks(x), &average_ranks(y));
    let p = rho.map(|r| t_approx_p(r, n, alternative));
    Ok(StatResult::new(rho, p, vec![n], "spearman_t"))
}

fn t_approx_p(rho: f64, n: usize, alternative: Alternative) -> f64 {
    let df = (n - 2) as f64;
    let t = if rho.abs() >= 1.0 {
        f64::INFINITY.copysign(rho)
    } else {
        rho * libm::sqrt(df / (1.0 - rho * rho))
    };
    match alternative {
        Alternative::TwoSided => student_t_two_sided(t, df),
        Alternative::Greater => student_t_sf(t, df),
        Alternative::Less => student_t_sf(-t, df),
    }
}

/// Largest sample for which the exact permutation p-value is offered.
pub const SPEARMAN_EXACT_MAX_N: usize = 10;

/// Spearman's rho with a permutation p-value over all `n!` orderings of
/// `y`'s ranks.
pub fn spearman_exact(x: &[f64], y: &[f64], alternative: Alternative) -> Result<StatResult> {
    check_pair(x, y)?;
    let n = x.len();
    if n > SPEARMAN_EXACT_MAX_N {
        return Err(Error::Domain(alloc::format!(
            "exact spearman supports n <= {SPEARMAN_EXACT_MAX_N}, got {n}"
        )));
    }
    let rx = average_ranks(x);
    let mut ry = average_ranks(y);
    let Some(rho) = pearson(&rx, &ry) else {
        return Ok(StatResult::new(None, None, vec![n], "spearman_exact"));
    };
    // tolerance for equal rho values reached through different orderings
    let eps = 1e-12;
    let mut hits = 0u64;
    let mut total = 0u64;
    let mut count = |perm: &[f64]| {
        let r = pearson(&rx, perm).unwrap_or(0.0);
        let hit = match alternative {
            Alternative::TwoSided => r.abs() >= rho.abs() - eps,
            Alternative::Greater => r >= rho - eps,
            Alternative::Less => r <= rho + eps,
        };
        hits += u64::from(hit);
        total += 1;
    };
    heap_permutations(&mut ry, &mut count);
    Ok(StatResult::new(Some(rho), Some(hits as f64 / total as f64), vec![n], "spearman_exact"))
}

fn heap_permutations(items: &mut [f64], visit: &mut impl FnMut(&[f64])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Pairwise Spearman correlations and p-values between columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub rho: Vec<Vec<Option<f64>>>,
    pub p: Vec<Vec<Option<f64>>>,
}

pub fn spearman_matrix(columns: &[Vec<f64>]) -> Result<CorrelationMatrix> {
    let k = columns.len();
    let ranks: Vec<Vec<f64>> = columns.iter().map(|c| average_ranks(c)).collect();
    let mut rho = vec![vec![None; k]; k];
    let mut p = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            check_pair(&columns[i], &columns[j])?;
            let r = pearson(&ranks[i], &ranks[j]);
            let pv = r.map(|r| t_approx_p(r, columns[i].len(), Alternative::TwoSided));
            rho[i][j] = r;
            rho[j][i] = r;
            p[i][j] = pv;
            p[j][i] = pv;
        }
    }
    Ok(CorrelationMatrix { rho, p })
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}
