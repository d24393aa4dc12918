use alloc::vec;
use alloc::vec::Vec;

use super::rank::{average_ranks, tie_groups};
use super::special::{normal_cdf, normal_sf};
use super::{Alternative, StatResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwuOptions {
    pub alternative: Alternative,
    /// Use the exact null distribution when `n_a + n_b <= exact_max_n` and
    /// there are no ties.
    pub exact_max_n: usize,
    pub continuity: bool,
}

impl Default for MwuOptions {
    fn default() -> Self {
        Self {
            alternative: Alternative::TwoSided,
            exact_max_n: 16,
            continuity: true,
        }
    }
}

pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<StatResult> {
    mann_whitney_u_with(a, b, MwuOptions::default())
}

/// Mann-Whitney U of sample `a` against `b`. The statistic is
/// `U_a = R_a - n_a (n_a + 1) / 2` with average ranks for ties.
pub fn mann_whitney_u_with(a: &[f64], b: &[f64], opts: MwuOptions) -> Result<StatResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN in Mann-Whitney input".into()));
    }
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let mut pooled = Vec::with_capacity(n);
    pooled.extend_from_slice(a);
    pooled.extend_from_slice(b);
    let ranks = average_ranks(&pooled);
    let rank_sum: f64 = ranks[..na].iter().sum();
    let u = rank_sum - (na * (na + 1)) as f64 / 2.0;

    let ties = tie_groups(&pooled);
    let has_ties = ties.iter().any(|&t| t > 1);
    if n <= opts.exact_max_n && !has_ties {
        let p = mann_whitney_exact_p(u as usize, na, nb, opts.alternative);
        return Ok(StatResult::new(Some(u), Some(p), vec![na, nb], "mann_whitney_exact"));
    }

    let (naf, nbf, nf) = (na as f64, nb as f64, n as f64);
    let mu = naf * nbf / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = naf * nbf / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    let p = if var <= 0.0 {
        1.0
    } else {
        let sd = libm::sqrt(var);
        let cc = if opts.continuity { 0.5 } else { 0.0 };
        match opts.alternative {
            Alternative::TwoSided => {
                let z = ((u - mu).abs() - cc).max(0.0) / sd;
                2.0 * normal_sf(z)
            }
            Alternative::Greater => normal_sf((u - mu - cc) / sd),
            Alternative::Less => normal_cdf((u - mu + cc) / sd),
        }
    };
    Ok(StatResult::new(Some(u), Some(p), vec![na, nb], "mann_whitney_normal"))
}

/// Null distribution of U for untied samples: entry `u` counts the
/// arrangements of `na` ranks among `na + nb` with statistic `u`.
pub fn u_distribution(na: usize, nb: usize) -> Vec<f64> {
    // counts[j][u] for samples (i, j), built up over i
    let max_u = na * nb;
    let mut prev: Vec<Vec<f64>> = (0..=nb)
        .map(|_| {
            let mut v = vec![0.0; max_u + 1];
            v[0] = 1.0;
            v
        })
        .collect();
    for i in 1..=na {
        let mut cur: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; nb + 1];
        cur[0][0] = 1.0;
        for j in 1..=nb {
            // the largest value belongs to sample a (adds j to U) or to b
            for u in 0..=i * j {
                let from_a = if u >= j { prev[j][u - j] } else { 0.0 };
                let from_b = cur[j - 1][u];
                cur[j][u] = from_a + from_b;
            }
        }
        prev = cur;
    }
    prev.swap_remove(nb)
}

/// Exact p-value of `U_a = u` under the untied null.
pub fn mann_whitney_exact_p(u: usize, na: usize, nb: usize, alternative: Alternative) -> f64 {
    let dist = u_distribution(na, nb);
    let total: f64 = dist.iter().sum();
    let le: f64 = dist[..=u.min(dist.len() - 1)].iter().sum::<f64>() / total;
    let ge: f64 = dist[u.min(dist.len())..].iter().sum::<f64>() / total;
    match alternative {
        Alternative::TwoSided => (2.0 * le.min(ge)).min(1.0),
        Alternative::Less => le,
        Alternative::Greater => ge,
    }
}
