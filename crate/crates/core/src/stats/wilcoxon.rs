//! Wilcoxon rank-sum (Mann-Whitney) and signed-rank tests.
//!
//! Small untied samples use the exact null distribution, counted with a
//! subset-sum dynamic program over integer ranks. Everything else uses the
//! normal approximation with tie-corrected variance and a 0.5 continuity
//! correction.

use crate::error::{degenerate, invalid, Result};

use super::dist::normal_cdf;
use super::rank::{midranks, tie_groups};
use super::{select_tail, Alternative, Method, TestResult};

/// Largest pooled size `n + m` for the exact rank-sum distribution.
pub const EXACT_RANK_SUM_MAX: usize = 12;
/// Largest number of non-zero differences for the exact signed-rank distribution.
pub const EXACT_SIGNED_RANK_MAX: usize = 12;

/// Paired observations `(x, y)`; the signed-rank test works on `x - y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pairs: Vec<(f64, f64)>,
}

impl PairedSample {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return invalid("paired sample must contain at least one pair");
        }
        if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return invalid("paired sample values must be finite");
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn differences(&self) -> Vec<f64> {
        self.pairs.iter().map(|(x, y)| x - y).collect()
    }
}

/// `counts[s]` = number of `k`-subsets of `{1..=n}` with sum `s`.
fn subset_sum_counts(n: usize, k: usize) -> Vec<u64> {
    let max_sum = n * (n + 1) / 2;
    // table[j][s]: j elements chosen, sum s
    let mut table = vec![vec![0u64; max_sum + 1]; k + 1];
    table[0][0] = 1;
    for v in 1..=n {
        for j in (1..=k.min(v)).rev() {
            for s in (v..=max_sum).rev() {
                table[j][s] += table[j - 1][s - v];
            }
        }
    }
    table.swap_remove(k)
}

/// `counts[s]` = number of subsets of `{1..=n}` (any size) with sum `s`.
fn signed_rank_counts(n: usize) -> Vec<u64> {
    let max_sum = n * (n + 1) / 2;
    let mut counts = vec![0u64; max_sum + 1];
    counts[0] = 1;
    for v in 1..=n {
        for s in (v..=max_sum).rev() {
            counts[s] += counts[s - v];
        }
    }
    counts
}

/// Upper and lower tail probabilities of an integer statistic with the given
/// null counts, at observed value `obs`.
fn exact_tails(counts: &[u64], obs: usize) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let upper: u64 = counts[obs..].iter().sum();
    let lower: u64 = counts[..=obs].iter().sum();
    (upper as f64 / total as f64, lower as f64 / total as f64)
}

fn normal_tails(stat: f64, mean: f64, sd: f64) -> (f64, f64) {
    if sd == 0.0 {
        return (1.0, 1.0);
    }
    let greater = 1.0 - normal_cdf((stat - mean - 0.5) / sd);
    let less = normal_cdf((stat - mean + 0.5) / sd);
    (greater.min(1.0), less.min(1.0))
}

/// Two-sample rank-sum test of `x` against `y`. The statistic is the
/// Mann-Whitney U of `x`; `Greater` tests whether `x` tends to be larger.
pub fn wilcoxon_rank_sum(x: &[f64], y: &[f64], alternative: Alternative) -> Result<TestResult> {
    if x.is_empty() || y.is_empty() {
        return invalid("rank-sum test needs two non-empty samples");
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return invalid("rank-sum inputs must be finite");
    }
    let (n, m) = (x.len(), y.len());
    let big_n = n + m;
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = midranks(&pooled);
    let rank_sum_x: f64 = ranks[..n].iter().sum();
    let u = rank_sum_x - (n * (n + 1)) as f64 / 2.0;
    let ties = tie_groups(&pooled);

    let (greater, less, method) = if big_n <= EXACT_RANK_SUM_MAX && ties.is_empty() {
        let counts = subset_sum_counts(big_n, n);
        // no ties: the rank sum is an integer
        let (g, l) = exact_tails(&counts, rank_sum_x.round() as usize);
        (g, l, Method::Exact)
    } else {
        let mean = (n * m) as f64 / 2.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
        let nf = big_n as f64;
        let var = (n * m) as f64 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
        let (g, l) = normal_tails(u, mean, var.max(0.0).sqrt());
        (g, l, Method::NormalApprox)
    };
    Ok(TestResult {
        statistic: u,
        p_value: select_tail(greater, less, alternative),
        method,
        alternative,
        sizes: vec![n, m],
    })
}

/// Signed-rank test on the differences `x - y`. Zero differences are dropped;
/// the statistic is the sum of ranks of the positive differences, and
/// `Greater` tests whether `x` tends to exceed `y`.
pub fn wilcoxon_signed_rank(sample: &PairedSample, alternative: Alternative) -> Result<TestResult> {
    let diffs: Vec<f64> = sample.differences().into_iter().filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return degenerate("all paired differences are zero");
    }
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let ties = tie_groups(&abs);

    let (greater, less, method) = if n <= EXACT_SIGNED_RANK_MAX && ties.is_empty() {
        let (g, l) = exact_tails(&signed_rank_counts(n), w_plus.round() as usize);
        (g, l, Method::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let (g, l) = normal_tails(w_plus, mean, var.max(0.0).sqrt());
        (g, l, Method::NormalApprox)
    };
    Ok(TestResult {
        statistic: w_plus,
        p_value: select_tail(greater, less, alternative),
        method,
        alternative,
        sizes: vec![n],
    })
}
