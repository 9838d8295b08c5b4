//! Ranking, correlation and nonparametric significance tests.

mod correlation;
mod dist;
mod rank;
mod wilcoxon;
mod williams;

pub use correlation::{kendall_tau, pearson, spearman};
pub use dist::{normal_cdf, t_cdf};
pub use rank::rank_with_ties;
pub use wilcoxon::{wilcoxon_rank_sum, wilcoxon_signed_rank, PairedSample, EXACT_RANK_SUM_MAX, EXACT_SIGNED_RANK_MAX};
pub use williams::williams_test;

use serde::{Deserialize, Serialize};

/// Direction of the alternative hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    #[default]
    Greater,
    Less,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
    pub alternative: Alternative,
    /// Sample sizes the test was computed on (after any dropped observations).
    pub sizes: Vec<usize>,
}

/// Combine one-sided tail probabilities into the requested alternative.
/// Two-sided is `min(1, 2 * min(greater, less))`.
pub(crate) fn select_tail(greater: f64, less: f64, alternative: Alternative) -> f64 {
    let p = match alternative {
        Alternative::Greater => greater,
        Alternative::Less => less,
        Alternative::TwoSided => 2.0 * greater.min(less),
    };
    p.clamp(0.0, 1.0)
}
