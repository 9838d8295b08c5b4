//! Reference-based and embedding-based question metrics.
//!
//! Overlap metrics report values on a 0–100 scale. Corpus-level scores are
//! the arithmetic mean of sentence-level scores ([`mean_score`]).

mod answerability;
mod bertscore;
mod meteor;
mod ngram;
mod rouge;

pub use answerability::{
    answerability, classify_elements, AnswerabilityConfig, ElementType, ElementWeights,
    EntityTagger, GazetteerTagger,
};
pub use bertscore::{bert_score, BertScore, EmbeddingMatrix};
pub use meteor::{meteor, SynonymTable};
pub use ngram::{bleu, gleu, Smoothing};
pub use rouge::rouge_l;

use serde::Serialize;

use crate::error::{invalid, Result};

/// A named metric value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricScore {
    pub name: String,
    pub value: f64,
    /// Set when the score was produced from degenerate input (for instance an
    /// empty candidate) rather than an actual comparison.
    pub degenerate: bool,
}

impl MetricScore {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        debug_assert!(value.is_finite());
        Self {
            name: name.into(),
            value,
            degenerate: false,
        }
    }

    pub(crate) fn degenerate(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: 0.0,
            degenerate: true,
        }
    }
}

/// Harmonic mean of two rates, 0 when both are 0.
pub(crate) fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Convex combination `beta * answerability + (1 - beta) * metric`, named
/// `Q-<metric>`.
pub fn q_combine(metric: &MetricScore, answerability: &MetricScore, beta: f64) -> Result<MetricScore> {
    if !(0.0..=1.0).contains(&beta) {
        return invalid(format!("beta must lie in [0, 1], got {beta}"));
    }
    Ok(MetricScore {
        name: format!("Q-{}", metric.name),
        value: beta * answerability.value + (1.0 - beta) * metric.value,
        degenerate: metric.degenerate || answerability.degenerate,
    })
}

/// Arithmetic mean of sentence-level values; `None` for an empty slice.
pub fn mean_score(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Column order of [`metric_suite`].
pub const SUITE_METRICS: [&str; 10] = [
    "BLEU1", "BLEU2", "BLEU3", "BLEU4", "GLEU", "ROUGE-L", "METEOR", "Answerability", "Q-BLEU1", "Q-BLEU4",
];

/// Every reference-based metric for one candidate/reference pair, in
/// [`SUITE_METRICS`] order. BLEU uses epsilon smoothing.
pub fn metric_suite(
    candidate: &str,
    reference: &str,
    config: &AnswerabilityConfig,
    synonyms: Option<&SynonymTable>,
) -> Result<Vec<MetricScore>> {
    let cand = crate::text::tokenize(candidate, false);
    let refs = [crate::text::tokenize(reference, false)];
    if cand.is_empty() || refs[0].is_empty() {
        return invalid("candidate and reference must contain at least one word");
    }
    let mut out: Vec<MetricScore> = (1..=4)
        .map(|n| bleu(&cand, &refs, n, Smoothing::Epsilon))
        .collect::<Result<_>>()?;
    out.push(gleu(&cand, &refs, 4)?);
    out.push(rouge_l(&cand, &refs[0])?);
    out.push(meteor(&cand, &refs[0], synonyms)?);
    let ans = answerability(&cand, &refs[0], config)?;
    let q1 = q_combine(&out[0], &ans, config.beta)?;
    let q4 = q_combine(&out[3], &ans, config.beta)?;
    out.extend([ans, q1, q4]);
    Ok(out)
}
