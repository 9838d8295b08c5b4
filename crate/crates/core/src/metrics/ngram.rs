use std::collections::HashMap;

use crate::error::{invalid, Result};
use crate::text::{ngram_counts, TokenSequence};

use super::MetricScore;

/// Smoothing applied to zero n-gram matches in sentence BLEU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// A zero precision at any order makes the score 0.
    #[default]
    None,
    /// Zero match counts are replaced by a small epsilon (0.1).
    Epsilon,
}

const EPSILON: f64 = 0.1;

fn check_args(references: &[TokenSequence], max_n: usize) -> Result<()> {
    if references.is_empty() {
        return invalid("at least one reference is required");
    }
    if references.iter().all(TokenSequence::is_empty) {
        return invalid("all references are empty");
    }
    if !(1..=4).contains(&max_n) {
        return invalid(format!("max_n must be in 1..=4, got {max_n}"));
    }
    Ok(())
}

fn max_ref_counts(references: &[TokenSequence], n: usize) -> HashMap<&[String], usize> {
    let mut max_counts: HashMap<&[String], usize> = HashMap::new();
    for r in references {
        for (gram, c) in ngram_counts(r.tokens(), n) {
            let e = max_counts.entry(gram).or_insert(0);
            *e = (*e).max(c);
        }
    }
    max_counts
}

fn clipped_matches(cand: &HashMap<&[String], usize>, refs: &HashMap<&[String], usize>) -> usize {
    cand.iter()
        .map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0)))
        .sum()
}

/// Reference length closest to `c_len`; ties go to the shorter reference.
fn closest_ref_len(references: &[TokenSequence], c_len: usize) -> usize {
    references
        .iter()
        .map(TokenSequence::len)
        .min_by_key(|&r| (r.abs_diff(c_len), r))
        .unwrap_or(0)
}

/// Sentence BLEU with uniform weights over orders `1..=max_n`.
///
/// Modified precisions are clipped by the maximum count of each n-gram in any
/// single reference; the brevity penalty uses the closest reference length.
pub fn bleu(
    candidate: &TokenSequence,
    references: &[TokenSequence],
    max_n: usize,
    smoothing: Smoothing,
) -> Result<MetricScore> {
    check_args(references, max_n)?;
    let name = format!("BLEU{max_n}");
    if candidate.is_empty() {
        return Ok(MetricScore::degenerate(name));
    }
    let c_len = candidate.len();
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let cand = ngram_counts(candidate.tokens(), n);
        let matched = clipped_matches(&cand, &max_ref_counts(references, n));
        let total = c_len.saturating_sub(n - 1);
        let p = match (matched, smoothing) {
            (0, Smoothing::None) => return Ok(MetricScore::new(name, 0.0)),
            (0, Smoothing::Epsilon) => EPSILON / total.max(1) as f64,
            (m, _) => m as f64 / total as f64,
        };
        log_sum += p.ln();
    }
    let r_len = closest_ref_len(references, c_len);
    let bp = if c_len > r_len {
        1.0
    } else {
        (1.0 - r_len as f64 / c_len as f64).exp()
    };
    Ok(MetricScore::new(name, 100.0 * bp * (log_sum / max_n as f64).exp()))
}

/// Sentence GLEU: matches over all orders `1..=max_n` divided by the larger of
/// the candidate and reference n-gram totals, i.e. `min(precision, recall)`.
/// With several references the best-scoring one is used.
pub fn gleu(candidate: &TokenSequence, references: &[TokenSequence], max_n: usize) -> Result<MetricScore> {
    check_args(references, max_n)?;
    if candidate.is_empty() {
        return Ok(MetricScore::degenerate("GLEU"));
    }
    let totals = |len: usize| -> usize { (1..=max_n).map(|n| len.saturating_sub(n - 1)).sum() };
    let cand_total = totals(candidate.len());
    let best = references
        .iter()
        .map(|r| {
            let matched: usize = (1..=max_n)
                .map(|n| {
                    clipped_matches(
                        &ngram_counts(candidate.tokens(), n),
                        &ngram_counts(r.tokens(), n),
                    )
                })
                .sum();
            let denom = cand_total.max(totals(r.len()));
            if denom == 0 {
                0.0
            } else {
                matched as f64 / denom as f64
            }
        })
        .fold(0.0, f64::max);
    Ok(MetricScore::new("GLEU", 100.0 * best))
}
