use crate::error::{invalid, Result};
use crate::text::{lcs_length, TokenSequence};

use super::{f1, MetricScore};

/// ROUGE-L F1 from the longest common subsequence of candidate and reference.
pub fn rouge_l(candidate: &TokenSequence, reference: &TokenSequence) -> Result<MetricScore> {
    if candidate.is_empty() || reference.is_empty() {
        return invalid("ROUGE-L needs non-empty candidate and reference");
    }
    let l = lcs_length(candidate, reference) as f64;
    let p = l / candidate.len() as f64;
    let r = l / reference.len() as f64;
    Ok(MetricScore::new("ROUGE-L", 100.0 * f1(p, r)))
}
