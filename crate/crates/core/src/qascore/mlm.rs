use crate::error::{invalid, Error, Result};

/// A masked language model able to score one masked answer word.
///
/// Implementations receive the raw passage, question and answer and are
/// responsible for building the model input (passage and question joined by
/// the separator token, then the answer with word `word_index` masked) and
/// for subword handling: a word split into several pieces is masked as a
/// whole and its log-likelihood is the sum over its pieces.
///
/// Answer words are the whitespace-separated chunks of the answer
/// ([`answer_words`]). Returned values must be finite and `<= 0`.
pub trait MaskedLanguageModel: Send + Sync {
    fn name(&self) -> &str;

    /// Vocabulary size, when the implementation exposes it.
    fn vocab_size(&self) -> Option<usize>;

    fn word_log_likelihood(&self, passage: &str, question: &str, answer: &str, word_index: usize) -> Result<f64>;

    /// Log-likelihood of every answer word. Model errors are tagged with the
    /// failing word index.
    fn answer_log_likelihoods(&self, passage: &str, question: &str, answer: &str) -> Result<Vec<f64>> {
        (0..answer_words(answer).len())
            .map(|w| {
                self.word_log_likelihood(passage, question, answer, w)
                    .map_err(|e| match e {
                        Error::Model { word_index: None, message } => Error::Model {
                            word_index: Some(w),
                            message,
                        },
                        other => other,
                    })
            })
            .collect()
    }
}

/// Whitespace split of an answer; the unit of masking.
pub fn answer_words(answer: &str) -> Vec<String> {
    answer.split_whitespace().map(str::to_string).collect()
}

/// Log-softmax with max subtraction.
pub fn log_softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return invalid("log-softmax of an empty vector");
    }
    if logits.iter().any(|v| !v.is_finite()) {
        return invalid("log-softmax input contains a non-finite value");
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_z = logits.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
    Ok(logits.iter().map(|v| v - log_z).collect())
}

/// Log-probability of the true token: the one-hot target selects a single
/// entry of the log-softmax output.
pub fn true_word_loglik(log_probs: &[f64], true_index: usize) -> Result<f64> {
    log_probs
        .get(true_index)
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("true index {true_index} out of range 0..{}", log_probs.len())))
}
