//! Deterministic stand-in for a masked language model.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::Rng;

use crate::corpus::EvalItem;
use crate::error::{invalid, Result};
use crate::rng::derive;
use crate::text::tokenize;

use super::mlm::{answer_words, log_softmax, true_word_loglik, MaskedLanguageModel};

pub const SEP_TOKEN: &str = "</s>";
pub const MASK_TOKEN: &str = "<mask>";
pub const UNK_TOKEN: &str = "<unk>";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MockMode {
    /// All logits zero: every word scores `ln(1/V)`.
    Uniform,
    /// Logits drawn uniformly from `[-scale, scale)`, seeded by the model
    /// input.
    Seeded { scale: f64 },
    /// Seeded noise plus `boost` on every vocabulary token that occurs in the
    /// passage within `window` positions of a question token. Answers located
    /// next to what the question talks about become easy to recover.
    Cooccurrence { window: usize, boost: f64, noise: f64 },
}

#[derive(Debug, Clone)]
pub struct MockMlm {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    seed: u64,
    mode: MockMode,
}

fn normalize(word: &str) -> String {
    tokenize(word, false)
        .tokens()
        .first()
        .cloned()
        .unwrap_or_else(|| word.to_lowercase())
}

impl MockMlm {
    /// Vocabulary entries are normalized and deduplicated; `<unk>` is always
    /// index 0.
    pub fn new<I: IntoIterator<Item = String>>(vocab: I, seed: u64, mode: MockMode) -> Self {
        let mut words = vec![UNK_TOKEN.to_string()];
        let mut index = HashMap::from([(UNK_TOKEN.to_string(), 0)]);
        for w in vocab {
            let w = normalize(&w);
            if !index.contains_key(&w) {
                index.insert(w.clone(), words.len());
                words.push(w);
            }
        }
        Self {
            vocab: words,
            index,
            seed,
            mode,
        }
    }

    /// Uniform model over `size` tokens (`<unk>` plus `w1..`).
    pub fn uniform(size: usize, seed: u64) -> Self {
        Self::new((1..size.max(1)).map(|i| format!("w{i}")), seed, MockMode::Uniform)
    }

    /// Vocabulary taken from every passage, question and answer token of the
    /// corpus, in sorted order.
    pub fn from_items(items: &[EvalItem], seed: u64, mode: MockMode) -> Self {
        let words: BTreeSet<String> = items
            .iter()
            .flat_map(|it| {
                [&it.passage, &it.question, &it.answer]
                    .into_iter()
                    .flat_map(|t| tokenize(t, false).tokens().to_vec())
            })
            .collect();
        Self::new(words, seed, mode)
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn mode(&self) -> MockMode {
        self.mode
    }

    /// Vocabulary index of a word, `0` (`<unk>`) when absent.
    pub fn token_index(&self, word: &str) -> usize {
        self.index.get(&normalize(word)).copied().unwrap_or(0)
    }

    /// Model input with answer word `word_index` masked.
    pub fn model_input(passage: &str, question: &str, answer: &str, word_index: usize) -> String {
        let masked: Vec<&str> = answer
            .split_whitespace()
            .enumerate()
            .map(|(i, w)| if i == word_index { MASK_TOKEN } else { w })
            .collect();
        format!("{passage} {SEP_TOKEN} {question} {SEP_TOKEN} {}", masked.join(" "))
    }

    /// Raw logits over the vocabulary at the masked position.
    pub fn logits(&self, passage: &str, question: &str, answer: &str, word_index: usize) -> Result<Vec<f64>> {
        let n_words = answer_words(answer).len();
        if word_index >= n_words {
            return invalid(format!("word index {word_index} out of range for {n_words} answer words"));
        }
        let input = Self::model_input(passage, question, answer, word_index);
        let v = self.vocab.len();
        let noise = |scale: f64| -> Vec<f64> {
            let mut rng = derive(self.seed, &format!("{input}\u{1f}{word_index}"));
            (0..v).map(|_| rng.random_range(-scale..scale)).collect()
        };
        Ok(match self.mode {
            MockMode::Uniform => vec![0.0; v],
            MockMode::Seeded { scale } if scale > 0.0 => noise(scale),
            MockMode::Seeded { .. } => vec![0.0; v],
            MockMode::Cooccurrence { window, boost, noise: scale } => {
                let mut logits = if scale > 0.0 { noise(scale) } else { vec![0.0; v] };
                let passage_toks = tokenize(passage, false);
                let p = passage_toks.tokens();
                let question_toks: HashSet<String> = tokenize(question, false).tokens().iter().cloned().collect();
                let mut boosted = HashSet::new();
                for (i, tok) in p.iter().enumerate() {
                    if question_toks.contains(tok) {
                        let lo = i.saturating_sub(window);
                        let hi = (i + window).min(p.len() - 1);
                        for near in &p[lo..=hi] {
                            if let Some(&k) = self.index.get(near) {
                                boosted.insert(k);
                            }
                        }
                    }
                }
                for k in boosted {
                    logits[k] += boost;
                }
                logits
            }
        })
    }
}

impl MaskedLanguageModel for MockMlm {
    fn name(&self) -> &str {
        "mock"
    }

    fn vocab_size(&self) -> Option<usize> {
        Some(self.vocab.len())
    }

    fn word_log_likelihood(&self, passage: &str, question: &str, answer: &str, word_index: usize) -> Result<f64> {
        let logits = self.logits(passage, question, answer, word_index)?;
        let words = answer_words(answer);
        let log_probs = log_softmax(&logits)?;
        true_word_loglik(&log_probs, self.token_index(&words[word_index]))
    }
}
