//! QAScore: a reference-free question metric.
//!
//! Each answer word is masked in turn and a masked language model, reading
//! `passage <sep> question <sep> masked answer`, assigns a log-probability to
//! the true word. A question's score is the sum of those word
//! log-likelihoods; questions that make the answer easy to recover score
//! higher (closer to zero).

mod bridge;
mod mlm;
mod mock;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use bridge::{BridgeModel, BridgeRequest, BridgeResponse, EmbedRequest, EmbedResponse};
pub use mlm::{answer_words, log_softmax, true_word_loglik, MaskedLanguageModel};
pub use mock::{MockMlm, MockMode, MASK_TOKEN, SEP_TOKEN, UNK_TOKEN};

use crate::corpus::EvalItem;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaScoreResult {
    pub per_word: Vec<(String, f64)>,
    pub total: f64,
    pub per_word_mean: f64,
    pub word_count: usize,
}

impl QaScoreResult {
    fn from_words(words: Vec<String>, logliks: Vec<f64>) -> Self {
        let total: f64 = logliks.iter().sum();
        let word_count = logliks.len();
        Self {
            per_word: words.into_iter().zip(logliks).collect(),
            total,
            per_word_mean: total / word_count as f64,
            word_count,
        }
    }

    pub fn statistic(&self, aggregation: Aggregation) -> f64 {
        match aggregation {
            Aggregation::PerWordMean => self.per_word_mean,
            Aggregation::Sum => self.total,
        }
    }
}

/// Per-question statistic averaged into a system score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    PerWordMean,
    Sum,
}

fn check_logliks(logliks: &[f64], expected: usize) -> Result<()> {
    if logliks.len() != expected {
        return Err(Error::Model {
            word_index: None,
            message: format!("model returned {} word scores for {expected} words", logliks.len()),
        });
    }
    if let Some((i, v)) = logliks.iter().enumerate().find(|(_, v)| !v.is_finite() || **v > 0.0) {
        return Err(Error::Model {
            word_index: Some(i),
            message: format!("log-likelihood {v} is not a finite value <= 0"),
        });
    }
    Ok(())
}

/// Score one question: sum over answer words of the masked-word
/// log-likelihood.
pub fn qascore_question(item: &EvalItem, model: &dyn MaskedLanguageModel) -> Result<QaScoreResult> {
    let words = answer_words(&item.answer);
    if words.is_empty() {
        return invalid(format!("item `{}` has an empty answer", item.id));
    }
    let logliks = model.answer_log_likelihoods(&item.passage, &item.question, &item.answer)?;
    check_logliks(&logliks, words.len())?;
    Ok(QaScoreResult::from_words(words, logliks))
}

/// Mean of per-item statistics, summed in item-id order so the result does
/// not depend on input order.
pub fn aggregate_items(results: &[(&str, &QaScoreResult)], aggregation: Aggregation) -> Result<f64> {
    if results.is_empty() {
        return invalid("cannot aggregate an empty item list");
    }
    let mut sorted: Vec<&(&str, &QaScoreResult)> = results.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(b.0));
    let sum: f64 = sorted.iter().map(|(_, r)| r.statistic(aggregation)).sum();
    Ok(sum / results.len() as f64)
}

/// System-level QAScore over the items of one system.
pub fn qascore_system(items: &[EvalItem], model: &dyn MaskedLanguageModel, aggregation: Aggregation) -> Result<f64> {
    if items.is_empty() {
        return invalid("system has no items");
    }
    let scored: Vec<QaScoreResult> = items
        .iter()
        .map(|it| qascore_question(it, model))
        .collect::<Result<_>>()?;
    let pairs: Vec<(&str, &QaScoreResult)> = items.iter().map(|i| i.id.as_str()).zip(scored.iter()).collect();
    aggregate_items(&pairs, aggregation)
}

/// Score a whole corpus; returns per-item results in input order and
/// per-system scores keyed by system name.
pub fn qascore_corpus(
    items: &[EvalItem],
    model: &dyn MaskedLanguageModel,
    aggregation: Aggregation,
) -> Result<(Vec<QaScoreResult>, BTreeMap<String, f64>)> {
    let scored: Vec<QaScoreResult> = items
        .iter()
        .map(|it| qascore_question(it, model))
        .collect::<Result<_>>()?;
    let systems = system_means(items, &scored, aggregation)?;
    Ok((scored, systems))
}

pub(crate) fn system_means(
    items: &[EvalItem],
    scored: &[QaScoreResult],
    aggregation: Aggregation,
) -> Result<BTreeMap<String, f64>> {
    let mut by_system: BTreeMap<&str, Vec<(&str, &QaScoreResult)>> = BTreeMap::new();
    for (it, r) in items.iter().zip(scored) {
        by_system.entry(it.system.as_str()).or_default().push((it.id.as_str(), r));
    }
    by_system
        .into_iter()
        .map(|(s, rs)| Ok((s.to_string(), aggregate_items(&rs, aggregation)?)))
        .collect()
}
