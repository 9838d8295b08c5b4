//! Crowd evaluation of generated questions.
//!
//! Ratings flow through [`qc_filter`], [`standardize`], [`system_scores`] and
//! [`significance_matrix`]; [`correlate_metrics`] compares automatic metrics
//! against the resulting human scores.

mod correlate;
mod hit;
mod qc;
mod scores;
mod table;
pub mod simulate;
mod zscore;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use correlate::{correlate_metrics, CorrelationReport, MetricCorrelation, WilliamsEntry};
pub use hit::{badref_span_len, build_hit, donor_tokens, make_bad_reference, Hit, HitItem, HUMAN_SYSTEM, HIT_SIZE, SYSTEMS_PER_HIT};
pub use qc::{qc_filter, QcOutcome, WorkerQc};
pub use scores::{
    matrix_overlap, question_scores, significance_matrix, system_scores, QuestionScore, SignificanceMatrix,
    SystemScore, SystemScoreTable,
};
pub use table::ScoreTable;
pub use zscore::{standardize, Deviation, Standardized, WorkerStats};

/// Default rating criteria, one slider each.
pub const CRITERIA: [&str; 4] = ["understandability", "relevancy", "answerability", "appropriateness"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ItemKind {
    #[serde(rename = "ORD")]
    Ordinary,
    #[serde(rename = "REPEAT")]
    Repeat,
    #[serde(rename = "BADREF")]
    BadReference,
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ItemKind::Ordinary => "ORD",
            ItemKind::Repeat => "REPEAT",
            ItemKind::BadReference => "BADREF",
        })
    }
}

/// One worker's ratings of one HIT item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub worker_id: String,
    pub hit_id: String,
    pub item_id: String,
    pub system: String,
    pub kind: ItemKind,
    #[serde(default)]
    pub pair_of: Option<String>,
    pub scores: BTreeMap<String, f64>,
}

impl RatingRecord {
    /// Raw slider ratings must lie in `[0, 100]`. Not applicable to
    /// standardized records.
    pub fn validate(&self) -> Result<()> {
        if self.kind != ItemKind::Ordinary && self.pair_of.is_none() {
            return invalid(format!("{} item `{}` lacks pair_of", self.kind, self.item_id));
        }
        if self.scores.is_empty() {
            return invalid(format!("item `{}` has no scores", self.item_id));
        }
        if let Some((c, v)) = self.scores.iter().find(|(_, v)| !(0.0..=100.0).contains(*v)) {
            return invalid(format!("item `{}`: {c} score {v} outside [0, 100]", self.item_id));
        }
        Ok(())
    }

    /// The ORD item this record scores: itself or its `pair_of`.
    pub fn question_id(&self) -> &str {
        match self.kind {
            ItemKind::Ordinary => &self.item_id,
            _ => self.pair_of.as_deref().unwrap_or(&self.item_id),
        }
    }
}

/// Check a batch of raw ratings, including that every REPEAT/BADREF refers
/// to an ORD item of the same HIT.
pub fn validate_ratings(ratings: &[RatingRecord]) -> Result<()> {
    let ord: std::collections::HashSet<(&str, &str)> = ratings
        .iter()
        .filter(|r| r.kind == ItemKind::Ordinary)
        .map(|r| (r.hit_id.as_str(), r.item_id.as_str()))
        .collect();
    for r in ratings {
        r.validate()?;
        if let Some(p) = &r.pair_of {
            if r.kind != ItemKind::Ordinary && !ord.contains(&(r.hit_id.as_str(), p.as_str())) {
                return invalid(format!("item `{}` pairs with `{p}`, not an ORD item of HIT `{}`", r.item_id, r.hit_id));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub alpha: f64,
    pub threshold: f64,
    pub deviation: Deviation,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            threshold: 0.1,
            deviation: Deviation::Population,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub qc: QcOutcome,
    pub standardization: Standardized,
    pub systems: SystemScoreTable,
    /// Absent when fewer than two systems survive.
    pub significance: Option<SignificanceMatrix>,
}

/// Quality control, standardization, system scores and the significance
/// matrix in one pass.
pub fn analyze(ratings: &[RatingRecord], config: &AnalysisConfig) -> Result<Analysis> {
    validate_ratings(ratings)?;
    let qc = qc_filter(ratings, config.alpha)?;
    let standardization = standardize(&qc.passed_ratings, config.deviation)?;
    let systems = system_scores(&standardization.ratings);
    let significance = if systems.systems.len() >= 2 {
        Some(significance_matrix(&standardization.ratings, config.threshold)?)
    } else {
        None
    };
    Ok(Analysis {
        qc,
        standardization,
        systems,
        significance,
    })
}
