use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::stats::{wilcoxon_signed_rank, Alternative, PairedSample};

use super::{ItemKind, RatingRecord};

pub const NO_QC_EVIDENCE: &str = "no-qc-evidence";
pub const DEGENERATE: &str = "degenerate";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkerQc {
    /// Number of (ORD, BADREF) score pairs pooled over all criteria.
    pub pairs: usize,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub passed: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QcOutcome {
    pub passed_workers: BTreeSet<String>,
    #[serde(skip)]
    pub passed_ratings: Vec<RatingRecord>,
    pub report: BTreeMap<String, WorkerQc>,
}

/// (ORD, BADREF) score pairs of one worker, criterion by criterion.
fn qc_pairs(ratings: &[&RatingRecord]) -> Vec<(f64, f64)> {
    let ord: HashMap<(&str, &str), &RatingRecord> = ratings
        .iter()
        .filter(|r| r.kind == ItemKind::Ordinary)
        .map(|r| ((r.hit_id.as_str(), r.item_id.as_str()), *r))
        .collect();
    let mut pairs = Vec::new();
    for bad in ratings.iter().filter(|r| r.kind == ItemKind::BadReference) {
        let Some(orig) = bad.pair_of.as_deref().and_then(|p| ord.get(&(bad.hit_id.as_str(), p))) else {
            continue;
        };
        for (criterion, b) in &bad.scores {
            if let Some(o) = orig.scores.get(criterion) {
                pairs.push((*o, *b));
            }
        }
    }
    pairs
}

/// Keep workers who rate ordinary questions significantly above their
/// degraded copies: a one-sided signed-rank test over all criteria pooled,
/// passing when `p < alpha`. Ratings of failing workers are dropped
/// wholesale.
pub fn qc_filter(ratings: &[RatingRecord], alpha: f64) -> Result<QcOutcome> {
    if ratings.is_empty() {
        return invalid("no ratings to filter");
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let mut by_worker: BTreeMap<&str, Vec<&RatingRecord>> = BTreeMap::new();
    for r in ratings {
        by_worker.entry(r.worker_id.as_str()).or_default().push(r);
    }
    let mut report = BTreeMap::new();
    let mut passed_workers = BTreeSet::new();
    for (worker, rs) in by_worker {
        let pairs = qc_pairs(&rs);
        let n = pairs.len();
        let entry = if n == 0 {
            WorkerQc {
                pairs: 0,
                statistic: None,
                p_value: None,
                passed: false,
                reason: Some(NO_QC_EVIDENCE.into()),
            }
        } else {
            match wilcoxon_signed_rank(&PairedSample::new(pairs)?, Alternative::Greater) {
                Ok(t) => WorkerQc {
                    pairs: n,
                    statistic: Some(t.statistic),
                    p_value: Some(t.p_value),
                    passed: t.p_value < alpha,
                    reason: None,
                },
                Err(Error::DegenerateInput(_)) => WorkerQc {
                    pairs: n,
                    statistic: None,
                    p_value: None,
                    passed: false,
                    reason: Some(DEGENERATE.into()),
                },
                Err(e) => return Err(e),
            }
        };
        if entry.passed {
            passed_workers.insert(worker.to_string());
        } else {
            log::debug!("worker {worker} fails quality control: {entry:?}");
        }
        report.insert(worker.to_string(), entry);
    }
    let passed_ratings = ratings
        .iter()
        .filter(|r| passed_workers.contains(&r.worker_id))
        .cloned()
        .collect();
    Ok(QcOutcome {
        passed_workers,
        passed_ratings,
        report,
    })
}
