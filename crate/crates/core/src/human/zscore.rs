use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::RatingRecord;

pub const CONSTANT_RATER: &str = "constant-rater";

/// Denominator convention for a worker's standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deviation {
    /// Divide by the number of scores.
    #[default]
    Population,
    /// Divide by the number of scores minus one.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkerStats {
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Standardized {
    /// Input records with every score replaced by its z value.
    #[serde(skip)]
    pub ratings: Vec<RatingRecord>,
    pub workers: BTreeMap<String, WorkerStats>,
    pub excluded: BTreeMap<String, String>,
}

/// Convert each worker's raw scores to z values using the mean and standard
/// deviation of all that worker's scores (every criterion, every item kind).
/// Workers with no spread are excluded as constant raters.
pub fn standardize(ratings: &[RatingRecord], deviation: Deviation) -> Result<Standardized> {
    let mut values: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in ratings {
        values.entry(r.worker_id.as_str()).or_default().extend(r.scores.values());
    }
    let mut workers = BTreeMap::new();
    let mut excluded = BTreeMap::new();
    for (w, v) in values {
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
        let denom = match deviation {
            Deviation::Population => n as f64,
            Deviation::Sample => n.saturating_sub(1) as f64,
        };
        let sd = if denom > 0.0 { (ss / denom).sqrt() } else { 0.0 };
        if sd > 0.0 && sd.is_finite() {
            workers.insert(w.to_string(), WorkerStats { mean, sd, count: n });
        } else {
            log::warn!("worker {w} excluded: no spread in {n} scores");
            excluded.insert(w.to_string(), CONSTANT_RATER.to_string());
        }
    }
    let ratings = ratings
        .iter()
        .filter_map(|r| {
            let s = workers.get(&r.worker_id)?;
            let mut z = r.clone();
            for v in z.scores.values_mut() {
                *v = (*v - s.mean) / s.sd;
            }
            Some(z)
        })
        .collect();
    Ok(Standardized {
        ratings,
        workers,
        excluded,
    })
}
