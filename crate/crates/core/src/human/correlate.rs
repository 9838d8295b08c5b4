use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::stats::{kendall_tau, pearson, spearman, williams_test, Alternative};

use super::SystemScoreTable;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricCorrelation {
    pub metric: String,
    pub n: usize,
    pub pearson: f64,
    pub spearman: f64,
    pub kendall: f64,
}

/// Williams test of whether `better` correlates more strongly with human
/// judgement than `worse` over the systems both metrics cover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilliamsEntry {
    pub better: String,
    pub worse: String,
    pub n: usize,
    pub r_between: f64,
    pub r_better: f64,
    pub r_worse: f64,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub metrics: Vec<MetricCorrelation>,
    pub williams: Vec<WilliamsEntry>,
    pub omitted: Vec<String>,
}

impl CorrelationReport {
    pub fn get(&self, metric: &str) -> Option<&MetricCorrelation> {
        self.metrics.iter().find(|m| m.metric == metric)
    }

    pub fn williams(&self, a: &str, b: &str) -> Option<&WilliamsEntry> {
        self.williams
            .iter()
            .find(|w| (w.better == a && w.worse == b) || (w.better == b && w.worse == a))
    }
}

/// Aligned (metric a, metric b, human) columns over systems covered by both
/// metrics and the human table, in table order.
fn aligned(table: &SystemScoreTable, a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut out = (Vec::new(), Vec::new(), Vec::new());
    for s in &table.systems {
        if let (Some(x), Some(y)) = (a.get(&s.system), b.get(&s.system)) {
            out.0.push(*x);
            out.1.push(*y);
            out.2.push(s.z_overall);
        }
    }
    out
}

/// Correlate each metric column with the human overall z scores over the
/// systems the column covers, then run one-tailed Williams tests for every
/// metric pair. Columns covering fewer than 3 systems are omitted.
pub fn correlate_metrics(table: &SystemScoreTable, columns: &[(String, BTreeMap<String, f64>)]) -> Result<CorrelationReport> {
    let mut report = CorrelationReport::default();
    let mut kept: Vec<&(String, BTreeMap<String, f64>)> = Vec::new();
    for col in columns {
        let (name, values) = col;
        let (x, _, h) = aligned(table, values, values);
        if x.len() < 3 {
            log::warn!("metric {name} covers {} systems; omitted", x.len());
            report.omitted.push(name.clone());
            continue;
        }
        report.metrics.push(MetricCorrelation {
            metric: name.clone(),
            n: x.len(),
            pearson: pearson(&x, &h)?,
            spearman: spearman(&x, &h)?,
            kendall: kendall_tau(&x, &h)?,
        });
        kept.push(col);
    }
    for (i, a) in kept.iter().enumerate() {
        for b in &kept[i + 1..] {
            let (x, y, h) = aligned(table, &a.1, &b.1);
            if x.len() < 4 {
                continue;
            }
            let (ra, rb, rab) = (pearson(&x, &h)?, pearson(&y, &h)?, pearson(&x, &y)?);
            let ((better, r_better), (worse, r_worse)) = if ra >= rb { ((&a.0, ra), (&b.0, rb)) } else { ((&b.0, rb), (&a.0, ra)) };
            match williams_test(rab, r_better, r_worse, x.len(), Alternative::Greater) {
                Ok(t) => report.williams.push(WilliamsEntry {
                    better: better.clone(),
                    worse: worse.clone(),
                    n: x.len(),
                    r_between: rab,
                    r_better,
                    r_worse,
                    statistic: t.statistic,
                    p_value: t.p_value,
                }),
                Err(e) => log::warn!("Williams test {better} vs {worse} skipped: {e}"),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(name: &str, v: &[(&str, f64)]) -> (String, BTreeMap<String, f64>) {
        (name.into(), v.iter().map(|(s, x)| (s.to_string(), *x)).collect())
    }

    #[test]
    fn perfect_and_omitted() {
        let table = SystemScoreTable::from_overall([("A", 0.3), ("B", 0.1), ("C", -0.2), ("D", -0.4), ("E", 0.0)].map(|(s, v)| (s.to_string(), v)));
        let cols = [
            col("same", &[("A", 3.0), ("B", 1.0), ("C", -2.0), ("D", -4.0), ("E", 0.0)]),
            col("noisy", &[("A", 1.0), ("B", 3.0), ("C", -2.0), ("D", -4.0), ("E", 0.5)]),
            col("tiny", &[("A", 1.0), ("B", 2.0)]),
        ];
        let r = correlate_metrics(&table, &cols).unwrap();
        assert_eq!(r.omitted, ["tiny"]);
        let same = r.get("same").unwrap();
        assert!((same.pearson - 1.0).abs() < 1e-12 && (same.kendall - 1.0).abs() < 1e-12);
        assert_eq!(r.williams.len(), 1);
        assert_eq!(r.williams("noisy", "same").unwrap().better, "same");
    }
}
