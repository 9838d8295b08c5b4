use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{degenerate, invalid, Result};
use crate::stats::{wilcoxon_rank_sum, Alternative};

use super::{ItemKind, RatingRecord};

/// Human judgement of one ordinary question, averaged over its raters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionScore {
    pub hit_id: String,
    pub item_id: String,
    pub system: String,
    pub scores: BTreeMap<String, f64>,
    pub overall: f64,
    pub raters: usize,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Collapse standardized ratings to one score per question. A worker's
/// REPEAT of a question is averaged with their ORD rating first; the
/// per-worker values are then averaged across workers. BADREF ratings are
/// ignored.
pub fn question_scores(z_ratings: &[RatingRecord]) -> Vec<QuestionScore> {
    type Key<'a> = (&'a str, &'a str);
    let mut per_worker: BTreeMap<(Key, &str), BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    let mut system_of: BTreeMap<Key, &str> = BTreeMap::new();
    for r in z_ratings.iter().filter(|r| r.kind != ItemKind::BadReference) {
        let key = (r.hit_id.as_str(), r.question_id());
        system_of.insert(key, r.system.as_str());
        let slot = per_worker.entry((key, r.worker_id.as_str())).or_default();
        for (c, v) in &r.scores {
            slot.entry(c.as_str()).or_default().push(*v);
        }
    }
    let mut per_question: BTreeMap<Key, (BTreeMap<&str, Vec<f64>>, usize)> = BTreeMap::new();
    for ((key, _), crit) in per_worker {
        let slot = per_question.entry(key).or_default();
        slot.1 += 1;
        for (c, v) in crit {
            slot.0.entry(c).or_default().push(mean(&v));
        }
    }
    per_question
        .into_iter()
        .map(|((hit, item), (crit, raters))| {
            let scores: BTreeMap<String, f64> = crit.into_iter().map(|(c, v)| (c.to_string(), mean(&v))).collect();
            let overall = mean(&scores.values().copied().collect::<Vec<_>>());
            QuestionScore {
                hit_id: hit.into(),
                item_id: item.into(),
                system: system_of[&(hit, item)].into(),
                scores,
                overall,
                raters,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemScore {
    pub system: String,
    pub z_overall: f64,
    pub criteria: BTreeMap<String, f64>,
    /// Number of evaluated questions.
    pub n: usize,
}

/// Systems sorted by overall z, best first (ties by name).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemScoreTable {
    pub systems: Vec<SystemScore>,
}

impl SystemScoreTable {
    /// Table from published overall scores only.
    pub fn from_overall<I: IntoIterator<Item = (String, f64)>>(scores: I) -> Self {
        Self::sorted(
            scores
                .into_iter()
                .map(|(system, z_overall)| SystemScore {
                    system,
                    z_overall,
                    criteria: BTreeMap::new(),
                    n: 0,
                })
                .collect(),
        )
    }

    fn sorted(mut systems: Vec<SystemScore>) -> Self {
        systems.sort_by(|a, b| b.z_overall.total_cmp(&a.z_overall).then_with(|| a.system.cmp(&b.system)));
        Self { systems }
    }

    pub fn get(&self, system: &str) -> Option<&SystemScore> {
        self.systems.iter().find(|s| s.system == system)
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.systems.iter().map(|s| s.system.as_str()).collect()
    }
}

/// Per-criterion mean of question-level z scores for every system; the
/// overall score is the mean of the criterion scores.
pub fn system_scores(z_ratings: &[RatingRecord]) -> SystemScoreTable {
    let mut by_system: BTreeMap<String, Vec<QuestionScore>> = BTreeMap::new();
    for q in question_scores(z_ratings) {
        by_system.entry(q.system.clone()).or_default().push(q);
    }
    let systems = by_system
        .into_iter()
        .map(|(system, qs)| {
            let mut crit: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for q in &qs {
                for (c, v) in &q.scores {
                    crit.entry(c.clone()).or_default().push(*v);
                }
            }
            let criteria: BTreeMap<String, f64> = crit.into_iter().map(|(c, v)| (c, mean(&v))).collect();
            SystemScore {
                z_overall: mean(&criteria.values().copied().collect::<Vec<_>>()),
                system,
                criteria,
                n: qs.len(),
            }
        })
        .collect();
    SystemScoreTable::sorted(systems)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceMatrix {
    pub systems: Vec<String>,
    /// `cells[i][j]`: system `i` significantly outperforms system `j`.
    pub cells: Vec<Vec<bool>>,
    pub p_values: Vec<Vec<Option<f64>>>,
    pub threshold: f64,
}

impl SignificanceMatrix {
    pub fn from_cells(systems: Vec<String>, cells: Vec<Vec<bool>>, threshold: f64) -> Result<Self> {
        let k = systems.len();
        if cells.len() != k || cells.iter().any(|row| row.len() != k) {
            return invalid(format!("significance matrix must be {k}x{k}"));
        }
        Ok(Self {
            p_values: vec![vec![None; k]; k],
            systems,
            cells,
            threshold,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("system");
        for s in &self.systems {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (s, row) in self.systems.iter().zip(&self.cells) {
            out.push_str(s);
            for c in row {
                out.push_str(if *c { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }

    /// Grid with a filled cell wherever the row system wins.
    pub fn to_svg(&self) -> String {
        const CELL: usize = 24;
        const MARGIN: usize = 120;
        let k = self.systems.len();
        let size = MARGIN + k * CELL + 4;
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="11">"#
        );
        for (i, s) in self.systems.iter().enumerate() {
            let mid = MARGIN + i * CELL + CELL / 2;
            let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 6, mid + 4, escape(s));
            let _ = writeln!(
                svg,
                r#"<text x="{mid}" y="{}" text-anchor="start" transform="rotate(-90 {mid} {})">{}</text>"#,
                MARGIN - 6,
                MARGIN - 6,
                escape(s)
            );
        }
        for (i, row) in self.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let fill = if *c { "#2b6cb0" } else if i == j { "#e2e2e2" } else { "#ffffff" };
                let _ = writeln!(
                    svg,
                    r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#999999"/>"##,
                    MARGIN + j * CELL,
                    MARGIN + i * CELL
                );
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One-sided rank-sum tests between every ordered pair of systems on their
/// question-level overall z scores. Systems are ordered by overall z, best
/// first.
pub fn significance_matrix(z_ratings: &[RatingRecord], threshold: f64) -> Result<SignificanceMatrix> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return invalid(format!("threshold must lie in (0, 1), got {threshold}"));
    }
    let table = system_scores(z_ratings);
    if table.systems.len() < 2 {
        return degenerate(format!("significance matrix needs at least 2 systems, got {}", table.systems.len()));
    }
    let mut samples: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for q in question_scores(z_ratings) {
        samples.entry(q.system).or_default().push(q.overall);
    }
    let systems: Vec<String> = table.names().into_iter().map(String::from).collect();
    let k = systems.len();
    let mut cells = vec![vec![false; k]; k];
    let mut p_values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let p = wilcoxon_rank_sum(&samples[&systems[i]], &samples[&systems[j]], Alternative::Greater)?.p_value;
            p_values[i][j] = Some(p);
            cells[i][j] = p < threshold;
        }
    }
    Ok(SignificanceMatrix {
        systems,
        cells,
        p_values,
        threshold,
    })
}

/// Fraction of off-diagonal cells on which two matrices agree, after
/// aligning systems by name.
pub fn matrix_overlap(a: &SignificanceMatrix, b: &SignificanceMatrix) -> Result<f64> {
    let set_a: BTreeSet<&String> = a.systems.iter().collect();
    let set_b: BTreeSet<&String> = b.systems.iter().collect();
    if set_a != set_b || set_a.len() != a.systems.len() || set_b.len() != b.systems.len() {
        return invalid("matrices cover different systems");
    }
    let k = a.systems.len();
    if k < 2 {
        return invalid("overlap needs at least 2 systems");
    }
    let pos: BTreeMap<&String, usize> = b.systems.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut agree = 0usize;
    for i in 0..k {
        for j in 0..k {
            if i != j && a.cells[i][j] == b.cells[pos[&a.systems[i]]][pos[&a.systems[j]]] {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (k * (k - 1)) as f64)
}
