use serde::Serialize;

use crate::error::{invalid, Result};

/// Row-normalized token embeddings, one row per token.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl EmbeddingMatrix {
    /// Validates that all rows share one non-zero dimension and rescales each
    /// row to unit length.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = match rows.first() {
            Some(r) if !r.is_empty() => r.len(),
            _ => return invalid("embedding matrix must have at least one non-empty row"),
        };
        let mut out = Vec::with_capacity(rows.len());
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return invalid(format!("row {i} has dimension {}, expected {dim}", r.len()));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return invalid(format!("row {i} has a non-finite entry"));
            }
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return invalid(format!("row {i} is the zero vector"));
            }
            out.push(r.into_iter().map(|v| v / norm).collect());
        }
        Ok(Self { rows: out, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BertScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn greedy_mean(from: &EmbeddingMatrix, to: &EmbeddingMatrix) -> f64 {
    let total: f64 = from
        .rows()
        .iter()
        .map(|a| to.rows().iter().map(|b| dot(a, b)).fold(f64::NEG_INFINITY, f64::max))
        .sum();
    total / from.len() as f64
}

/// Greedy cosine matching: each candidate token takes its most similar
/// reference token (precision) and vice versa (recall).
pub fn bert_score(cand: &EmbeddingMatrix, reference: &EmbeddingMatrix) -> Result<BertScore> {
    if cand.dim() != reference.dim() {
        return invalid(format!(
            "embedding dimensions differ: {} vs {}",
            cand.dim(),
            reference.dim()
        ));
    }
    let precision = greedy_mean(cand, reference);
    let recall = greedy_mean(reference, cand);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(BertScore {
        precision,
        recall,
        f1,
    })
}
