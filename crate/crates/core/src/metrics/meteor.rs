use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::text::{porter_stem, TokenSequence};

use super::MetricScore;

const ALPHA: f64 = 0.9;
const BETA: f64 = 3.0;
const GAMMA: f64 = 0.5;

/// Synonym sets keyed by head token.
///
/// File format: one entry per line, tab-separated, head token first and its
/// synonyms after it. Blank lines and lines starting with `#` are ignored.
#[derive(Debug, Clone, Default)]
pub struct SynonymTable {
    entries: HashMap<String, HashSet<String>>,
}

impl SynonymTable {
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries: HashMap<String, HashSet<String>> = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t').map(str::trim).filter(|f| !f.is_empty());
            let head = fields.next().ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "missing head token".into(),
            })?;
            entries
                .entry(head.to_lowercase())
                .or_default()
                .extend(fields.map(str::to_lowercase));
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(f))
    }

    /// True when either word lists the other as a synonym.
    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        let listed = |x: &str, y: &str| self.entries.get(x).is_some_and(|s| s.contains(y));
        listed(a, b) || listed(b, a)
    }
}

/// One candidate/reference token alignment.
#[derive(Debug, Clone, Copy)]
struct Link {
    cand: usize,
    reference: usize,
}

/// Adds links for one matching stage. Each unaligned candidate token, in
/// order, takes the unaligned reference token that follows the previous link
/// when it matches (keeps chunks long), otherwise the leftmost match.
fn align_stage<F>(cand: &[String], reference: &[String], links: &mut Vec<Link>, matches: F)
where
    F: Fn(&str, &str) -> bool,
{
    let mut cand_used: Vec<bool> = vec![false; cand.len()];
    let mut ref_used: Vec<bool> = vec![false; reference.len()];
    for l in links.iter() {
        cand_used[l.cand] = true;
        ref_used[l.reference] = true;
    }
    for (ci, c) in cand.iter().enumerate() {
        if cand_used[ci] {
            continue;
        }
        let prev_ref = ci
            .checked_sub(1)
            .and_then(|p| links.iter().find(|l| l.cand == p))
            .map(|l| l.reference + 1);
        let eligible = |ri: usize| !ref_used[ri] && matches(c, &reference[ri]);
        let pick = prev_ref
            .filter(|&r| r < reference.len() && eligible(r))
            .or_else(|| (0..reference.len()).find(|&r| eligible(r)));
        if let Some(ri) = pick {
            cand_used[ci] = true;
            ref_used[ri] = true;
            links.push(Link { cand: ci, reference: ri });
        }
    }
}

fn count_chunks(links: &mut [Link]) -> usize {
    links.sort_by_key(|l| l.cand);
    let mut chunks = 0;
    let mut prev: Option<Link> = None;
    for &l in links.iter() {
        match prev {
            Some(p) if l.cand == p.cand + 1 && l.reference == p.reference + 1 => {}
            _ => chunks += 1,
        }
        prev = Some(l);
    }
    chunks
}

/// METEOR with exact, Porter-stem and (optional) synonym matching stages.
///
/// Uses `Fmean = PR / (alpha P + (1 - alpha) R)` with alpha = 0.9 (equivalently
/// `10PR / (R + 9P)`) and the fragmentation penalty `0.5 (chunks/matches)^3`.
pub fn meteor(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    synonyms: Option<&SynonymTable>,
) -> Result<MetricScore> {
    if candidate.is_empty() || reference.is_empty() {
        return invalid("METEOR needs non-empty candidate and reference");
    }
    let cand = candidate.tokens();
    let refs = reference.tokens();
    let mut links = Vec::new();
    align_stage(cand, refs, &mut links, |a, b| a == b);
    let stem = |w: &str| porter_stem(w).unwrap_or_else(|_| w.to_string());
    align_stage(cand, refs, &mut links, |a, b| stem(a) == stem(b));
    if let Some(table) = synonyms {
        align_stage(cand, refs, &mut links, |a, b| table.are_synonyms(a, b));
    }
    let matches = links.len();
    if matches == 0 {
        return Ok(MetricScore::new("METEOR", 0.0));
    }
    let p = matches as f64 / cand.len() as f64;
    let r = matches as f64 / refs.len() as f64;
    let fmean = p * r / (ALPHA * p + (1.0 - ALPHA) * r);
    let chunks = count_chunks(&mut links);
    let penalty = GAMMA * (chunks as f64 / matches as f64).powf(BETA);
    Ok(MetricScore::new("METEOR", 100.0 * fmean * (1.0 - penalty)))
}
