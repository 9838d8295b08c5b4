//! Synthetic crowd-evaluation runs with planted system qualities.
//!
//! A question's latent quality is its system's planted quality plus a
//! question effect. A diligent worker rates on a 0-100 slider around
//! `50 + scale * (latent + worker bias)` with per-criterion noise and rates
//! bad references `badref_drop` latent units lower. A random clicker draws
//! every score uniformly.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::rng::derive;
use crate::text::TokenSequence;

use super::hit::{build_hit, donor_tokens, Hit};
use super::{ItemKind, RatingRecord, CRITERIA};

/// Overall z scores of the eleven systems in the published first run.
pub const TABLE1_QUALITIES: [(&str, f64); 11] = [
    ("Human", 0.322),
    ("BART-large", 0.308),
    ("BART-base", 0.290),
    ("T5-base", 0.226),
    ("RNN", 0.147),
    ("H-Seq2seq", 0.120),
    ("T5-small", 0.117),
    ("Att-GGNN-plus", 0.076),
    ("H-Seq2seq*", 0.053),
    ("Att-GGNN", -0.008),
    ("GPT-2", -0.052),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkerKind {
    Diligent,
    RandomClicker,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Planted quality per system; must include `Human` and have 11 entries.
    pub qualities: Vec<(String, f64)>,
    pub hits: usize,
    pub hits_per_worker: usize,
    pub random_fraction: f64,
    /// Slider points per latent unit.
    pub scale: f64,
    pub question_sd: f64,
    pub worker_bias_sd: f64,
    pub rating_sd: f64,
    pub badref_drop: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            qualities: TABLE1_QUALITIES.iter().map(|(s, q)| (s.to_string(), *q)).collect(),
            hits: 500,
            hits_per_worker: 4,
            random_fraction: 0.2,
            scale: 20.0,
            question_sd: 0.5,
            worker_bias_sd: 0.3,
            rating_sd: 0.5,
            badref_drop: 1.5,
        }
    }
}

/// A HIT together with the latent quality of each system's question.
#[derive(Debug, Clone)]
pub struct SimulatedHit {
    pub hit: Hit,
    pub latent: BTreeMap<String, f64>,
}

fn normal(sd: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sd).map_err(|e| crate::Error::InvalidArgument(format!("bad standard deviation {sd}: {e}")))
}

fn synthetic_words<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<String> {
    (0..n).map(|_| format!("w{}", rng.random_range(0..500))).collect()
}

/// Generate `cfg.hits` HITs with synthetic passages and questions.
pub fn simulate_hits(cfg: &SimulationConfig, seed: u64, run: &str) -> Result<Vec<SimulatedHit>> {
    if cfg.qualities.len() != super::SYSTEMS_PER_HIT {
        return invalid(format!("simulation needs {} systems", super::SYSTEMS_PER_HIT));
    }
    let mut rng = derive(seed, &format!("{run}/hits"));
    let q_noise = normal(cfg.question_sd)?;
    let passages: Vec<String> = (0..cfg.hits)
        .map(|_| {
            let n = rng.random_range(25..40);
            synthetic_words(&mut rng, n).join(" ")
        })
        .collect();
    let donors: Vec<TokenSequence> = passages.iter().map(|p| donor_tokens(p)).collect();
    let mut out = Vec::with_capacity(cfg.hits);
    for (h, passage) in passages.iter().enumerate() {
        let hit_id = format!("{run}-h{h:04}");
        let mut questions = BTreeMap::new();
        let mut latent = BTreeMap::new();
        for (system, quality) in &cfg.qualities {
            let n = rng.random_range(6..16);
            let mut words = synthetic_words(&mut rng, n);
            words[0] = "what".into();
            questions.insert(system.clone(), format!("{}?", words.join(" ")));
            latent.insert(system.clone(), quality + q_noise.sample(&mut rng));
        }
        let hit = build_hit(&hit_id, passage, "w0", &questions, &donors, h, &mut rng)?;
        out.push(SimulatedHit { hit, latent });
    }
    Ok(out)
}

/// One worker's ratings of every item of a HIT.
pub fn rate_hit<R: Rng + ?Sized>(
    sim: &SimulatedHit,
    worker_id: &str,
    kind: WorkerKind,
    bias: f64,
    cfg: &SimulationConfig,
    rng: &mut R,
) -> Result<Vec<RatingRecord>> {
    let noise = normal(cfg.rating_sd)?;
    let mut out = Vec::with_capacity(sim.hit.items.len());
    for item in &sim.hit.items {
        let base = sim.latent[&item.system] + bias
            - if item.kind == ItemKind::BadReference { cfg.badref_drop } else { 0.0 };
        let scores = CRITERIA
            .iter()
            .map(|c| {
                let v = match kind {
                    WorkerKind::Diligent => (50.0 + cfg.scale * (base + noise.sample(rng))).round().clamp(0.0, 100.0),
                    WorkerKind::RandomClicker => f64::from(rng.random_range(0..=100u8)),
                };
                (c.to_string(), v)
            })
            .collect();
        out.push(RatingRecord {
            worker_id: worker_id.into(),
            hit_id: sim.hit.hit_id.clone(),
            item_id: item.item_id.clone(),
            system: item.system.clone(),
            kind: item.kind,
            pair_of: item.pair_of.clone(),
            scores,
        });
    }
    Ok(out)
}

/// A full run: HITs are dealt to a pool of workers named `{run}-w{k}`, a
/// `random_fraction` share of whom are random clickers.
pub fn simulate_run(cfg: &SimulationConfig, seed: u64, run: &str) -> Result<Vec<RatingRecord>> {
    if cfg.hits_per_worker == 0 || !(0.0..=1.0).contains(&cfg.random_fraction) {
        return invalid("hits_per_worker must be positive and random_fraction in [0, 1]");
    }
    let hits = simulate_hits(cfg, seed, run)?;
    let mut rng = derive(seed, &format!("{run}/workers"));
    let n_workers = hits.len().div_ceil(cfg.hits_per_worker);
    let n_random = (n_workers as f64 * cfg.random_fraction).round() as usize;
    let mut kinds: Vec<WorkerKind> = (0..n_workers)
        .map(|k| if k < n_random { WorkerKind::RandomClicker } else { WorkerKind::Diligent })
        .collect();
    kinds.shuffle(&mut rng);
    let bias = normal(cfg.worker_bias_sd)?;
    let biases: Vec<f64> = (0..n_workers).map(|_| bias.sample(&mut rng)).collect();
    let mut ratings = Vec::new();
    for (h, sim) in hits.iter().enumerate() {
        let k = h / cfg.hits_per_worker;
        ratings.extend(rate_hit(sim, &format!("{run}-w{k:03}"), kinds[k], biases[k], cfg, &mut rng)?);
    }
    Ok(ratings)
}

/// Planted qualities keyed by system name.
pub fn planted(cfg: &SimulationConfig) -> BTreeMap<String, f64> {
    cfg.qualities.iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::human::HUMAN_SYSTEM;

    #[test]
    fn runs_are_deterministic_and_well_formed() {
        let cfg = SimulationConfig {
            hits: 8,
            ..SimulationConfig::default()
        };
        let a = simulate_run(&cfg, 11, "r1").unwrap();
        let b = simulate_run(&cfg, 11, "r1").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8 * 20);
        super::super::validate_ratings(&a).unwrap();
        assert!(a.iter().filter(|r| r.system == HUMAN_SYSTEM).count() == 8 * 3);
        let c = simulate_run(&cfg, 11, "r2").unwrap();
        assert!(a.iter().zip(&c).all(|(x, y)| x.worker_id != y.worker_id));
    }
}
