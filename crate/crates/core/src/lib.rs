//! Evaluation toolkit for question generation (QG) systems.
//!
//! The crate is split into layers:
//!
//! * [`text`]: tokenization, n-grams, longest common subsequence, Porter stemming.
//! * [`metrics`]: reference-based metrics (BLEU, GLEU, ROUGE-L, METEOR, Answerability,
//!   the `Q-` combination) and embedding-based BERTScore.
//! * [`qascore`]: the reference-free QAScore metric computed from a masked language model.
//! * [`stats`]: ranking, correlation coefficients, Wilcoxon tests and the Williams test.
//! * [`human`]: the crowd-evaluation pipeline (HIT construction, quality control,
//!   standardization, significance matrices, metric correlation).
//!
//! All randomized operations take an explicit seeded generator, see [`rng`].

pub mod corpus;
pub mod error;
pub mod human;
pub mod metrics;
pub mod qascore;
pub mod rng;
pub mod stats;
pub mod text;

pub use error::{Error, Result};
