//! Answerability: weighted precision/recall over four kinds of question
//! elements (relevant content words, named entities, question-type words and
//! function words), combined into an F1 score.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::text::TokenSequence;

use super::{f1, MetricScore};

const DEFAULT_CONFIG: &str = include_str!("../../data/answerability.conf");
const DEFAULT_FUNCTION_WORDS: &str = include_str!("../../data/function_words.txt");
const DEFAULT_QUESTION_WORDS: &str = include_str!("../../data/question_words.txt");
const DEFAULT_NAMED_ENTITIES: &str = include_str!("../../data/named_entities.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementType {
    RelevantContentWord,
    NamedEntity,
    QuestionType,
    FunctionWord,
}

impl ElementType {
    pub const ALL: [ElementType; 4] = [
        ElementType::RelevantContentWord,
        ElementType::NamedEntity,
        ElementType::QuestionType,
        ElementType::FunctionWord,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementWeights {
    pub content: f64,
    pub named_entity: f64,
    pub question_type: f64,
    pub function: f64,
}

impl ElementWeights {
    pub fn get(&self, t: ElementType) -> f64 {
        match t {
            ElementType::RelevantContentWord => self.content,
            ElementType::NamedEntity => self.named_entity,
            ElementType::QuestionType => self.question_type,
            ElementType::FunctionWord => self.function,
        }
    }

    fn validate(&self) -> Result<()> {
        let all = [self.content, self.named_entity, self.question_type, self.function];
        if all.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return invalid("answerability weights must lie in [0, 1]");
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return invalid(format!("answerability weights must sum to 1, got {sum}"));
        }
        Ok(())
    }
}

/// Marks which positions of a token sequence are named entities.
pub trait EntityTagger: Send + Sync {
    fn tag(&self, seq: &TokenSequence) -> Vec<bool>;
}

/// Lexicon lookup plus a capitalization heuristic: a token is an entity when
/// its lowercase form is listed, when it is capitalized and not the first
/// token, or when it is an all-caps acronym of two or more letters.
#[derive(Debug, Clone, Default)]
pub struct GazetteerTagger {
    entries: HashSet<String>,
}

impl GazetteerTagger {
    pub fn new<I: IntoIterator<Item = String>>(entries: I) -> Self {
        Self {
            entries: entries.into_iter().map(|e| e.to_lowercase()).collect(),
        }
    }
}

impl EntityTagger for GazetteerTagger {
    fn tag(&self, seq: &TokenSequence) -> Vec<bool> {
        seq.surface()
            .iter()
            .zip(seq.tokens())
            .enumerate()
            .map(|(i, (surface, lower))| {
                let capitalized = surface.chars().next().is_some_and(char::is_uppercase);
                let letters: Vec<char> = surface.chars().filter(|c| c.is_alphabetic()).collect();
                let acronym = letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase());
                self.entries.contains(lower) || (capitalized && i > 0) || acronym
            })
            .collect()
    }
}

#[derive(Clone)]
pub struct AnswerabilityConfig {
    pub weights: ElementWeights,
    pub beta: f64,
    pub function_words: HashSet<String>,
    pub question_words: HashSet<String>,
    pub tagger: Arc<dyn EntityTagger>,
}

impl fmt::Debug for AnswerabilityConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnswerabilityConfig")
            .field("weights", &self.weights)
            .field("beta", &self.beta)
            .field("function_words", &self.function_words.len())
            .field("question_words", &self.question_words.len())
            .finish_non_exhaustive()
    }
}

fn parse_lexicon(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn parse_key_values(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        out.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
    }
    Ok(out)
}

impl Default for AnswerabilityConfig {
    fn default() -> Self {
        Self::parse(DEFAULT_CONFIG, None).expect("bundled answerability config is valid")
    }
}

impl AnswerabilityConfig {
    /// Parse the flat `key = value` format. Lexicon paths are resolved against
    /// `base_dir`; without one (or when a key is absent) the bundled lexicons
    /// are used.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let kv = parse_key_values(text)?;
        let num = |key: &str| -> Result<f64> {
            let (line, v) = kv
                .get(key)
                .ok_or_else(|| Error::InvalidArgument(format!("missing key `{key}`")))?;
            v.parse().map_err(|_| Error::Parse {
                line: *line,
                message: format!("`{key}` is not a number: `{v}`"),
            })
        };
        let lexicon = |key: &str, fallback: &str| -> Result<HashSet<String>> {
            match (kv.get(key), base_dir) {
                (Some((_, p)), Some(dir)) => Ok(parse_lexicon(&std::fs::read_to_string(dir.join(p))?)),
                _ => Ok(parse_lexicon(fallback)),
            }
        };
        let weights = ElementWeights {
            content: num("weights.content")?,
            named_entity: num("weights.ne")?,
            question_type: num("weights.qt")?,
            function: num("weights.fn")?,
        };
        weights.validate()?;
        let beta = num("beta")?;
        if !(0.0..=1.0).contains(&beta) {
            return invalid(format!("beta must lie in [0, 1], got {beta}"));
        }
        let entities = lexicon("lexicon.named_entities", DEFAULT_NAMED_ENTITIES)?;
        Ok(Self {
            weights,
            beta,
            function_words: lexicon("lexicon.function_words", DEFAULT_FUNCTION_WORDS)?,
            question_words: lexicon("lexicon.question_words", DEFAULT_QUESTION_WORDS)?,
            tagger: Arc::new(GazetteerTagger::new(entities)),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, Some(path.parent().unwrap_or(Path::new("."))))
    }

    pub fn with_weights(mut self, weights: ElementWeights) -> Result<Self> {
        weights.validate()?;
        self.weights = weights;
        Ok(self)
    }
}

/// Element type of every position. Precedence: question type, named entity,
/// function word, then relevant content word for everything else.
pub fn classify_elements(seq: &TokenSequence, config: &AnswerabilityConfig) -> BTreeMap<usize, ElementType> {
    let entities = config.tagger.tag(seq);
    seq.tokens()
        .iter()
        .enumerate()
        .map(|(i, tok)| {
            let t = if config.question_words.contains(tok) {
                ElementType::QuestionType
            } else if entities.get(i).copied().unwrap_or(false) {
                ElementType::NamedEntity
            } else if config.function_words.contains(tok) {
                ElementType::FunctionWord
            } else {
                ElementType::RelevantContentWord
            };
            (i, t)
        })
        .collect()
}

type TypedCounts<'a> = HashMap<ElementType, HashMap<&'a str, usize>>;

fn typed_counts<'a>(seq: &'a TokenSequence, config: &AnswerabilityConfig) -> TypedCounts<'a> {
    let mut out: TypedCounts = HashMap::new();
    for (i, t) in classify_elements(seq, config) {
        *out.entry(t).or_default().entry(seq.tokens()[i].as_str()).or_insert(0) += 1;
    }
    out
}

/// Weighted average of `h_i / k_i` over types with `k_i > 0`, weights
/// renormalized over those types.
fn weighted_rate(
    weights: &ElementWeights,
    matched: &HashMap<ElementType, usize>,
    own: &TypedCounts<'_>,
) -> f64 {
    let mut num = 0.0;
    let mut weight_total = 0.0;
    for t in ElementType::ALL {
        let k: usize = own.get(&t).map_or(0, |m| m.values().sum());
        if k == 0 {
            continue;
        }
        let w = weights.get(t);
        weight_total += w;
        num += w * matched.get(&t).copied().unwrap_or(0) as f64 / k as f64;
    }
    if weight_total == 0.0 {
        0.0
    } else {
        num / weight_total
    }
}

/// Answerability of `candidate` against `reference`, on a 0–100 scale.
///
/// Matching is exact token identity within the same element type, counted
/// with clipping (a reference token can match at most as many candidate
/// tokens as it occurs).
pub fn answerability(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    config: &AnswerabilityConfig,
) -> Result<MetricScore> {
    if candidate.is_empty() || reference.is_empty() {
        return invalid("Answerability needs non-empty candidate and reference");
    }
    let q = typed_counts(candidate, config);
    let r = typed_counts(reference, config);
    let matched: HashMap<ElementType, usize> = ElementType::ALL
        .iter()
        .map(|t| {
            let h = match (q.get(t), r.get(t)) {
                (Some(qc), Some(rc)) => qc
                    .iter()
                    .map(|(w, &c)| c.min(rc.get(w).copied().unwrap_or(0)))
                    .sum(),
                _ => 0,
            };
            (*t, h)
        })
        .collect();
    let p = weighted_rate(&config.weights, &matched, &q);
    let rec = weighted_rate(&config.weights, &matched, &r);
    Ok(MetricScore::new("Answerability", 100.0 * f1(p, rec)))
}
