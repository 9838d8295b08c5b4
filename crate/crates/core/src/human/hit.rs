use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::text::{tokenize, TokenSequence};

use super::ItemKind;

pub const HUMAN_SYSTEM: &str = "Human";
pub const SYSTEMS_PER_HIT: usize = 11;
pub const HIT_SIZE: usize = 20;

const REPEAT_SYSTEMS: usize = 2;
const BADREF_SYSTEMS: usize = 5;
const MAX_ATTEMPTS: usize = 64;

/// Number of words replaced in a question of `n` words.
///
/// Above 20 words the rule is `n / 5`, which drops back to 4 for 21 to 24
/// words.
pub fn badref_span_len(n: usize) -> usize {
    match n {
        0 => 0,
        1..=3 => 1,
        4..=5 => 2,
        6..=8 => 3,
        9..=15 => 4,
        16..=20 => 5,
        _ => n / 5,
    }
}

/// Degrade a question by overwriting a random contiguous span with a span of
/// the same length taken from another passage. For questions longer than two
/// words the first and last words are never touched.
///
/// `passages[current]` is the passage the question belongs to and is never a
/// donor.
pub fn make_bad_reference<R: Rng + ?Sized>(
    question: &TokenSequence,
    passages: &[TokenSequence],
    current: usize,
    rng: &mut R,
) -> Result<TokenSequence> {
    let n = question.len();
    if n == 0 {
        return invalid("cannot degrade an empty question");
    }
    let m = badref_span_len(n);
    let donors: Vec<&TokenSequence> = passages
        .iter()
        .enumerate()
        .filter(|(i, p)| *i != current && p.len() >= m)
        .map(|(_, p)| p)
        .collect();
    if donors.is_empty() {
        return invalid(format!("no donor passage with at least {m} words"));
    }
    let (lo, hi) = if n > 2 { (1, n - 1 - m) } else { (0, n - m) };
    for _ in 0..MAX_ATTEMPTS {
        let start = rng.random_range(lo..=hi);
        let donor = donors[rng.random_range(0..donors.len())];
        let from = rng.random_range(0..=donor.len() - m);
        if donor.tokens()[from..from + m] == question.tokens()[start..start + m] {
            continue;
        }
        let mut words = question.surface().to_vec();
        words.splice(start..start + m, donor.surface()[from..from + m].iter().cloned());
        return Ok(TokenSequence::whitespace(&words.join(" ")));
    }
    invalid("donor passages only offer spans identical to the question")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitItem {
    pub item_id: String,
    pub system: String,
    pub kind: ItemKind,
    pub pair_of: Option<String>,
    pub question: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub hit_id: String,
    pub passage: String,
    pub answer: String,
    pub items: Vec<HitItem>,
}

impl Hit {
    pub fn count(&self, kind: ItemKind) -> usize {
        self.items.iter().filter(|i| i.kind == kind).count()
    }
}

fn item_id(hit: &str, system: &str, kind: ItemKind) -> String {
    format!("{hit}/{system}/{kind}")
}

/// Assemble one HIT: every system's question once, two randomly chosen
/// systems plus Human repeated verbatim, five randomly chosen systems plus
/// Human degraded into bad references. Items are shuffled.
///
/// `passages` is the donor pool for bad references and `passages[current]`
/// the tokenized `passage` of this HIT.
pub fn build_hit<R: Rng + ?Sized>(
    hit_id: &str,
    passage: &str,
    answer: &str,
    questions: &BTreeMap<String, String>,
    passages: &[TokenSequence],
    current: usize,
    rng: &mut R,
) -> Result<Hit> {
    if questions.len() != SYSTEMS_PER_HIT {
        return invalid(format!("a HIT needs {SYSTEMS_PER_HIT} system questions, got {}", questions.len()));
    }
    if !questions.contains_key(HUMAN_SYSTEM) {
        return invalid(format!("a HIT needs a `{HUMAN_SYSTEM}` question"));
    }
    let mut others: Vec<&String> = questions.keys().filter(|s| *s != HUMAN_SYSTEM).collect();
    others.shuffle(rng);
    let human = questions.keys().find(|s| *s == HUMAN_SYSTEM).unwrap();
    let repeats = others[..REPEAT_SYSTEMS].iter().copied().chain([human]);
    let badrefs = others[REPEAT_SYSTEMS..REPEAT_SYSTEMS + BADREF_SYSTEMS].iter().copied().chain([human]);

    let mut items: Vec<HitItem> = questions
        .iter()
        .map(|(s, q)| HitItem {
            item_id: item_id(hit_id, s, ItemKind::Ordinary),
            system: s.clone(),
            kind: ItemKind::Ordinary,
            pair_of: None,
            question: q.clone(),
        })
        .collect();
    for s in repeats {
        items.push(HitItem {
            item_id: item_id(hit_id, s, ItemKind::Repeat),
            system: s.clone(),
            kind: ItemKind::Repeat,
            pair_of: Some(item_id(hit_id, s, ItemKind::Ordinary)),
            question: questions[s].clone(),
        });
    }
    for s in badrefs {
        let q = TokenSequence::whitespace(&questions[s]);
        let bad = make_bad_reference(&q, passages, current, rng)?;
        items.push(HitItem {
            item_id: item_id(hit_id, s, ItemKind::BadReference),
            system: s.clone(),
            kind: ItemKind::BadReference,
            pair_of: Some(item_id(hit_id, s, ItemKind::Ordinary)),
            question: bad.source().to_string(),
        });
    }
    items.shuffle(rng);
    Ok(Hit {
        hit_id: hit_id.into(),
        passage: passage.into(),
        answer: answer.into(),
        items,
    })
}

/// Donor pool entry for a passage: its words without surrounding punctuation.
pub fn donor_tokens(passage: &str) -> TokenSequence {
    tokenize(passage, false)
}
