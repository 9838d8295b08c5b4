//! Text primitives shared by every metric.

mod porter;

use std::collections::HashMap;

pub use porter::porter_stem;

use crate::error::{invalid, Result};

const PUNCT: &[char] = &['.', ',', '?', '!', ';', ':', '"', '\'', '(', ')'];

fn is_punct(c: char) -> bool {
    PUNCT.contains(&c)
}

/// A tokenized string.
///
/// `tokens` are lowercased; `surface` keeps the original casing of each token
/// (used by the capitalization-based entity heuristic). Both have equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<String>,
    surface: Vec<String>,
    source: String,
}

impl TokenSequence {
    /// Build a sequence directly from already-tokenized words.
    ///
    /// Words are lowercased; any whitespace inside a word splits it.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Self {
        let joined = words.iter().map(|w| w.as_ref()).collect::<Vec<_>>().join(" ");
        tokenize(&joined, true)
    }

    /// Split on whitespace only; punctuation stays attached to its word.
    pub fn whitespace(text: &str) -> Self {
        let surface: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        Self {
            tokens: surface.iter().map(|w| w.to_lowercase()).collect(),
            source: surface.join(" "),
            surface,
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn surface(&self) -> &[String] {
        &self.surface
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined by single spaces.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Lowercase, split on whitespace and peel punctuation marks off both ends of
/// each chunk into their own tokens. Interior punctuation (`don't`, `u.s`) is
/// kept. With `keep_punct = false` pure-punctuation tokens are dropped.
pub fn tokenize(text: &str, keep_punct: bool) -> TokenSequence {
    let mut surface = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        while start < end && is_punct(chars[start]) {
            start += 1;
        }
        while end > start && is_punct(chars[end - 1]) {
            end -= 1;
        }
        if keep_punct {
            surface.extend(chars[..start].iter().map(|c| c.to_string()));
        }
        if start < end {
            surface.push(chars[start..end].iter().collect::<String>());
        }
        if keep_punct {
            surface.extend(chars[end..].iter().map(|c| c.to_string()));
        }
    }
    let tokens = surface.iter().map(|s| s.to_lowercase()).collect();
    TokenSequence {
        tokens,
        surface,
        source: text.to_string(),
    }
}

/// Contiguous n-grams with multiplicity.
pub fn ngrams(seq: &TokenSequence, n: usize) -> Result<HashMap<&[String], usize>> {
    if n == 0 {
        return invalid("n-gram order must be at least 1");
    }
    Ok(ngram_counts(seq.tokens(), n))
}

pub(crate) fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Length of the longest common subsequence of the two token lists.
pub fn lcs_length(a: &TokenSequence, b: &TokenSequence) -> usize {
    lcs_tokens(a.tokens(), b.tokens())
}

pub(crate) fn lcs_tokens<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    // Two-row DP over a x b.
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn words(seq: &TokenSequence) -> Vec<&str> {
        seq.tokens().iter().map(String::as_str).collect()
    }

    #[test]
    fn tokenize_reference_question() {
        let t = tokenize("What is the address of DCU?", false);
        assert_eq!(words(&t), ["what", "is", "the", "address", "of", "dcu"]);
        assert_eq!(t.surface()[5], "DCU");
        let p = tokenize("What is the address of DCU?", true);
        assert_eq!(p.len(), 7);
        assert_eq!(p.tokens()[6], "?");
    }

    #[test]
    fn tokenize_edge_cases() {
        assert!(tokenize("", false).is_empty());
        assert_eq!(words(&tokenize("A  b\tC", false)), ["a", "b", "c"]);
        assert_eq!(
            words(&tokenize("(AEF) don't U.S.", false)),
            ["aef", "don't", "u.s"]
        );
        assert!(tokenize(" ... ?! ", false).is_empty());
        assert_eq!(tokenize("...", true).len(), 3);
    }

    #[test]
    fn ngram_examples() {
        let s = TokenSequence::from_words(&["a", "b", "a"]);
        let uni = ngrams(&s, 1).unwrap();
        assert_eq!(uni.len(), 2);
        assert_eq!(uni[&["a".to_string()][..]], 2);
        assert_eq!(uni[&["b".to_string()][..]], 1);
        let bi = ngrams(&s, 2).unwrap();
        assert_eq!(bi.len(), 2);
        assert!(bi.values().all(|&c| c == 1));
        let one = TokenSequence::from_words(&["a"]);
        assert!(ngrams(&one, 2).unwrap().is_empty());
        assert!(ngrams(&one, 0).is_err());
    }

    #[test]
    fn lcs_examples() {
        let a = TokenSequence::from_words(&["what", "is", "the", "address", "of"]);
        let b = tokenize("what is the address of dcu", false);
        assert_eq!(lcs_length(&a, &b), 5);
        assert_eq!(lcs_length(&b, &b), 6);
        let c = TokenSequence::from_words(&["x", "y"]);
        assert_eq!(lcs_length(&a, &c), 0);
    }

    fn small_words() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec("[a-e]{1,2}", 0..12)
    }

    proptest! {
        #[test]
        fn unigram_cardinality_equals_length(w in small_words()) {
            let s = TokenSequence::from_words(&w);
            let total: usize = ngrams(&s, 1).unwrap().values().sum();
            prop_assert_eq!(total, s.len());
        }

        #[test]
        fn lcs_symmetric_and_bounded(a in small_words(), b in small_words()) {
            let (a, b) = (TokenSequence::from_words(&a), TokenSequence::from_words(&b));
            let l = lcs_length(&a, &b);
            prop_assert_eq!(l, lcs_length(&b, &a));
            prop_assert!(l <= a.len().min(b.len()));
        }

        #[test]
        fn lcs_of_subsequence_is_its_length(b in small_words(), mask in prop::collection::vec(any::<bool>(), 12)) {
            let a: Vec<String> = b.iter().zip(&mask).filter(|(_, &m)| m).map(|(w, _)| w.clone()).collect();
            let (sa, sb) = (TokenSequence::from_words(&a), TokenSequence::from_words(&b));
            prop_assert_eq!(lcs_length(&sa, &sb), sa.len());
        }

        #[test]
        fn tokenize_deterministic_and_idempotent(text in "[ A-Za-z.,?!'()\t]{0,40}", keep in any::<bool>()) {
            let t = tokenize(&text, keep);
            prop_assert_eq!(&tokenize(t.source(), keep), &t);
            prop_assert!(t.tokens().iter().all(|w| !w.is_empty() && !w.contains(char::is_whitespace)));
            let again = tokenize(&t.joined(), keep);
            prop_assert_eq!(again.tokens(), t.tokens());
        }
    }
}
