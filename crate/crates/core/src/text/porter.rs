//! Porter (1980) suffix-stripping stemmer, original rule set.

use crate::error::{invalid, Result};

struct Word {
    b: Vec<char>,
}

impl Word {
    fn is_cons(&self, i: usize) -> bool {
        match self.b[i] {
            'a' | 'e' | 'i' | 'o' | 'u' => false,
            'y' => i == 0 || !self.is_cons(i - 1),
            _ => true,
        }
    }

    /// Measure m of `b[..len]`, the number of VC sequences.
    fn measure(&self, len: usize) -> usize {
        let mut m = 0;
        let mut i = 0;
        while i < len && self.is_cons(i) {
            i += 1;
        }
        loop {
            while i < len && !self.is_cons(i) {
                i += 1;
            }
            if i >= len {
                return m;
            }
            while i < len && self.is_cons(i) {
                i += 1;
            }
            m += 1;
        }
    }

    fn has_vowel(&self, len: usize) -> bool {
        (0..len).any(|i| !self.is_cons(i))
    }

    fn double_cons(&self, len: usize) -> bool {
        len >= 2 && self.b[len - 1] == self.b[len - 2] && self.is_cons(len - 1)
    }

    /// *o: stem ends cvc where the final c is not w, x or y.
    fn cvc(&self, len: usize) -> bool {
        len >= 3
            && self.is_cons(len - 3)
            && !self.is_cons(len - 2)
            && self.is_cons(len - 1)
            && !matches!(self.b[len - 1], 'w' | 'x' | 'y')
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let s: Vec<char> = suffix.chars().collect();
        self.b.len() >= s.len() && self.b[self.b.len() - s.len()..] == s[..]
    }

    fn stem_len(&self, suffix: &str) -> usize {
        self.b.len() - suffix.chars().count()
    }

    fn replace(&mut self, suffix: &str, with: &str) {
        let keep = self.stem_len(suffix);
        self.b.truncate(keep);
        self.b.extend(with.chars());
    }

    /// Apply the first rule whose suffix matches (tables are ordered so that
    /// the longest matching suffix comes first); if its condition on the stem
    /// fails, no other rule of the step fires.
    fn apply_step(&mut self, rules: &[(&str, &str)], cond: impl Fn(&Word, usize) -> bool) {
        let mut ordered: Vec<&(&str, &str)> = rules.iter().collect();
        ordered.sort_by_key(|(s, _)| std::cmp::Reverse(s.len()));
        if let Some((suffix, with)) = ordered.into_iter().find(|(s, _)| self.ends_with(s)) {
            if cond(self, self.stem_len(suffix)) {
                self.replace(suffix, with);
            }
        }
    }

    fn step1a(&mut self) {
        if self.ends_with("sses") {
            self.replace("sses", "ss");
        } else if self.ends_with("ies") {
            self.replace("ies", "i");
        } else if self.ends_with("ss") {
        } else if self.ends_with("s") {
            self.replace("s", "");
        }
    }

    fn step1b(&mut self) {
        if self.ends_with("eed") {
            if self.measure(self.stem_len("eed")) > 0 {
                self.replace("eed", "ee");
            }
            return;
        }
        let removed = ["ed", "ing"].into_iter().any(|suf| {
            if self.ends_with(suf) && self.has_vowel(self.stem_len(suf)) {
                self.replace(suf, "");
                true
            } else {
                false
            }
        });
        if !removed {
            return;
        }
        if self.ends_with("at") || self.ends_with("bl") || self.ends_with("iz") {
            self.b.push('e');
        } else if self.double_cons(self.b.len())
            && !matches!(self.b[self.b.len() - 1], 'l' | 's' | 'z')
        {
            self.b.pop();
        } else if self.measure(self.b.len()) == 1 && self.cvc(self.b.len()) {
            self.b.push('e');
        }
    }

    fn step1c(&mut self) {
        if self.ends_with("y") && self.has_vowel(self.stem_len("y")) {
            self.replace("y", "i");
        }
    }

    fn step2(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("ational", "ate"),
            ("tional", "tion"),
            ("enci", "ence"),
            ("anci", "ance"),
            ("izer", "ize"),
            ("abli", "able"),
            ("alli", "al"),
            ("entli", "ent"),
            ("eli", "e"),
            ("ousli", "ous"),
            ("ization", "ize"),
            ("ation", "ate"),
            ("ator", "ate"),
            ("alism", "al"),
            ("iveness", "ive"),
            ("fulness", "ful"),
            ("ousness", "ous"),
            ("aliti", "al"),
            ("iviti", "ive"),
            ("biliti", "ble"),
        ];
        self.apply_step(RULES, |w, len| w.measure(len) > 0);
    }

    fn step3(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("icate", "ic"),
            ("ative", ""),
            ("alize", "al"),
            ("iciti", "ic"),
            ("ical", "ic"),
            ("ful", ""),
            ("ness", ""),
        ];
        self.apply_step(RULES, |w, len| w.measure(len) > 0);
    }

    fn step4(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("al", ""),
            ("ance", ""),
            ("ence", ""),
            ("er", ""),
            ("ic", ""),
            ("able", ""),
            ("ible", ""),
            ("ant", ""),
            ("ement", ""),
            ("ment", ""),
            ("ent", ""),
            ("ion", ""),
            ("ou", ""),
            ("ism", ""),
            ("ate", ""),
            ("iti", ""),
            ("ous", ""),
            ("ive", ""),
            ("ize", ""),
        ];
        self.apply_step(RULES, |w, len| {
            if w.measure(len) <= 1 {
                return false;
            }
            // "ion" needs the stem to end in s or t.
            if w.b.len() - len == 3 && w.ends_with("ion") {
                return len > 0 && matches!(w.b[len - 1], 's' | 't');
            }
            true
        });
    }

    fn step5(&mut self) {
        if self.ends_with("e") {
            let len = self.stem_len("e");
            let m = self.measure(len);
            if m > 1 || (m == 1 && !self.cvc(len)) {
                self.b.pop();
            }
        }
        let n = self.b.len();
        if self.measure(n) > 1 && self.double_cons(n) && self.b[n - 1] == 'l' {
            self.b.pop();
        }
    }
}

/// Stem a single lowercase token. Tokens of one or two characters are
/// returned unchanged.
pub fn porter_stem(word: &str) -> Result<String> {
    if word.is_empty() {
        return invalid("cannot stem an empty token");
    }
    if word.chars().count() <= 2 {
        return Ok(word.to_string());
    }
    let mut w = Word {
        b: word.chars().collect(),
    };
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5();
    Ok(w.b.into_iter().collect())
}
