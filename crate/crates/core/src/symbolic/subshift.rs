//! Subshifts presented by forbidden words (SFT) or by a substitution,
//! with per-length admissible-language caches.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{Alphabet, SymbolicError, Word};

/// Presentation of a subshift.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SubshiftKind {
    /// Shift of finite type: everything avoiding the forbidden words.
    Sft { forbidden: Vec<Word> },
    /// Substitution system: `rules[a]` is the image word of letter `a`.
    Substitution { rules: Vec<Word> },
}

/// One-row subshift with a lazily populated language cache.
///
/// `language(l)` returns the admissible words of length `l` in
/// lexicographic order. Cached lengths are filled under a mutex;
/// concurrent identical queries may recompute but always insert the
/// same value, so callers never observe a partial cache.
#[derive(Debug)]
pub struct Subshift {
    alphabet: Alphabet,
    kind: SubshiftKind,
    languages: Mutex<HashMap<usize, Arc<Vec<Word>>>>,
    /// Substitution iterates per seed letter, grown on demand.
    iterates: Mutex<Vec<Vec<Vec<u8>>>>,
}

impl Clone for Subshift {
    fn clone(&self) -> Self {
        Subshift {
            alphabet: self.alphabet.clone(),
            kind: self.kind.clone(),
            languages: Mutex::new(self.languages.lock().unwrap().clone()),
            iterates: Mutex::new(self.iterates.lock().unwrap().clone()),
        }
    }
}

impl Subshift {
    pub fn sft(alphabet: Alphabet, forbidden: Vec<Word>) -> Result<Self, SymbolicError> {
        if forbidden.iter().any(|w| w.is_empty()) {
            return Err(SymbolicError::EmptyForbiddenWord);
        }
        Ok(Subshift {
            alphabet,
            kind: SubshiftKind::Sft { forbidden },
            languages: Mutex::new(HashMap::new()),
            iterates: Mutex::new(Vec::new()),
        })
    }

    /// Substitution subshift; `rules` must give a nonempty image word per
    /// alphabet letter, in letter order.
    pub fn substitution(alphabet: Alphabet, rules: Vec<Word>) -> Result<Self, SymbolicError> {
        if rules.len() != alphabet.size() || rules.iter().any(|w| w.is_empty()) {
            return Err(SymbolicError::EmptySubstitutionRule);
        }
        let seeds = (0..alphabet.size() as u8).map(|a| vec![a]).collect();
        Ok(Subshift {
            alphabet,
            kind: SubshiftKind::Substitution { rules },
            languages: Mutex::new(HashMap::new()),
            iterates: Mutex::new(vec![seeds]),
        })
    }

    /// Fibonacci substitution 0 -> 01, 1 -> 0 over `{0,1}`.
    pub fn fibonacci() -> Self {
        let ab = Alphabet::binary();
        let rules = vec![ab.parse_word("01").unwrap(), ab.parse_word("0").unwrap()];
        Subshift::substitution(ab, rules).unwrap()
    }

    /// Thue-Morse substitution 0 -> 01, 1 -> 10 over `{0,1}`.
    pub fn thue_morse() -> Self {
        let ab = Alphabet::binary();
        let rules = vec![ab.parse_word("01").unwrap(), ab.parse_word("10").unwrap()];
        Subshift::substitution(ab, rules).unwrap()
    }

    /// Full shift over the given alphabet (no forbidden words).
    pub fn full_shift(alphabet: Alphabet) -> Self {
        Subshift::sft(alphabet, Vec::new()).unwrap()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> &SubshiftKind {
        &self.kind
    }

    /// Admissible words of length `l`, sorted lexicographically.
    ///
    /// SFT: all words avoiding every forbidden word. Substitution: all
    /// length-`l` subwords of substitution iterates of any seed letter,
    /// iterated until the subword set is stable across one application.
    pub fn language(&self, l: usize) -> Result<Arc<Vec<Word>>, SymbolicError> {
        assert!(l > 0, "language length must be positive");
        if let Some(hit) = self.languages.lock().unwrap().get(&l) {
            return Ok(Arc::clone(hit));
        }
        let words = match &self.kind {
            SubshiftKind::Sft { forbidden } => self.sft_language(l, forbidden)?,
            SubshiftKind::Substitution { rules } => self.substitution_language(l, rules),
        };
        if words.is_empty() {
            return Err(SymbolicError::EmptyLanguage(l));
        }
        let arc = Arc::new(words);
        self.languages
            .lock()
            .unwrap()
            .entry(l)
            .or_insert_with(|| Arc::clone(&arc));
        Ok(arc)
    }

    fn sft_language(&self, l: usize, forbidden: &[Word]) -> Result<Vec<Word>, SymbolicError> {
        // Build lengths 1..=l, extending on the right; a new word is
        // admissible iff its parent was and no forbidden word ends at the
        // new position.
        let mut prev: Vec<Vec<u8>> = vec![Vec::new()];
        for len in 1..=l {
            let mut next = Vec::with_capacity(prev.len() * self.alphabet.size());
            for base in &prev {
                for a in 0..self.alphabet.size() as u8 {
                    let mut w = base.clone();
                    w.push(a);
                    let ok = forbidden.iter().all(|f| {
                        let fl = f.len();
                        fl > w.len() || w[w.len() - fl..] != *f.letters()
                    });
                    if ok {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return Err(SymbolicError::EmptyLanguage(len));
            }
            prev = next;
        }
        // Extension order preserves lexicographic order.
        Ok(prev.into_iter().map(Word::from_raw).collect())
    }

    fn substitution_language(&self, l: usize, rules: &[Word]) -> Vec<Word> {
        let mut found: BTreeSet<Vec<u8>> = BTreeSet::new();
        let mut prev_lens: Option<Vec<usize>> = None;
        let mut m = 0usize;
        loop {
            let iterate = self.iterate_level(m, rules);
            let before = found.len();
            let mut max_len = 0usize;
            for word in &iterate {
                max_len = max_len.max(word.len());
                if word.len() >= l {
                    for window in word.windows(l) {
                        found.insert(window.to_vec());
                    }
                }
            }
            let lens: Vec<usize> = iterate.iter().map(|w| w.len()).collect();
            let grew = match &prev_lens {
                Some(p) => lens.iter().zip(p).any(|(a, b)| a > b),
                None => true,
            };
            let stable = prev_lens.is_some() && found.len() == before;
            if stable && (max_len >= l || !grew) {
                break;
            }
            prev_lens = Some(lens);
            m += 1;
        }
        found.into_iter().map(Word::from_raw).collect()
    }

    /// Substitution iterates of every seed at level `m` (level 0 is the
    /// seeds themselves), grown and cached on demand.
    fn iterate_level(&self, m: usize, rules: &[Word]) -> Vec<Vec<u8>> {
        let mut cache = self.iterates.lock().unwrap();
        while cache.len() <= m {
            let last = cache.last().unwrap();
            let next: Vec<Vec<u8>> = last
                .iter()
                .map(|word| {
                    let mut out = Vec::with_capacity(word.len() * 2);
                    for &a in word {
                        out.extend_from_slice(rules[a as usize].letters());
                    }
                    out
                })
                .collect();
            cache.push(next);
        }
        cache[m].clone()
    }

    /// Substitution iterate of the first seed letter, extended until it
    /// has at least `min_len` letters. Errors for presentations whose
    /// iterates never grow that far.
    pub fn generic_row(&self, min_len: usize) -> Result<Vec<u8>, SymbolicError> {
        match &self.kind {
            SubshiftKind::Substitution { rules } => {
                let mut m = 0;
                loop {
                    let it = self.iterate_level(m, rules);
                    if it[0].len() >= min_len {
                        return Ok(it[0][..min_len].to_vec());
                    }
                    if m > 0 && it[0].len() == self.iterate_level(m - 1, rules)[0].len() {
                        return Err(SymbolicError::EmptyLanguage(min_len));
                    }
                    m += 1;
                }
            }
            SubshiftKind::Sft { .. } => {
                // Greedy leftmost admissible extension; adequate for the
                // full shift and other SFTs whose languages extend.
                let mut row: Vec<u8> = Vec::with_capacity(min_len);
                'outer: while row.len() < min_len {
                    for a in 0..self.alphabet.size() as u8 {
                        row.push(a);
                        let ok = match &self.kind {
                            SubshiftKind::Sft { forbidden } => forbidden.iter().all(|f| {
                                f.len() > row.len()
                                    || row[row.len() - f.len()..] != *f.letters()
                            }),
                            _ => unreachable!(),
                        };
                        if ok {
                            continue 'outer;
                        }
                        row.pop();
                    }
                    return Err(SymbolicError::EmptyLanguage(min_len));
                }
                Ok(row)
            }
        }
    }
}
