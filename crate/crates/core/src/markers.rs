//! Marker word sets for subshifts.
//!
//! A set `W` of admissible length-`L` words is an `n`-marker when
//! (separation) in every admissible word, two occurrences of words from
//! `W` start at least `n` columns apart, and (covering) there is an `N`
//! such that every admissible word of length `L + N - 1` contains an
//! occurrence of some word from `W`. Both conditions are certified by
//! exhaustive scans over cached languages, so a verdict is only as good
//! as the lengths scanned; those lengths are recorded in the result.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par;
use crate::symbolic::{Subshift, SymbolicError, Word};

/// Default covering-bound cap as a multiple of the separation `n`.
pub const COVERING_CAP_FACTOR: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum MarkerError {
    #[error("no marker found up to word length {max_word_len} with covering cap {covering_cap}")]
    NotFound {
        max_word_len: usize,
        covering_cap: usize,
    },
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// Word lengths over which the two marker conditions were scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateLengths {
    pub separation: usize,
    pub covering: usize,
}

/// A certified marker set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkerSet {
    /// Separation distance.
    pub n: usize,
    /// Length of every marker word.
    pub word_len: usize,
    /// Marker words in lexicographic order.
    pub words: Vec<Word>,
    /// Smallest certified covering bound.
    pub covering_bound: usize,
    pub certificate_lengths: CertificateLengths,
}

/// Outcome of verifying a candidate marker set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkerCheck {
    /// Whether separation holds.
    pub separated: bool,
    /// Smallest covering bound `N` up to the cap, if any.
    pub covering_bound: Option<usize>,
    /// An admissible word violating separation, when `separated` is false.
    pub witness: Option<Word>,
    /// Cap used for the covering scan.
    pub covering_cap: usize,
}

/// Offsets at which any word of `wset` (all of length `l`) starts in `w`.
fn occurrences(w: &[u8], wset: &HashMap<&[u8], usize>, l: usize) -> Vec<usize> {
    if w.len() < l {
        return Vec::new();
    }
    (0..=w.len() - l)
        .filter(|&j| wset.contains_key(&w[j..j + l]))
        .collect()
}

fn word_set(words: &[Word]) -> HashMap<&[u8], usize> {
    words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.letters(), i))
        .collect()
}

/// Verifies the marker conditions for `words` at separation `n`.
///
/// Separation is scanned over the admissible words of length
/// `L + n - 1`; the covering bound is the smallest `N <= covering_cap`
/// such that every admissible word of length `L + N - 1` contains a
/// marker word. Assumes all `words` share one length and are admissible.
pub fn verify_marker(
    subshift: &Subshift,
    words: &[Word],
    n: usize,
    covering_cap: usize,
) -> Result<MarkerCheck, MarkerError> {
    assert!(n >= 1, "separation must be at least 1");
    assert!(!words.is_empty(), "marker candidate must be nonempty");
    let l = words[0].len();
    assert!(
        words.iter().all(|w| w.len() == l),
        "marker words must share one length"
    );
    let wset = word_set(words);

    let sep_lang = subshift.language(l + n - 1)?;
    let violation = par::find_first(&sep_lang, |w| {
        let occ = occurrences(w.letters(), &wset, l);
        occ.windows(2).any(|p| p[1] - p[0] < n)
    });
    if let Some(idx) = violation {
        return Ok(MarkerCheck {
            separated: false,
            covering_bound: None,
            witness: Some(sep_lang[idx].clone()),
            covering_cap,
        });
    }

    let mut covering_bound = None;
    for n_prime in 1..=covering_cap {
        let lang = subshift.language(l + n_prime - 1)?;
        // A word of length L + N' - 1 contains a marker start at offset
        // <= N' - 1 iff it contains one anywhere.
        let covered = par::all(&lang, |w| {
            !occurrences(w.letters(), &wset, l).is_empty()
        });
        if covered {
            covering_bound = Some(n_prime);
            break;
        }
    }
    Ok(MarkerCheck {
        separated: true,
        covering_bound,
        witness: None,
        covering_cap,
    })
}

/// Searches for an `n`-marker: for each word length `L = 1..=max_word_len`
/// the candidate pool is the admissible language in lexicographic order;
/// words are added greedily whenever separation is preserved, and the
/// grown set is kept if it covers within the cap `4n`.
pub fn find_marker(
    subshift: &Subshift,
    n: usize,
    max_word_len: usize,
) -> Result<MarkerSet, MarkerError> {
    find_marker_with_cap(subshift, n, max_word_len, COVERING_CAP_FACTOR * n)
}

/// [`find_marker`] with an explicit covering cap.
pub fn find_marker_with_cap(
    subshift: &Subshift,
    n: usize,
    max_word_len: usize,
    covering_cap: usize,
) -> Result<MarkerSet, MarkerError> {
    assert!(n >= 1);
    for l in 1..=max_word_len {
        let candidates = subshift.language(l)?;
        let sep_lang = subshift.language(l + n - 1)?;
        let cand_set = word_set(&candidates);

        // Occurrence offsets of every candidate in every separation-scan
        // word, computed once: every window of an admissible word is an
        // admissible word, hence some candidate.
        let occ_index: Vec<Vec<(usize, usize)>> = par::map_slice(&sep_lang, |w| {
            let letters = w.letters();
            (0..=letters.len() - l)
                .filter_map(|j| cand_set.get(&letters[j..j + l]).map(|&c| (j, c)))
                .collect()
        });

        let mut selected = vec![false; candidates.len()];
        // Per separation-scan word, sorted offsets of selected candidates.
        let mut chosen_offsets: Vec<Vec<usize>> = vec![Vec::new(); sep_lang.len()];
        for (c, slot) in selected.iter_mut().enumerate() {
            let mut ok = true;
            'words: for (w_idx, occ) in occ_index.iter().enumerate() {
                let mine: Vec<usize> =
                    occ.iter().filter(|&&(_, ci)| ci == c).map(|&(j, _)| j).collect();
                if mine.is_empty() {
                    continue;
                }
                for pair in mine.windows(2) {
                    if pair[1] - pair[0] < n {
                        ok = false;
                        break 'words;
                    }
                }
                let existing = &chosen_offsets[w_idx];
                for &j in &mine {
                    let pos = existing.partition_point(|&e| e < j);
                    if pos < existing.len() && existing[pos] - j < n {
                        ok = false;
                        break 'words;
                    }
                    if pos > 0 && j - existing[pos - 1] < n {
                        ok = false;
                        break 'words;
                    }
                }
            }
            if !ok {
                continue;
            }
            *slot = true;
            for (w_idx, occ) in occ_index.iter().enumerate() {
                for &(j, ci) in occ {
                    if ci == c {
                        let pos = chosen_offsets[w_idx].partition_point(|&e| e < j);
                        chosen_offsets[w_idx].insert(pos, j);
                    }
                }
            }
        }

        let words: Vec<Word> = candidates
            .iter()
            .zip(&selected)
            .filter(|&(_, &s)| s)
            .map(|(w, _)| w.clone())
            .collect();
        if words.is_empty() {
            continue;
        }

        let wset = word_set(&words);
        for n_prime in 1..=covering_cap {
            let lang = subshift.language(l + n_prime - 1)?;
            let covered = par::all(&lang, |w| {
                !occurrences(w.letters(), &wset, l).is_empty()
            });
            if covered {
                return Ok(MarkerSet {
                    n,
                    word_len: l,
                    words,
                    covering_bound: n_prime,
                    certificate_lengths: CertificateLengths {
                        separation: l + n - 1,
                        covering: l + n_prime - 1,
                    },
                });
            }
        }
    }
    Err(MarkerError::NotFound {
        max_word_len,
        covering_cap,
    })
}

/// Smallest and largest gaps between consecutive marker occurrences over
/// all admissible words of length `L + 2N`. Every such word contains at
/// least two occurrences once the covering bound is certified.
pub fn gap_bounds(
    subshift: &Subshift,
    marker: &MarkerSet,
) -> Result<(usize, usize), MarkerError> {
    let l = marker.word_len;
    let wset = word_set(&marker.words);
    let lang = subshift.language(l + 2 * marker.covering_bound)?;
    let mut min_gap = usize::MAX;
    let mut max_gap = 0usize;
    for w in lang.iter() {
        let occ = occurrences(w.letters(), &wset, l);
        for pair in occ.windows(2) {
            let gap = pair[1] - pair[0];
            min_gap = min_gap.min(gap);
            max_gap = max_gap.max(gap);
        }
    }
    Ok((min_gap, max_gap))
}

/// True when no admissible word of length `2n` is fully periodic with
/// some period `p < n` — the finite-scale stand-in for aperiodicity that
/// marker search presumes.
pub fn aperiodicity_surrogate(subshift: &Subshift, n: usize) -> Result<bool, MarkerError> {
    let lang = subshift.language(2 * n)?;
    let periodic = lang.iter().any(|w| {
        let ls = w.letters();
        (1..n).any(|p| (0..ls.len() - p).all(|i| ls[i] == ls[i + p]))
    });
    Ok(!periodic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Alphabet;

    fn render_all(words: &[Word], s: &Subshift) -> Vec<String> {
        words.iter().map(|w| w.render(s.alphabet())).collect()
    }

    #[test]
    fn fibonacci_single_one_is_a_two_marker() {
        let fib = Subshift::fibonacci();
        let w = vec![fib.alphabet().parse_word("1").unwrap()];
        let check = verify_marker(&fib, &w, 2, 8).unwrap();
        assert!(check.separated);
        assert_eq!(check.covering_bound, Some(3));
    }

    #[test]
    fn fibonacci_single_one_fails_separation_three() {
        let fib = Subshift::fibonacci();
        let w = vec![fib.alphabet().parse_word("1").unwrap()];
        let check = verify_marker(&fib, &w, 3, 12).unwrap();
        assert!(!check.separated);
        assert_eq!(
            check.witness.unwrap().render(fib.alphabet()),
            "101",
            "ones two apart violate separation 3"
        );
    }

    #[test]
    fn all_single_letters_form_a_one_marker() {
        let fib = Subshift::fibonacci();
        let words = fib.language(1).unwrap().to_vec();
        let check = verify_marker(&fib, &words, 1, 4).unwrap();
        assert!(check.separated);
        assert_eq!(check.covering_bound, Some(1));
    }

    #[test]
    fn find_marker_reproduces_fibonacci_certificate() {
        let fib = Subshift::fibonacci();
        let m = find_marker(&fib, 2, 4).unwrap();
        assert_eq!(m.word_len, 1);
        assert_eq!(render_all(&m.words, &fib), vec!["1"]);
        assert_eq!(m.covering_bound, 3);
        assert_eq!(m.certificate_lengths.separation, 2);
        assert_eq!(m.certificate_lengths.covering, 3);
    }

    #[test]
    fn full_shift_has_no_marker_at_separation_two() {
        let full = Subshift::full_shift(Alphabet::binary());
        let err = find_marker(&full, 2, 4).unwrap_err();
        assert_eq!(
            err,
            MarkerError::NotFound {
                max_word_len: 4,
                covering_cap: 8
            }
        );
    }

    #[test]
    fn full_shift_fails_aperiodicity_surrogate() {
        let full = Subshift::full_shift(Alphabet::binary());
        assert!(!aperiodicity_surrogate(&full, 2).unwrap());
        let fib = Subshift::fibonacci();
        assert!(aperiodicity_surrogate(&fib, 2).unwrap());
        assert!(aperiodicity_surrogate(&fib, 3).unwrap());
    }

    #[test]
    fn gap_bounds_respect_certificates() {
        let fib = Subshift::fibonacci();
        let m = find_marker(&fib, 2, 4).unwrap();
        let (min_gap, max_gap) = gap_bounds(&fib, &m).unwrap();
        assert!(min_gap >= m.n);
        assert!(max_gap <= m.covering_bound);
    }

    #[test]
    fn found_markers_pass_independent_verification() {
        for s in [Subshift::fibonacci(), Subshift::thue_morse()] {
            for n in 2..=4 {
                let m = find_marker(&s, n, 16).unwrap();
                let check = verify_marker(&s, &m.words, n, 4 * n).unwrap();
                assert!(check.separated);
                assert_eq!(check.covering_bound, Some(m.covering_bound));
            }
        }
    }
}
