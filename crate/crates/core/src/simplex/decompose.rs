//! Disjointification of overlapping finite set families.
//!
//! The first set is kept whole; each later set contributes only what
//! earlier sets have not covered, with a splitter deciding how that
//! difference breaks into pieces. Outputs preserve the union, are
//! pairwise disjoint, each lie inside some input, and appear in input
//! order with the splitter's pieces flattened row-major; empty
//! differences are dropped.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// How the uncovered part of a set splits into canonical pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Splitter {
    /// Keep each difference as a single piece.
    Whole,
    /// Break each difference into singletons, in element order.
    Singletons,
}

/// Disjointifies the family under the given splitter.
pub fn decompose<T: Ord + Clone>(sets: &[BTreeSet<T>], splitter: Splitter) -> Vec<BTreeSet<T>> {
    let mut covered: BTreeSet<T> = BTreeSet::new();
    let mut out = Vec::new();
    for set in sets {
        let difference: BTreeSet<T> = set.difference(&covered).cloned().collect();
        if difference.is_empty() {
            covered.extend(set.iter().cloned());
            continue;
        }
        match splitter {
            Splitter::Whole => out.push(difference.clone()),
            Splitter::Singletons => {
                if covered.is_empty() {
                    // The first surviving set stays whole under every
                    // splitter; only later differences are broken up.
                    out.push(difference.clone());
                } else {
                    for x in &difference {
                        out.push(BTreeSet::from_iter([x.clone()]));
                    }
                }
            }
        }
        covered.extend(set.iter().cloned());
    }
    out
}
