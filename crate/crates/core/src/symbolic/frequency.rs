//! Empirical frequency tables over rectangle patterns and a weak-star
//! distance between tables.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{ArraySchema, ArrayWindow, Shape, Subshift, SymbolicError};

/// Largest window width for which frequencies are kept as exact rationals.
const EXACT_DENOMINATOR_CAP: usize = 1_000_000;

/// A pattern frequency: exact rational when it came from counting a
/// window of at most 10^6 columns, floating otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Frequency {
    Exact(Ratio<i64>),
    Approx(f64),
}

impl Frequency {
    pub fn value(&self) -> f64 {
        match self {
            Frequency::Exact(r) => r.to_f64().unwrap(),
            Frequency::Approx(x) => *x,
        }
    }
}

/// Where a table's numbers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Counted over a window with this many columns.
    Empirical { window_cols: usize },
    /// Supplied as target values.
    Given,
}

/// Frequencies of rectangle patterns, grouped by shape.
///
/// Shapes keep their declared order; within a shape, patterns sit in
/// lexicographic order of their row-major cells. That combined order is
/// the canonical enumeration used by [`measure_distance`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrequencyTable {
    schema: ArraySchema,
    shapes: Vec<Shape>,
    per_shape: Vec<BTreeMap<Vec<u8>, Frequency>>,
    provenance: Provenance,
}

impl FrequencyTable {
    /// Counts pattern occurrences in a window: for each shape `(k, n)`,
    /// occurrences anchored at the top `k` rows over all `cols - n + 1`
    /// horizontal offsets.
    pub fn empirical(window: &ArrayWindow, shapes: &[Shape]) -> Result<Self, SymbolicError> {
        let cols = window.cols();
        let mut per_shape = Vec::with_capacity(shapes.len());
        for &shape in shapes {
            if shape.rows == 0
                || shape.cols == 0
                || shape.rows > window.depth()
                || shape.cols > cols
            {
                return Err(SymbolicError::ShapeTooLarge {
                    rows: shape.rows,
                    cols: shape.cols,
                    window_rows: window.depth(),
                    window_cols: cols,
                });
            }
            let places = cols - shape.cols + 1;
            let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
            for j in 0..places {
                let mut cells = Vec::with_capacity(shape.rows * shape.cols);
                for r in 0..shape.rows {
                    cells.extend_from_slice(&window.row(r)[j..j + shape.cols]);
                }
                *counts.entry(cells).or_insert(0) += 1;
            }
            let entries = counts
                .into_iter()
                .map(|(cells, c)| {
                    let f = if places <= EXACT_DENOMINATOR_CAP {
                        Frequency::Exact(Ratio::new(c as i64, places as i64))
                    } else {
                        Frequency::Approx(c as f64 / places as f64)
                    };
                    (cells, f)
                })
                .collect();
            per_shape.push(entries);
        }
        Ok(FrequencyTable {
            schema: window.schema().clone(),
            shapes: shapes.to_vec(),
            per_shape,
            provenance: Provenance::Empirical { window_cols: cols },
        })
    }

    /// Table with supplied target values.
    pub fn given(
        schema: ArraySchema,
        shapes: Vec<Shape>,
        entries: Vec<Vec<(Vec<u8>, f64)>>,
    ) -> Self {
        assert_eq!(shapes.len(), entries.len(), "one entry list per shape");
        let per_shape = entries
            .into_iter()
            .map(|list| {
                list.into_iter()
                    .map(|(cells, v)| (cells, Frequency::Approx(v)))
                    .collect()
            })
            .collect();
        FrequencyTable {
            schema,
            shapes,
            per_shape,
            provenance: Provenance::Given,
        }
    }

    /// Empirical table of a one-row subshift, counted on a length-`cols`
    /// generic row stacked as deep as the widest shape requires.
    pub fn of_subshift(
        subshift: &Subshift,
        shapes: &[Shape],
        cols: usize,
    ) -> Result<Self, SymbolicError> {
        let depth = shapes.iter().map(|s| s.rows).max().unwrap_or(1);
        let row = subshift.generic_row(cols)?;
        let schema = ArraySchema::new(vec![subshift.alphabet().clone(); depth]);
        let window = ArrayWindow::new(schema, 0, vec![row; depth])?;
        FrequencyTable::empirical(&window, shapes)
    }

    pub fn schema(&self) -> &ArraySchema {
        &self.schema
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Patterns recorded for the `i`-th declared shape.
    pub fn entries(&self, i: usize) -> &BTreeMap<Vec<u8>, Frequency> {
        &self.per_shape[i]
    }

    /// Frequency of a pattern under the `i`-th shape; absent patterns
    /// have frequency zero.
    pub fn value(&self, i: usize, cells: &[u8]) -> f64 {
        self.per_shape[i]
            .get(cells)
            .map(|f| f.value())
            .unwrap_or(0.0)
    }

    /// Exact sum of the `i`-th shape's frequencies, when all are exact.
    pub fn exact_sum(&self, i: usize) -> Option<Ratio<i64>> {
        let mut total = Ratio::zero();
        for f in self.per_shape[i].values() {
            match f {
                Frequency::Exact(r) => total += r,
                Frequency::Approx(_) => return None,
            }
        }
        Some(total)
    }

    pub fn float_sum(&self, i: usize) -> f64 {
        self.per_shape[i].values().map(|f| f.value()).sum()
    }

    /// CSV export: `shape_k,shape_n,pattern,frequency`, one row per
    /// pattern in canonical enumeration order. Pattern rows are joined
    /// by `|`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("shape_k,shape_n,pattern,frequency\n");
        for (i, shape) in self.shapes.iter().enumerate() {
            for (cells, f) in &self.per_shape[i] {
                let pattern = super::RectanglePattern::new(*shape, cells.clone());
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    shape.rows,
                    shape.cols,
                    pattern.render(&self.schema),
                    f.value()
                ));
            }
        }
        out
    }
}

/// Weak-star distance between two tables over the same shape list:
/// `sum over m of 2^-m * |a(R_m) - b(R_m)|`, where `R_m` enumerates the
/// union of both tables' patterns shape by shape (declared order) and
/// lexicographically within each shape, starting at `m = 1`. Patterns
/// missing from a table count as frequency zero.
pub fn measure_distance(a: &FrequencyTable, b: &FrequencyTable) -> Result<f64, SymbolicError> {
    if a.shapes != b.shapes {
        return Err(SymbolicError::ShapeMismatch);
    }
    let mut m = 0u32;
    let mut total = 0.0;
    for i in 0..a.shapes.len() {
        let keys: BTreeSet<&Vec<u8>> = a.per_shape[i].keys().chain(b.per_shape[i].keys()).collect();
        for cells in keys {
            m += 1;
            let diff = (a.value(i, cells) - b.value(i, cells)).abs();
            total += diff * 2f64.powi(-(m as i32));
        }
    }
    Ok(total)
}
