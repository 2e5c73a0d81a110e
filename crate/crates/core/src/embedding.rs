//! Dense embedding of array windows: marker-aligned insertion of rows
//! copied from a certified generic sample.
//!
//! Given a target frequency profile and a tolerance, an [`EmbeddingPlan`]
//! fixes the depth of the inserted block, certifies a sample whose prefix
//! statistics stay within half the tolerance of the target, and locates a
//! marker set whose occurrence gaps bound the block widths. [`build_phi`]
//! then inserts sample-filled rows on top of a host window, restarting
//! the sample at every marker occurrence, and [`verify_density`] checks
//! that the inserted rows' pattern statistics land within the tolerance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::markers::{self, MarkerError, MarkerSet};
use crate::par;
use crate::symbolic::{
    Alphabet, ArraySchema, ArrayWindow, FrequencyTable, Shape, Subshift, SymbolicError,
};

/// Window width used when deriving a target table from a subshift.
const TARGET_TABLE_COLS: usize = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    /// Sample statistics certify a deviation above the allowed bound;
    /// widening the sample usually helps.
    #[error("sample prefix deviation {error} exceeds bound {bound}")]
    NotGenericEnough { error: f64, bound: f64 },
    #[error("invalid embedding plan: {0}")]
    PlanInvariant(String),
    #[error("gap {gap} after hit at column {hit} outside [{min}, {max}]")]
    GapOutOfRange {
        hit: i64,
        gap: usize,
        min: usize,
        max: usize,
    },
    #[error("window contains fewer marker occurrences than required")]
    NoMarkers,
    #[error("first marker occurrence at column {first_hit} is past the covered prefix bound {bound}")]
    UncoveredPrefix { first_hit: i64, bound: i64 },
    #[error("window with {cols} columns is too narrow, needs more than {min_cols}")]
    WindowTooNarrow { cols: usize, min_cols: usize },
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Marker(#[from] MarkerError),
}

/// Target statistical profile and tolerance for an embedding.
///
/// The tracked shapes must form a ladder: both coordinates nondecreasing
/// and each shape strictly larger than its predecessor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeighborhoodSpec {
    target: FrequencyTable,
    eps: f64,
}

impl NeighborhoodSpec {
    pub fn new(target: FrequencyTable, eps: f64) -> Result<Self, EmbeddingError> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(EmbeddingError::PlanInvariant(format!(
                "tolerance must be positive and finite, got {eps}"
            )));
        }
        let shapes = target.shapes();
        if shapes.is_empty() {
            return Err(EmbeddingError::PlanInvariant(
                "at least one tracked shape required".into(),
            ));
        }
        if shapes.iter().any(|s| s.rows == 0 || s.cols == 0) {
            return Err(EmbeddingError::PlanInvariant(
                "tracked shapes must be nonempty".into(),
            ));
        }
        for pair in shapes.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b.rows < a.rows || b.cols < a.cols || (b.rows == a.rows && b.cols == a.cols) {
                return Err(EmbeddingError::PlanInvariant(format!(
                    "shape ladder must grow, got {}x{} then {}x{}",
                    a.rows, a.cols, b.rows, b.cols
                )));
            }
        }
        Ok(NeighborhoodSpec { target, eps })
    }

    pub fn target(&self) -> &FrequencyTable {
        &self.target
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of shapes on the ladder.
    pub fn shape_cutoff(&self) -> usize {
        self.target.shapes().len()
    }

    pub fn max_pattern_rows(&self) -> usize {
        self.target.shapes().iter().map(|s| s.rows).max().unwrap()
    }

    pub fn max_pattern_cols(&self) -> usize {
        self.target.shapes().iter().map(|s| s.cols).max().unwrap()
    }

    /// Smallest admissible depth for inserted blocks: with widest tracked
    /// shape `n` columns and deepest `k` rows, one more than
    /// `floor(max(2n / eps, k))`.
    pub fn required_block_length(&self) -> usize {
        let n = self.max_pattern_cols() as f64;
        let k = self.max_pattern_rows() as f64;
        (2.0 * n / self.eps).max(k).floor() as usize + 1
    }
}

/// Finite block with certified near-target statistics, copied between
/// marker occurrences.
///
/// The certificate is the worst deviation of any tracked pattern
/// frequency from the target, over every top-anchored prefix window whose
/// width ranges from the block depth to the full sample width.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenericPointSample {
    alphabet: Alphabet,
    cells: Vec<Vec<u8>>,
    certified_error: f64,
}

impl GenericPointSample {
    /// Certifies an explicit grid against the target frequencies in a
    /// [`NeighborhoodSpec`]. Fails with
    /// [`EmbeddingError::NotGenericEnough`] when the deviation exceeds
    /// half the tolerance, or (by convention, with infinite error) when
    /// the grid is too narrow to hold even one full prefix window.
    pub fn from_grid(
        alphabet: Alphabet,
        cells: Vec<Vec<u8>>,
        spec: &NeighborhoodSpec,
    ) -> Result<Self, EmbeddingError> {
        if cells.is_empty() || cells[0].is_empty() {
            return Err(SymbolicError::EmptyWindow.into());
        }
        let depth = cells.len();
        let cols = cells[0].len();
        if cells.iter().any(|r| r.len() != cols) {
            return Err(SymbolicError::RaggedWindow.into());
        }
        for row in &cells {
            for &l in row {
                if (l as usize) >= alphabet.size() {
                    return Err(SymbolicError::LetterOutOfRange {
                        letter: l,
                        size: alphabet.size(),
                    }
                    .into());
                }
            }
        }
        if spec.max_pattern_rows() > depth {
            return Err(EmbeddingError::PlanInvariant(format!(
                "sample depth {depth} shallower than deepest tracked shape"
            )));
        }
        let bound = spec.eps() / 2.0;
        let start = depth.max(spec.max_pattern_cols());
        if cols < start {
            return Err(EmbeddingError::NotGenericEnough {
                error: f64::INFINITY,
                bound,
            });
        }
        let certified_error = prefix_deviation(&cells, spec, start);
        if certified_error > bound {
            return Err(EmbeddingError::NotGenericEnough {
                error: certified_error,
                bound,
            });
        }
        Ok(GenericPointSample {
            alphabet,
            cells,
            certified_error,
        })
    }

    /// Builds the sample from a subshift's generic row, stacked into
    /// `depth` identical rows of width `cols`.
    pub fn from_subshift(
        target: &Subshift,
        spec: &NeighborhoodSpec,
        depth: usize,
        cols: usize,
    ) -> Result<Self, EmbeddingError> {
        if cols < depth.max(spec.max_pattern_cols()) {
            return Err(EmbeddingError::NotGenericEnough {
                error: f64::INFINITY,
                bound: spec.eps() / 2.0,
            });
        }
        let mut row = target.generic_row(cols)?;
        row.truncate(cols);
        GenericPointSample::from_grid(target.alphabet().clone(), vec![row; depth], spec)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells[0].len()
    }

    pub fn cells(&self) -> &[Vec<u8>] {
        &self.cells
    }

    /// Worst certified deviation across all tracked prefix widths.
    pub fn certified_error(&self) -> f64 {
        self.certified_error
    }
}

/// Worst deviation of empirical pattern frequencies from the target over
/// top-anchored prefix windows of width `start..=cols`.
fn prefix_deviation(cells: &[Vec<u8>], spec: &NeighborhoodSpec, start: usize) -> f64 {
    let shapes = spec.target().shapes();
    let cols = cells[0].len();
    let mut counts: Vec<BTreeMap<Vec<u8>, usize>> = vec![BTreeMap::new(); shapes.len()];
    let mut worst = 0.0f64;
    for width in 1..=cols {
        for (i, shape) in shapes.iter().enumerate() {
            if width < shape.cols {
                continue;
            }
            let off = width - shape.cols;
            let mut pat = Vec::with_capacity(shape.rows * shape.cols);
            for row in &cells[..shape.rows] {
                pat.extend_from_slice(&row[off..off + shape.cols]);
            }
            *counts[i].entry(pat).or_insert(0) += 1;
        }
        if width < start {
            continue;
        }
        for (i, shape) in shapes.iter().enumerate() {
            let denom = (width - shape.cols + 1) as f64;
            for (pat, &c) in &counts[i] {
                worst = worst.max((c as f64 / denom - spec.target().value(i, pat)).abs());
            }
            for (pat, f) in spec.target().entries(i) {
                if !counts[i].contains_key(pat) {
                    worst = worst.max(f.value().abs());
                }
            }
        }
    }
    worst
}

/// Everything needed to run the row-insertion map on host windows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingPlan {
    spec: NeighborhoodSpec,
    sample: GenericPointSample,
    marker: MarkerSet,
    marker_row: usize,
}

impl EmbeddingPlan {
    /// Validates the interplay of the parts: the block is at least as
    /// deep as the neighborhood tolerance requires, marker separation
    /// keeps every gap at least that deep, and the sample is wide enough
    /// to fill the largest certified gap.
    pub fn new(
        spec: NeighborhoodSpec,
        sample: GenericPointSample,
        marker: MarkerSet,
        marker_row: usize,
    ) -> Result<Self, EmbeddingError> {
        let depth = sample.depth();
        let required = spec.required_block_length();
        if depth < required {
            return Err(EmbeddingError::PlanInvariant(format!(
                "block depth {depth} below required {required}"
            )));
        }
        if marker.n < depth {
            return Err(EmbeddingError::PlanInvariant(format!(
                "marker separation {} below block depth {depth}",
                marker.n
            )));
        }
        if sample.cols() < marker.covering_bound {
            return Err(EmbeddingError::PlanInvariant(format!(
                "sample width {} cannot fill gaps up to {}",
                sample.cols(),
                marker.covering_bound
            )));
        }
        if spec
            .target()
            .schema()
            .rows
            .iter()
            .any(|a| a != sample.alphabet())
        {
            return Err(EmbeddingError::PlanInvariant(
                "target schema and sample use different alphabets".into(),
            ));
        }
        Ok(EmbeddingPlan {
            spec,
            sample,
            marker,
            marker_row,
        })
    }

    /// End-to-end derivation: target statistics from a long generic
    /// window, marker search on the host at the required separation, and
    /// sample certification. The marker row defaults to the host's top
    /// row.
    pub fn for_subshifts(
        host: &Subshift,
        target: &Subshift,
        shapes: &[Shape],
        eps: f64,
        max_word_len: usize,
    ) -> Result<Self, EmbeddingError> {
        let table = FrequencyTable::of_subshift(target, shapes, TARGET_TABLE_COLS)?;
        let spec = NeighborhoodSpec::new(table, eps)?;
        let depth = spec.required_block_length();
        let marker = markers::find_marker(host, depth, max_word_len)?;
        let cols = (2 * (marker.covering_bound + marker.word_len)).max(2 * depth);
        let sample = GenericPointSample::from_subshift(target, &spec, depth, cols)?;
        EmbeddingPlan::new(spec, sample, marker, 0)
    }

    pub fn spec(&self) -> &NeighborhoodSpec {
        &self.spec
    }

    pub fn sample(&self) -> &GenericPointSample {
        &self.sample
    }

    pub fn marker(&self) -> &MarkerSet {
        &self.marker
    }

    pub fn marker_row(&self) -> usize {
        self.marker_row
    }

    /// Number of rows every insertion adds.
    pub fn block_depth(&self) -> usize {
        self.sample.depth()
    }

    /// Certified range for gaps between consecutive marker occurrences.
    pub fn gap_range(&self) -> (usize, usize) {
        (self.marker.n, self.marker.covering_bound)
    }

    /// Columns further than this from an output column never affect it.
    ///
    /// An inserted cell replays the sample from the nearest occurrence on
    /// its left, which the covering certificate pins within
    /// `covering_bound` columns; occurrence detection reads `word_len`
    /// further.
    pub fn locality_radius(&self) -> usize {
        self.marker.covering_bound + self.marker.word_len
    }
}

/// Output of a marker-aligned insertion, with the bookkeeping needed for
/// density measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddedWindow {
    pub window: ArrayWindow,
    /// Number of inserted rows on top.
    pub new_rows: usize,
    /// Half-open column range covered by complete inter-hit blocks; the
    /// partial segments outside it are excluded from measurement.
    pub measured: (i64, i64),
    /// Columns where blocks start, in the output's coordinates.
    pub hits: Vec<i64>,
}

/// Columns where one of the marker words starts in the given row.
pub fn marker_hits(marker: &MarkerSet, row: &[u8], first_col: i64) -> Vec<i64> {
    let l = marker.word_len;
    if l == 0 || row.len() < l {
        return Vec::new();
    }
    (0..=row.len() - l)
        .filter(|&j| {
            marker
                .words
                .binary_search_by(|w| w.letters().cmp(&row[j..j + l]))
                .is_ok()
        })
        .map(|j| first_col + j as i64)
        .collect()
}

/// Inserts `sample.depth()` new top rows into `x`: between consecutive
/// hits the new rows copy sample columns `0..gap`, restarting at every
/// hit; after the last hit the copy continues until the sample or the
/// window runs out. Cells left of the first hit keep letter 0 as padding;
/// both partial segments sit outside the measured range.
pub fn insert_rows(
    x: &ArrayWindow,
    hits: &[i64],
    sample: &GenericPointSample,
) -> Result<EmbeddedWindow, EmbeddingError> {
    if hits.is_empty() {
        return Err(EmbeddingError::NoMarkers);
    }
    if hits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EmbeddingError::PlanInvariant(
            "marker hits must be strictly increasing".into(),
        ));
    }
    let last = *hits.last().unwrap();
    if hits[0] < x.first_col() || last >= x.end_col() {
        return Err(SymbolicError::ColumnOutOfRange(if hits[0] < x.first_col() {
            hits[0]
        } else {
            last
        })
        .into());
    }
    let depth = sample.depth();
    let (min_gap, max_gap) = (depth, sample.cols());
    let cols = x.cols();
    let mut new_cells = vec![vec![0u8; cols]; depth];
    for pair in hits.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let gap = (b - a) as usize;
        if gap < min_gap || gap > max_gap {
            return Err(EmbeddingError::GapOutOfRange {
                hit: a,
                gap,
                min: min_gap,
                max: max_gap,
            });
        }
        let base = (a - x.first_col()) as usize;
        for (row, src) in new_cells.iter_mut().zip(sample.cells()) {
            row[base..base + gap].copy_from_slice(&src[..gap]);
        }
    }
    let base = (last - x.first_col()) as usize;
    let tail = (cols - base).min(sample.cols());
    for (row, src) in new_cells.iter_mut().zip(sample.cells()) {
        row[base..base + tail].copy_from_slice(&src[..tail]);
    }
    let mut schema_rows = vec![sample.alphabet().clone(); depth];
    schema_rows.extend(x.schema().rows.iter().cloned());
    new_cells.extend(x.rows().iter().cloned());
    let window = ArrayWindow::new(ArraySchema::new(schema_rows), x.first_col(), new_cells)?;
    Ok(EmbeddedWindow {
        window,
        new_rows: depth,
        measured: (hits[0], last),
        hits: hits.to_vec(),
    })
}

/// Runs the full map on one window: detects marker occurrences in the
/// designated host row, then inserts sample-filled rows on top. Requires
/// at least two occurrences so that one complete block exists.
pub fn build_phi(plan: &EmbeddingPlan, x: &ArrayWindow) -> Result<EmbeddedWindow, EmbeddingError> {
    let hits = plan_hits(plan, x)?;
    if hits.len() < 2 {
        return Err(EmbeddingError::NoMarkers);
    }
    insert_rows(x, &hits, plan.sample())
}

/// One-sided variant: blocks fill from the first marker occurrence
/// rightward, then the whole output translates left by `2 * depth - 1`
/// columns and is trimmed back to the original left edge. The translation
/// must discard only covered columns, which pins the first occurrence
/// within `2 * depth - 1` columns of the window start.
pub fn phi_noninvertible(
    plan: &EmbeddingPlan,
    x: &ArrayWindow,
) -> Result<EmbeddedWindow, EmbeddingError> {
    let hits = plan_hits(plan, x)?;
    if hits.is_empty() {
        return Err(EmbeddingError::NoMarkers);
    }
    let shift = 2 * plan.block_depth() as i64 - 1;
    let bound = x.first_col() + shift;
    if hits[0] > bound {
        return Err(EmbeddingError::UncoveredPrefix {
            first_hit: hits[0],
            bound,
        });
    }
    if x.cols() as i64 <= shift {
        return Err(EmbeddingError::WindowTooNarrow {
            cols: x.cols(),
            min_cols: shift as usize,
        });
    }
    let emb = insert_rows(x, &hits, plan.sample())?;
    let window = emb
        .window
        .shift_left(shift)
        .restrict(x.first_col(), x.end_col() - shift)?;
    let lo = (emb.measured.0 - shift).max(x.first_col());
    let hi = (emb.measured.1 - shift).max(lo);
    Ok(EmbeddedWindow {
        window,
        new_rows: emb.new_rows,
        measured: (lo, hi),
        hits: emb.hits.iter().map(|h| h - shift).collect(),
    })
}

fn plan_hits(plan: &EmbeddingPlan, x: &ArrayWindow) -> Result<Vec<i64>, EmbeddingError> {
    if plan.marker_row() >= x.depth() {
        return Err(EmbeddingError::PlanInvariant(format!(
            "marker row {} missing from window of depth {}",
            plan.marker_row(),
            x.depth()
        )));
    }
    Ok(marker_hits(
        plan.marker(),
        x.row(plan.marker_row()),
        x.first_col(),
    ))
}

/// Deviation of one tracked pattern, maximized over a batch of windows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternDeviation {
    pub shape: Shape,
    pub cells: Vec<u8>,
    pub deviation: f64,
}

/// Result of checking embedded windows against the target profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    /// Whether every deviation stays strictly below the tolerance.
    pub inside: bool,
    pub eps: f64,
    pub worst_deviation: f64,
    /// Per-pattern maxima in canonical order: shapes as declared, cell
    /// grids lexicographic.
    pub per_pattern: Vec<PatternDeviation>,
}

/// Measures every tracked pattern on each window's measured range and
/// compares against the target. Windows are processed independently, so
/// the batch shards cleanly; results do not depend on sharding.
pub fn verify_density(
    spec: &NeighborhoodSpec,
    outputs: &[EmbeddedWindow],
) -> Result<DensityReport, EmbeddingError> {
    let shapes = spec.target().shapes();
    let tables: Vec<Result<FrequencyTable, EmbeddingError>> = par::map_slice(outputs, |out| {
        if out.measured.1 <= out.measured.0 {
            return Err(EmbeddingError::PlanInvariant(
                "embedded window has an empty measured range".into(),
            ));
        }
        let w = out.window.restrict(out.measured.0, out.measured.1)?;
        Ok(FrequencyTable::empirical(&w, shapes)?)
    });
    let mut per: Vec<BTreeMap<Vec<u8>, f64>> = vec![BTreeMap::new(); shapes.len()];
    for table in tables {
        let table = table?;
        for (i, slots) in per.iter_mut().enumerate() {
            for (pat, f) in table.entries(i) {
                let dev = (f.value() - spec.target().value(i, pat)).abs();
                let slot = slots.entry(pat.clone()).or_insert(0.0);
                *slot = slot.max(dev);
            }
            for (pat, f) in spec.target().entries(i) {
                if !table.entries(i).contains_key(pat) {
                    let slot = slots.entry(pat.clone()).or_insert(0.0);
                    *slot = slot.max(f.value().abs());
                }
            }
        }
    }
    let mut per_pattern = Vec::new();
    let mut worst = 0.0f64;
    for (i, &shape) in shapes.iter().enumerate() {
        for (cells, &deviation) in &per[i] {
            worst = worst.max(deviation);
            per_pattern.push(PatternDeviation {
                shape,
                cells: cells.clone(),
                deviation,
            });
        }
    }
    Ok(DensityReport {
        inside: worst < spec.eps(),
        eps: spec.eps(),
        worst_deviation: worst,
        per_pattern,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Word;

    fn letter_spec(freq0: f64, eps: f64) -> NeighborhoodSpec {
        let schema = ArraySchema::new(vec![Alphabet::binary()]);
        let table = FrequencyTable::given(
            schema,
            vec![Shape::new(1, 1)],
            vec![vec![(vec![0], freq0), (vec![1], 1.0 - freq0)]],
        );
        NeighborhoodSpec::new(table, eps).unwrap()
    }

    fn ladder_spec(rows: usize, cols: usize, eps: f64) -> NeighborhoodSpec {
        let alphabet = Alphabet::binary();
        let schema = ArraySchema::new(vec![alphabet; rows]);
        let table = FrequencyTable::given(
            schema,
            vec![Shape::new(1, 1), Shape::new(rows, cols)],
            vec![vec![], vec![]],
        );
        NeighborhoodSpec::new(table, eps).unwrap()
    }

    #[test]
    fn block_length_formula() {
        assert_eq!(ladder_spec(3, 5, 0.1).required_block_length(), 101);
        assert_eq!(ladder_spec(10, 2, 1.0).required_block_length(), 11);
        assert_eq!(ladder_spec(2, 4, 0.5).required_block_length(), 17);
    }

    #[test]
    fn shape_ladder_must_grow() {
        let alphabet = Alphabet::binary();
        let schema = ArraySchema::new(vec![alphabet; 2]);
        let table = FrequencyTable::given(
            schema,
            vec![Shape::new(1, 2), Shape::new(2, 1)],
            vec![vec![], vec![]],
        );
        assert!(matches!(
            NeighborhoodSpec::new(table, 0.5),
            Err(EmbeddingError::PlanInvariant(_))
        ));
    }

    #[test]
    fn fibonacci_sample_certification() {
        let phi_inv = (5.0f64.sqrt() - 1.0) / 2.0;
        let fib = Subshift::fibonacci();
        let mut row = fib.generic_row(233).unwrap();
        row.truncate(233);

        // Independent check: worst letter-frequency deviation over every
        // prefix of width >= start.
        let oracle = |start: usize| -> f64 {
            let mut zeros = 0usize;
            let mut worst = 0.0f64;
            for width in 1..=row.len() {
                if row[width - 1] == 0 {
                    zeros += 1;
                }
                if width >= start {
                    let f = zeros as f64 / width as f64;
                    worst = worst.max((f - phi_inv).abs());
                    worst = worst.max(((width - zeros) as f64 / width as f64 - (1.0 - phi_inv)).abs());
                }
            }
            worst
        };

        // Depth 3: the width-4 prefix 0100 deviates by |3/4 - 0.618| ~ 0.132,
        // so certification at tolerance 0.1 must fail.
        let spec = letter_spec(phi_inv, 0.1);
        let err = GenericPointSample::from_grid(
            Alphabet::binary(),
            vec![row.clone(); 3],
            &spec,
        )
        .unwrap_err();
        match err {
            EmbeddingError::NotGenericEnough { error, bound } => {
                assert!((error - oracle(3)).abs() < 1e-12);
                assert!((error - 0.131_966_011_250_105).abs() < 1e-12);
                assert_eq!(bound, 0.05);
            }
            other => panic!("unexpected error {other:?}"),
        }

        // Depth 5 skips the rough shortest prefixes and certifies.
        let sample =
            GenericPointSample::from_grid(Alphabet::binary(), vec![row.clone(); 5], &spec)
                .unwrap();
        assert!((sample.certified_error() - oracle(5)).abs() < 1e-12);
        assert!(sample.certified_error() <= 0.05);
        assert!((sample.certified_error() - 0.048_632_677_916_771_46).abs() < 1e-12);
    }

    #[test]
    fn constant_grid_certifies_exactly() {
        let alphabet = Alphabet::binary();
        let schema = ArraySchema::new(vec![alphabet.clone()]);
        let table = FrequencyTable::given(
            schema,
            vec![Shape::new(1, 1)],
            vec![vec![(vec![1], 1.0)]],
        );
        let spec = NeighborhoodSpec::new(table, 0.5).unwrap();
        let sample =
            GenericPointSample::from_grid(alphabet, vec![vec![1; 8]; 5], &spec).unwrap();
        assert_eq!(sample.certified_error(), 0.0);
    }

    #[test]
    fn narrow_sample_is_rejected_by_convention() {
        let spec = letter_spec(0.5, 1.0);
        let err = GenericPointSample::from_grid(
            Alphabet::binary(),
            vec![vec![0, 1]; 3],
            &spec,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            EmbeddingError::NotGenericEnough { error, .. } if error.is_infinite()
        ));
    }

    fn toy_sample() -> (Alphabet, GenericPointSample) {
        let sample_alphabet =
            Alphabet::new(vec!["P", "Q", "R", "S", "p", "q", "r", "s"]).unwrap();
        let schema = ArraySchema::new(vec![sample_alphabet.clone()]);
        let table =
            FrequencyTable::given(schema, vec![Shape::new(1, 1)], vec![vec![]]);
        let spec = NeighborhoodSpec::new(table, 2.0).unwrap();
        let cells = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]];
        let sample =
            GenericPointSample::from_grid(sample_alphabet.clone(), cells, &spec).unwrap();
        (sample_alphabet, sample)
    }

    #[test]
    fn insert_rows_restarts_sample_at_each_hit() {
        let host = Alphabet::new(vec!["a", "b", "c", "d", "e", "f"]).unwrap();
        let x = ArrayWindow::single_row(host.clone(), 0, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let (sample_alphabet, sample) = toy_sample();
        let emb = insert_rows(&x, &[0, 3], &sample).unwrap();
        assert_eq!(emb.window.depth(), 3);
        assert_eq!(emb.new_rows, 2);
        assert_eq!(sample_alphabet.render(emb.window.row(0)), "PQRPQR");
        assert_eq!(sample_alphabet.render(emb.window.row(1)), "pqrpqr");
        assert_eq!(host.render(emb.window.row(2)), "abcdef");
        assert_eq!(emb.measured, (0, 3));
    }

    #[test]
    fn single_hit_fills_only_the_tail() {
        let host = Alphabet::new(vec!["a", "b", "c", "d", "e", "f"]).unwrap();
        let x = ArrayWindow::single_row(host, 0, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let (_, sample) = toy_sample();
        let emb = insert_rows(&x, &[2], &sample).unwrap();
        assert_eq!(&emb.window.row(0)[..2], &[0, 0], "padding before the hit");
        assert_eq!(&emb.window.row(0)[2..], &[0, 1, 2, 3]);
        assert_eq!(emb.measured, (2, 2), "no complete block to measure");
    }

    #[test]
    fn undersized_gap_is_rejected() {
        let host = Alphabet::new(vec!["a", "b", "c", "d", "e", "f"]).unwrap();
        let x = ArrayWindow::single_row(host, 0, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let (_, sample) = toy_sample();
        let err = insert_rows(&x, &[0, 1], &sample).unwrap_err();
        assert_eq!(
            err,
            EmbeddingError::GapOutOfRange {
                hit: 0,
                gap: 1,
                min: 2,
                max: 4
            }
        );
    }

    fn fib_plan(eps: f64) -> EmbeddingPlan {
        let fib = Subshift::fibonacci();
        EmbeddingPlan::for_subshifts(&fib, &fib, &[Shape::new(1, 1)], eps, 8).unwrap()
    }

    #[test]
    fn full_map_fills_between_marker_hits() {
        let plan = fib_plan(1.0);
        assert_eq!(plan.block_depth(), 3);
        let fib = Subshift::fibonacci();
        let mut row = fib.generic_row(200).unwrap();
        row.truncate(200);
        let x = ArrayWindow::single_row(fib.alphabet().clone(), 0, row.clone()).unwrap();
        let emb = build_phi(&plan, &x).unwrap();
        assert_eq!(emb.window.depth(), 4);
        assert_eq!(emb.window.row(3), row.as_slice(), "host row preserved");
        assert!(emb.hits.len() >= 2);
        let (lo, hi) = plan.gap_range();
        for pair in emb.hits.windows(2) {
            let gap = (pair[1] - pair[0]) as usize;
            assert!(gap >= lo && gap <= hi, "gap {gap} outside [{lo}, {hi}]");
        }
        // Every inter-hit block replays the sample from column 0.
        for pair in emb.hits.windows(2) {
            let gap = (pair[1] - pair[0]) as usize;
            for r in 0..plan.block_depth() {
                for k in 0..gap {
                    assert_eq!(
                        emb.window.cell(r, pair[0] + k as i64).unwrap(),
                        plan.sample().cells()[r][k]
                    );
                }
            }
        }
    }

    #[test]
    fn window_without_markers_is_rejected() {
        let plan = fib_plan(1.0);
        // The certified marker set here is {00}; a strictly alternating
        // row contains no occurrence.
        let row: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        assert!(marker_hits(plan.marker(), &row, 0).is_empty());
        let x = ArrayWindow::single_row(Alphabet::binary(), 0, row).unwrap();
        assert!(matches!(
            build_phi(&plan, &x),
            Err(EmbeddingError::NoMarkers)
        ));
    }

    #[test]
    fn density_of_exactly_tiled_sample_stays_within_certificate() {
        let phi_inv = (5.0f64.sqrt() - 1.0) / 2.0;
        let spec = letter_spec(phi_inv, 0.1);
        let fib = Subshift::fibonacci();
        let mut row = fib.generic_row(233).unwrap();
        row.truncate(233);
        let sample =
            GenericPointSample::from_grid(Alphabet::binary(), vec![row; 5], &spec).unwrap();
        let window = ArrayWindow::new(
            ArraySchema::new(vec![Alphabet::binary(); 5]),
            0,
            sample.cells().to_vec(),
        )
        .unwrap();
        let out = EmbeddedWindow {
            measured: (0, window.end_col()),
            window,
            new_rows: 5,
            hits: vec![0],
        };
        let report = verify_density(&spec, &[out]).unwrap();
        assert!(report.inside);
        assert!(report.worst_deviation <= sample.certified_error());
    }

    #[test]
    fn perturbed_target_forces_failure() {
        let plan = fib_plan(0.5);
        let fib = Subshift::fibonacci();
        let mut row = fib.generic_row(400).unwrap();
        row.truncate(400);
        let x = ArrayWindow::single_row(fib.alphabet().clone(), 0, row).unwrap();
        let out = build_phi(&plan, &x).unwrap();

        let good = verify_density(plan.spec(), std::slice::from_ref(&out)).unwrap();
        assert!(good.inside, "worst {}", good.worst_deviation);

        let eps = plan.spec().eps();
        let freq0 = plan.spec().target().value(0, &[0]);
        let perturbed = letter_spec(freq0 + 2.0 * eps, eps);
        let bad = verify_density(&perturbed, &[out]).unwrap();
        assert!(!bad.inside);
        assert!(bad.worst_deviation >= eps);
    }

    #[test]
    fn one_sided_variant_translates_and_trims() {
        let plan = fib_plan(1.0);
        let shift = 2 * plan.block_depth() as i64 - 1;
        let fib = Subshift::fibonacci();
        let mut row = fib.generic_row(200).unwrap();
        row.truncate(200);
        let x = ArrayWindow::single_row(fib.alphabet().clone(), 0, row).unwrap();
        let two_sided = build_phi(&plan, &x).unwrap();
        let one_sided = phi_noninvertible(&plan, &x).unwrap();
        assert_eq!(one_sided.window.first_col(), 0);
        assert_eq!(one_sided.window.end_col(), x.end_col() - shift);
        // Pure translation of the two-sided output on the common range.
        for r in 0..one_sided.window.depth() {
            for c in 0..one_sided.window.end_col() {
                assert_eq!(
                    one_sided.window.cell(r, c).unwrap(),
                    two_sided.window.cell(r, c + shift).unwrap()
                );
            }
        }
        assert_eq!(
            one_sided.hits,
            two_sided
                .hits
                .iter()
                .map(|h| h - shift)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn late_first_hit_is_uncovered() {
        let plan = fib_plan(1.0);
        let shift = 2 * plan.block_depth() as i64 - 1;
        // Content whose first marker occurrence sits past the shift: an
        // alternating prefix (free of the marker word 00), then generic
        // content whose first occurrence lands beyond the bound.
        let fib = Subshift::fibonacci();
        let mut row: Vec<u8> = (0..2 * shift as usize).map(|i| (i % 2) as u8).collect();
        let mut tail = fib.generic_row(60).unwrap();
        tail.truncate(60);
        row.extend(tail);
        let x = ArrayWindow::single_row(fib.alphabet().clone(), 0, row.clone()).unwrap();
        let hits = marker_hits(plan.marker(), &row, 0);
        assert!(hits[0] > shift, "construction gives a late first hit");
        match phi_noninvertible(&plan, &x) {
            Err(EmbeddingError::UncoveredPrefix { first_hit, bound }) => {
                assert_eq!(first_hit, hits[0]);
                assert_eq!(bound, shift);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn boundary_first_hit_starts_at_column_zero() {
        let plan = fib_plan(1.0);
        let shift = 2 * plan.block_depth() as i64 - 1;
        let fib = Subshift::fibonacci();
        let mut tail = fib.generic_row(120).unwrap();
        tail.truncate(120);
        let base_hits = marker_hits(plan.marker(), &tail, 0);
        // Alternating pad ending in 1, so no marker word 00 appears in it
        // or across the junction; it delays the first hit to the bound.
        let pad = (shift - base_hits[0]) as usize;
        let mut row: Vec<u8> = (0..pad).map(|i| ((pad - i) % 2) as u8).collect();
        row.extend(tail);
        let hits = marker_hits(plan.marker(), &row, 0);
        assert_eq!(hits[0], shift, "construction places the first hit on the bound");
        let x = ArrayWindow::single_row(fib.alphabet().clone(), 0, row).unwrap();
        let out = phi_noninvertible(&plan, &x).unwrap();
        assert_eq!(out.hits[0], 0, "first block begins exactly at column 0");
    }

    #[test]
    fn marker_hit_scan_matches_naive_search() {
        let fib = Subshift::fibonacci();
        let marker = markers::find_marker(&fib, 2, 4).unwrap();
        let mut row = fib.generic_row(80).unwrap();
        row.truncate(80);
        let fast = marker_hits(&marker, &row, 5);
        let slow: Vec<i64> = (0..=row.len() - marker.word_len)
            .filter(|&j| {
                marker
                    .words
                    .iter()
                    .any(|w: &Word| w.letters() == &row[j..j + marker.word_len])
            })
            .map(|j| 5 + j as i64)
            .collect();
        assert_eq!(fast, slow);
    }
}
