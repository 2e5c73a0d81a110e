//! Symbolic phase spaces: alphabets, words, multi-row array windows,
//! rectangle patterns, subshifts, and frequency tables.
//!
//! Points of an array system are bi-infinite columns of symbols, one row
//! per alphabet; at desk scale everything is handled through finite
//! [`ArrayWindow`]s over a window of columns. Letters are stored as
//! `u8` indices into their row's [`Alphabet`]; rendering back to symbol
//! strings goes through the alphabet.

mod frequency;
mod subshift;

pub use frequency::{measure_distance, Frequency, FrequencyTable, Provenance};
pub use subshift::{Subshift, SubshiftKind};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors for symbolic-space construction and queries.
#[derive(Debug, Error, PartialEq)]
pub enum SymbolicError {
    #[error("alphabet needs at least 2 distinct symbols, got {0}")]
    AlphabetTooSmall(usize),
    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(String),
    #[error("letter index {letter} out of range for alphabet of size {size}")]
    LetterOutOfRange { letter: u8, size: usize },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("empty forbidden word")]
    EmptyForbiddenWord,
    #[error("substitution rule for every symbol must be nonempty")]
    EmptySubstitutionRule,
    #[error("admissible language of length {0} is empty")]
    EmptyLanguage(usize),
    #[error("window rows must all span the same column range")]
    RaggedWindow,
    #[error("window has no columns")]
    EmptyWindow,
    #[error("shape {rows}x{cols} exceeds window dimensions {window_rows}x{window_cols}")]
    ShapeTooLarge {
        rows: usize,
        cols: usize,
        window_rows: usize,
        window_cols: usize,
    },
    #[error("frequency tables have different shape lists")]
    ShapeMismatch,
    #[error("column {0} outside window")]
    ColumnOutOfRange(i64),
}

/// Ordered set of distinct symbols; letters are indices into it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from distinct symbols (at least two).
    pub fn new<S: Into<String>>(symbols: Vec<S>) -> Result<Self, SymbolicError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.len() < 2 {
            return Err(SymbolicError::AlphabetTooSmall(symbols.len()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(SymbolicError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Binary alphabet `{"0", "1"}`.
    pub fn binary() -> Self {
        Alphabet::new(vec!["0", "1"]).unwrap()
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbol(&self, letter: u8) -> &str {
        &self.symbols[letter as usize]
    }

    /// Letter index of a symbol string.
    pub fn index_of(&self, symbol: &str) -> Result<u8, SymbolicError> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .map(|i| i as u8)
            .ok_or_else(|| SymbolicError::UnknownSymbol(symbol.to_string()))
    }

    /// Parses a word in which every symbol is a single character.
    pub fn parse_word(&self, text: &str) -> Result<Word, SymbolicError> {
        let letters = text
            .chars()
            .map(|c| self.index_of(&c.to_string()))
            .collect::<Result<Vec<u8>, _>>()?;
        Word::new(self, letters)
    }

    /// Renders letter indices back to a symbol string.
    pub fn render(&self, letters: &[u8]) -> String {
        letters.iter().map(|&l| self.symbol(l)).collect()
    }
}

/// Finite word over an alphabet, stored as letter indices.
///
/// Ordering is lexicographic on letter indices, which is the canonical
/// order used everywhere a word list must be deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    /// Validates every letter against the alphabet.
    pub fn new(alphabet: &Alphabet, letters: Vec<u8>) -> Result<Self, SymbolicError> {
        let size = alphabet.size();
        for &l in &letters {
            if (l as usize) >= size {
                return Err(SymbolicError::LetterOutOfRange { letter: l, size });
            }
        }
        Ok(Word(letters))
    }

    pub(crate) fn from_raw(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        alphabet.render(&self.0)
    }
}

/// Row layout of an array system: one alphabet per row, top row first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySchema {
    pub rows: Vec<Alphabet>,
}

impl ArraySchema {
    pub fn new(rows: Vec<Alphabet>) -> Self {
        ArraySchema { rows }
    }

    pub fn depth(&self) -> usize {
        self.rows.len()
    }
}

/// Shape of a rectangle pattern: `rows` deep (anchored at the top row),
/// `cols` wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

impl Shape {
    pub fn new(rows: usize, cols: usize) -> Self {
        Shape { rows, cols }
    }
}

/// Rectangle pattern: a `rows x cols` grid of letters, row-major.
///
/// Patterns are anchored at row 1 of the array (index 0 here), matching
/// the cylinder sets whose masses frequency tables record.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RectanglePattern {
    pub shape: Shape,
    cells: Vec<u8>,
}

impl RectanglePattern {
    pub fn new(shape: Shape, cells: Vec<u8>) -> Self {
        assert_eq!(cells.len(), shape.rows * shape.cols, "cell count mismatch");
        RectanglePattern { shape, cells }
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// Renders as rows of symbols joined by `|`, e.g. `01|10`.
    pub fn render(&self, schema: &ArraySchema) -> String {
        (0..self.shape.rows)
            .map(|r| {
                let row = &self.cells[r * self.shape.cols..(r + 1) * self.shape.cols];
                schema.rows[r].render(row)
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Finite window of an array system: `schema.depth()` rows over columns
/// `first_col .. first_col + cols`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayWindow {
    schema: ArraySchema,
    first_col: i64,
    cells: Vec<Vec<u8>>,
}

impl ArrayWindow {
    pub fn new(
        schema: ArraySchema,
        first_col: i64,
        cells: Vec<Vec<u8>>,
    ) -> Result<Self, SymbolicError> {
        if cells.is_empty() || cells[0].is_empty() {
            return Err(SymbolicError::EmptyWindow);
        }
        let cols = cells[0].len();
        if cells.len() != schema.depth() || cells.iter().any(|r| r.len() != cols) {
            return Err(SymbolicError::RaggedWindow);
        }
        for (row, alphabet) in cells.iter().zip(&schema.rows) {
            for &l in row {
                if (l as usize) >= alphabet.size() {
                    return Err(SymbolicError::LetterOutOfRange {
                        letter: l,
                        size: alphabet.size(),
                    });
                }
            }
        }
        Ok(ArrayWindow {
            schema,
            first_col,
            cells,
        })
    }

    /// One-row window over a single alphabet.
    pub fn single_row(
        alphabet: Alphabet,
        first_col: i64,
        letters: Vec<u8>,
    ) -> Result<Self, SymbolicError> {
        ArrayWindow::new(ArraySchema::new(vec![alphabet]), first_col, vec![letters])
    }

    pub fn schema(&self) -> &ArraySchema {
        &self.schema
    }

    pub fn depth(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells[0].len()
    }

    pub fn first_col(&self) -> i64 {
        self.first_col
    }

    /// One past the last column index.
    pub fn end_col(&self) -> i64 {
        self.first_col + self.cols() as i64
    }

    /// Letter at (row, absolute column).
    pub fn cell(&self, row: usize, col: i64) -> Result<u8, SymbolicError> {
        if col < self.first_col || col >= self.end_col() {
            return Err(SymbolicError::ColumnOutOfRange(col));
        }
        Ok(self.cells[row][(col - self.first_col) as usize])
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row]
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.cells
    }

    /// Copy of the window restricted to absolute columns `[lo, hi)`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self, SymbolicError> {
        if lo < self.first_col || hi > self.end_col() || lo >= hi {
            return Err(SymbolicError::ColumnOutOfRange(if lo < self.first_col {
                lo
            } else {
                hi
            }));
        }
        let a = (lo - self.first_col) as usize;
        let b = (hi - self.first_col) as usize;
        let cells = self.cells.iter().map(|r| r[a..b].to_vec()).collect();
        ArrayWindow::new(self.schema.clone(), lo, cells)
    }

    /// Window with the same content shifted `delta` columns to the left:
    /// the new window's column `j` holds the old column `j + delta`.
    pub fn shift_left(&self, delta: i64) -> Self {
        let mut w = self.clone();
        w.first_col -= delta;
        w
    }

    /// Pattern of the given shape whose top-left cell sits at `col`.
    pub fn pattern_at(&self, shape: Shape, col: i64) -> Result<RectanglePattern, SymbolicError> {
        if shape.rows > self.depth() || shape.cols > self.cols() {
            return Err(SymbolicError::ShapeTooLarge {
                rows: shape.rows,
                cols: shape.cols,
                window_rows: self.depth(),
                window_cols: self.cols(),
            });
        }
        if col < self.first_col || col + shape.cols as i64 > self.end_col() {
            return Err(SymbolicError::ColumnOutOfRange(col));
        }
        let a = (col - self.first_col) as usize;
        let mut cells = Vec::with_capacity(shape.rows * shape.cols);
        for r in 0..shape.rows {
            cells.extend_from_slice(&self.cells[r][a..a + shape.cols]);
        }
        Ok(RectanglePattern::new(shape, cells))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_singletons() {
        assert!(matches!(
            Alphabet::new(vec!["0"]),
            Err(SymbolicError::AlphabetTooSmall(1))
        ));
        assert!(matches!(
            Alphabet::new(vec!["a", "a"]),
            Err(SymbolicError::DuplicateSymbol(_))
        ));
    }

    #[test]
    fn word_validation_and_order() {
        let ab = Alphabet::binary();
        assert!(Word::new(&ab, vec![0, 1, 1]).is_ok());
        assert!(Word::new(&ab, vec![2]).is_err());
        let w1 = ab.parse_word("011").unwrap();
        let w2 = ab.parse_word("10").unwrap();
        assert!(w1 < w2, "lexicographic on letters");
        assert_eq!(w1.render(&ab), "011");
    }

    #[test]
    fn window_cells_and_restrict() {
        let ab = Alphabet::binary();
        let w = ArrayWindow::single_row(ab.clone(), -2, vec![0, 1, 0, 0, 1]).unwrap();
        assert_eq!(w.cell(0, -2).unwrap(), 0);
        assert_eq!(w.cell(0, 2).unwrap(), 1);
        assert!(w.cell(0, 3).is_err());
        let r = w.restrict(-1, 2).unwrap();
        assert_eq!(r.row(0), &[1, 0, 0]);
        assert_eq!(r.first_col(), -1);
        let s = w.shift_left(1);
        assert_eq!(s.cell(0, 1).unwrap(), w.cell(0, 2).unwrap());
    }

    #[test]
    fn pattern_rendering_joins_rows() {
        let ab = Alphabet::binary();
        let schema = ArraySchema::new(vec![ab.clone(), ab.clone()]);
        let w = ArrayWindow::new(schema.clone(), 0, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let p = w.pattern_at(Shape::new(2, 2), 0).unwrap();
        assert_eq!(p.render(&schema), "01|10");
    }
}
