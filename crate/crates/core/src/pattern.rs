//! Selective structural patterns over the alphabet {0, x, *}.
//!
//! A cell is either forced zero, forced nonzero, or unconstrained. A pair of
//! square patterns (E, A) describes a family of matrix pencils A - lambda*E;
//! [`lambda_pattern`] collapses the pair into the pattern of the pencil seen
//! as a function of lambda.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::PatternError;

/// One cell of a selective structural matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternEntry {
    /// Forced zero (`0`).
    Zero,
    /// Forced nonzero (`x`).
    Nonzero,
    /// Unconstrained: may be any real value (`*`).
    Free,
}

impl PatternEntry {
    /// Text symbol used by the pattern file format.
    pub fn symbol(self) -> char {
        match self {
            PatternEntry::Zero => '0',
            PatternEntry::Nonzero => 'x',
            PatternEntry::Free => '*',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '0' => Some(PatternEntry::Zero),
            'x' => Some(PatternEntry::Nonzero),
            '*' => Some(PatternEntry::Free),
            _ => None,
        }
    }

    /// True for `Nonzero` and `Free`: the cell is not forced to vanish.
    pub fn can_be_nonzero(self) -> bool {
        !matches!(self, PatternEntry::Zero)
    }
}

impl fmt::Display for PatternEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Dense rectangular matrix over [`PatternEntry`], row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SelectivePattern {
    rows: usize,
    cols: usize,
    entries: Vec<PatternEntry>,
}

impl SelectivePattern {
    /// All-`Zero` pattern of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "pattern dimensions must be positive");
        SelectivePattern {
            rows,
            cols,
            entries: vec![PatternEntry::Zero; rows * cols],
        }
    }

    /// Pattern with every cell set to `entry`.
    pub fn filled(rows: usize, cols: usize, entry: PatternEntry) -> Self {
        let mut p = Self::zeros(rows, cols);
        p.entries.fill(entry);
        p
    }

    /// Identity-shaped pattern: `Nonzero` diagonal, `Zero` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut p = Self::zeros(n, n);
        for i in 0..n {
            p.set(i, i, PatternEntry::Nonzero);
        }
        p
    }

    /// Builds from a row-major closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> PatternEntry) -> Self {
        let mut p = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                p.set(r, c, f(r, c));
            }
        }
        p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> PatternEntry {
        assert!(r < self.rows && c < self.cols, "pattern index out of range");
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: PatternEntry) {
        assert!(r < self.rows && c < self.cols, "pattern index out of range");
        self.entries[r * self.cols + c] = e;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Horizontal concatenation `[self | right]`.
    pub fn hstack(&self, right: &SelectivePattern) -> Result<Self, PatternError> {
        if self.rows != right.rows {
            return Err(PatternError::DimensionMismatch {
                context: "hstack",
                left: (self.rows, self.cols),
                right: (right.rows, right.cols),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + right.cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                right.get(r, c - self.cols)
            }
        }))
    }

    /// Vertical concatenation `[self; below]`.
    pub fn vstack(&self, below: &SelectivePattern) -> Result<Self, PatternError> {
        if self.cols != below.cols {
            return Err(PatternError::DimensionMismatch {
                context: "vstack",
                left: (self.rows, self.cols),
                right: (below.rows, below.cols),
            });
        }
        Ok(Self::from_fn(self.rows + below.rows, self.cols, |r, c| {
            if r < self.rows {
                self.get(r, c)
            } else {
                below.get(r - self.rows, c)
            }
        }))
    }

    /// Non-`Zero` column indices of row `r`.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c).can_be_nonzero()).collect()
    }

    /// Non-`Zero` row indices of column `c`.
    pub fn col_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c).can_be_nonzero()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, PatternEntry)> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| (r, c, self.get(r, c))))
    }

    /// Parses the whitespace-separated text format.
    ///
    /// One row per line, cells drawn from `{0, x, *}`, `#` starts a comment
    /// line. Errors carry 1-based line/column positions of the offending
    /// token.
    pub fn parse(text: &str) -> Result<Self, PatternError> {
        let mut grid: Vec<Vec<PatternEntry>> = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for (tok_no, tok) in trimmed.split_whitespace().enumerate() {
                if tok.chars().count() != 1 {
                    return Err(PatternError::UnknownSymbol {
                        symbol: tok.to_string(),
                        line: line_no + 1,
                        col: tok_no + 1,
                    });
                }
                let ch = tok.chars().next().unwrap();
                let entry = PatternEntry::from_symbol(ch).ok_or(PatternError::UnknownSymbol {
                    symbol: tok.to_string(),
                    line: line_no + 1,
                    col: tok_no + 1,
                })?;
                row.push(entry);
            }
            if let Some(first) = grid.first() {
                if row.len() != first.len() {
                    return Err(PatternError::RaggedRow {
                        line: line_no + 1,
                        expected: first.len(),
                        found: row.len(),
                    });
                }
            }
            grid.push(row);
        }
        if grid.is_empty() || grid[0].is_empty() {
            return Err(PatternError::Empty);
        }
        let rows = grid.len();
        let cols = grid[0].len();
        Ok(SelectivePattern {
            rows,
            cols,
            entries: grid.into_iter().flatten().collect(),
        })
    }

    /// Inverse of [`SelectivePattern::parse`]; rows separated by newlines.
    pub fn serialize_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    out.push(' ');
                }
                out.push(self.get(r, c).symbol());
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for SelectivePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SelectivePattern {}x{}", self.rows, self.cols)?;
        write!(f, "{}", self.serialize_text())
    }
}

impl fmt::Display for SelectivePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize_text())
    }
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    rows: usize,
    cols: usize,
    cells: Vec<String>,
}

impl Serialize for SelectivePattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let cells = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).symbol()).collect())
            .collect();
        PatternJson { rows: self.rows, cols: self.cols, cells }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SelectivePattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PatternJson::deserialize(deserializer)?;
        if raw.rows == 0 || raw.cols == 0 {
            return Err(D::Error::custom("pattern dimensions must be positive"));
        }
        if raw.cells.len() != raw.rows {
            return Err(D::Error::custom(format!(
                "expected {} cell strings, found {}",
                raw.rows,
                raw.cells.len()
            )));
        }
        let mut p = SelectivePattern::zeros(raw.rows, raw.cols);
        for (r, row) in raw.cells.iter().enumerate() {
            if row.chars().count() != raw.cols {
                return Err(D::Error::custom(format!(
                    "row {} has {} cells, expected {}",
                    r + 1,
                    row.chars().count(),
                    raw.cols
                )));
            }
            for (c, ch) in row.chars().enumerate() {
                let entry = PatternEntry::from_symbol(ch)
                    .ok_or_else(|| D::Error::custom(format!("unknown symbol {ch:?} at row {} col {}", r + 1, c + 1)))?;
                p.set(r, c, entry);
            }
        }
        Ok(p)
    }
}

/// Square pattern pair (E, A) of a descriptor pencil A - lambda*E.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilPattern {
    e: SelectivePattern,
    a: SelectivePattern,
}

impl PencilPattern {
    pub fn new(e: SelectivePattern, a: SelectivePattern) -> Result<Self, PatternError> {
        if e.rows() != e.cols() {
            return Err(PatternError::NotSquare { rows: e.rows(), cols: e.cols() });
        }
        if e.rows() != a.rows() || e.cols() != a.cols() {
            return Err(PatternError::DimensionMismatch {
                context: "pencil (E, A)",
                left: (e.rows(), e.cols()),
                right: (a.rows(), a.cols()),
            });
        }
        Ok(PencilPattern { e, a })
    }

    pub fn n(&self) -> usize {
        self.e.rows()
    }

    pub fn e_pattern(&self) -> &SelectivePattern {
        &self.e
    }

    pub fn a_pattern(&self) -> &SelectivePattern {
        &self.a
    }

    /// Pencil pair of the transposed system, used by observability duality.
    pub fn transpose(&self) -> Self {
        PencilPattern { e: self.e.transpose(), a: self.a.transpose() }
    }
}

/// Pattern of A - lambda*E over all lambda.
///
/// Cell (i, j) is `Nonzero` when A forces a nonzero there and E forces a
/// zero (the entry stays A_ij for every lambda), `Zero` when both force
/// zeros, and `Free` otherwise: either A is unconstrained or E contributes a
/// lambda-dependent term that can cancel anything.
pub fn lambda_pattern(pencil: &PencilPattern) -> SelectivePattern {
    let e = pencil.e_pattern();
    let a = pencil.a_pattern();
    SelectivePattern::from_fn(a.rows(), a.cols(), |r, c| match (a.get(r, c), e.get(r, c)) {
        (PatternEntry::Nonzero, PatternEntry::Zero) => PatternEntry::Nonzero,
        (PatternEntry::Zero, PatternEntry::Zero) => PatternEntry::Zero,
        _ => PatternEntry::Free,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> SelectivePattern {
        SelectivePattern::parse(s).unwrap()
    }

    #[test]
    fn parse_basic() {
        let p = parse("x 0\n* x");
        assert_eq!(p.rows(), 2);
        assert_eq!(p.cols(), 2);
        assert_eq!(p.get(0, 0), PatternEntry::Nonzero);
        assert_eq!(p.get(0, 1), PatternEntry::Zero);
        assert_eq!(p.get(1, 0), PatternEntry::Free);
        assert_eq!(p.get(1, 1), PatternEntry::Nonzero);
    }

    #[test]
    fn parse_comments_and_blanks() {
        let p = parse("# header\n\nx 0\n# middle\n* x\n");
        assert_eq!(p.rows(), 2);
    }

    #[test]
    fn parse_unknown_symbol_position() {
        let err = SelectivePattern::parse("x 0\n* x q").unwrap_err();
        match err {
            PatternError::UnknownSymbol { symbol, line, col } => {
                assert_eq!(symbol, "q");
                assert_eq!(line, 2);
                assert_eq!(col, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_ragged_row() {
        let err = SelectivePattern::parse("x 0\nx").unwrap_err();
        match err {
            PatternError::RaggedRow { line, expected, found } => {
                assert_eq!((line, expected, found), (2, 2, 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn text_round_trip() {
        let p = parse("x 0 *\n0 * x\nx x 0");
        let back = SelectivePattern::parse(&p.serialize_text()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn json_round_trip() {
        let p = parse("x 0 *\n0 * x");
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"cells\":[\"x0*\",\"0*x\"]"), "{json}");
        let back: SelectivePattern = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn lambda_rule_cases() {
        // E cell, A cell -> expected lambda cell.
        let cases = [
            (PatternEntry::Zero, PatternEntry::Nonzero, PatternEntry::Nonzero),
            (PatternEntry::Nonzero, PatternEntry::Zero, PatternEntry::Free),
            (PatternEntry::Zero, PatternEntry::Zero, PatternEntry::Zero),
            (PatternEntry::Zero, PatternEntry::Free, PatternEntry::Free),
            (PatternEntry::Free, PatternEntry::Nonzero, PatternEntry::Free),
            (PatternEntry::Nonzero, PatternEntry::Nonzero, PatternEntry::Free),
        ];
        for (e_cell, a_cell, want) in cases {
            let e = SelectivePattern::filled(1, 1, e_cell);
            let a = SelectivePattern::filled(1, 1, a_cell);
            let pencil = PencilPattern::new(e, a).unwrap();
            assert_eq!(lambda_pattern(&pencil).get(0, 0), want, "E={e_cell:?} A={a_cell:?}");
        }
    }

    #[test]
    fn lambda_monotone_in_e() {
        // Turning an E cell from Zero to Nonzero never makes the lambda cell
        // more constrained: Nonzero/Zero cells can only move to Free.
        for a_cell in [PatternEntry::Zero, PatternEntry::Nonzero, PatternEntry::Free] {
            let a = SelectivePattern::filled(1, 1, a_cell);
            let before = lambda_pattern(
                &PencilPattern::new(SelectivePattern::filled(1, 1, PatternEntry::Zero), a.clone()).unwrap(),
            )
            .get(0, 0);
            let after = lambda_pattern(
                &PencilPattern::new(SelectivePattern::filled(1, 1, PatternEntry::Nonzero), a).unwrap(),
            )
            .get(0, 0);
            assert!(
                after == before || after == PatternEntry::Free,
                "E Zero->Nonzero moved {before:?} to {after:?}"
            );
        }
    }
}
