//! Cost matrices for actuation, sensing, and communication.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::scalar::{s, Scalar};
use crate::SolveError;

/// Dense nonnegative weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix<S: Scalar> {
    mat: DMatrix<S>,
}

#[derive(Serialize, Deserialize)]
struct CostJson {
    rows: usize,
    cols: usize,
    weights: Vec<Vec<f64>>,
}

impl<S: Scalar> CostMatrix<S> {
    pub fn new(mat: DMatrix<S>) -> Result<Self, SolveError> {
        if mat.iter().any(|w| *w < S::zero() || !w.is_finite()) {
            return Err(SolveError::Infeasible {
                reason: "cost weights must be finite and nonnegative".into(),
            });
        }
        Ok(CostMatrix { mat })
    }

    pub fn rows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn cols(&self) -> usize {
        self.mat.ncols()
    }

    pub fn entry(&self, r: usize, c: usize) -> S {
        self.mat[(r, c)]
    }

    /// Parses row-major CSV; an optional header line is skipped. Cells may be
    /// separated by commas or whitespace.
    pub fn parse_csv(text: &str) -> Result<Self, SolveError> {
        let mut rows: Vec<Vec<S>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = trimmed
                .split(|ch: char| ch == ',' || ch.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect();
            let parsed: Result<Vec<f64>, _> = toks.iter().map(|t| t.parse::<f64>()).collect();
            match parsed {
                Ok(vals) => rows.push(vals.into_iter().map(|v| s(v)).collect()),
                Err(_) if rows.is_empty() => continue, // header line
                Err(_) => {
                    return Err(SolveError::Infeasible {
                        reason: format!("cost file line {} is not numeric", lineno + 1),
                    })
                }
            }
        }
        if rows.is_empty() {
            return Err(SolveError::EmptyProblem);
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(SolveError::Infeasible {
                reason: "cost file rows have inconsistent lengths".into(),
            });
        }
        let nrows = rows.len();
        let mat = DMatrix::from_fn(nrows, cols, |r, c| rows[r][c]);
        Self::new(mat)
    }

    pub fn parse_json(text: &str) -> Result<Self, SolveError> {
        let raw: CostJson = serde_json::from_str(text)
            .map_err(|e| SolveError::Infeasible { reason: format!("cost JSON: {e}") })?;
        if raw.weights.len() != raw.rows || raw.weights.iter().any(|r| r.len() != raw.cols) {
            return Err(SolveError::Infeasible {
                reason: "cost JSON dimensions disagree with weights".into(),
            });
        }
        let mat = DMatrix::from_fn(raw.rows, raw.cols, |r, c| s(raw.weights[r][c]));
        Self::new(mat)
    }

    /// Warnings when actuation weights vary within a row (the cost is meant
    /// to depend only on the state actuated). Violations are tolerated.
    pub fn row_uniform_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in 0..self.rows() {
            let first = self.entry(r, 0);
            if (1..self.cols()).any(|c| self.entry(r, c) != first) {
                out.push(format!("cost row {} is not uniform across columns", r + 1));
            }
        }
        out
    }

    pub fn col_uniform_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in 0..self.cols() {
            let first = self.entry(0, c);
            if (1..self.rows()).any(|r| self.entry(r, c) != first) {
                out.push(format!("cost column {} is not uniform across rows", c + 1));
            }
        }
        out
    }
}

/// Either a uniform weight per placed cell or an explicit matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum CostSpec<S: Scalar> {
    Uniform(S),
    Matrix(CostMatrix<S>),
}

impl<S: Scalar> Default for CostSpec<S> {
    fn default() -> Self {
        CostSpec::Uniform(S::one())
    }
}

impl<S: Scalar> CostSpec<S> {
    /// Checks explicit matrices against the expected frame.
    pub fn check_dims(&self, rows: usize, cols: usize) -> Result<(), SolveError> {
        match self {
            CostSpec::Uniform(_) => Ok(()),
            CostSpec::Matrix(m) if m.rows() == rows && m.cols() == cols => Ok(()),
            CostSpec::Matrix(m) => Err(SolveError::CostDimensionMismatch {
                rows: m.rows(),
                cols: m.cols(),
                expected_rows: rows,
                expected_cols: cols,
            }),
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> S {
        match self {
            CostSpec::Uniform(w) => *w,
            CostSpec::Matrix(m) => m.entry(r, c),
        }
    }

    /// Weight of actuating state `i` (0-based); explicit matrices read
    /// column 0 of row `i` under the row-uniform convention.
    pub fn state_row_weight(&self, i: usize) -> S {
        match self {
            CostSpec::Uniform(w) => *w,
            CostSpec::Matrix(m) => m.entry(i, 0),
        }
    }

    /// Weight of sensing state `j` (0-based); explicit matrices read row 0.
    pub fn state_col_weight(&self, j: usize) -> S {
        match self {
            CostSpec::Uniform(w) => *w,
            CostSpec::Matrix(m) => m.entry(0, j),
        }
    }
}
