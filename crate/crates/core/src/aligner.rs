//! Local alignment of unit sequences with iterative extraction of
//! non-overlapping matches.
//!
//! The scoring matrix `H` has `(N+1)×(M+1)` cells, row `i` belonging to `x_i`
//! and column `j` to `y_j` (1-based; row and column 0 are the zero border):
//!
//! ```text
//! H[i][j] = max(H[i-1][j-1] + sim(x_i, y_j), H[i-1][j] - W, H[i][j-1] - W, 0)
//! ```
//!
//! Extraction repeatedly takes the highest cell (ties: lowest `i + j`, then
//! lowest `i`), traces back to the first zero (move ties: diagonal, up, left),
//! pins every cell on that path to zero for good, and recomputes the cells
//! below and to the right of the path. Scores are integers throughout.

use crate::error::{Error, Result};

/// Substitution scores and the linear gap penalty.
pub trait Similarity {
    fn sim(&self, a: u32, b: u32) -> i32;
    /// Penalty `W >= 0` subtracted per inserted or deleted unit.
    fn gap_penalty(&self) -> i32;
    /// Largest score any single aligned column can add.
    fn max_sim(&self) -> i32;
}

/// Exact-match scoring: `match_score` for equal units, `mismatch_score`
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoringScheme {
    match_score: i32,
    mismatch_score: i32,
    gap_penalty: i32,
}

impl Default for ScoringScheme {
    fn default() -> Self {
        Self { match_score: 1, mismatch_score: -1, gap_penalty: 1 }
    }
}

impl ScoringScheme {
    pub fn new(match_score: i32, mismatch_score: i32, gap_penalty: i32) -> Result<Self> {
        if match_score <= 0 {
            return Err(Error::InvalidArgument(format!("match score must be positive, got {match_score}")));
        }
        if mismatch_score >= 0 {
            return Err(Error::InvalidArgument(format!("mismatch score must be negative, got {mismatch_score}")));
        }
        if gap_penalty < 0 {
            return Err(Error::InvalidArgument(format!("gap penalty must be non-negative, got {gap_penalty}")));
        }
        Ok(Self { match_score, mismatch_score, gap_penalty })
    }

    pub fn match_score(&self) -> i32 {
        self.match_score
    }

    pub fn mismatch_score(&self) -> i32 {
        self.mismatch_score
    }
}

impl Similarity for ScoringScheme {
    #[inline]
    fn sim(&self, a: u32, b: u32) -> i32 {
        if a == b {
            self.match_score
        } else {
            self.mismatch_score
        }
    }

    #[inline]
    fn gap_penalty(&self) -> i32 {
        self.gap_penalty
    }

    fn max_sim(&self) -> i32 {
        self.match_score
    }
}

/// Dense row-major scoring matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<i32>,
}

impl ScoreMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, cells: vec![0; rows * cols] }
    }

    /// Number of rows, `N + 1`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns, `M + 1`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.cells[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i32] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_value(&self) -> i32 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    /// Highest cell, ties broken by lowest `i + j` then lowest `i`.
    pub fn best_cell(&self) -> Option<(usize, usize, i32)> {
        let mut best: Option<(usize, usize, i32)> = None;
        for i in 1..self.rows {
            for j in 1..self.cols {
                let v = self.get(i, j);
                let better = match best {
                    None => true,
                    Some((bi, bj, bv)) => v > bv || (v == bv && (i + j, i) < (bi + bj, bi)),
                };
                if better {
                    best = Some((i, j, v));
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// `x_i` aligned with `y_j` (match or substitution).
    Diag,
    /// `x_i` aligned with a gap.
    Up,
    /// `y_j` aligned with a gap.
    Left,
}

/// One cell of a traceback path, in matrix coordinates (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathStep {
    pub i: usize,
    pub j: usize,
    pub step: Move,
}

/// A local alignment between `x[x_span.0..=x_span.1]` and
/// `y[y_span.0..=y_span.1]` (0-based sequence positions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalMatch {
    pub x_span: (usize, usize),
    pub y_span: (usize, usize),
    pub score: i32,
    /// Path cells ordered by increasing `i + j`.
    pub path: Vec<PathStep>,
}

impl LocalMatch {
    /// The aligned columns as `(x unit, y unit)`, `None` marking a gap.
    pub fn columns(&self, x: &[u32], y: &[u32]) -> Vec<(Option<u32>, Option<u32>)> {
        self.path
            .iter()
            .map(|s| match s.step {
                Move::Diag => (Some(x[s.i - 1]), Some(y[s.j - 1])),
                Move::Up => (Some(x[s.i - 1]), None),
                Move::Left => (None, Some(y[s.j - 1])),
            })
            .collect()
    }

    /// The same alignment with the roles of `x` and `y` exchanged.
    pub fn transposed(&self) -> LocalMatch {
        LocalMatch {
            x_span: self.y_span,
            y_span: self.x_span,
            score: self.score,
            path: self
                .path
                .iter()
                .map(|s| PathStep {
                    i: s.j,
                    j: s.i,
                    step: match s.step {
                        Move::Diag => Move::Diag,
                        Move::Up => Move::Left,
                        Move::Left => Move::Up,
                    },
                })
                .collect(),
        }
    }
}

#[inline]
fn cell_value<S: Similarity + ?Sized>(diag: i32, up: i32, left: i32, a: u32, b: u32, scheme: &S) -> i32 {
    let w = scheme.gap_penalty();
    (diag + scheme.sim(a, b)).max(up - w).max(left - w).max(0)
}

/// Fills `H` for `x` (rows) against `y` (columns).
pub fn fill_scoring_matrix<S: Similarity + ?Sized>(x: &[u32], y: &[u32], scheme: &S) -> ScoreMatrix {
    let mut h = ScoreMatrix::zeros(x.len() + 1, y.len() + 1);
    recompute(&mut h, None, x, y, scheme, 1, 1);
    h
}

/// Fills `H` from scratch with `pinned` cells (row-major mask of the same
/// shape) held at zero.
pub fn fill_scoring_matrix_pinned<S: Similarity + ?Sized>(
    x: &[u32],
    y: &[u32],
    scheme: &S,
    pinned: &[bool],
) -> ScoreMatrix {
    let mut h = ScoreMatrix::zeros(x.len() + 1, y.len() + 1);
    assert_eq!(pinned.len(), h.cells.len(), "pin mask shape");
    recompute(&mut h, Some(pinned), x, y, scheme, 1, 1);
    h
}

fn recompute<S: Similarity + ?Sized>(
    h: &mut ScoreMatrix,
    pinned: Option<&[bool]>,
    x: &[u32],
    y: &[u32],
    scheme: &S,
    first_row: usize,
    first_col: usize,
) {
    let cols = h.cols;
    for i in first_row.max(1)..h.rows {
        let xi = x[i - 1];
        for j in first_col.max(1)..cols {
            let idx = i * cols + j;
            h.cells[idx] = if pinned.is_some_and(|p| p[idx]) {
                0
            } else {
                let up = h.cells[idx - cols];
                cell_value(h.cells[idx - cols - 1], up, h.cells[idx - 1], xi, y[j - 1], scheme)
            };
        }
    }
}

/// Follows the moves that produced `H[i][j]` back to the first zero.
fn trace_from<S: Similarity + ?Sized>(h: &ScoreMatrix, x: &[u32], y: &[u32], scheme: &S, start: (usize, usize)) -> LocalMatch {
    let w = scheme.gap_penalty();
    let (mut i, mut j) = start;
    let mut path = Vec::new();
    while i > 0 && j > 0 && h.get(i, j) > 0 {
        let v = h.get(i, j);
        let step = if h.get(i - 1, j - 1) + scheme.sim(x[i - 1], y[j - 1]) == v {
            Move::Diag
        } else if h.get(i - 1, j) - w == v {
            Move::Up
        } else if h.get(i, j - 1) - w == v {
            Move::Left
        } else {
            unreachable!("cell ({i}, {j}) is inconsistent with the recurrence");
        };
        path.push(PathStep { i, j, step });
        match step {
            Move::Diag => {
                i -= 1;
                j -= 1;
            }
            Move::Up => i -= 1,
            Move::Left => j -= 1,
        }
    }
    path.reverse();

    let rows = path.iter().filter(|s| s.step != Move::Left).map(|s| s.i - 1);
    let cols = path.iter().filter(|s| s.step != Move::Up).map(|s| s.j - 1);
    let span = |it: &mut dyn Iterator<Item = usize>| {
        it.fold((usize::MAX, 0), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    LocalMatch {
        x_span: span(&mut rows.into_iter()),
        y_span: span(&mut cols.into_iter()),
        score: h.get(start.0, start.1),
        path,
    }
}

/// The best local alignment in `h`, if its score reaches `tau`.
pub fn traceback<S: Similarity + ?Sized>(
    h: &ScoreMatrix,
    x: &[u32],
    y: &[u32],
    scheme: &S,
    tau: i32,
) -> Option<LocalMatch> {
    let (i, j, v) = h.best_cell()?;
    if v < tau.max(1) {
        return None;
    }
    Some(trace_from(h, x, y, scheme, (i, j)))
}

/// All non-overlapping local alignments scoring at least `tau`, in extraction
/// order (scores non-increasing).
pub fn find_matches<S: Similarity + ?Sized>(x: &[u32], y: &[u32], scheme: &S, tau: i32) -> Vec<LocalMatch> {
    Aligner::default().find_matches(x, y, scheme, tau)
}

/// Reusable extraction state. Buffers are kept between calls so one aligner
/// per worker can serve many sequence pairs.
#[derive(Debug, Clone, Default)]
pub struct Aligner {
    h: ScoreMatrix,
    pinned: Vec<bool>,
}

impl Default for ScoreMatrix {
    fn default() -> Self {
        ScoreMatrix::zeros(1, 1)
    }
}

impl Aligner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fills the matrix for a new pair and clears all pins.
    pub fn load<S: Similarity + ?Sized>(&mut self, x: &[u32], y: &[u32], scheme: &S) {
        self.reset_shape(x.len() + 1, y.len() + 1);
        recompute(&mut self.h, None, x, y, scheme, 1, 1);
    }

    /// Like [`Aligner::load`], with cells where `pin(i, j)` holds (1-based
    /// matrix coordinates) held at zero from the start.
    pub fn load_with_pins<S: Similarity + ?Sized>(
        &mut self,
        x: &[u32],
        y: &[u32],
        scheme: &S,
        pin: impl Fn(usize, usize) -> bool,
    ) {
        self.reset_shape(x.len() + 1, y.len() + 1);
        let cols = self.h.cols;
        for i in 1..self.h.rows {
            for j in 1..cols {
                self.pinned[i * cols + j] = pin(i, j);
            }
        }
        recompute(&mut self.h, Some(&self.pinned), x, y, scheme, 1, 1);
    }

    fn reset_shape(&mut self, rows: usize, cols: usize) {
        self.h.rows = rows;
        self.h.cols = cols;
        self.h.cells.clear();
        self.h.cells.resize(rows * cols, 0);
        self.pinned.clear();
        self.pinned.resize(rows * cols, false);
    }

    pub fn matrix(&self) -> &ScoreMatrix {
        &self.h
    }

    /// Row-major mask of pinned cells.
    pub fn pinned(&self) -> &[bool] {
        &self.pinned
    }

    /// Extracts the next match scoring at least `tau` (treated as at least 1),
    /// pins its path and rescores the affected region.
    pub fn extract_next<S: Similarity + ?Sized>(
        &mut self,
        x: &[u32],
        y: &[u32],
        scheme: &S,
        tau: i32,
    ) -> Option<LocalMatch> {
        let m = traceback(&self.h, x, y, scheme, tau)?;
        let cols = self.h.cols;
        let (mut first_row, mut first_col) = (usize::MAX, usize::MAX);
        for s in &m.path {
            self.pinned[s.i * cols + s.j] = true;
            first_row = first_row.min(s.i);
            first_col = first_col.min(s.j);
        }
        // Cells above or left of the path only depend on cells that are
        // likewise unaffected.
        recompute(&mut self.h, Some(&self.pinned), x, y, scheme, first_row, first_col);
        Some(m)
    }

    pub fn find_matches<S: Similarity + ?Sized>(&mut self, x: &[u32], y: &[u32], scheme: &S, tau: i32) -> Vec<LocalMatch> {
        self.load(x, y, scheme);
        self.drain(x, y, scheme, tau)
    }

    /// Extracts matches from the currently loaded matrix until none reach `tau`.
    pub fn drain<S: Similarity + ?Sized>(&mut self, x: &[u32], y: &[u32], scheme: &S, tau: i32) -> Vec<LocalMatch> {
        let mut out = Vec::new();
        while let Some(m) = self.extract_next(x, y, scheme, tau) {
            out.push(m);
        }
        out
    }
}
