//! Partial, full, and improper Latin squares, validation, and density
//! statistics.
//!
//! Symbols are 1-based (`1..=n`); a blank cell is stored as `0`. Grids are
//! flat row-major `Vec<u16>`, which admits orders up to 65535.

use std::fmt;
use thiserror::Error;

/// A symbol of a Latin square of some order `n`; the value is in `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u16);

impl Symbol {
    pub fn get(self) -> u16 {
        self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SquareError {
    #[error("input is not an n x n array: row {row} has length {len}, expected {expected}")]
    NonSquareInput { row: usize, len: usize, expected: usize },
    #[error("symbol {symbol} out of range 1..={order} at cell ({row}, {col})")]
    SymbolOutOfRange { row: usize, col: usize, symbol: u16, order: usize },
    #[error("symbol {symbol} repeated in row {row} (first clash at column {col})")]
    DuplicateInRow { row: usize, col: usize, symbol: u16 },
    #[error("symbol {symbol} repeated in column {col} (first clash at row {row})")]
    DuplicateInColumn { row: usize, col: usize, symbol: u16 },
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("square is not fully filled at cell ({row}, {col})")]
    Blank { row: usize, col: usize },
}

/// An `n x n` grid of symbols with optional blanks and no repeat in any
/// row or column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLatinSquare {
    n: usize,
    cells: Vec<u16>, // 0 = blank
}

/// A fully filled partial Latin square: every row and column is a
/// permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u16>,
}

/// Validates an array of optional symbols as a partial Latin square.
///
/// Violations are reported for the first offending cell in row-major
/// order, so error messages are stable across runs.
pub fn validate_partial(rows: &[Vec<Option<u16>>]) -> Result<PartialLatinSquare, SquareError> {
    let n = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(SquareError::NonSquareInput { row: i + 1, len: r.len(), expected: n });
        }
    }
    let mut cells = vec![0u16; n * n];
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            if let Some(s) = v {
                if s == 0 || s as usize > n {
                    return Err(SquareError::SymbolOutOfRange {
                        row: i + 1,
                        col: j + 1,
                        symbol: s,
                        order: n,
                    });
                }
                cells[i * n + j] = s;
            }
        }
    }
    PartialLatinSquare::from_raw(n, cells)
}

impl PartialLatinSquare {
    /// Builds from a flat row-major grid with `0` as blank, checking the
    /// no-repeat invariants. The first violation in row-major order wins.
    pub fn from_raw(n: usize, cells: Vec<u16>) -> Result<Self, SquareError> {
        assert_eq!(cells.len(), n * n, "grid length must be n^2");
        for (idx, &s) in cells.iter().enumerate() {
            if s as usize > n {
                return Err(SquareError::SymbolOutOfRange {
                    row: idx / n + 1,
                    col: idx % n + 1,
                    symbol: s,
                    order: n,
                });
            }
        }
        // Row-major scan: report a row duplicate at the cell where the
        // repeat is seen, a column duplicate likewise.
        let mut row_seen = vec![0u16; n + 1]; // symbol -> last row+1 seen (per-row reset via stamp)
        let mut col_seen = vec![0u32; (n + 1) * n];
        for i in 0..n {
            row_seen.iter_mut().for_each(|x| *x = 0);
            for j in 0..n {
                let s = cells[i * n + j];
                if s == 0 {
                    continue;
                }
                let su = s as usize;
                if row_seen[su] != 0 {
                    return Err(SquareError::DuplicateInRow { row: i + 1, col: j + 1, symbol: s });
                }
                row_seen[su] = 1;
                let slot = &mut col_seen[su * n + j];
                if *slot != 0 {
                    return Err(SquareError::DuplicateInColumn {
                        row: i + 1,
                        col: j + 1,
                        symbol: s,
                    });
                }
                *slot = i as u32 + 1;
            }
        }
        Ok(Self { n, cells })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, cells: vec![0; n * n] }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Contents of cell `(r, c)`, 0-based coordinates.
    pub fn get(&self, r: usize, c: usize) -> Option<Symbol> {
        match self.cells[r * self.n + c] {
            0 => None,
            s => Some(Symbol(s)),
        }
    }

    pub(crate) fn get_raw(&self, r: usize, c: usize) -> u16 {
        self.cells[r * self.n + c]
    }

    /// Sets a cell without revalidating; callers keep the invariant.
    pub(crate) fn set_unchecked(&mut self, r: usize, c: usize, v: u16) {
        self.cells[r * self.n + c] = v;
    }

    pub fn cells(&self) -> &[u16] {
        &self.cells
    }

    /// Filled cells in row-major order as `(row, col, symbol)`, 0-based.
    pub fn filled_cells(&self) -> impl Iterator<Item = (usize, usize, Symbol)> + '_ {
        let n = self.n;
        self.cells.iter().enumerate().filter_map(move |(idx, &s)| {
            (s != 0).then(|| (idx / n, idx % n, Symbol(s)))
        })
    }

    pub fn fill(&self) -> usize {
        self.cells.iter().filter(|&&s| s != 0).count()
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|&s| s != 0)
    }

    /// Row, column and symbol usage statistics.
    pub fn density(&self) -> DensityProfile {
        let n = self.n;
        let mut rows = vec![0usize; n];
        let mut cols = vec![0usize; n];
        let mut syms = vec![0usize; n + 1];
        let mut fill = 0usize;
        for i in 0..n {
            for j in 0..n {
                let s = self.cells[i * n + j];
                if s != 0 {
                    rows[i] += 1;
                    cols[j] += 1;
                    syms[s as usize] += 1;
                    fill += 1;
                }
            }
        }
        let max_usage = rows
            .iter()
            .chain(cols.iter())
            .chain(syms[1..].iter())
            .copied()
            .max()
            .unwrap_or(0);
        DensityProfile { order: n, max_line_usage: max_usage, fill }
    }

    /// Filled cells of `self` at which `full` holds a different symbol,
    /// in row-major order.
    pub fn disagreement_cells(
        &self,
        full: &LatinSquare,
    ) -> Result<Vec<(usize, usize)>, SquareError> {
        if self.n != full.n {
            return Err(SquareError::OrderMismatch(self.n, full.n));
        }
        Ok(self
            .filled_cells()
            .filter(|&(r, c, s)| full.get(r, c) != s)
            .map(|(r, c, _)| (r, c))
            .collect())
    }

    /// True if every filled cell of `self` agrees with `full`.
    pub fn agrees_with(&self, full: &LatinSquare) -> bool {
        self.n == full.n && self.filled_cells().all(|(r, c, s)| full.get(r, c) == s)
    }
}

impl LatinSquare {
    /// Validates a fully filled grid.
    pub fn from_raw(n: usize, cells: Vec<u16>) -> Result<Self, SquareError> {
        if let Some(idx) = cells.iter().position(|&s| s == 0) {
            return Err(SquareError::Blank { row: idx / n + 1, col: idx % n + 1 });
        }
        let p = PartialLatinSquare::from_raw(n, cells)?;
        Ok(Self { n, cells: p.cells })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Symbol {
        Symbol(self.cells[r * self.n + c])
    }

    pub(crate) fn get_raw(&self, r: usize, c: usize) -> u16 {
        self.cells[r * self.n + c]
    }

    pub fn cells(&self) -> &[u16] {
        &self.cells
    }

    pub(crate) fn from_grid_unchecked(n: usize, cells: Vec<u16>) -> Self {
        debug_assert!(is_latin_grid(n, &cells));
        Self { n, cells }
    }

    pub fn as_partial(&self) -> PartialLatinSquare {
        PartialLatinSquare { n: self.n, cells: self.cells.clone() }
    }

    /// Lifts every cell to a singleton positive multiset.
    pub fn to_improper(&self) -> ImproperSquare {
        let cells = self.cells.iter().map(|&s| vec![(Symbol(s), 1i32)]).collect();
        ImproperSquare { n: self.n, cells }
    }
}

/// Total predicate: is the fully-filled grid a Latin square?
pub fn is_latin(rows: &[Vec<u16>]) -> bool {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return false;
    }
    let flat: Vec<u16> = rows.iter().flatten().copied().collect();
    is_latin_grid(n, &flat)
}

pub(crate) fn is_latin_grid(n: usize, cells: &[u16]) -> bool {
    if cells.len() != n * n {
        return false;
    }
    let mut seen = vec![false; n + 1];
    for i in 0..n {
        seen.iter_mut().for_each(|x| *x = false);
        for j in 0..n {
            let s = cells[i * n + j] as usize;
            if s == 0 || s > n || seen[s] {
                return false;
            }
            seen[s] = true;
        }
    }
    for j in 0..n {
        seen.iter_mut().for_each(|x| *x = false);
        for i in 0..n {
            let s = cells[i * n + j] as usize;
            if s == 0 || s > n || seen[s] {
                return false;
            }
            seen[s] = true;
        }
    }
    true
}

/// Line-usage statistics of a partial square.
///
/// `eps` is the maximum usage of any row, column, or symbol divided by
/// `n`; `delta` is `fill / n^2`. Both are exact in the stored integers,
/// the `f64` accessors are for display.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityProfile {
    pub order: usize,
    pub max_line_usage: usize,
    pub fill: usize,
}

impl DensityProfile {
    pub fn eps(&self) -> f64 {
        self.max_line_usage as f64 / self.order as f64
    }

    pub fn delta(&self) -> f64 {
        self.fill as f64 / (self.order as f64 * self.order as f64)
    }
}

/// An `n x n` array of signed symbol multisets. A proper square lifts to
/// singleton `+1` multisets; trades in flight may leave one cell with a
/// `-1` coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImproperSquare {
    n: usize,
    // Per cell: (symbol, signed coefficient), coefficient never 0.
    cells: Vec<Vec<(Symbol, i32)>>,
}

impl ImproperSquare {
    pub fn new(n: usize, cells: Vec<Vec<(Symbol, i32)>>) -> Self {
        assert_eq!(cells.len(), n * n);
        let mut sq = Self { n, cells };
        for cell in &mut sq.cells {
            normalize_cell(cell);
        }
        sq
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn cell(&self, r: usize, c: usize) -> &[(Symbol, i32)] {
        &self.cells[r * self.n + c]
    }

    pub(crate) fn cell_mut(&mut self, r: usize, c: usize) -> &mut Vec<(Symbol, i32)> {
        &mut self.cells[r * self.n + c]
    }

    /// Adds `coeff` copies of `sym` to the cell, cancelling against
    /// existing entries.
    pub fn add(&mut self, r: usize, c: usize, sym: Symbol, coeff: i32) {
        let cell = self.cell_mut(r, c);
        if let Some(e) = cell.iter_mut().find(|e| e.0 == sym) {
            e.1 += coeff;
        } else {
            cell.push((sym, coeff));
        }
        normalize_cell(cell);
    }

    /// A cell is improper if it is not a single symbol with coefficient 1.
    pub fn is_improper_cell(&self, r: usize, c: usize) -> bool {
        let cell = self.cell(r, c);
        !(cell.len() == 1 && cell[0].1 == 1)
    }

    pub fn improper_cells(&self) -> Vec<(usize, usize)> {
        (0..self.n * self.n)
            .filter(|&idx| self.is_improper_cell(idx / self.n, idx % self.n))
            .map(|idx| (idx / self.n, idx % self.n))
            .collect()
    }

    /// If every cell is a singleton `+1`, returns the underlying square.
    pub fn to_latin(&self) -> Option<LatinSquare> {
        let mut cells = Vec::with_capacity(self.n * self.n);
        for cell in &self.cells {
            if cell.len() == 1 && cell[0].1 == 1 {
                cells.push(cell[0].0 .0);
            } else {
                return None;
            }
        }
        LatinSquare::from_raw(self.n, cells).ok()
    }
}

fn normalize_cell(cell: &mut Vec<(Symbol, i32)>) {
    cell.retain(|e| e.1 != 0);
    cell.sort_by(|a, b| b.1.cmp(&a.1).then(b.0.cmp(&a.0)));
}

/// Checks the signed-sum invariant: for every row, column and symbol, the
/// signed sum is 1 (full square) or 0-or-1 (`partial = true`).
///
/// Cells must be nonempty; an empty multiset fails the check.
pub fn validate_improper(square: &ImproperSquare, partial: bool) -> bool {
    let n = square.n;
    let ok = |sum: i32| if partial { sum == 0 || sum == 1 } else { sum == 1 };
    for i in 0..n * n {
        if square.cells[i].is_empty() {
            return false;
        }
    }
    let mut sums = vec![0i32; n + 1];
    for r in 0..n {
        sums.iter_mut().for_each(|x| *x = 0);
        for c in 0..n {
            for &(s, k) in square.cell(r, c) {
                if s.0 == 0 || s.0 as usize > n {
                    return false;
                }
                sums[s.0 as usize] += k;
            }
        }
        if sums[1..].iter().any(|&x| !ok(x)) {
            return false;
        }
    }
    for c in 0..n {
        sums.iter_mut().for_each(|x| *x = 0);
        for r in 0..n {
            for &(s, k) in square.cell(r, c) {
                sums[s.0 as usize] += k;
            }
        }
        if sums[1..].iter().any(|&x| !ok(x)) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rows: &[&[u16]]) -> Result<PartialLatinSquare, SquareError> {
        let rows: Vec<Vec<Option<u16>>> = rows
            .iter()
            .map(|r| r.iter().map(|&s| if s == 0 { None } else { Some(s) }).collect())
            .collect();
        validate_partial(&rows)
    }

    #[test]
    fn accepts_running_example() {
        // 3x3 grid with blanks from the definition figure.
        let sq = p(&[&[1, 2, 0], &[0, 3, 0], &[0, 0, 2]]).unwrap();
        assert_eq!(sq.fill(), 4);
        assert_eq!(sq.get(1, 1), Some(Symbol(3)));
    }

    #[test]
    fn accepts_all_blank() {
        let sq = p(&[&[0; 5]; 5]).unwrap();
        let d = sq.density();
        assert_eq!(d.max_line_usage, 0);
        assert_eq!(d.fill, 0);
        assert_eq!(d.eps(), 0.0);
        assert_eq!(d.delta(), 0.0);
    }

    #[test]
    fn reports_column_duplicate() {
        let err = p(&[&[1, 0], &[1, 0]]).unwrap_err();
        assert_eq!(err, SquareError::DuplicateInColumn { row: 2, col: 1, symbol: 1 });
    }

    #[test]
    fn reports_row_duplicate_and_range() {
        let err = p(&[&[1, 1], &[0, 0]]).unwrap_err();
        assert_eq!(err, SquareError::DuplicateInRow { row: 1, col: 2, symbol: 1 });
        let err = p(&[&[3, 0], &[0, 0]]).unwrap_err();
        assert!(matches!(err, SquareError::SymbolOutOfRange { symbol: 3, .. }));
    }

    #[test]
    fn rejects_non_square() {
        let rows = vec![vec![Some(1u16), None], vec![None]];
        assert!(matches!(
            validate_partial(&rows),
            Err(SquareError::NonSquareInput { row: 2, len: 1, expected: 2 })
        ));
    }

    #[test]
    fn is_latin_on_examples() {
        assert!(is_latin(&[vec![1, 2, 3], vec![3, 1, 2], vec![2, 3, 1]]));
        assert!(!is_latin(&[vec![1, 2], vec![1, 2]]));
        // Cyclic squares of a few orders, checked by the validator itself.
        for n in 2..=20usize {
            let rows: Vec<Vec<u16>> =
                (0..n).map(|i| (0..n).map(|j| (((i + j) % n) + 1) as u16).collect()).collect();
            assert!(is_latin(&rows), "cyclic square of order {} must be Latin", n);
        }
    }

    #[test]
    fn density_counts_lines() {
        let n = 13;
        let mut sq = PartialLatinSquare::empty(n);
        sq.set_unchecked(4, 7, 9);
        let d = sq.density();
        assert_eq!(d.max_line_usage, 1);
        assert_eq!(d.fill, 1);
        assert!((d.eps() - 1.0 / 13.0).abs() < 1e-12);
        assert!((d.delta() - 1.0 / 169.0).abs() < 1e-12);

        let full: Vec<Vec<u16>> =
            (0..4).map(|i| (0..4).map(|j| (((i + j) % 4) + 1) as u16).collect()).collect();
        let flat: Vec<u16> = full.iter().flatten().copied().collect();
        let full = LatinSquare::from_raw(4, flat).unwrap();
        let d = full.as_partial().density();
        assert_eq!(d.eps(), 1.0);
        assert_eq!(d.delta(), 1.0);
        // delta * n^2 == fill, by construction of the profile.
        assert_eq!(d.fill, 16);
    }

    #[test]
    fn disagreements_row_major() {
        let l = LatinSquare::from_raw(2, vec![2, 1, 1, 2]).unwrap();
        let empty = PartialLatinSquare::empty(2);
        assert!(empty.disagreement_cells(&l).unwrap().is_empty());

        let mut pp = PartialLatinSquare::empty(2);
        pp.set_unchecked(0, 0, 1);
        assert_eq!(pp.disagreement_cells(&l).unwrap(), vec![(0, 0)]);

        let mut agreeing = PartialLatinSquare::empty(2);
        agreeing.set_unchecked(0, 1, 1);
        agreeing.set_unchecked(1, 0, 1);
        assert!(agreeing.disagreement_cells(&l).unwrap().is_empty());

        let other = PartialLatinSquare::empty(3);
        assert!(matches!(other.disagreement_cells(&l), Err(SquareError::OrderMismatch(3, 2))));
    }

    #[test]
    fn improper_signed_sums() {
        // 4x4 square from the definition, one cell holding 3 + 2 - 1.
        let grid: Vec<u16> = vec![1, 2, 3, 4, 4, 1, 1, 0, 3, 4, 2, 1, 2, 3, 4, 1];
        let mut cells: Vec<Vec<(Symbol, i32)>> = grid
            .iter()
            .map(|&s| if s == 0 { vec![] } else { vec![(Symbol(s), 1)] })
            .collect();
        cells[1 * 4 + 3] = vec![(Symbol(3), 1), (Symbol(2), 1), (Symbol(1), -1)];
        let sq = ImproperSquare::new(4, cells);
        assert!(validate_improper(&sq, false));

        // Proper squares lift to valid improper squares.
        let l = LatinSquare::from_raw(3, vec![1, 2, 3, 3, 1, 2, 2, 3, 1]).unwrap();
        let lifted = l.to_improper();
        assert!(validate_improper(&lifted, false));

        // Adding a stray +1 breaks a signed sum.
        let mut bad = l.to_improper();
        bad.add(0, 0, Symbol(2), 1);
        assert!(!validate_improper(&bad, false));
    }

    #[test]
    fn brute_force_duplicate_scan_agrees() {
        // validate_partial accepts exactly the arrays with no row/column
        // duplicates; cross-checked against a naive quadratic scan.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = 10usize;
            let rows: Vec<Vec<Option<u16>>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.gen_bool(0.25) {
                                Some(rng.gen_range(1..=n as u16))
                            } else {
                                None
                            }
                        })
                        .collect()
                })
                .collect();
            let naive_ok = (0..n).all(|i| {
                (0..n).all(|j| {
                    let Some(s) = rows[i][j] else { return true };
                    (0..n).all(|j2| j2 == j || rows[i][j2] != Some(s))
                        && (0..n).all(|i2| i2 == i || rows[i2][j] != Some(s))
                })
            });
            assert_eq!(validate_partial(&rows).is_ok(), naive_ok);
        }
    }
}
