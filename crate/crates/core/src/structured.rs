//! Block-circulant Latin squares rich in 2x2 subsquares, including the
//! odd-order extensions built through a transversal.
//!
//! The even construction of order `n = 2k` is the block square
//! `[[A, B], [B^T, A^T]]` with `A` the circulant on `1..=k` and `B` the
//! circulant on `k+1..=2k`; every cell of it lies in exactly `n/2`
//! intercalates. Odd orders extend an even core by one row and column
//! along a transversal; the cells disturbed by that surgery are flagged,
//! and there are at most `3n + 7` of them.

use crate::square::{LatinSquare, Symbol};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructuredError {
    #[error("order {0} is odd; the block construction needs an even order")]
    OddOrder(usize),
    #[error("order {0} has no structured construction (use exhaustive completion instead)")]
    UnsupportedOrder(usize),
    #[error("cells are in the same column half; a partner requires opposite halves")]
    SameQuadrant,
    #[error("cells are not in the same row")]
    RowMismatch,
}

/// Quadrant of the even core in block form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    A,
    B,
    BT,
    AT,
}

/// A set of cells, one per row and column, with pairwise distinct
/// symbols. Coordinates are 0-based.
#[derive(Debug, Clone)]
pub struct Transversal {
    pub cells: Vec<(usize, usize, Symbol)>,
}

impl Transversal {
    /// Distinct rows, distinct columns, distinct symbols, one cell per
    /// row of an order-`order` square.
    pub fn is_valid(&self, order: usize) -> bool {
        if self.cells.len() != order {
            return false;
        }
        let mut rows = vec![false; order];
        let mut cols = vec![false; order];
        let mut syms = vec![false; order + 1];
        for &(r, c, s) in &self.cells {
            if r >= order || c >= order || s.0 as usize > order || s.0 == 0 {
                return false;
            }
            if rows[r] || cols[c] || syms[s.0 as usize] {
                return false;
            }
            rows[r] = true;
            cols[c] = true;
            syms[s.0 as usize] = true;
        }
        true
    }
}

/// A structured square together with its block geometry and the set of
/// cells disturbed by odd-order surgery.
#[derive(Debug, Clone)]
pub struct StructuredSquare {
    square: LatinSquare,
    /// Half-order of the even core (the core has order `2 * half`).
    half: usize,
    flagged: Vec<u64>,
    flagged_count: usize,
    transversal: Option<Transversal>,
}

impl StructuredSquare {
    pub fn order(&self) -> usize {
        self.square.order()
    }

    /// Order of the underlying even core (`n` for even `n`, `n - 1` for odd).
    pub fn core_order(&self) -> usize {
        2 * self.half
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn square(&self) -> &LatinSquare {
        &self.square
    }

    pub fn into_square(self) -> LatinSquare {
        self.square
    }

    pub fn transversal(&self) -> Option<&Transversal> {
        self.transversal.as_ref()
    }

    /// Quadrant of a core cell; `None` for the appended row/column of an
    /// odd-order square.
    pub fn quadrant(&self, r: usize, c: usize) -> Option<Quadrant> {
        let m = self.core_order();
        if r >= m || c >= m {
            return None;
        }
        Some(match (r < self.half, c < self.half) {
            (true, true) => Quadrant::A,
            (true, false) => Quadrant::B,
            (false, true) => Quadrant::BT,
            (false, false) => Quadrant::AT,
        })
    }

    pub fn is_flagged(&self, r: usize, c: usize) -> bool {
        let idx = r * self.order() + c;
        self.flagged[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged_count
    }

    pub fn flagged_cells(&self) -> Vec<(usize, usize)> {
        let n = self.order();
        (0..n * n)
            .filter(|&idx| self.flagged[idx / 64] >> (idx % 64) & 1 == 1)
            .map(|idx| (idx / n, idx % n))
            .collect()
    }

    /// The unique 2x2 subsquare through two same-row cells in opposite
    /// column halves, or `None` when either cell is flagged or the
    /// diagonal pattern has been destroyed.
    pub fn subsquare_partner(
        &self,
        c1: (usize, usize),
        c2: (usize, usize),
    ) -> Result<Option<Intercalate>, StructuredError> {
        if c1.0 != c2.0 {
            return Err(StructuredError::RowMismatch);
        }
        let m = self.core_order();
        if c1.1 >= m || c2.1 >= m || (c1.1 < self.half) == (c2.1 < self.half) {
            return Err(StructuredError::SameQuadrant);
        }
        if self.is_flagged(c1.0, c1.1) || self.is_flagged(c2.0, c2.1) {
            return Ok(None);
        }
        let (r, j1, j2) = (c1.0, c1.1, c2.1);
        let s2 = self.square.get_raw(r, j2);
        let n = self.order();
        let Some(x) = (0..n).find(|&x| x != r && self.square.get_raw(x, j1) == s2) else {
            return Ok(None);
        };
        if self.square.get_raw(x, j2) != self.square.get_raw(r, j1) {
            return Ok(None);
        }
        Ok(Some(Intercalate { rows: [r, x], cols: [j1, j2] }))
    }

    /// Number of 2x2 subsquares of the current square containing the
    /// cell. Quadratic scan; the batch census is the fast path.
    pub fn count_subsquares(&self, cell: (usize, usize)) -> usize {
        count_subsquares_in(&self.square, cell)
    }
}

/// Four cells at rectangle corners carrying two symbols diagonally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Intercalate {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
}

/// Counts 2x2 subsquares of `square` containing `cell` by scanning the
/// cell's row against every other row.
pub fn count_subsquares_in(square: &LatinSquare, cell: (usize, usize)) -> usize {
    let n = square.order();
    let (r, c) = cell;
    let own = square.get_raw(r, c);
    let mut count = 0;
    for y in 0..n {
        if y == c {
            continue;
        }
        let s = square.get_raw(r, y);
        // Row of s in column c.
        let Some(x) = (0..n).find(|&x| square.get_raw(x, c) == s) else { continue };
        if x != r && square.get_raw(x, y) == own {
            count += 1;
        }
    }
    count
}

/// `((x - 1) mod k) + 1`, keeping circulant values 1-based.
fn cyc(k: i64, x: i64) -> u16 {
    ((x - 1).rem_euclid(k) + 1) as u16
}

/// Value of the four-case block formula at 1-based `(i, j)` for core
/// order `2k`.
pub fn block_formula(k: usize, i: usize, j: usize) -> u16 {
    let kk = k as i64;
    let (i, j) = (i as i64, j as i64);
    match (i <= kk, j <= kk) {
        (true, true) => cyc(kk, j - i + 1),
        (false, false) => cyc(kk, i - j + 1),
        (true, false) => cyc(kk, j - i + 1) + k as u16,
        (false, true) => cyc(kk, i - j + 1) + k as u16,
    }
}

/// Builds the even-order block square. Every cell lies in exactly `n/2`
/// intercalates and nothing is flagged.
pub fn build_even(n: usize) -> Result<StructuredSquare, StructuredError> {
    if n == 0 || n % 2 != 0 {
        return Err(StructuredError::OddOrder(n));
    }
    let k = n / 2;
    let mut cells = vec![0u16; n * n];
    for i in 0..n {
        for j in 0..n {
            cells[i * n + j] = block_formula(k, i + 1, j + 1);
        }
    }
    let square = LatinSquare::from_grid_unchecked(n, cells);
    Ok(StructuredSquare {
        square,
        half: k,
        flagged: vec![0; (n * n).div_ceil(64)],
        flagged_count: 0,
        transversal: None,
    })
}

/// Swaps the four cells of an intercalate in a raw grid.
fn swap_intercalate(n: usize, cells: &mut [u16], rows: [usize; 2], cols: [usize; 2]) {
    let [r, x] = rows;
    let [j1, j2] = cols;
    debug_assert_eq!(cells[r * n + j1], cells[x * n + j2]);
    debug_assert_eq!(cells[r * n + j2], cells[x * n + j1]);
    cells.swap(r * n + j1, r * n + j2);
    cells.swap(x * n + j1, x * n + j2);
}

/// Locates the intercalate through two same-row cells of a raw grid.
fn row_pair_intercalate(n: usize, cells: &[u16], r: usize, j1: usize, j2: usize) -> [usize; 2] {
    let s2 = cells[r * n + j2];
    let x = (0..n)
        .find(|&x| x != r && cells[x * n + j1] == s2)
        .expect("pair symbol must appear in the column");
    assert_eq!(cells[x * n + j2], cells[r * n + j1], "cells do not span an intercalate");
    [r, x]
}

/// Builds the odd-order extension. Orders 1 and 3 have no structured
/// construction; callers fall back to exhaustive completion there.
pub fn build_odd(n: usize) -> Result<StructuredSquare, StructuredError> {
    if n % 2 == 0 {
        return Err(StructuredError::OddOrder(n));
    }
    if n < 5 {
        return Err(StructuredError::UnsupportedOrder(n));
    }
    let m = n - 1;
    let core = build_even(m)?;
    let mut cells = vec![0u16; n * n];
    // Copy the core into the top-left m x m block.
    for i in 0..m {
        for j in 0..m {
            cells[i * n + j] = core.square.get_raw(i, j);
        }
    }

    // Transversal cells, 1-based (row, col).
    let transversal_1b: Vec<(usize, usize)> = if m % 4 == 0 {
        // n = 4k + 1
        let k = m / 4;
        let mut t = Vec::with_capacity(m);
        for i in 1..=k {
            t.push((i, 2 * i - 1));
        }
        for i in k + 1..=2 * k {
            t.push((i, 2 * k + 2 * (i - k) - 1));
        }
        for i in 2 * k + 1..=3 * k {
            t.push((i, 2 * k + 2 * (i - 2 * k)));
        }
        for i in 3 * k + 1..=4 * k {
            t.push((i, 2 * (i - 3 * k)));
        }
        t
    } else {
        // n = 4k - 1; the core of order 4k - 2 has no transversal until
        // three preparatory intercalate trades open one up.
        let k = (m + 2) / 4;
        let last = m; // 1-based last core row/column

        // Trade 1: cells holding 2 and m in the last row.
        let find_in_row = |cells: &[u16], r: usize, s: u16| -> usize {
            (0..m).position(|j| cells[(r - 1) * n + j] == s).unwrap() + 1
        };
        let ja = find_in_row(&cells, last, m as u16);
        let jb = find_in_row(&cells, last, 2);
        let rows = row_pair_intercalate_1b(n, m, &cells, last, ja, jb);
        swap_intercalate_1b(n, &mut cells, rows, [ja, jb]);

        // Trade 2: cells holding 2k - 1 and m in the last column.
        let find_in_col = |cells: &[u16], c: usize, s: u16| -> usize {
            (0..m).position(|i| cells[i * n + c - 1] == s).unwrap() + 1
        };
        let ia = find_in_col(&cells, last, m as u16);
        let ib = find_in_col(&cells, last, (2 * k - 1) as u16);
        // Column version: transpose the row helper.
        let s2 = cells[(ib - 1) * n + last - 1];
        let y = (1..=m)
            .find(|&y| y != last && cells[(ia - 1) * n + y - 1] == s2)
            .expect("pair symbol must appear in the row");
        assert_eq!(cells[(ib - 1) * n + y - 1], cells[(ia - 1) * n + last - 1]);
        swap_intercalate_1b(n, &mut cells, [ia, ib], [last, y]);

        // Trade 3: the bottom-right 2x2 now reads [[1, m], [m, 1]].
        assert_eq!(cells[(m - 2) * n + m - 2], 1);
        assert_eq!(cells[(m - 2) * n + m - 1], m as u16);
        assert_eq!(cells[(m - 1) * n + m - 2], m as u16);
        assert_eq!(cells[(m - 1) * n + m - 1], 1);
        swap_intercalate_1b(n, &mut cells, [last - 1, last], [last - 1, last]);

        let mut t = Vec::with_capacity(m);
        for i in 1..=k {
            t.push((i, 2 * i - 1));
        }
        for i in k + 1..=2 * k - 1 {
            t.push((i, 2 * k + 2 * (i - k) - 2));
        }
        for i in 2 * k..=3 * k - 2 {
            t.push((i, 2 * k + 1 + 2 * (i - 2 * k)));
        }
        for i in 3 * k - 1..=4 * k - 3 {
            t.push((i, 2 + 2 * (i - (3 * k - 1))));
        }
        t.push((m, m));
        t
    };

    let transversal = Transversal {
        cells: transversal_1b
            .iter()
            .map(|&(i, j)| (i - 1, j - 1, Symbol(cells[(i - 1) * n + (j - 1)])))
            .collect(),
    };
    assert!(transversal.is_valid(m), "construction must yield a transversal of the core");

    // Append row n and column n from the transversal, then overwrite the
    // transversal cells and the corner with symbol n.
    for &(r, c, s) in &transversal.cells {
        cells[(n - 1) * n + c] = s.0;
        cells[r * n + (n - 1)] = s.0;
        cells[r * n + c] = n as u16;
    }
    cells[(n - 1) * n + (n - 1)] = n as u16;

    // Flag every cell that differs from the even-core formula, plus the
    // appended row and column.
    let k_core = m / 2;
    let mut flagged = vec![0u64; (n * n).div_ceil(64)];
    let mut flagged_count = 0;
    let mut flag = |idx: usize, flagged: &mut Vec<u64>| {
        if flagged[idx / 64] >> (idx % 64) & 1 == 0 {
            flagged[idx / 64] |= 1 << (idx % 64);
            flagged_count += 1;
        }
    };
    for i in 0..m {
        for j in 0..m {
            if cells[i * n + j] != block_formula(k_core, i + 1, j + 1) {
                flag(i * n + j, &mut flagged);
            }
        }
    }
    for j in 0..n {
        flag((n - 1) * n + j, &mut flagged);
    }
    for i in 0..n {
        flag(i * n + (n - 1), &mut flagged);
    }
    assert!(flagged_count <= 3 * n + 7, "flagged {} cells, budget {}", flagged_count, 3 * n + 7);

    let square = LatinSquare::from_raw(n, cells).expect("odd construction must be Latin");
    Ok(StructuredSquare {
        square,
        half: k_core,
        flagged,
        flagged_count,
        transversal: Some(transversal),
    })
}

fn swap_intercalate_1b(n: usize, cells: &mut [u16], rows: [usize; 2], cols: [usize; 2]) {
    swap_intercalate(n, cells, [rows[0] - 1, rows[1] - 1], [cols[0] - 1, cols[1] - 1]);
}

fn row_pair_intercalate_1b(
    n: usize,
    m: usize,
    cells: &[u16],
    r: usize,
    j1: usize,
    j2: usize,
) -> [usize; 2] {
    // Restrict the search to the core rows.
    let s2 = cells[(r - 1) * n + j2 - 1];
    let x = (1..=m)
        .find(|&x| x != r && cells[(x - 1) * n + j1 - 1] == s2)
        .expect("pair symbol must appear in the column");
    assert_eq!(cells[(x - 1) * n + j2 - 1], cells[(r - 1) * n + j1 - 1]);
    [r, x]
}

/// Builds the structured square of any order: even block square, odd
/// extension, or an error for orders 1 and 3.
pub fn build(n: usize) -> Result<StructuredSquare, StructuredError> {
    if n % 2 == 0 {
        build_even(n)
    } else {
        build_odd(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::square::is_latin_grid;

    /// The printed order-8 grid pinning the "mod in 1..=k" convention.
    const GRID8: [[u16; 8]; 8] = [
        [1, 2, 3, 4, 5, 6, 7, 8],
        [4, 1, 2, 3, 8, 5, 6, 7],
        [3, 4, 1, 2, 7, 8, 5, 6],
        [2, 3, 4, 1, 6, 7, 8, 5],
        [5, 8, 7, 6, 1, 4, 3, 2],
        [6, 5, 8, 7, 2, 1, 4, 3],
        [7, 6, 5, 8, 3, 2, 1, 4],
        [8, 7, 6, 5, 4, 3, 2, 1],
    ];

    #[test]
    fn even_8_matches_fixture() {
        let s = build_even(8).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(s.square().get_raw(i, j), GRID8[i][j], "cell ({}, {})", i, j);
            }
        }
        assert_eq!(s.flagged_count(), 0);
    }

    #[test]
    fn even_2_and_4() {
        let s = build_even(2).unwrap();
        assert_eq!(s.square().cells(), &[1, 2, 2, 1]);
        // Order 4: every cell checked against an independent evaluation
        // of the four-case formula.
        let s = build_even(4).unwrap();
        for i in 1..=4usize {
            for j in 1..=4usize {
                let k = 2i64;
                let expect = match (i <= 2, j <= 2) {
                    (true, true) => ((j as i64 - i as i64).rem_euclid(k) + 1) as u16,
                    (false, false) => ((i as i64 - j as i64).rem_euclid(k) + 1) as u16,
                    (true, false) => ((j as i64 - i as i64).rem_euclid(k) + 1) as u16 + 2,
                    (false, true) => ((i as i64 - j as i64).rem_euclid(k) + 1) as u16 + 2,
                };
                assert_eq!(s.square().get_raw(i - 1, j - 1), expect);
            }
        }
    }

    #[test]
    fn even_is_latin_up_to_512() {
        for n in (2..=512usize).step_by(2) {
            let s = build_even(n).unwrap();
            assert!(is_latin_grid(n, s.square().cells()), "order {}", n);
        }
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(matches!(build_even(7), Err(StructuredError::OddOrder(7))));
        assert!(matches!(build_odd(3), Err(StructuredError::UnsupportedOrder(3))));
        assert!(matches!(build_odd(1), Err(StructuredError::UnsupportedOrder(1))));
        assert!(matches!(build_odd(8), Err(StructuredError::OddOrder(8))));
    }

    #[test]
    fn odd_13_uses_listed_transversal() {
        let s = build_odd(13).unwrap();
        let t = s.transversal().unwrap();
        let got: Vec<(usize, usize)> = t.cells.iter().map(|&(r, c, _)| (r + 1, c + 1)).collect();
        // Rows 1..=12 with the column pattern highlighted in the 13x13
        // figure: (1,1), (2,3), (3,5), (4,7), ...
        let expect = vec![
            (1, 1),
            (2, 3),
            (3, 5),
            (4, 7),
            (5, 9),
            (6, 11),
            (7, 8),
            (8, 10),
            (9, 12),
            (10, 2),
            (11, 4),
            (12, 6),
        ];
        assert_eq!(got, expect);
        assert!(is_latin_grid(13, s.square().cells()));
        assert!(s.flagged_count() <= 3 * 13 + 7);
    }

    #[test]
    fn odd_orders_latin_and_flag_budget() {
        for n in [5usize, 7, 9, 11, 15, 17, 19, 29, 257] {
            let s = build_odd(n).unwrap();
            assert!(is_latin_grid(n, s.square().cells()), "order {}", n);
            assert!(
                s.flagged_count() <= 3 * n + 7,
                "order {}: {} flagged > {}",
                n,
                s.flagged_count(),
                3 * n + 7
            );
            let t = s.transversal().unwrap();
            assert!(t.is_valid(n - 1), "order {}: transversal invalid", n);
        }
    }

    #[test]
    fn partner_subsquares_on_8() {
        let s = build_even(8).unwrap();
        // Cells (1,1) and (1,5), 1-based: symbols 1 and 5; partners are
        // rows 1 and 5, columns 1 and 5 with symbols 1,5 / 5,1.
        let is = s.subsquare_partner((0, 0), (0, 4)).unwrap().unwrap();
        assert_eq!(is.rows, [0, 4]);
        assert_eq!(is.cols, [0, 4]);
        assert_eq!(s.square().get_raw(4, 4), 1);
        assert_eq!(s.square().get_raw(4, 0), 5);

        // Any cell of the fresh even square: exactly n/2 partner columns.
        for c2 in 4..8 {
            assert!(s.subsquare_partner((0, 0), (0, c2)).unwrap().is_some());
        }
        assert!(matches!(
            s.subsquare_partner((0, 0), (1, 5)),
            Err(StructuredError::RowMismatch)
        ));
        assert!(matches!(
            s.subsquare_partner((0, 0), (0, 2)),
            Err(StructuredError::SameQuadrant)
        ));
    }

    #[test]
    fn partner_on_order_2() {
        let s = build_even(2).unwrap();
        let is = s.subsquare_partner((0, 0), (0, 1)).unwrap().unwrap();
        assert_eq!(is.rows, [0, 1]);
        assert_eq!(is.cols, [0, 1]);
    }

    #[test]
    fn census_even_n_over_2() {
        for n in [2usize, 4, 8, 16] {
            let s = build_even(n).unwrap();
            for r in 0..n {
                for c in 0..n {
                    assert_eq!(s.count_subsquares((r, c)), n / 2, "n={} cell ({},{})", n, r, c);
                }
            }
        }
    }

    #[test]
    fn census_odd_unflagged_at_least_half_minus_two() {
        let s = build_odd(13).unwrap();
        let n = 13;
        for r in 0..n {
            for c in 0..n {
                if !s.is_flagged(r, c) {
                    let count = s.count_subsquares((r, c));
                    assert!(count >= n / 2 - 2, "cell ({},{}) has {} subsquares", r, c, count);
                }
            }
        }
    }

    #[test]
    fn census_matches_brute_force_on_8() {
        // Exhaustive O(n^4) intercalate enumeration as the oracle.
        let s = build_even(8).unwrap();
        let n = 8;
        let mut counts = vec![0usize; n * n];
        for r in 0..n {
            for x in r + 1..n {
                for c in 0..n {
                    for y in c + 1..n {
                        let a = s.square().get_raw(r, c);
                        let b = s.square().get_raw(r, y);
                        if a == s.square().get_raw(x, y) && b == s.square().get_raw(x, c) {
                            counts[r * n + c] += 1;
                            counts[r * n + y] += 1;
                            counts[x * n + c] += 1;
                            counts[x * n + y] += 1;
                        }
                    }
                }
            }
        }
        for r in 0..n {
            for c in 0..n {
                assert_eq!(counts[r * n + c], s.count_subsquares((r, c)));
            }
        }
    }
}
