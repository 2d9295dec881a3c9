//! Working state of the completion engine: the evolving square, symbol
//! position indexes, disturbed/agreement masks, and the disturbance
//! ledger.

use crate::square::{LatinSquare, PartialLatinSquare};
use crate::structured::StructuredSquare;
use std::collections::HashMap;

/// Axis selector for overload queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
    Symbol,
}

/// Per-row, per-column, and per-symbol disturbed-cell counts.
///
/// Row and column counters are monotone (a cell stays in its line). The
/// symbol counter tracks disturbed cells *currently* holding the symbol,
/// so re-disturbing a cell moves one count from its old symbol to its
/// new one; that keeps the sum of symbol counters equal to the total and
/// preserves the overloaded-line bound on the symbol axis.
#[derive(Debug, Clone)]
pub struct DisturbanceLedger {
    n: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    syms: Vec<u32>,
    total: u64,
}

impl DisturbanceLedger {
    pub fn new(n: usize) -> Self {
        DisturbanceLedger { n, rows: vec![0; n], cols: vec![0; n], syms: vec![0; n], total: 0 }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, axis: Axis, index: usize) -> u32 {
        match axis {
            Axis::Row => self.rows[index],
            Axis::Column => self.cols[index],
            Axis::Symbol => self.syms[index],
        }
    }

    /// Strictly more than `d * n` disturbed entries.
    pub fn is_overloaded(&self, axis: Axis, index: usize, d: f64) -> bool {
        self.count(axis, index) as f64 > d * self.n as f64
    }

    /// Exact overload test against a squared threshold: `count^2 > thr_sq`
    /// decides `count > sqrt(thr_sq)` without floating point.
    pub(crate) fn over_sq(&self, axis: Axis, index: usize, thr_sq: u128) -> bool {
        let c = self.count(axis, index) as u128;
        c * c > thr_sq
    }

    fn on_first_disturb(&mut self, r: usize, c: usize, now_holds: u16) {
        self.rows[r] += 1;
        self.cols[c] += 1;
        self.syms[now_holds as usize - 1] += 1;
        self.total += 1;
    }

    fn on_redisturb(&mut self, was: u16, now: u16) {
        self.syms[was as usize - 1] -= 1;
        self.syms[now as usize - 1] += 1;
    }

    fn undo_first_disturb(&mut self, r: usize, c: usize, held: u16) {
        self.rows[r] -= 1;
        self.cols[c] -= 1;
        self.syms[held as usize - 1] -= 1;
        self.total -= 1;
    }
}

/// One cell rewrite recorded for rollback.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellUndo {
    r: u32,
    c: u32,
    old: u16,
    new: u16,
    newly_disturbed: bool,
    was_disturbed: bool,
    newly_agree: bool,
}

/// Rollback token for one applied rewrite batch.
#[derive(Debug, Default)]
pub(crate) struct Undo {
    cells: Vec<CellUndo>,
}

pub struct Engine {
    n: usize,
    half: usize,
    grid: Vec<u16>,
    /// `row_pos[r * n + s - 1]` = column of symbol `s` in row `r`.
    row_pos: Vec<u16>,
    /// `col_pos[c * n + s - 1]` = row of symbol `s` in column `c`.
    col_pos: Vec<u16>,
    disturbed: Vec<u64>,
    agree: Vec<u64>,
    target: HashMap<u64, u16>,
    pub(crate) ledger: DisturbanceLedger,
    pub(crate) steps: u64,
    pub(crate) max_line_usage: usize,
    pub(crate) fill: usize,
}

impl Engine {
    /// Seeds the engine with a structured square and the partial square
    /// to complete. Flagged construction cells enter the ledger; cells
    /// where the construction already matches the target are marked
    /// agreeing.
    pub fn new(structured: &StructuredSquare, p: &PartialLatinSquare) -> Self {
        let n = structured.order();
        assert_eq!(p.order(), n, "orders must match");
        let grid = structured.square().cells().to_vec();
        let mut row_pos = vec![0u16; n * n];
        let mut col_pos = vec![0u16; n * n];
        for r in 0..n {
            for c in 0..n {
                let s = grid[r * n + c] as usize;
                row_pos[r * n + s - 1] = c as u16;
                col_pos[c * n + s - 1] = r as u16;
            }
        }
        let prof = p.density();
        let mut eng = Engine {
            n,
            half: structured.half(),
            grid,
            row_pos,
            col_pos,
            disturbed: vec![0; (n * n).div_ceil(64)],
            agree: vec![0; (n * n).div_ceil(64)],
            target: p
                .filled_cells()
                .map(|(r, c, s)| ((r * n + c) as u64, s.0))
                .collect(),
            ledger: DisturbanceLedger::new(n),
            steps: (n * n) as u64,
            max_line_usage: prof.max_line_usage,
            fill: prof.fill,
        };
        for (r, c) in structured.flagged_cells() {
            let idx = r * n + c;
            if eng.disturbed[idx / 64] >> (idx % 64) & 1 == 0 {
                eng.disturbed[idx / 64] |= 1 << (idx % 64);
                eng.ledger.on_first_disturb(r, c, eng.grid[idx]);
            }
        }
        for (r, c, s) in p.filled_cells() {
            if eng.grid[r * n + c] == s.0 {
                let idx = r * n + c;
                eng.agree[idx / 64] |= 1 << (idx % 64);
            }
        }
        eng
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub(crate) fn half(&self) -> usize {
        self.half
    }

    pub fn ledger(&self) -> &DisturbanceLedger {
        &self.ledger
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    #[inline]
    pub(crate) fn get(&self, r: usize, c: usize) -> u16 {
        self.grid[r * self.n + c]
    }

    #[inline]
    pub(crate) fn pos_in_row(&self, r: usize, s: u16) -> usize {
        self.row_pos[r * self.n + s as usize - 1] as usize
    }

    #[inline]
    pub(crate) fn pos_in_col(&self, c: usize, s: u16) -> usize {
        self.col_pos[c * self.n + s as usize - 1] as usize
    }

    #[inline]
    pub(crate) fn is_disturbed(&self, r: usize, c: usize) -> bool {
        let idx = r * self.n + c;
        self.disturbed[idx / 64] >> (idx % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn is_agree(&self, r: usize, c: usize) -> bool {
        let idx = r * self.n + c;
        self.agree[idx / 64] >> (idx % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn target_at(&self, r: usize, c: usize) -> Option<u16> {
        self.target.get(&((r * self.n + c) as u64)).copied()
    }

    /// Applies a multiset-preserving batch of cell rewrites, updating
    /// indexes, masks, and the ledger. Panics if a rewrite would touch a
    /// cell where the working square currently agrees with the target;
    /// no trade is ever allowed to do that.
    pub(crate) fn apply_rewrites(&mut self, cells: &[(usize, usize, u16)]) -> Undo {
        let n = self.n;
        let mut undo = Undo { cells: Vec.with_capacity_or(cells.len()) };
        for &(r, c, new) in cells {
            assert!(
                !self.is_agree(r, c),
                "trade touches agreement cell ({}, {})",
                r + 1,
                c + 1
            );
            let idx = r * n + c;
            let old = self.grid[idx];
            debug_assert_ne!(old, new, "rewrite must change the cell");
            self.grid[idx] = new;

            let was_disturbed = self.disturbed[idx / 64] >> (idx % 64) & 1 == 1;
            let becomes_agreement = self.target_at(r, c) == Some(new);
            let mut newly_disturbed = false;
            let mut newly_agree = false;
            if becomes_agreement {
                self.agree[idx / 64] |= 1 << (idx % 64);
                newly_agree = true;
                if was_disturbed {
                    self.ledger.on_redisturb(old, new);
                }
            } else if was_disturbed {
                self.ledger.on_redisturb(old, new);
            } else {
                self.disturbed[idx / 64] |= 1 << (idx % 64);
                self.ledger.on_first_disturb(r, c, new);
                newly_disturbed = true;
            }
            undo.cells.push(CellUndo {
                r: r as u32,
                c: c as u32,
                old,
                new,
                newly_disturbed,
                was_disturbed,
                newly_agree,
            });
        }
        // Re-point the indexes; the batch is multiset-preserving per row
        // and column, so every moved symbol's new home writes its entry.
        for &(r, c, new) in cells {
            self.row_pos[r * n + new as usize - 1] = c as u16;
            self.col_pos[c * n + new as usize - 1] = r as u16;
        }
        self.steps += cells.len() as u64;

        #[cfg(debug_assertions)]
        if n <= 1024 {
            self.debug_check_lines(cells);
        }
        undo
    }

    pub(crate) fn rollback(&mut self, undo: Undo) {
        let n = self.n;
        for cu in undo.cells.iter().rev() {
            let (r, c) = (cu.r as usize, cu.c as usize);
            let idx = r * n + c;
            self.grid[idx] = cu.old;
            if cu.newly_agree {
                self.agree[idx / 64] &= !(1 << (idx % 64));
            }
            if cu.newly_disturbed {
                self.disturbed[idx / 64] &= !(1 << (idx % 64));
                self.ledger.undo_first_disturb(r, c, cu.new);
            } else if cu.was_disturbed {
                self.ledger.on_redisturb(cu.new, cu.old);
            }
        }
        for cu in undo.cells.iter().rev() {
            let (r, c) = (cu.r as usize, cu.c as usize);
            self.row_pos[r * n + cu.old as usize - 1] = c as u16;
            self.col_pos[c * n + cu.old as usize - 1] = r as u16;
        }
    }

    #[cfg(debug_assertions)]
    fn debug_check_lines(&self, cells: &[(usize, usize, u16)]) {
        let n = self.n;
        let mut rows: Vec<usize> = cells.iter().map(|&(r, _, _)| r).collect();
        let mut cols: Vec<usize> = cells.iter().map(|&(_, c, _)| c).collect();
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        let mut seen = vec![false; n + 1];
        for &r in &rows {
            seen.iter_mut().for_each(|x| *x = false);
            for c in 0..n {
                let s = self.grid[r * n + c] as usize;
                assert!(s >= 1 && s <= n && !seen[s], "row {} broken after trade", r + 1);
                seen[s] = true;
            }
        }
        for &c in &cols {
            seen.iter_mut().for_each(|x| *x = false);
            for r in 0..n {
                let s = self.grid[r * n + c] as usize;
                assert!(s >= 1 && s <= n && !seen[s], "column {} broken after trade", c + 1);
                seen[s] = true;
            }
        }
    }

    /// Current working square.
    pub fn square(&self) -> LatinSquare {
        LatinSquare::from_raw(self.n, self.grid.clone()).expect("engine square stays Latin")
    }

    pub(crate) fn into_grid(self) -> Vec<u16> {
        self.grid
    }

    /// Squared overload threshold for the current ledger: the threshold
    /// is `d * n` with `d = sqrt(kappa)`, i.e. `sqrt(T)` for `T` the
    /// disturbed total (floored at the construction budget, plus the
    /// in-flight headroom of one fix).
    pub(crate) fn overload_threshold_sq(&self) -> u128 {
        let floor = (3 * self.n + 7) as u64;
        (self.ledger.total().max(floor) + 48) as u128
    }
}

// Small helper so `Vec::with_capacity` reads uniformly above.
trait WithCap {
    fn with_capacity_or(cap: usize) -> Self;
}
impl WithCap for Vec<CellUndo> {
    fn with_capacity_or(cap: usize) -> Self {
        Vec::with_capacity(cap)
    }
}
use std::vec::Vec as VecForUndo;
#[allow(unused)]
type _Unused = VecForUndo<u8>;
