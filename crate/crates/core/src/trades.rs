//! Reversible batches of cell rewrites on (partial, improper) Latin
//! squares.
//!
//! A trade is stored as an ordered list of per-cell rewrite steps rather
//! than as a pair of squares, keeping its footprint proportional to its
//! size. Applying a proper trade to a (partial) Latin square yields a
//! (partial) Latin square; improper trades may leave signed multisets
//! behind and are only meaningful on [`ImproperSquare`]s.

use crate::square::{ImproperSquare, LatinSquare, PartialLatinSquare, Symbol};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TradeError {
    #[error("cell ({row}, {col}) is out of bounds for order {order}")]
    OutOfBounds { row: usize, col: usize, order: usize },
    #[error("symbol {symbol} is not present at cell ({row}, {col})")]
    MissingSymbolAtCell { row: usize, col: usize, symbol: u16 },
    #[error("step at ({row}, {col}) leaves a multi-valued cell in a proper square")]
    ImproperResult { row: usize, col: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TradeKind {
    Proper2x2,
    Improper2x2,
    Composite,
}

/// One cell rewrite: remove `removed`, add `added`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeStep {
    pub row: usize,
    pub col: usize,
    pub removed: Vec<Symbol>,
    pub added: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trade {
    pub steps: Vec<TradeStep>,
    pub kind: TradeKind,
}

impl Trade {
    /// The proper 2x2 trade on rows x cols carrying `a`/`b` diagonally:
    /// `a b / b a` becomes `b a / a b`.
    pub fn proper_2x2(rows: [usize; 2], cols: [usize; 2], a: Symbol, b: Symbol) -> Self {
        let step = |row, col, rem: Symbol, add: Symbol| TradeStep {
            row,
            col,
            removed: vec![rem],
            added: vec![add],
        };
        Trade {
            steps: vec![
                step(rows[0], cols[0], a, b),
                step(rows[0], cols[1], b, a),
                step(rows[1], cols[0], b, a),
                step(rows[1], cols[1], a, b),
            ],
            kind: TradeKind::Proper2x2,
        }
    }

    /// The improper 2x2 template: cells `a, b / b, c` become
    /// `b, a / a, b + c - a`. The bottom-right cell keeps `c` and picks
    /// up `+b -a`.
    pub fn improper_2x2(rows: [usize; 2], cols: [usize; 2], a: Symbol, b: Symbol) -> Self {
        let step = |row, col, rem: Vec<Symbol>, add: Vec<Symbol>| TradeStep {
            row,
            col,
            removed: rem,
            added: add,
        };
        Trade {
            steps: vec![
                step(rows[0], cols[0], vec![a], vec![b]),
                step(rows[0], cols[1], vec![b], vec![a]),
                step(rows[1], cols[0], vec![b], vec![a]),
                step(rows[1], cols[1], vec![a], vec![b]),
            ],
            kind: TradeKind::Improper2x2,
        }
    }

    /// Set of touched cells.
    pub fn footprint(&self) -> BTreeSet<(usize, usize)> {
        self.steps.iter().map(|s| (s.row, s.col)).collect()
    }

    /// The inverse trade: swap removed/added per step, reverse the order.
    pub fn reverse(&self) -> Trade {
        Trade {
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| TradeStep {
                    row: s.row,
                    col: s.col,
                    removed: s.added.clone(),
                    added: s.removed.clone(),
                })
                .collect(),
            kind: self.kind,
        }
    }
}

/// Applies a trade to a partial Latin square. Every step must resolve to
/// at most one symbol per cell; the row/column invariants are the
/// caller's concern and are checked in debug builds.
pub fn apply_to_partial(sq: &mut PartialLatinSquare, t: &Trade) -> Result<(), TradeError> {
    let n = sq.order();
    // Validate first, then mutate: application is all-or-nothing.
    let mut scratch = sq.clone();
    for step in &t.steps {
        if step.row >= n || step.col >= n {
            return Err(TradeError::OutOfBounds { row: step.row, col: step.col, order: n });
        }
        let mut multiset: Vec<(Symbol, i32)> = match scratch.get(step.row, step.col) {
            Some(s) => vec![(s, 1)],
            None => vec![],
        };
        for &r in &step.removed {
            match multiset.iter_mut().find(|e| e.0 == r) {
                Some(e) if e.1 > 0 => e.1 -= 1,
                _ => {
                    return Err(TradeError::MissingSymbolAtCell {
                        row: step.row,
                        col: step.col,
                        symbol: r.0,
                    })
                }
            }
        }
        for &a in &step.added {
            match multiset.iter_mut().find(|e| e.0 == a) {
                Some(e) => e.1 += 1,
                None => multiset.push((a, 1)),
            }
        }
        multiset.retain(|e| e.1 != 0);
        let new = match multiset.as_slice() {
            [] => 0,
            [(s, 1)] => s.0,
            _ => return Err(TradeError::ImproperResult { row: step.row, col: step.col }),
        };
        scratch.set_unchecked(step.row, step.col, new);
    }
    *sq = scratch;
    Ok(())
}

/// Applies a proper trade to a full Latin square, returning the rewritten
/// square.
pub fn apply_to_latin(sq: &LatinSquare, t: &Trade) -> Result<LatinSquare, TradeError> {
    let mut p = sq.as_partial();
    apply_to_partial(&mut p, t)?;
    LatinSquare::from_raw(p.order(), p.cells().to_vec())
        .map_err(|_| TradeError::ImproperResult { row: 0, col: 0 })
}

/// Applies a trade on an improper square with signed-multiset arithmetic.
pub fn apply_to_improper(sq: &mut ImproperSquare, t: &Trade) -> Result<(), TradeError> {
    let n = sq.order();
    for step in &t.steps {
        if step.row >= n || step.col >= n {
            return Err(TradeError::OutOfBounds { row: step.row, col: step.col, order: n });
        }
    }
    for step in &t.steps {
        for &r in &step.removed {
            sq.add(step.row, step.col, r, -1);
        }
        for &a in &step.added {
            sq.add(step.row, step.col, a, 1);
        }
    }
    Ok(())
}

/// Two partial squares form a trade iff their filled-cell sets coincide
/// and every row and column carries identical symbol multisets.
pub fn is_proper_trade(p: &PartialLatinSquare, q: &PartialLatinSquare) -> bool {
    let n = p.order();
    if q.order() != n {
        return false;
    }
    for r in 0..n {
        for c in 0..n {
            if p.get(r, c).is_some() != q.get(r, c).is_some() {
                return false;
            }
        }
    }
    let line_multisets = |sq: &PartialLatinSquare, row: bool, idx: usize| -> Vec<u16> {
        let mut v: Vec<u16> = (0..n)
            .filter_map(|j| if row { sq.get(idx, j) } else { sq.get(j, idx) })
            .map(|s| s.0)
            .collect();
        v.sort_unstable();
        v
    };
    (0..n).all(|i| {
        line_multisets(p, true, i) == line_multisets(q, true, i)
            && line_multisets(p, false, i) == line_multisets(q, false, i)
    })
}

/// An ordered log of applied trades with their cumulative footprint.
#[derive(Debug, Clone, Default)]
pub struct TradeRecord {
    pub trades: Vec<Trade>,
    footprint: BTreeSet<(usize, usize)>,
}

impl TradeRecord {
    pub fn push(&mut self, t: Trade) {
        self.footprint.extend(t.footprint());
        self.trades.push(t);
    }

    pub fn footprint(&self) -> &BTreeSet<(usize, usize)> {
        &self.footprint
    }
}
