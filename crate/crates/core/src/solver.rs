//! Exhaustive backtracking completion for small orders.
//!
//! Serves as the tiny-order fallback of the completion engine and as the
//! decision/counting procedure behind the reduction experiments. Cells
//! are chosen fewest-candidates-first; symbols are tried in ascending
//! order, so results are deterministic.

use crate::square::{LatinSquare, PartialLatinSquare};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("backtracking search exceeded the node cap of {0}")]
pub struct SearchCapExceeded(pub u64);

const BITS: usize = 64;

struct Search {
    n: usize,
    grid: Vec<u16>,
    row_mask: Vec<u64>,
    col_mask: Vec<u64>,
    words: usize,
    nodes: u64,
    cap: u64,
}

impl Search {
    fn new(p: &PartialLatinSquare, cap: u64) -> Self {
        let n = p.order();
        let words = (n + BITS - 1) / BITS;
        let mut s = Search {
            n,
            grid: p.cells().to_vec(),
            row_mask: vec![0; n * words],
            col_mask: vec![0; n * words],
            words,
            nodes: 0,
            cap,
        };
        for r in 0..n {
            for c in 0..n {
                let v = s.grid[r * n + c];
                if v != 0 {
                    let b = (v - 1) as usize;
                    s.row_mask[r * s.words + b / BITS] |= 1 << (b % BITS);
                    s.col_mask[c * s.words + b / BITS] |= 1 << (b % BITS);
                }
            }
        }
        s
    }

    fn candidates(&self, r: usize, c: usize) -> u32 {
        let mut count = 0;
        for w in 0..self.words {
            let used = self.row_mask[r * self.words + w] | self.col_mask[c * self.words + w];
            let top = if w == self.words - 1 && self.n % BITS != 0 {
                (1u64 << (self.n % BITS)) - 1
            } else {
                !0u64
            };
            count += (!used & top).count_ones();
        }
        count
    }

    fn best_blank(&self) -> Option<(usize, usize, u32)> {
        let mut best: Option<(usize, usize, u32)> = None;
        for r in 0..self.n {
            for c in 0..self.n {
                if self.grid[r * self.n + c] != 0 {
                    continue;
                }
                let k = self.candidates(r, c);
                if k == 0 {
                    return Some((r, c, 0));
                }
                if best.map_or(true, |(_, _, bk)| k < bk) {
                    best = Some((r, c, k));
                }
            }
        }
        best
    }

    fn place(&mut self, r: usize, c: usize, v: u16) {
        let b = (v - 1) as usize;
        self.grid[r * self.n + c] = v;
        self.row_mask[r * self.words + b / BITS] |= 1 << (b % BITS);
        self.col_mask[c * self.words + b / BITS] |= 1 << (b % BITS);
    }

    fn unplace(&mut self, r: usize, c: usize, v: u16) {
        let b = (v - 1) as usize;
        self.grid[r * self.n + c] = 0;
        self.row_mask[r * self.words + b / BITS] &= !(1 << (b % BITS));
        self.col_mask[c * self.words + b / BITS] &= !(1 << (b % BITS));
    }

    fn allowed(&self, r: usize, c: usize, v: u16) -> bool {
        let b = (v - 1) as usize;
        let used = self.row_mask[r * self.words + b / BITS] | self.col_mask[c * self.words + b / BITS];
        used >> (b % BITS) & 1 == 0
    }

    /// Enumerates completions, invoking `found` on each; `found` returns
    /// false to stop the search.
    fn run(
        &mut self,
        found: &mut dyn FnMut(&[u16]) -> bool,
    ) -> Result<bool, SearchCapExceeded> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(SearchCapExceeded(self.cap));
        }
        let Some((r, c, k)) = self.best_blank() else {
            return Ok(found(&self.grid));
        };
        if k == 0 {
            return Ok(true);
        }
        for v in 1..=self.n as u16 {
            if self.allowed(r, c, v) {
                self.place(r, c, v);
                let keep_going = self.run(found)?;
                self.unplace(r, c, v);
                if !keep_going {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Finds one completion, or proves there is none, within `node_cap`
/// search nodes.
pub fn complete_backtracking(
    p: &PartialLatinSquare,
    node_cap: u64,
) -> Result<Option<LatinSquare>, SearchCapExceeded> {
    let mut s = Search::new(p, node_cap);
    let mut result = None;
    s.run(&mut |grid| {
        result = Some(grid.to_vec());
        false
    })?;
    Ok(result.map(|cells| LatinSquare::from_raw(p.order(), cells).expect("search output is Latin")))
}

/// Counts completions up to `count_cap`, within `node_cap` search nodes.
pub fn count_completions(
    p: &PartialLatinSquare,
    count_cap: usize,
    node_cap: u64,
) -> Result<usize, SearchCapExceeded> {
    let mut s = Search::new(p, node_cap);
    let mut count = 0usize;
    s.run(&mut |_| {
        count += 1;
        count < count_cap
    })?;
    Ok(count)
}

/// Enumerates all completions, collecting the full grids. Intended for
/// small orders only.
pub fn enumerate_completions(
    p: &PartialLatinSquare,
    node_cap: u64,
) -> Result<Vec<Vec<u16>>, SearchCapExceeded> {
    let mut s = Search::new(p, node_cap);
    let mut all = Vec::new();
    s.run(&mut |grid| {
        all.push(grid.to_vec());
        true
    })?;
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::square::validate_partial;

    fn p(rows: &[&[u16]]) -> PartialLatinSquare {
        let rows: Vec<Vec<Option<u16>>> = rows
            .iter()
            .map(|r| r.iter().map(|&s| if s == 0 { None } else { Some(s) }).collect())
            .collect();
        validate_partial(&rows).unwrap()
    }

    #[test]
    fn completes_running_example() {
        let sq = p(&[&[1, 2, 0], &[0, 3, 0], &[0, 0, 2]]);
        let l = complete_backtracking(&sq, 1_000_000).unwrap().unwrap();
        assert_eq!(l.cells(), &[1, 2, 3, 2, 3, 1, 3, 1, 2]);
    }

    #[test]
    fn detects_incompletable() {
        // 1 . . / . 1 . / . . 2 has no completion.
        let sq = p(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]);
        assert_eq!(complete_backtracking(&sq, 1_000_000).unwrap(), None);
    }

    #[test]
    fn order_counts() {
        assert_eq!(count_completions(&PartialLatinSquare::empty(1), 10, 1000).unwrap(), 1);
        assert_eq!(count_completions(&PartialLatinSquare::empty(2), 10, 1000).unwrap(), 2);
        assert_eq!(count_completions(&PartialLatinSquare::empty(3), 100, 10_000).unwrap(), 12);
        assert_eq!(
            count_completions(&PartialLatinSquare::empty(4), 1000, 1_000_000).unwrap(),
            576
        );
    }

    #[test]
    fn cap_is_enforced() {
        assert!(count_completions(&PartialLatinSquare::empty(5), usize::MAX, 50).is_err());
    }
}
