//! Exhaustive search over reachable configurations.
//!
//! Every pebbling step removes one pebble from the board, so the search
//! depth is bounded by `t`. Visited configurations are memoized; the search
//! refuses to visit more than a configurable number of them.

use std::collections::HashSet;

use crate::error::{invalid, PebbleError, Result};
use crate::graph::Graph;
use crate::sampling::Configuration;

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub state_cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl Oracle {
    pub fn with_cap(state_cap: usize) -> Self {
        Self { state_cap }
    }

    pub fn r_solvable(&self, g: &Graph, c: &Configuration, root: usize) -> Result<bool> {
        check_inputs(g, c, root)?;
        if c.get(root) >= 1 {
            return Ok(true);
        }
        let mut visited: HashSet<Vec<u64>> = HashSet::new();
        let mut stack = vec![c.counts().to_vec()];
        visited.insert(c.counts().to_vec());
        while let Some(state) = stack.pop() {
            for v in 0..g.n() {
                if state[v] < 2 {
                    continue;
                }
                for &u in g.neighbors(v) {
                    let u = u as usize;
                    if u == root {
                        return Ok(true);
                    }
                    let mut next = state.clone();
                    next[v] -= 2;
                    next[u] += 1;
                    if visited.contains(&next) {
                        continue;
                    }
                    if visited.len() >= self.state_cap {
                        return Err(PebbleError::BudgetExceeded {
                            cap: self.state_cap,
                        });
                    }
                    visited.insert(next.clone());
                    stack.push(next);
                }
            }
        }
        Ok(false)
    }
}

pub(crate) fn check_inputs(g: &Graph, c: &Configuration, root: usize) -> Result<()> {
    if c.n() != g.n() {
        return Err(invalid(format!(
            "configuration has {} vertices, graph has {}",
            c.n(),
            g.n()
        )));
    }
    if root >= g.n() {
        return Err(invalid(format!("root v{} outside the graph", root + 1)));
    }
    Ok(())
}

/// Exhaustive r-solvability with the default state cap.
pub fn oracle_r_solvable(g: &Graph, c: &Configuration, root: usize) -> Result<bool> {
    Oracle::default().r_solvable(g, c, root)
}
