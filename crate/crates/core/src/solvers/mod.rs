//! Solvability deciders, each behind [`RootSolver`] and selectable by name.
//!
//! | name               | graphs | roots    | cost                  |
//! |--------------------|--------|----------|-----------------------|
//! | `exhaustive`       | any    | any      | exponential in `t`    |
//! | `tree-greedy`      | trees  | any      | `O(n)`, all roots too |
//! | `fuse-certificate` | fuses  | `v1`     | `O(n)`                |

mod certificate;
mod oracle;
mod tree;

pub use certificate::{fuse_certificate, Dyadic, FuseCertificate};
pub use oracle::{oracle_r_solvable, Oracle, DEFAULT_STATE_CAP};
pub(crate) use tree::{all_roots_solvable, Scratch};
pub use tree::{
    tree_movable, tree_movable_all_roots, tree_solvable_all_roots, SolveResult,
    MAX_TREE_PEBBLES,
};

use crate::error::{invalid, PebbleError, Result};
use crate::graph::Graph;
use crate::sampling::{all_configurations, count_configurations, Configuration};

pub trait RootSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn r_solvable(&self, g: &Graph, c: &Configuration, root: usize) -> Result<bool>;

    /// Solvable from every root.
    fn solvable(&self, g: &Graph, c: &Configuration) -> Result<bool> {
        for r in 0..g.n() {
            if !self.r_solvable(g, c, r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl RootSolver for Oracle {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn r_solvable(&self, g: &Graph, c: &Configuration, root: usize) -> Result<bool> {
        Oracle::r_solvable(self, g, c, root)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TreeGreedy;

impl RootSolver for TreeGreedy {
    fn name(&self) -> &'static str {
        "tree-greedy"
    }

    fn r_solvable(&self, g: &Graph, c: &Configuration, root: usize) -> Result<bool> {
        Ok(tree_movable(g, c, root)?.solvable)
    }

    fn solvable(&self, g: &Graph, c: &Configuration) -> Result<bool> {
        Ok(tree_movable_all_roots(g, c)?.iter().all(|&m| m >= 1))
    }
}

/// Decides only the root `v1` of a fuse.
#[derive(Debug, Clone, Copy, Default)]
pub struct CertificateSolver;

impl RootSolver for CertificateSolver {
    fn name(&self) -> &'static str {
        "fuse-certificate"
    }

    fn r_solvable(&self, g: &Graph, c: &Configuration, root: usize) -> Result<bool> {
        let spec = g
            .fuse_spec()
            .ok_or_else(|| PebbleError::Unsupported("certificate needs a fuse".into()))?;
        if root != 0 {
            return Err(PebbleError::Unsupported(format!(
                "certificate decides root v1 only, asked for v{}",
                root + 1
            )));
        }
        Ok(fuse_certificate(&spec, c)?.v1_solvable)
    }

    fn solvable(&self, _g: &Graph, _c: &Configuration) -> Result<bool> {
        Err(PebbleError::Unsupported(
            "certificate decides root v1 only".into(),
        ))
    }
}

pub const SOLVER_NAMES: [&str; 3] = ["exhaustive", "tree-greedy", "fuse-certificate"];

pub fn solver_by_name(name: &str) -> Result<Box<dyn RootSolver>> {
    match name {
        "exhaustive" => Ok(Box::new(Oracle::default())),
        "tree-greedy" => Ok(Box::new(TreeGreedy)),
        "fuse-certificate" => Ok(Box::new(CertificateSolver)),
        other => Err(invalid(format!(
            "unknown solver {other:?}; expected one of {SOLVER_NAMES:?}"
        ))),
    }
}

/// The solver [`solvable`] dispatches to for this graph.
pub fn default_solver(g: &Graph) -> Box<dyn RootSolver> {
    if g.is_tree() {
        Box::new(TreeGreedy)
    } else {
        Box::new(Oracle::default())
    }
}

/// Solvable from every root: linear time on trees, exhaustive search otherwise.
pub fn solvable(g: &Graph, c: &Configuration) -> Result<bool> {
    default_solver(g).solvable(g, c)
}

/// Largest number of configurations [`pebbling_number_exact`] will examine.
pub const PEBBLING_NUMBER_BUDGET: u64 = 2_000_000;

/// Smallest `t` such that every configuration of `t` pebbles is solvable.
///
/// By pebble-addition monotonicity every larger `t` is then universal too.
pub fn pebbling_number_exact(g: &Graph) -> Result<u64> {
    let n = g.n();
    let mut examined = 0u64;
    for t in 0.. {
        let count = count_configurations(n as u64, t);
        examined = examined.saturating_add(u64::try_from(count).unwrap_or(u64::MAX));
        if examined > PEBBLING_NUMBER_BUDGET {
            return Err(PebbleError::BudgetExceeded {
                cap: PEBBLING_NUMBER_BUDGET as usize,
            });
        }
        let mut universal = true;
        for c in all_configurations(n, t) {
            if !solvable(g, &c)? {
                universal = false;
                break;
            }
        }
        if universal {
            return Ok(t);
        }
    }
    unreachable!("the t loop only exits by returning")
}
