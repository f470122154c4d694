//! Linear-time solvability on trees.
//!
//! On a tree the most pebbles that can be brought to a root `r` is
//! `movable(v) = C(v) + sum over children u of floor(movable(u) / 2)`,
//! evaluated bottom-up. Moving pebbles away from the root never helps, so
//! this greedy value decides r-solvability exactly.
//!
//! The all-roots variant reroots in two passes. The downward pass computes
//! each subtree's value toward vertex 0. The upward pass gives every vertex
//! the value its parent would send it if the tree were rooted there: the
//! parent's full total minus this child's own contribution, since totals
//! are sums of floored contributions and removing one term is a subtraction.

use crate::error::{invalid, PebbleError, Result};
use crate::graph::{Graph, TreeLayout};
use crate::sampling::Configuration;

use super::oracle::check_inputs;

/// Largest pebble total the tree solvers accept.
pub const MAX_TREE_PEBBLES: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveResult {
    pub root: usize,
    pub solvable: bool,
    pub movable: u64,
}

fn check_tree(g: &Graph, c: &Configuration) -> Result<()> {
    if !g.is_tree() {
        return Err(PebbleError::NotATree);
    }
    if c.total() > MAX_TREE_PEBBLES {
        return Err(invalid(format!(
            "t={} exceeds the tree solver cap 2^62",
            c.total()
        )));
    }
    Ok(())
}

pub fn tree_movable(g: &Graph, c: &Configuration, root: usize) -> Result<SolveResult> {
    check_inputs(g, c, root)?;
    check_tree(g, c)?;
    let layout = TreeLayout::rooted_at(g, root);
    let mut acc = c.counts().to_vec();
    for &v in layout.order[1..].iter().rev() {
        let p = layout.parent[v as usize] as usize;
        acc[p] += acc[v as usize] / 2;
    }
    let movable = acc[root];
    Ok(SolveResult {
        root,
        solvable: movable >= 1,
        movable,
    })
}

/// `movable(r)` for every root `r`, in `O(n)` total.
pub fn tree_movable_all_roots(g: &Graph, c: &Configuration) -> Result<Vec<u64>> {
    if c.n() != g.n() {
        return Err(invalid("configuration and graph sizes differ"));
    }
    check_tree(g, c)?;
    let layout = g.layout().expect("trees carry a layout");
    let mut down = c.counts().to_vec();
    for &v in layout.order[1..].iter().rev() {
        let p = layout.parent[v as usize] as usize;
        down[p] += down[v as usize] / 2;
    }
    let mut total = down.clone();
    for &v in &layout.order[1..] {
        let v = v as usize;
        let p = layout.parent[v] as usize;
        let from_parent = total[p] - down[v] / 2;
        total[v] = down[v] + from_parent / 2;
    }
    Ok(total)
}

/// Reusable buffers for [`all_roots_solvable`].
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    down: Vec<u64>,
    total: Vec<u64>,
}

/// Whether every root is solvable, stopping at the first failure. The caller
/// has checked that `g` is a tree of the configuration's size.
pub(crate) fn all_roots_solvable(g: &Graph, counts: &[u64], scratch: &mut Scratch) -> bool {
    let layout = g.layout().expect("caller checked the graph is a tree");
    let Scratch { down, total } = scratch;
    down.clear();
    down.extend_from_slice(counts);
    for &v in layout.order[1..].iter().rev() {
        let p = layout.parent[v as usize] as usize;
        down[p] += down[v as usize] / 2;
    }
    let root = layout.order[0] as usize;
    if down[root] == 0 {
        return false;
    }
    total.clear();
    total.resize(counts.len(), 0);
    total[root] = down[root];
    for &v in &layout.order[1..] {
        let v = v as usize;
        let p = layout.parent[v] as usize;
        let from_parent = total[p] - down[v] / 2;
        total[v] = down[v] + from_parent / 2;
        if total[v] == 0 {
            return false;
        }
    }
    true
}

pub fn tree_solvable_all_roots(g: &Graph, c: &Configuration) -> Result<Vec<bool>> {
    Ok(tree_movable_all_roots(g, c)?
        .into_iter()
        .map(|m| m >= 1)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_path, build_star, Graph};

    fn conf(v: &[u64]) -> Configuration {
        Configuration::new(v.to_vec()).unwrap()
    }

    #[test]
    fn path_three_rooted_at_end() {
        let p3 = build_path(3).unwrap();
        let r = tree_movable(&p3, &conf(&[0, 1, 2]), 0).unwrap();
        assert_eq!(r.movable, 1);
        assert!(r.solvable);
    }

    #[test]
    fn star_with_single_pebbles_on_leaves() {
        let s = build_star(5).unwrap();
        let r = tree_movable(&s, &conf(&[0, 1, 1, 1, 1]), 0).unwrap();
        assert_eq!(r.movable, 0);
        assert!(!r.solvable);
    }

    #[test]
    fn pebbled_root_is_solvable() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        for r in 0..5 {
            let mut counts = vec![0; 5];
            counts[r] = 1;
            assert!(tree_movable(&g, &conf(&counts), r).unwrap().solvable);
        }
    }

    #[test]
    fn all_roots_examples() {
        let p2 = build_path(2).unwrap();
        assert_eq!(
            tree_solvable_all_roots(&p2, &conf(&[2, 0])).unwrap(),
            vec![true, true]
        );
        let p3 = build_path(3).unwrap();
        assert_eq!(
            tree_solvable_all_roots(&p3, &conf(&[0, 1, 1])).unwrap(),
            vec![false, true, true]
        );
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(
            tree_solvable_all_roots(&g, &Configuration::empty(4)).unwrap(),
            vec![false; 4]
        );
    }

    #[test]
    fn rejects_non_trees() {
        let c3 = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = conf(&[1, 1, 1]);
        assert_eq!(tree_movable(&c3, &c, 0), Err(PebbleError::NotATree));
        assert_eq!(tree_solvable_all_roots(&c3, &c), Err(PebbleError::NotATree));
    }

    #[test]
    fn enforces_pebble_cap() {
        let p2 = build_path(2).unwrap();
        let c = conf(&[MAX_TREE_PEBBLES, 1]);
        assert!(tree_movable(&p2, &c, 0).is_err());
    }
}
