#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use pebbling::{Configuration, Graph};

/// Every vector of `n` non-negative counts summing to `t`.
pub fn compositions(n: usize, t: u64) -> Vec<Vec<u64>> {
    fn go(n: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, t, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

pub fn config(counts: &[u64]) -> Configuration {
    Configuration::new(counts.to_vec()).unwrap()
}

/// Breadth-first search over configurations; shares no code with the library.
pub fn brute_r_solvable(g: &Graph, counts: &[u64], root: usize) -> bool {
    let adj: Vec<Vec<usize>> = (0..g.n())
        .map(|v| g.neighbors(v).iter().map(|&u| u as usize).collect())
        .collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::from([counts.to_vec()]);
    seen.insert(counts.to_vec());
    while let Some(c) = queue.pop_front() {
        if c[root] > 0 {
            return true;
        }
        for v in 0..c.len() {
            if c[v] < 2 {
                continue;
            }
            for &u in &adj[v] {
                let mut next = c.clone();
                next[v] -= 2;
                next[u] += 1;
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    false
}

pub fn brute_solvable(g: &Graph, counts: &[u64]) -> bool {
    (0..g.n()).all(|r| brute_r_solvable(g, counts, r))
}

/// Exact `Pr[solvable]` under the uniform multiset law.
pub fn exact_solvable_probability(g: &Graph, t: u64) -> BigRational {
    let all = compositions(g.n(), t);
    let good = all.iter().filter(|c| brute_solvable(g, c)).count();
    BigRational::new(BigInt::from(good), BigInt::from(all.len()))
}

fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .filter(|&&u| u != parent)
        .map(|&u| rooted_code(adj, u, v))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Canonical string of an unrooted tree: the least rooted code over all roots.
fn canonical(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    (0..n).map(|r| rooted_code(&adj, r, usize::MAX)).min().unwrap()
}

/// One representative of every isomorphism class of trees on `n` vertices.
pub fn nonisomorphic_trees(n: usize) -> Vec<Graph> {
    if n == 1 {
        return vec![Graph::from_edges(1, &[]).unwrap()];
    }
    if n == 2 {
        return vec![Graph::from_edges(2, &[(0, 1)]).unwrap()];
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let len = n - 2;
    let mut seq = vec![0usize; len];
    loop {
        let edges = prufer_edges(&seq, n);
        if seen.insert(canonical(n, &edges)) {
            out.push(Graph::from_edges(n, &edges).unwrap());
        }
        let mut k = 0;
        while k < len && seq[k] == n - 1 {
            seq[k] = 0;
            k += 1;
        }
        if k == len {
            break;
        }
        seq[k] += 1;
    }
    out
}
