//! Immutable connected graphs and the fuse family.
//!
//! Vertices are stored 0-indexed. Everything that faces a user (edge-list
//! files, configuration strings, CLI output) uses 1-indexed names `v1..vn`.
//!
//! A fuse `F(m, n)` is a path `v1 .. vm` (the wick) with the remaining
//! `n - m` vertices (the sparks) attached as leaves to the center `vm`.
//! `F(n, n)` is the path `P_n` and `F(1, n)` is the star centered at `v1`.

use std::fmt;

use crate::error::{invalid, PebbleError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Fuse { m: usize },
    Path,
    Star,
    Tree,
    General,
}

/// Wick/spark partition of a fuse, 0-indexed internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuseSpec {
    n: usize,
    m: usize,
}

impl FuseSpec {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 1 || m > n {
            return Err(invalid(format!(
                "fuse wick length m={m} must satisfy 1 <= m <= n={n}"
            )));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Index of `vm`.
    pub fn center(&self) -> usize {
        self.m - 1
    }

    /// Wick vertices `v1..vm` in order from the far end to the center.
    pub fn wick(&self) -> std::ops::Range<usize> {
        0..self.m
    }

    pub fn sparks(&self) -> std::ops::Range<usize> {
        self.m..self.n
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.n.saturating_sub(1));
        edges.extend((1..self.m).map(|i| (i - 1, i)));
        edges.extend(self.sparks().map(|s| (s, self.center())));
        edges
    }
}

/// BFS layout of a tree rooted at vertex 0, used by the linear-time solvers.
#[derive(Debug, Clone)]
pub(crate) struct TreeLayout {
    /// BFS order starting at the root.
    pub order: Vec<u32>,
    /// Parent of every vertex; the root is its own parent.
    pub parent: Vec<u32>,
}

impl TreeLayout {
    pub fn rooted_at(g: &Graph, root: usize) -> Self {
        let n = g.n();
        let mut order = Vec::with_capacity(n);
        let mut parent = vec![u32::MAX; n];
        parent[root] = root as u32;
        order.push(root as u32);
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            for &u in g.neighbors(v) {
                if parent[u as usize] == u32::MAX {
                    parent[u as usize] = v as u32;
                    order.push(u);
                }
            }
        }
        Self { order, parent }
    }
}

/// Connected simple undirected graph in compressed adjacency form.
#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    kind: GraphKind,
    layout: Option<TreeLayout>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.offsets == other.offsets && self.neighbors == other.neighbors
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph from 0-indexed edges, checking that it is simple and
    /// connected. Trees are tagged `Tree`; canonical fuse labelings are not
    /// detected here (see [`Graph::from_edge_list`]).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::build(n, edges, None)
    }

    fn build(n: usize, edges: &[(usize, usize)], kind: Option<GraphKind>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("graph must have at least one vertex"));
        }
        if n > u32::MAX as usize {
            return Err(invalid("too many vertices"));
        }
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({}, {}) out of range", u + 1, v + 1)));
            }
            if u == v {
                return Err(invalid(format!("self-loop at v{}", u + 1)));
            }
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("multi-edge at v{}", v + 1)));
            }
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let mut g = Self {
            offsets,
            neighbors,
            kind: GraphKind::General,
            layout: None,
        };
        let layout = TreeLayout::rooted_at(&g, 0);
        if layout.order.len() != n {
            return Err(invalid("graph is not connected"));
        }
        if edges.len() == n - 1 {
            g.layout = Some(layout);
            g.kind = kind.unwrap_or(GraphKind::Tree);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn is_tree(&self) -> bool {
        self.layout.is_some()
    }

    pub(crate) fn layout(&self) -> Option<&TreeLayout> {
        self.layout.as_ref()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Edges `(u, v)` with `u < v`, 0-indexed, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// The wick/spark partition, if this graph was built (or recognized) as a fuse.
    pub fn fuse_spec(&self) -> Option<FuseSpec> {
        let n = self.n();
        match self.kind {
            GraphKind::Fuse { m } => Some(FuseSpec { n, m }),
            GraphKind::Path => Some(FuseSpec { n, m: n }),
            GraphKind::Star => Some(FuseSpec { n, m: 1 }),
            _ => None,
        }
    }

    /// Serializes as an edge list: `"n m_edges"` then one 1-indexed `"u v"` per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.edge_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Parses the edge-list format. A tree whose labeling is exactly a
    /// canonical fuse is tagged as that fuse.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| PebbleError::Parse("empty edge list".into()))?;
        let (n, m_edges) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m_edges);
        for line in lines {
            let (u, v) = parse_pair(line)?;
            if u == 0 || v == 0 {
                return Err(PebbleError::Parse(format!(
                    "vertex ids are 1-indexed, got {line:?}"
                )));
            }
            edges.push((u - 1, v - 1));
        }
        if edges.len() != m_edges {
            return Err(PebbleError::Parse(format!(
                "header declares {m_edges} edges, found {}",
                edges.len()
            )));
        }
        let g = Self::from_edges(n, &edges)?;
        Ok(match g.detect_fuse() {
            Some(m) => Self {
                kind: GraphKind::Fuse { m },
                ..g
            },
            None => g,
        })
    }

    /// Largest `m` such that this graph's labeling is exactly `F(m, n)`.
    fn detect_fuse(&self) -> Option<usize> {
        if !self.is_tree() {
            return None;
        }
        let n = self.n();
        if n == 1 {
            return Some(1);
        }
        // v_n is either the end of the wick (m = n) or a spark on v_m.
        let j = self.neighbors(n - 1)[0] as usize + 1;
        [n, j].into_iter().find(|&m| {
            let spec = FuseSpec { n, m };
            spec.edges().len() == self.edge_count()
                && spec.edges().into_iter().all(|(u, v)| {
                    self.neighbors(u).binary_search(&(v as u32)).is_ok()
                })
        })
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|tok| {
        tok.parse::<usize>()
            .map_err(|e| PebbleError::Parse(format!("{tok:?}: {e}")))
    });
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(PebbleError::Parse(format!(
            "expected two integers, got {line:?}"
        ))),
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

pub fn build_fuse(m: usize, n: usize) -> Result<Graph> {
    let spec = FuseSpec::new(m, n)?;
    Graph::build(n, &spec.edges(), Some(GraphKind::Fuse { m }))
}

pub fn build_path(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(invalid("path needs n >= 1"));
    }
    Graph::build(n, &FuseSpec { n, m: n }.edges(), Some(GraphKind::Path))
}

/// Star `K_{1,n-1}` centered at `v1`; same edge set as `build_fuse(1, n)`.
pub fn build_star(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(invalid("star needs n >= 1"));
    }
    Graph::build(n, &FuseSpec { n, m: 1 }.edges(), Some(GraphKind::Star))
}

/// Wick length whose fuse has threshold near `t`: `round(lg(t^2 / n))`,
/// clamped to `[1, n]`.
pub fn wick_length_for_target_threshold(t: u64, n: u64) -> Result<usize> {
    if n < 2 {
        return Err(invalid(format!("need n >= 2, got {n}")));
    }
    if (t as u128) * (t as u128) < n as u128 {
        return Err(invalid(format!(
            "t={t} is below sqrt(n) for n={n}; no fuse has a threshold that low"
        )));
    }
    let lg = 2.0 * (t as f64).log2() - (n as f64).log2();
    Ok((lg.round().max(1.0) as usize).min(n as usize))
}

/// Wick length `max(1, round((1 - 2 eps) lg n))`, clamped to `n`.
pub fn wick_length_for_epsilon(epsilon: f64, n: usize) -> Result<usize> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(invalid(format!("epsilon={epsilon} must lie in [0, 1/2)")));
    }
    if n < 1 {
        return Err(invalid("n must be positive"));
    }
    let m = ((1.0 - 2.0 * epsilon) * (n as f64).log2()).round();
    Ok((m.max(1.0) as usize).min(n))
}
