//! Incremental minimum spanning trees under vertex insertion.
//!
//! Inserting a vertex `z` with a full star of edges into a tree `T` only
//! needs the tree and the star: every edge that left `T` earlier lies on a
//! cycle with lighter edges and can never come back. A single post-order pass
//! over `T` merges each subtree's spanning tree with `z`, dropping the
//! heaviest edge of the one cycle created at each tree edge. Edges are
//! compared by weight, then by their pair of input indices.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::space::{cmp_weighted, euclidean, Pair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub pair: Pair,
    pub weight: f64,
}

impl Edge {
    pub fn new(a: usize, b: usize, weight: f64) -> Self {
        Edge { pair: Pair::new(a, b), weight }
    }

    pub fn cmp_key(&self, other: &Edge) -> Ordering {
        cmp_weighted(self.weight, self.pair, other.weight, other.pair)
    }
}

/// Edges that entered and left the tree during one insertion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InsertReport {
    pub added: Vec<Edge>,
    pub removed: Vec<Edge>,
}

/// A spanning tree over a growing vertex set, with edges kept sorted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mst {
    vertices: Vec<usize>,
    edges: Vec<Edge>,
}

impl Mst {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wrap an existing spanning tree, sorting its edges.
    pub fn from_edges(vertices: Vec<usize>, mut edges: Vec<Edge>) -> Result<Self> {
        if !vertices.is_empty() && edges.len() + 1 != vertices.len() {
            return Err(Error::InvalidInput("a spanning tree on m vertices has m - 1 edges".into()));
        }
        edges.sort_by(Edge::cmp_key);
        Ok(Mst { vertices, edges })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Tree edges in ascending `(weight, pair)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Insert `v` with `weights[k]` the weight of edge `(v, vertices()[k])`,
    /// re-sorting the edge list afterwards.
    pub fn insert(&mut self, v: usize, weights: &[f64]) -> Result<InsertReport> {
        let report = self.update(v, weights)?;
        self.edges.sort_by(Edge::cmp_key);
        Ok(report)
    }

    /// Insert `v` using Euclidean weights. Since only a few edges change per
    /// insertion, the sorted edge list is patched by a linear merge.
    pub fn insert_euclidean(&mut self, v: usize, coords: &[Vec<f64>]) -> Result<InsertReport> {
        let p = coords
            .get(v)
            .ok_or_else(|| Error::InvalidInput(format!("no coordinates for point {v}")))?;
        let weights: Vec<f64> = self.vertices.iter().map(|&q| euclidean(p, &coords[q])).collect();
        let old = std::mem::take(&mut self.edges);
        let report = self.update_detached(v, &weights, &old)?;
        let removed: HashSet<Pair> = report.removed.iter().map(|e| e.pair).collect();
        let mut added = report.added.clone();
        added.sort_by(Edge::cmp_key);
        let mut merged = Vec::with_capacity(old.len() + 1);
        let mut it = added.into_iter().peekable();
        for e in old.into_iter().filter(|e| !removed.contains(&e.pair)) {
            while let Some(a) = it.next_if(|a| a.cmp_key(&e) == Ordering::Less) {
                merged.push(a);
            }
            merged.push(e);
        }
        merged.extend(it);
        self.edges = merged;
        Ok(report)
    }

    fn update(&mut self, v: usize, weights: &[f64]) -> Result<InsertReport> {
        let old = std::mem::take(&mut self.edges);
        let report = self.update_detached(v, weights, &old)?;
        let removed: HashSet<Pair> = report.removed.iter().map(|e| e.pair).collect();
        self.edges = old.into_iter().filter(|e| !removed.contains(&e.pair)).collect();
        self.edges.extend(report.added.iter().copied());
        Ok(report)
    }

    /// Core update. Computes the edges that change; `self.edges` is rebuilt
    /// by the caller from `old`.
    fn update_detached(&mut self, v: usize, weights: &[f64], old: &[Edge]) -> Result<InsertReport> {
        let m = self.vertices.len();
        if weights.len() != m {
            return Err(Error::InvalidInput(format!("expected {m} star weights, got {}", weights.len())));
        }
        if self.vertices.contains(&v) {
            return Err(Error::InvalidInput(format!("vertex {v} is already in the tree")));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidInput(format!("invalid edge weight {w}")));
        }
        let star: Vec<Edge> = self.vertices.iter().zip(weights).map(|(&q, &w)| Edge::new(v, q, w)).collect();
        self.vertices.push(v);
        if m == 0 {
            return Ok(InsertReport::default());
        }

        let slot: HashMap<usize, usize> = self.vertices[..m].iter().enumerate().map(|(k, &q)| (q, k)).collect();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        for (k, e) in old.iter().enumerate() {
            let a = slot[&e.pair.lo];
            let b = slot[&e.pair.hi];
            adj[a].push((b, k));
            adj[b].push((a, k));
        }

        // Preorder from slot 0 with the tree edge to each parent.
        let mut parent_edge = vec![usize::MAX; m];
        let mut parent = vec![usize::MAX; m];
        let mut preorder = Vec::with_capacity(m);
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            preorder.push(u);
            for &(w, k) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = u;
                    parent_edge[w] = k;
                    stack.push(w);
                }
            }
        }
        if preorder.len() != m {
            return Err(Error::Invariant("previous tree is not connected".into()));
        }

        // heaviest[u]: heaviest edge on the path from u to v in the merged
        // tree of u's processed subtree.
        let mut heaviest: Vec<Edge> = star.clone();
        let mut removed = Vec::with_capacity(m - 1);
        for &c in preorder.iter().rev() {
            if c == 0 {
                continue;
            }
            let p = parent[c];
            let tree_edge = old[parent_edge[c]];
            let from_child = heaviest[c];
            let from_parent = heaviest[p];
            let mut worst = tree_edge;
            for e in [from_child, from_parent] {
                if e.cmp_key(&worst) == Ordering::Greater {
                    worst = e;
                }
            }
            removed.push(worst);
            if worst.pair == from_parent.pair {
                heaviest[p] = if tree_edge.cmp_key(&from_child) == Ordering::Greater { tree_edge } else { from_child };
            }
        }

        let dropped: HashSet<Pair> = removed.iter().map(|e| e.pair).collect();
        let added = star.into_iter().filter(|e| !dropped.contains(&e.pair)).collect();
        let removed = removed.into_iter().filter(|e| e.pair.lo != v && e.pair.hi != v).collect();
        Ok(InsertReport { added, removed })
    }
}

/// Functional form of [`Mst::insert`].
pub fn mst_insert(prev: &Mst, v: usize, weights: &[f64]) -> Result<Mst> {
    let mut next = prev.clone();
    next.insert(v, weights)?;
    Ok(next)
}

/// Functional form of [`Mst::insert_euclidean`].
pub fn mst_insert_euclidean(prev: &Mst, v: usize, coords: &[Vec<f64>]) -> Result<Mst> {
    let mut next = prev.clone();
    next.insert_euclidean(v, coords)?;
    Ok(next)
}

/// Kruskal over an explicit edge list, used as a reference in tests.
pub fn kruskal(vertices: &[usize], edges: &[Edge]) -> Vec<Edge> {
    let slot: HashMap<usize, usize> = vertices.iter().enumerate().map(|(k, &q)| (q, k)).collect();
    let mut sorted = edges.to_vec();
    sorted.sort_by(Edge::cmp_key);
    let mut dsu = crate::union_find::DisjointSet::new(vertices.len());
    sorted
        .into_iter()
        .filter(|e| dsu.union(slot[&e.pair.lo], slot[&e.pair.hi]))
        .collect()
}
