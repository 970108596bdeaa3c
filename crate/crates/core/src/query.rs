//! Fibered barcodes and treegrams along lines of positive slope.
//!
//! A line `L` meets staircase `I_x` exactly when its entry point
//! `max(t(σ = b_x), t(ε = 0))` lies below the envelope. Staircases born at
//! or before the crossing of `L` with `ε = 0` are entered along the
//! horizontal axis and form a prefix of the birth order. The rest are
//! entered through their left edge, which is hit iff the top-left corner
//! `(b_x, u_x(b_x))` lies strictly above `L`. Those are found with a segment
//! tree over the birth order whose nodes store upper-hull layers. For a
//! positive-slope line the highest point of a set above `L` is always on its
//! upper hull, and along a concave chain the points above `L` are
//! contiguous, so each layer is searched in logarithmic time and peeling
//! stops at the first layer with no hit.

use std::cmp::Ordering;

use crate::error::Result;
use crate::staircase::{Bar, Extended, Line, Staircase};
use crate::staircode::{DecoratedStaircase, Staircode};
use crate::treegram::{Leaf, Merge, Treegram};

/// Nodes at or below this size are scanned directly.
const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone, Copy)]
struct Corner {
    b: f64,
    u: f64,
    owner: usize,
    slot: usize,
}

#[derive(Debug, Clone)]
struct Node {
    lo: usize,
    hi: usize,
    children: Option<(usize, usize)>,
    layers: Vec<Vec<Corner>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IndexOptions {
    /// Answer every query by scanning all staircases.
    pub linear_scan: bool,
}

/// Query structure over a fixed staircode.
#[derive(Debug, Clone)]
pub struct QueryIndex {
    entries: Vec<DecoratedStaircase>,
    position: Vec<usize>,
    by_birth: Vec<usize>,
    nodes: Vec<Node>,
    unbounded: Vec<usize>,
    options: IndexOptions,
}

/// Upper hull of points sorted by `(b, u)`; returns hull indices.
fn upper_hull(pts: &[Corner]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for (k, p) in pts.iter().enumerate() {
        while hull.len() >= 2 {
            let o = pts[hull[hull.len() - 2]];
            let a = pts[hull[hull.len() - 1]];
            let cross = (a.b - o.b) * (p.u - o.u) - (a.u - o.u) * (p.b - o.b);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

fn peel(mut pts: Vec<Corner>) -> Vec<Vec<Corner>> {
    pts.sort_by(|p, q| p.b.total_cmp(&q.b).then(p.u.total_cmp(&q.u)));
    let mut layers = Vec::new();
    while !pts.is_empty() {
        let hull = upper_hull(&pts);
        let mut on_hull = vec![false; pts.len()];
        for &k in &hull {
            on_hull[k] = true;
        }
        layers.push(hull.iter().map(|&k| pts[k]).collect());
        pts = pts.into_iter().zip(on_hull).filter(|(_, h)| !h).map(|(p, _)| p).collect();
    }
    layers
}

impl QueryIndex {
    pub fn build(code: &Staircode) -> Self {
        Self::build_with(code, IndexOptions::default())
    }

    pub fn build_with(code: &Staircode, options: IndexOptions) -> Self {
        let position = code.positions();
        let mut by_birth: Vec<usize> = (0..code.len()).collect();
        by_birth.sort_by(|&a, &b| {
            code.staircase(a)
                .birth_sigma()
                .total_cmp(&code.staircase(b).birth_sigma())
                .then(position[a].cmp(&position[b]))
        });
        let mut index = QueryIndex {
            entries: code.entries.clone(),
            position,
            by_birth,
            nodes: Vec::new(),
            unbounded: code.staircases().filter(|s| s.is_quadrant()).map(|s| s.owner).collect(),
            options,
        };
        if !options.linear_scan && !index.by_birth.is_empty() {
            index.build_node(0, index.by_birth.len());
        }
        index
    }

    fn build_node(&mut self, lo: usize, hi: usize) -> usize {
        let corners: Vec<Corner> = (lo..hi)
            .filter_map(|slot| {
                let x = self.by_birth[slot];
                let s = &self.entries[x].staircase;
                let u = s.steps()[0].u.finite()?;
                (u > 0.0).then_some(Corner { b: s.birth_sigma(), u, owner: x, slot })
            })
            .collect();
        let id = self.nodes.len();
        self.nodes.push(Node { lo, hi, children: None, layers: Vec::new() });
        if hi - lo <= LEAF_SIZE {
            self.nodes[id].layers = vec![corners];
        } else {
            self.nodes[id].layers = peel(corners);
            let mid = (lo + hi) / 2;
            let l = self.build_node(lo, mid);
            let r = self.build_node(mid, hi);
            self.nodes[id].children = Some((l, r));
        }
        id
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn staircase(&self, x: usize) -> &Staircase {
        &self.entries[x].staircase
    }

    /// Owners whose staircase meets the line, in no particular order.
    pub fn candidates(&self, line: &Line) -> Vec<usize> {
        if self.options.linear_scan {
            return (0..self.entries.len()).collect();
        }
        let t0 = line.t_eps(0.0);
        let split = self
            .by_birth
            .partition_point(|&x| line.t_sigma(self.entries[x].staircase.birth_sigma()) <= t0);
        let mut out: Vec<usize> = self.by_birth[..split].to_vec();
        for &x in &self.unbounded {
            if !out.contains(&x) {
                out.push(x);
            }
        }
        if split < self.by_birth.len() {
            self.report(0, split, line, &mut out);
        }
        out
    }

    fn report(&self, node: usize, from: usize, line: &Line, out: &mut Vec<usize>) {
        let n = &self.nodes[node];
        if n.hi <= from {
            return;
        }
        match n.children {
            None => {
                let hits = n.layers.iter().flatten().filter(|p| p.slot >= from && above(line, p));
                out.extend(hits.map(|p| p.owner));
            }
            Some(_) if n.lo >= from => report_layers(&n.layers, line, out),
            Some((l, r)) => {
                self.report(l, from, line, out);
                self.report(r, from, line, out);
            }
        }
    }

    /// Nonempty intersections with the line, one bar per staircase, sorted
    /// by birth then owner position.
    pub fn query_barcode(&self, line: &Line) -> Vec<Bar> {
        let mut bars: Vec<Bar> = self
            .candidates(line)
            .into_iter()
            .filter_map(|x| {
                let (birth, death) = self.entries[x].staircase.line_bar(line)?;
                Some(Bar { owner: x, birth, death })
            })
            .collect();
        bars.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(self.position[a.owner].cmp(&self.position[b.owner])));
        bars
    }

    /// Every owner with its bar, empty intersections included.
    pub fn query_barcode_verbose(&self, line: &Line) -> Vec<(usize, Option<Bar>)> {
        (0..self.entries.len())
            .map(|x| {
                let bar = self.entries[x]
                    .staircase
                    .line_bar(line)
                    .map(|(birth, death)| Bar { owner: x, birth, death });
                (x, bar)
            })
            .collect()
    }

    /// Treegram of the restriction to the line. Every point is a leaf born
    /// where the line enters its sublevel set. When its bar ends, its block
    /// joins the block of the conqueror in effect at that filter value.
    pub fn query_treegram(&self, line: &Line) -> Result<Treegram> {
        let mut leaves = Vec::with_capacity(self.entries.len());
        let mut merges = Vec::new();
        for (x, e) in self.entries.iter().enumerate() {
            let birth = line.entry_time(e.staircase.birth_sigma());
            leaves.push(Leaf { point: x, birth });
            if let Extended::Finite(exit) = e.staircase.exit_time(line) {
                let t = exit.max(birth);
                let k = e.conquerors.partition_point(|c| line.t_sigma(c.sigma_from) <= t);
                let conqueror = e.conquerors[k.max(1) - 1].conqueror;
                merges.push(Merge { height: t, a: x, b: conqueror, edge: None });
            }
        }
        leaves.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(self.position[a.point].cmp(&self.position[b.point])));
        merges.sort_by(|a, b| {
            a.height.total_cmp(&b.height).then(self.position[a.a].cmp(&self.position[b.a]))
        });
        let t = Treegram { leaves, merges };
        t.validate()?;
        Ok(t)
    }

    pub fn positions(&self) -> &[usize] {
        &self.position
    }
}

/// Top-left corner strictly above the line, phrased in line parameters so
/// it agrees with the bar computation.
fn above(line: &Line, p: &Corner) -> bool {
    line.t_eps(p.u) > line.t_sigma(p.b)
}

fn score(line: &Line, p: &Corner) -> f64 {
    line.t_eps(p.u) - line.t_sigma(p.b)
}

fn report_layers(layers: &[Vec<Corner>], line: &Line, out: &mut Vec<usize>) {
    for chain in layers {
        if chain.is_empty() {
            continue;
        }
        // First index whose successor does not improve the score.
        let mut lo = 0;
        let mut hi = chain.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if score(line, &chain[mid + 1]) > score(line, &chain[mid]) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let from = lo.saturating_sub(1);
        let to = (lo + 2).min(chain.len());
        let best = (from..to)
            .max_by(|&a, &b| score(line, &chain[a]).partial_cmp(&score(line, &chain[b])).unwrap_or(Ordering::Equal))
            .unwrap_or(lo);
        if !above(line, &chain[best]) {
            break;
        }
        let mut left = best;
        while left > 0 && above(line, &chain[left - 1]) {
            left -= 1;
        }
        let mut right = best;
        while right + 1 < chain.len() && above(line, &chain[right + 1]) {
            right += 1;
        }
        out.extend(chain[left..=right].iter().map(|p| p.owner));
    }
}

/// Barcode by direct scan; the reference the index must agree with.
pub fn query_barcode_linear(code: &Staircode, line: &Line) -> Vec<Bar> {
    QueryIndex::build_with(code, IndexOptions { linear_scan: true }).query_barcode(line)
}
