//! Treegrams as leaf births plus a height-sorted list of block merges.
//!
//! Under the elder rule every merge has a conquered point, the younger of
//! the two block eldests, and the surviving eldest, which is also the
//! conqueror of the conquered point.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mst::Edge;
use crate::space::Pair;
use crate::staircase::{Bar, Extended};
use crate::union_find::DisjointSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaf {
    pub point: usize,
    pub birth: f64,
}

/// Merge of the blocks containing points `a` and `b` at `height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub height: f64,
    pub a: usize,
    pub b: usize,
    pub edge: Option<Pair>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Treegram {
    pub leaves: Vec<Leaf>,
    pub merges: Vec<Merge>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoratedMerge {
    pub height: f64,
    pub edge: Option<Pair>,
    pub conquered: usize,
    pub eldest: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoratedTreegram {
    pub treegram: Treegram,
    pub merges: Vec<DecoratedMerge>,
}

impl Treegram {
    /// Check that merges are sorted, reference known leaves that are already
    /// born, and always join two distinct blocks.
    pub fn validate(&self) -> Result<()> {
        self.replay(|_, _, _| ()).map(|_| ())
    }

    /// Blocks present at `height`, each sorted, listed by smallest member.
    pub fn partition_at(&self, height: f64) -> Vec<Vec<usize>> {
        let slot = self.slots();
        let mut dsu = DisjointSet::new(self.leaves.len());
        for m in self.merges.iter().filter(|m| m.height <= height) {
            dsu.union(slot[&m.a], slot[&m.b]);
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for (k, leaf) in self.leaves.iter().enumerate() {
            if leaf.birth <= height {
                groups.entry(dsu.find(k)).or_default().push(leaf.point);
            }
        }
        let mut blocks: Vec<Vec<usize>> = groups
            .into_values()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        blocks
    }

    fn slots(&self) -> HashMap<usize, usize> {
        self.leaves.iter().enumerate().map(|(k, l)| (l.point, k)).collect()
    }

    /// Replay merges with union-find, calling `visit(merge, eldest_a, eldest_b)`
    /// where the eldests are chosen by `(birth, point)` unless overridden.
    fn replay<F: FnMut(&Merge, usize, usize)>(&self, mut visit: F) -> Result<DisjointSet> {
        let slot = self.slots();
        if slot.len() != self.leaves.len() {
            return Err(Error::InvalidInput("treegram leaves must be distinct".into()));
        }
        let mut dsu = DisjointSet::new(self.leaves.len());
        let mut prev = f64::NEG_INFINITY;
        for m in &self.merges {
            if m.height < prev || m.height.is_nan() {
                return Err(Error::Unsorted("merge heights must be non-decreasing".into()));
            }
            prev = m.height;
            let (Some(&sa), Some(&sb)) = (slot.get(&m.a), slot.get(&m.b)) else {
                return Err(Error::InvalidInput("merge references an unknown leaf".into()));
            };
            if self.leaves[sa].birth > m.height || self.leaves[sb].birth > m.height {
                return Err(Error::Invariant("merge involves a leaf that is not yet born".into()));
            }
            let (ra, rb) = (dsu.find(sa), dsu.find(sb));
            if ra == rb {
                return Err(Error::Invariant("merge joins a block with itself".into()));
            }
            visit(m, ra, rb);
            dsu.union(sa, sb);
        }
        Ok(dsu)
    }
}

/// Build the single-linkage treegram of `vertices` (all born at height 0)
/// from spanning-tree edges sorted by `(weight, pair)`.
pub fn build_treegram(vertices: &[usize], sorted_edges: &[Edge]) -> Result<Treegram> {
    if sorted_edges.windows(2).any(|w| w[0].cmp_key(&w[1]) == Ordering::Greater) {
        return Err(Error::Unsorted("edges must be sorted by weight".into()));
    }
    let slot: HashMap<usize, usize> = vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut dsu = DisjointSet::new(vertices.len());
    let mut merges = Vec::with_capacity(vertices.len().saturating_sub(1));
    for e in sorted_edges {
        let (Some(&a), Some(&b)) = (slot.get(&e.pair.lo), slot.get(&e.pair.hi)) else {
            return Err(Error::InvalidInput(format!("edge {:?} leaves the vertex set", e.pair)));
        };
        if dsu.union(a, b) {
            merges.push(Merge { height: e.weight, a: e.pair.lo, b: e.pair.hi, edge: Some(e.pair) });
        }
    }
    let leaves = vertices.iter().map(|&point| Leaf { point, birth: 0.0 }).collect();
    Ok(Treegram { leaves, merges })
}

/// Decorate each merge with its conquered point and surviving eldest.
///
/// `position[x]` is the place of input index `x` in the point order; leaves
/// are compared by `(birth, position)`.
pub fn decorate(t: &Treegram, position: &[usize]) -> Result<DecoratedTreegram> {
    let births: HashMap<usize, f64> = t.leaves.iter().map(|l| (l.point, l.birth)).collect();
    let elder = |x: usize, y: usize| -> bool {
        match births[&x].total_cmp(&births[&y]) {
            Ordering::Equal => position[x] < position[y],
            o => o == Ordering::Less,
        }
    };
    let mut eldest: Vec<usize> = t.leaves.iter().map(|l| l.point).collect();
    let mut out = Vec::with_capacity(t.merges.len());
    t.replay(|m, ra, rb| {
        let (ea, eb) = (eldest[ra], eldest[rb]);
        let (old, young) = if elder(ea, eb) { (ea, eb) } else { (eb, ea) };
        out.push(DecoratedMerge { height: m.height, edge: m.edge, conquered: young, eldest: old });
        // The union may pick either root; record the survivor on both.
        eldest[ra] = old;
        eldest[rb] = old;
    })?;
    Ok(DecoratedTreegram { treegram: t.clone(), merges: out })
}

/// One bar per leaf, from its birth to the height where it is conquered.
/// Bars of leaves conquered at birth are empty and kept.
pub fn elder_rule_barcode(t: &Treegram, position: &[usize]) -> Result<Vec<Bar>> {
    let d = decorate(t, position)?;
    let death: HashMap<usize, f64> = d.merges.iter().map(|m| (m.conquered, m.height)).collect();
    Ok(t.leaves
        .iter()
        .map(|l| Bar {
            owner: l.point,
            birth: l.birth,
            death: death.get(&l.point).map_or(Extended::Infinite, |&h| Extended::Finite(h)),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_merges_in_weight_order() {
        let edges = vec![Edge::new(0, 1, 3.0), Edge::new(1, 2, 4.0)];
        let t = build_treegram(&[0, 1, 2], &edges).unwrap();
        let heights: Vec<f64> = t.merges.iter().map(|m| m.height).collect();
        assert_eq!(heights, vec![3.0, 4.0]);
        assert_eq!(t.partition_at(3.5), vec![vec![0, 1], vec![2]]);
        assert_eq!(t.partition_at(4.0), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn unsorted_edges_are_rejected() {
        let edges = vec![Edge::new(1, 2, 4.0), Edge::new(0, 1, 3.0)];
        assert!(matches!(build_treegram(&[0, 1, 2], &edges), Err(Error::Unsorted(_))));
    }

    #[test]
    fn two_leaf_barcode() {
        let t = Treegram {
            leaves: vec![Leaf { point: 0, birth: 0.0 }, Leaf { point: 1, birth: 1.0 }],
            merges: vec![Merge { height: 5.0, a: 0, b: 1, edge: None }],
        };
        let bars = elder_rule_barcode(&t, &[0, 1]).unwrap();
        assert_eq!(bars[0].death, Extended::Infinite);
        assert_eq!((bars[1].birth, bars[1].death), (1.0, Extended::Finite(5.0)));
    }

    #[test]
    fn merge_before_birth_is_rejected() {
        let t = Treegram {
            leaves: vec![Leaf { point: 0, birth: 0.0 }, Leaf { point: 1, birth: 6.0 }],
            merges: vec![Merge { height: 5.0, a: 0, b: 1, edge: None }],
        };
        assert!(t.validate().is_err());
    }
}
