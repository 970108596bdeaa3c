//! Graded Betti numbers, dimension functions and structural checks.
//!
//! Corner counts summed over all staircases give three feature functions
//! `γ0, γ1, γ2`. The Betti numbers of the persistence module are
//! `β0 = γ0`, `β1 = max(γ1 - γ2, 0)` and `β2 = max(γ2 - γ1, 0)`. When the
//! staircode was computed from a dataset, this is evaluated at integer rank
//! grades, where no two corners of different points can collide by accident,
//! and only then mapped to real coordinates.

use std::collections::BTreeMap;

use ordered_float::OrderedFloat;

use crate::error::{Error, Result};
use crate::space::{AugmentedMetricSpace, GenericOrdering};
use crate::staircase::{Extended, Grade, Staircase, Step};
use crate::staircode::Staircode;
use crate::union_find::DisjointSet;

type RealKey = (OrderedFloat<f64>, OrderedFloat<f64>);

/// Corner counts per degree, keyed by real grade.
pub type FeatureFunctions = [BTreeMap<RealKey, u32>; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BettiEntry {
    pub grade: Grade,
    pub count: u32,
}

/// Sparse graded Betti numbers in degrees 0, 1 and 2, sorted by grade.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GradedBetti {
    pub degrees: [Vec<BettiEntry>; 3],
}

impl GradedBetti {
    pub fn entries(&self, degree: usize) -> &[BettiEntry] {
        &self.degrees[degree]
    }

    /// Support in real coordinates, with multiplicity.
    pub fn support(&self, degree: usize) -> Vec<(f64, f64)> {
        self.degrees[degree]
            .iter()
            .flat_map(|e| std::iter::repeat_n((e.grade.sigma, e.grade.eps), e.count as usize))
            .collect()
    }

    pub fn value(&self, degree: usize, sigma: f64, eps: f64) -> u32 {
        self.degrees[degree]
            .iter()
            .filter(|e| e.grade.sigma == sigma && e.grade.eps == eps)
            .map(|e| e.count)
            .sum()
    }

    /// Same entries with rank annotations removed.
    pub fn without_ranks(mut self) -> Self {
        for e in self.degrees.iter_mut().flatten() {
            e.grade.sigma_rank = None;
            e.grade.eps_rank = None;
        }
        self
    }

    /// Build from per-degree lists of `(σ, ε)` with multiplicity.
    pub fn from_support(support: [Vec<(f64, f64)>; 3]) -> Self {
        let mut out = GradedBetti::default();
        for (d, pts) in support.into_iter().enumerate() {
            let mut map: BTreeMap<RealKey, u32> = BTreeMap::new();
            for (s, e) in pts {
                *map.entry((OrderedFloat(s), OrderedFloat(e))).or_default() += 1;
            }
            out.degrees[d] = to_entries(&map);
        }
        out
    }
}

fn to_entries(map: &BTreeMap<RealKey, u32>) -> Vec<BettiEntry> {
    map.iter()
        .filter(|(_, &c)| c > 0)
        .map(|(&(s, e), &count)| BettiEntry { grade: Grade::new(s.0, e.0), count })
        .collect()
}

/// Corner counts of every staircase, keyed by real grade.
pub fn feature_functions(code: &Staircode) -> FeatureFunctions {
    let mut out: FeatureFunctions = Default::default();
    for s in code.staircases() {
        for c in s.corners() {
            *out[c.kind.degree()].entry((OrderedFloat(c.sigma), OrderedFloat(c.eps))).or_default() += 1;
        }
    }
    out
}

fn truncate<K: Ord + Copy>(gamma: &[BTreeMap<K, u32>; 3]) -> [BTreeMap<K, u32>; 3] {
    let mut beta: [BTreeMap<K, u32>; 3] = Default::default();
    beta[0] = gamma[0].clone();
    for (&k, &g1) in &gamma[1] {
        let g2 = gamma[2].get(&k).copied().unwrap_or(0);
        if g1 > g2 {
            beta[1].insert(k, g1 - g2);
        }
    }
    for (&k, &g2) in &gamma[2] {
        let g1 = gamma[1].get(&k).copied().unwrap_or(0);
        if g2 > g1 {
            beta[2].insert(k, g2 - g1);
        }
    }
    beta
}

/// Betti numbers evaluated directly at real grades.
///
/// Exact when filter values and distances are pairwise distinct.
pub fn graded_betti(code: &Staircode) -> GradedBetti {
    let beta = truncate(&feature_functions(code));
    GradedBetti { degrees: [to_entries(&beta[0]), to_entries(&beta[1]), to_entries(&beta[2])] }
}

/// Staircases of the rank-graded space, with `σ` and `ε` replaced by ranks.
pub fn rank_staircases(code: &Staircode, ordering: &GenericOrdering) -> Result<Vec<Staircase>> {
    let ranked = code
        .ranked
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("staircode carries no rank data".into()))?;
    ranked
        .iter()
        .map(|env| {
            let steps = env
                .steps
                .iter()
                .map(|s| Step {
                    sigma: s.sigma_rank as f64,
                    u: s.edge.map_or(Extended::Infinite, |p| Extended::Finite(ordering.d_rank(p) as f64)),
                })
                .collect();
            Staircase::new(env.owner, steps)
        })
        .collect()
}

/// Betti numbers at rank grades, keyed by `(σ-rank, ε-rank)`.
pub fn rank_betti(code: &Staircode, ordering: &GenericOrdering) -> Result<[BTreeMap<(usize, usize), u32>; 3]> {
    let mut gamma: [BTreeMap<(usize, usize), u32>; 3] = Default::default();
    for s in rank_staircases(code, ordering)? {
        for c in s.corners() {
            *gamma[c.kind.degree()].entry((c.sigma as usize, c.eps as usize)).or_default() += 1;
        }
    }
    Ok(truncate(&gamma))
}

/// Betti numbers computed at rank grades and reported in real coordinates.
/// Several rank grades can land on one real grade when values tie; their
/// counts are added and the ranks dropped.
pub fn graded_betti_ranked(code: &Staircode, space: &AugmentedMetricSpace) -> Result<GradedBetti> {
    if code.len() != space.len() {
        return Err(Error::InvalidInput("staircode and dataset differ in size".into()));
    }
    let ordering = GenericOrdering::new(space);
    let beta = rank_betti(code, &ordering)?;
    let mut out = GradedBetti::default();
    for d in 0..3 {
        let mut merged: BTreeMap<RealKey, (u32, Option<(usize, usize)>, usize)> = BTreeMap::new();
        for (&(sr, er), &count) in &beta[d] {
            let sigma = space.f(code.order[sr - 1]);
            let eps = ordering.eps_value(space, er);
            let slot = merged.entry((OrderedFloat(sigma), OrderedFloat(eps))).or_insert((0, Some((sr, er)), 0));
            slot.0 += count;
            slot.2 += 1;
        }
        out.degrees[d] = merged
            .into_iter()
            .map(|((s, e), (count, ranks, sources))| {
                let ranks = if sources == 1 { ranks } else { None };
                BettiEntry {
                    grade: Grade {
                        sigma: s.0,
                        eps: e.0,
                        sigma_rank: ranks.map(|r| r.0),
                        eps_rank: ranks.map(|r| r.1),
                    },
                    count,
                }
            })
            .collect();
    }
    Ok(out)
}

/// Rank of the module at `a`: the number of staircases containing it.
pub fn dimension_function(code: &Staircode, a: Grade) -> usize {
    code.count_containing(a)
}

/// Rank at `a` recovered from Betti numbers by summing the Euler
/// characteristic over grades below `a`.
pub fn dimension_from_betti(betti: &GradedBetti, a: Grade) -> i64 {
    let mut total = 0i64;
    for (d, sign) in [(0usize, 1i64), (1, -1), (2, 1)] {
        for e in &betti.degrees[d] {
            if e.grade.sigma <= a.sigma && e.grade.eps <= a.eps {
                total += sign * e.count as i64;
            }
        }
    }
    total
}

/// Outcome of comparing module Betti numbers with staircode corner counts.
#[derive(Debug, Clone, PartialEq)]
pub enum Decomposability {
    /// Corner counts agree with Betti numbers everywhere.
    Consistent,
    /// Some grade carries both inner and outer corners that cancel in the
    /// module, so it cannot split into these intervals.
    NotIntervalDecomposable { grades: Vec<Grade> },
}

pub fn decomposability_necessary_test(code: &Staircode) -> Decomposability {
    let gamma = feature_functions(code);
    let grades: Vec<Grade> = gamma[1]
        .keys()
        .filter(|k| gamma[2].contains_key(k))
        .map(|&(s, e)| Grade::new(s.0, e.0))
        .collect();
    if grades.is_empty() {
        Decomposability::Consistent
    } else {
        Decomposability::NotIntervalDecomposable { grades }
    }
}

/// Search for a triple violating `d(x, z) ≤ max(d(x, y), d(y, z))`.
pub fn ultrametric_violation(space: &AugmentedMetricSpace) -> Option<[usize; 3]> {
    let n = space.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x != y && y != z && x != z && space.dist(x, z) > space.dist(x, y).max(space.dist(y, z)) {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

pub fn check_ultrametric(space: &AugmentedMetricSpace) -> bool {
    ultrametric_violation(space).is_none()
}

/// Single-linkage heights between all pairs of the points in `present`.
/// Absent points keep `+∞`.
fn single_linkage(space: &AugmentedMetricSpace, present: &[bool]) -> Vec<Vec<f64>> {
    let n = space.len();
    let mut pairs: Vec<_> = space.pairs().filter(|(p, _)| present[p.lo] && present[p.hi]).collect();
    pairs.sort_by(|a, b| crate::space::cmp_weighted(a.1, a.0, b.1, b.0));
    let mut u = vec![vec![f64::INFINITY; n]; n];
    let mut dsu = DisjointSet::new(n);
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for i in 0..n {
        u[i][i] = 0.0;
    }
    for (p, w) in pairs {
        let (ra, rb) = (dsu.find(p.lo), dsu.find(p.hi));
        if ra == rb {
            continue;
        }
        for &a in &members[ra] {
            for &b in &members[rb] {
                u[a][b] = w;
                u[b][a] = w;
            }
        }
        dsu.union(ra, rb);
        let root = dsu.find(ra);
        let (keep, gone) = if root == ra { (ra, rb) } else { (rb, ra) };
        let moved = std::mem::take(&mut members[gone]);
        members[keep].extend(moved);
    }
    u
}

/// Result of the constant-conqueror check.
#[derive(Debug, Clone, PartialEq)]
pub enum ConquerorCheck {
    Holds,
    /// No single older point conquers `point` at every filter level.
    Fails { point: usize, candidates: Vec<(f64, Vec<usize>)> },
}

/// For each non-eldest point, intersect its conqueror sets over all filter
/// levels from its birth on; the check holds when no intersection is empty.
pub fn check_constant_conqueror(space: &AugmentedMetricSpace, order: &[usize]) -> Result<ConquerorCheck> {
    space.validate_order(order)?;
    let n = space.len();
    let position = AugmentedMetricSpace::positions(order);
    let mut levels: Vec<f64> = space.f_values().to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut sets: Vec<Vec<(f64, Vec<usize>)>> = vec![Vec::new(); n];
    for &v in &levels {
        let present: Vec<bool> = (0..n).map(|i| space.f(i) <= v).collect();
        let u = single_linkage(space, &present);
        for x in (0..n).filter(|&x| present[x] && position[x] > 0) {
            let older: Vec<usize> = (0..n).filter(|&y| position[y] < position[x]).collect();
            let best = older.iter().map(|&y| u[x][y]).fold(f64::INFINITY, f64::min);
            let argmin = older.into_iter().filter(|&y| u[x][y] == best).collect();
            sets[x].push((v, argmin));
        }
    }
    for &x in order.iter().skip(1) {
        let mut common: Vec<usize> = sets[x][0].1.clone();
        for (_, s) in &sets[x][1..] {
            common.retain(|y| s.contains(y));
        }
        if common.is_empty() {
            return Ok(ConquerorCheck::Fails { point: x, candidates: sets[x].clone() });
        }
    }
    Ok(ConquerorCheck::Holds)
}
