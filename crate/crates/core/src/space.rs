//! Augmented metric spaces `(X, d, f)` and their tie-breaking orders.
//!
//! Distances live in a packed lower-triangular array. The triangle
//! inequality is never assumed, so any symmetric non-negative matrix works.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Relative tolerance used when checking supplied distances against coordinates.
const COORD_TOLERANCE: f64 = 1e-9;

/// An unordered pair of distinct input indices, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub lo: usize,
    pub hi: usize,
}

impl Pair {
    pub fn new(a: usize, b: usize) -> Self {
        debug_assert_ne!(a, b, "a pair needs two distinct points");
        if a < b {
            Pair { lo: a, hi: b }
        } else {
            Pair { lo: b, hi: a }
        }
    }

    /// Position of the pair in the packed lower-triangular layout.
    pub fn packed_index(self) -> usize {
        self.hi * (self.hi - 1) / 2 + self.lo
    }
}

/// Compare two weighted pairs by weight, breaking ties lexicographically.
pub fn cmp_weighted(wa: f64, a: Pair, wb: f64, b: Pair) -> Ordering {
    wa.total_cmp(&wb).then_with(|| a.cmp(&b))
}

/// A finite set of labelled points with a distance matrix and a filter `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMetricSpace {
    ids: Vec<String>,
    f: Vec<f64>,
    dist: Vec<f64>,
    coords: Option<Vec<Vec<f64>>>,
}

impl AugmentedMetricSpace {
    /// Build a space from an explicit lower-triangular distance list.
    ///
    /// `lower[k]` holds the distances from point `k + 1` to points `0..=k`.
    pub fn from_lower_triangular(ids: Vec<String>, f: Vec<f64>, lower: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        validate_points(&ids, &f)?;
        if lower.len() != n.saturating_sub(1) {
            return Err(Error::InvalidInput(format!(
                "expected {} distance rows for {} points, got {}",
                n.saturating_sub(1),
                n,
                lower.len()
            )));
        }
        let mut dist = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (k, row) in lower.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(Error::InvalidInput(format!(
                    "distance row {} must have {} entries, got {}",
                    k + 1,
                    k + 1,
                    row.len()
                )));
            }
            for (j, &d) in row.iter().enumerate() {
                check_distance(d, k + 1, j)?;
                dist.push(d);
            }
        }
        Ok(AugmentedMetricSpace { ids, f, dist, coords: None })
    }

    /// Build a space from a full square matrix, which must be symmetric.
    pub fn from_square(ids: Vec<String>, f: Vec<f64>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("distance matrix must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::InvalidInput(format!("distance matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let lower = (1..n).map(|i| matrix[i][..i].to_vec()).collect();
        Self::from_lower_triangular(ids, f, lower)
    }

    /// Build a Euclidean space from coordinates.
    pub fn from_coords(ids: Vec<String>, f: Vec<f64>, coords: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        validate_points(&ids, &f)?;
        if coords.len() != n {
            return Err(Error::InvalidInput("one coordinate row per point is required".into()));
        }
        let dim = coords.first().map_or(0, Vec::len);
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::InvalidInput(format!("point {} has {} coordinates, expected {dim}", ids[i], c.len())));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("point {} has a non-finite coordinate", ids[i])));
            }
        }
        let mut dist = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..n {
            for j in 0..i {
                dist.push(euclidean(&coords[i], &coords[j]));
            }
        }
        Ok(AugmentedMetricSpace { ids, f, dist, coords: Some(coords) })
    }

    /// Attach coordinates to a space built from distances, checking consistency.
    pub fn with_coords(mut self, coords: Vec<Vec<f64>>) -> Result<Self> {
        let rebuilt = Self::from_coords(self.ids.clone(), self.f.clone(), coords)?;
        for (k, (&given, &derived)) in self.dist.iter().zip(&rebuilt.dist).enumerate() {
            let scale = given.abs().max(derived.abs()).max(1.0);
            if (given - derived).abs() > COORD_TOLERANCE * scale {
                return Err(Error::InvalidInput(format!(
                    "distance entry {k} ({given}) disagrees with coordinates ({derived})"
                )));
            }
        }
        self.coords = rebuilt.coords;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn f(&self, i: usize) -> f64 {
        self.f[i]
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Distance between two points; zero on the diagonal.
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        if a == b {
            0.0
        } else {
            self.dist[Pair::new(a, b).packed_index()]
        }
    }

    pub fn pair_dist(&self, p: Pair) -> f64 {
        self.dist[p.packed_index()]
    }

    /// Number of unordered pairs, `n(n-1)/2`.
    pub fn pair_count(&self) -> usize {
        self.dist.len()
    }

    /// Lower-triangular rows as accepted by [`Self::from_lower_triangular`].
    pub fn lower_rows(&self) -> Vec<Vec<f64>> {
        (1..self.len()).map(|i| (0..i).map(|j| self.dist(i, j)).collect()).collect()
    }

    /// Iterate over every pair together with its distance.
    pub fn pairs(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        let n = self.len();
        (1..n).flat_map(move |hi| (0..hi).map(move |lo| (Pair { lo, hi }, self.dist[Pair { lo, hi }.packed_index()])))
    }

    /// Input indices sorted by `(f, index)`.
    pub fn point_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.f[a].total_cmp(&self.f[b]).then(a.cmp(&b)));
        order
    }

    /// Restrict to a subset of points, keeping their relative input order.
    pub fn subspace(&self, keep: &[usize]) -> Self {
        let ids = keep.iter().map(|&i| self.ids[i].clone()).collect();
        let f = keep.iter().map(|&i| self.f[i]).collect();
        let mut dist = Vec::new();
        for a in 1..keep.len() {
            for b in 0..a {
                dist.push(self.dist(keep[a], keep[b]));
            }
        }
        let coords = self.coords.as_ref().map(|c| keep.iter().map(|&i| c[i].clone()).collect());
        AugmentedMetricSpace { ids, f, dist, coords }
    }

    /// Replace the filter function, keeping ids and distances.
    pub fn with_filter(&self, f: Vec<f64>) -> Result<Self> {
        validate_points(&self.ids, &f)?;
        Ok(AugmentedMetricSpace { f, ..self.clone() })
    }

    /// True when `f` or the pairwise distances contain repeated values.
    pub fn has_ties(&self) -> bool {
        let mut fs = self.f.clone();
        fs.sort_by(f64::total_cmp);
        let mut ds = self.dist.clone();
        ds.sort_by(f64::total_cmp);
        fs.windows(2).any(|w| w[0] == w[1]) || ds.windows(2).any(|w| w[0] == w[1])
    }

    /// Position of each input index within `order`.
    pub fn positions(order: &[usize]) -> Vec<usize> {
        let mut pos = vec![0; order.len()];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        pos
    }

    /// Check that `order` is a permutation compatible with `f`.
    pub fn validate_order(&self, order: &[usize]) -> Result<()> {
        let n = self.len();
        if order.len() != n {
            return Err(Error::InvalidOrder(format!("order lists {} points, expected {n}", order.len())));
        }
        let mut seen = vec![false; n];
        for &i in order {
            if i >= n || seen[i] {
                return Err(Error::InvalidOrder(format!("order is not a permutation (index {i})")));
            }
            seen[i] = true;
        }
        for w in order.windows(2) {
            if self.f[w[0]] > self.f[w[1]] {
                return Err(Error::InvalidOrder(format!(
                    "{} precedes {} but has a larger filter value",
                    self.ids[w[0]], self.ids[w[1]]
                )));
            }
        }
        Ok(())
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn validate_points(ids: &[String], f: &[f64]) -> Result<()> {
    if ids.is_empty() {
        return Err(Error::InvalidInput("a dataset needs at least one point".into()));
    }
    if ids.len() != f.len() {
        return Err(Error::InvalidInput("ids and filter values differ in length".into()));
    }
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate point id {id:?}")));
        }
    }
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("filter value of {} is not finite", ids[i])));
    }
    Ok(())
}

fn check_distance(d: f64, i: usize, j: usize) -> Result<()> {
    if d.is_nan() || d.is_infinite() {
        return Err(Error::InvalidInput(format!("distance ({i}, {j}) is not finite")));
    }
    if d < 0.0 {
        return Err(Error::InvalidInput(format!("distance ({i}, {j}) is negative")));
    }
    Ok(())
}

/// Rank data for points and pairs under the `(value, index)` tie-break.
///
/// Ranks are 1-based; pair rank 0 is reserved for the `ε = 0` row.
#[derive(Debug, Clone)]
pub struct GenericOrdering {
    pub point_order: Vec<usize>,
    pub f_rank: Vec<usize>,
    pub pair_order: Vec<Pair>,
    pair_rank: Vec<u32>,
    pub has_ties: bool,
}

impl GenericOrdering {
    pub fn new(space: &AugmentedMetricSpace) -> Self {
        let point_order = space.point_order();
        let mut f_rank = vec![0; space.len()];
        for (k, &i) in point_order.iter().enumerate() {
            f_rank[i] = k + 1;
        }
        let mut pair_order: Vec<Pair> = space.pairs().map(|(p, _)| p).collect();
        pair_order.sort_unstable_by(|&a, &b| cmp_weighted(space.pair_dist(a), a, space.pair_dist(b), b));
        let mut pair_rank = vec![0u32; pair_order.len()];
        for (k, p) in pair_order.iter().enumerate() {
            pair_rank[p.packed_index()] = (k + 1) as u32;
        }
        GenericOrdering { point_order, f_rank, pair_order, pair_rank, has_ties: space.has_ties() }
    }

    pub fn d_rank(&self, p: Pair) -> usize {
        self.pair_rank[p.packed_index()] as usize
    }

    /// Filter value of the point with the given rank.
    pub fn sigma_value(&self, space: &AugmentedMetricSpace, rank: usize) -> f64 {
        space.f(self.point_order[rank - 1])
    }

    /// Distance of the pair with the given rank, with rank 0 meaning zero.
    pub fn eps_value(&self, space: &AugmentedMetricSpace, rank: usize) -> f64 {
        if rank == 0 {
            0.0
        } else {
            space.pair_dist(self.pair_order[rank - 1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn packed_index_is_dense() {
        let mut seen = Vec::new();
        for hi in 1..6 {
            for lo in 0..hi {
                seen.push(Pair::new(hi, lo).packed_index());
            }
        }
        assert_eq!(seen, (0..15).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_input() {
        let bad_nan = AugmentedMetricSpace::from_lower_triangular(ids(2), vec![0.0, 1.0], vec![vec![f64::NAN]]);
        assert!(bad_nan.is_err());
        let negative = AugmentedMetricSpace::from_lower_triangular(ids(2), vec![0.0, 1.0], vec![vec![-1.0]]);
        assert!(negative.is_err());
        let dup = AugmentedMetricSpace::from_lower_triangular(vec!["a".into(), "a".into()], vec![0.0, 1.0], vec![vec![1.0]]);
        assert!(dup.is_err());
        let empty = AugmentedMetricSpace::from_lower_triangular(vec![], vec![], vec![]);
        assert!(empty.is_err());
    }

    #[test]
    fn ranks_break_ties_by_index() {
        let s = AugmentedMetricSpace::from_lower_triangular(
            ids(3),
            vec![2.0, 1.0, 2.0],
            vec![vec![1.0], vec![1.0, 0.5]],
        )
        .unwrap();
        let g = GenericOrdering::new(&s);
        assert_eq!(g.point_order, vec![1, 0, 2]);
        assert_eq!(g.f_rank, vec![2, 1, 3]);
        assert_eq!(g.pair_order, vec![Pair::new(1, 2), Pair::new(0, 1), Pair::new(0, 2)]);
        assert!(g.has_ties);
        assert_eq!(g.eps_value(&s, 0), 0.0);
        assert_eq!(g.eps_value(&s, 3), 1.0);
    }

    #[test]
    fn coords_must_match_distances() {
        let s = AugmentedMetricSpace::from_lower_triangular(ids(2), vec![0.0, 0.0], vec![vec![5.0]]).unwrap();
        assert!(s.clone().with_coords(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).is_ok());
        assert!(s.with_coords(vec![vec![0.0, 0.0], vec![3.0, 3.0]]).is_err());
    }

    #[test]
    fn order_must_respect_filter() {
        let s = AugmentedMetricSpace::from_lower_triangular(ids(3), vec![1.0, 2.0, 2.0], vec![vec![1.0], vec![1.0, 1.0]])
            .unwrap();
        assert!(s.validate_order(&[0, 2, 1]).is_ok());
        assert!(s.validate_order(&[1, 0, 2]).is_err());
        assert!(s.validate_order(&[0, 1]).is_err());
    }
}
