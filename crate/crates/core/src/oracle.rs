//! Brute-force references for staircodes, Betti numbers and fibered
//! barcodes. Nothing here uses spanning trees or treegrams; every answer is
//! read off union-find runs over explicit vertex and edge sets.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::space::{cmp_weighted, AugmentedMetricSpace, GenericOrdering, Pair};
use crate::staircase::{Bar, Extended, Line, Staircase, Step};
use crate::union_find::DisjointSet;

/// Block labels at one grade: the eldest member of each present point's
/// block, or `None` for absent points.
pub fn components_at(space: &AugmentedMetricSpace, position: &[usize], sigma: f64, eps: f64) -> Vec<Option<usize>> {
    let n = space.len();
    let present: Vec<bool> = (0..n).map(|i| eps >= 0.0 && space.f(i) <= sigma).collect();
    let mut dsu = DisjointSet::new(n);
    for (p, d) in space.pairs() {
        if present[p.lo] && present[p.hi] && d <= eps {
            dsu.union(p.lo, p.hi);
        }
    }
    eldest_labels(&mut dsu, &present, position)
}

fn eldest_labels(dsu: &mut DisjointSet, present: &[bool], position: &[usize]) -> Vec<Option<usize>> {
    let n = present.len();
    let mut eldest: Vec<Option<usize>> = vec![None; n];
    for x in (0..n).filter(|&x| present[x]) {
        let r = dsu.find(x);
        if eldest[r].is_none_or(|e| position[x] < position[e]) {
            eldest[r] = Some(x);
        }
    }
    (0..n).map(|x| if present[x] { eldest[dsu.find(x)] } else { None }).collect()
}

fn count_blocks(labels: &[Option<usize>]) -> usize {
    labels.iter().enumerate().filter(|(x, l)| **l == Some(*x)).count()
}

/// Sorted distinct filter values.
pub fn sigma_levels(space: &AugmentedMetricSpace) -> Vec<f64> {
    let mut v = space.f_values().to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Zero followed by the sorted distinct distances.
pub fn eps_levels(space: &AugmentedMetricSpace) -> Vec<f64> {
    let mut v: Vec<f64> = space.pairs().map(|(_, d)| d).collect();
    v.push(0.0);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Staircases read directly off the definition: at each filter level, a
/// point's envelope is the first distance level at which it is no longer the
/// eldest of its block.
pub fn oracle_staircode(space: &AugmentedMetricSpace, order: &[usize]) -> Result<Vec<Staircase>> {
    space.validate_order(order)?;
    let position = AugmentedMetricSpace::positions(order);
    let eps = eps_levels(space);
    let mut steps: Vec<Vec<Step>> = vec![Vec::new(); space.len()];
    for v in sigma_levels(space) {
        let grids: Vec<Vec<Option<usize>>> = eps.iter().map(|&e| components_at(space, &position, v, e)).collect();
        for x in (0..space.len()).filter(|&x| space.f(x) <= v) {
            let u = eps
                .iter()
                .zip(&grids)
                .find(|(_, labels)| labels[x] != Some(x))
                .map_or(Extended::Infinite, |(&e, _)| Extended::Finite(e));
            steps[x].push(Step { sigma: v, u });
        }
    }
    steps.into_iter().enumerate().map(|(x, s)| Staircase::new(x, s)).collect()
}

/// Component counts of the rank-graded space on the full integer grid:
/// `counts[i][l]` uses the first `i` points and the first `l` pairs.
#[derive(Debug, Clone)]
pub struct RankGrid {
    pub ordering: GenericOrdering,
    pub counts: Vec<Vec<usize>>,
}

impl RankGrid {
    pub fn new(space: &AugmentedMetricSpace) -> Self {
        let ordering = GenericOrdering::new(space);
        let n = space.len();
        let big_n = ordering.pair_order.len();
        let mut counts = vec![vec![0; big_n + 1]; n + 1];
        for i in 1..=n {
            let present: Vec<bool> = (0..n).map(|x| ordering.f_rank[x] <= i).collect();
            let mut dsu = DisjointSet::new(n);
            let mut blocks = i;
            counts[i][0] = blocks;
            for (l, p) in ordering.pair_order.iter().enumerate() {
                if present[p.lo] && present[p.hi] && dsu.union(p.lo, p.hi) {
                    blocks -= 1;
                }
                counts[i][l + 1] = blocks;
            }
        }
        RankGrid { ordering, counts }
    }

    pub fn sigma_ranks(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn eps_ranks(&self) -> usize {
        self.counts[0].len() - 1
    }

    /// Count with zero outside the grid on the low side.
    fn dm(&self, i: isize, l: isize) -> i64 {
        if i <= 0 || l < 0 {
            0
        } else {
            self.counts[i as usize][l as usize] as i64
        }
    }

    /// Mixed second difference of the component count at `(i, l)`.
    pub fn euler_density(&self, i: usize, l: usize) -> i64 {
        let (i, l) = (i as isize, l as isize);
        self.dm(i, l) - self.dm(i - 1, l) - self.dm(i, l - 1) + self.dm(i - 1, l - 1)
    }
}

/// Betti numbers at rank grades, recovered from component counts alone.
/// The second difference is `β0 - β1 + β2`. `β0` lives on the `ε = 0` row
/// and the supports of `β1` and `β2` never meet, so the sign decides.
pub fn oracle_betti(grid: &RankGrid) -> [BTreeMap<(usize, usize), u32>; 3] {
    let mut out: [BTreeMap<(usize, usize), u32>; 3] = Default::default();
    for i in 1..=grid.sigma_ranks() {
        for l in 0..=grid.eps_ranks() {
            let h = grid.euler_density(i, l);
            let degree = match (l, h.signum()) {
                (_, 0) => continue,
                (0, _) => 0,
                (_, -1) => 1,
                _ => 2,
            };
            out[degree].insert((i, l), h.unsigned_abs() as u32);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeClass {
    pub pair: Pair,
    /// `(σ-rank, ε-rank)` at which the edge appears.
    pub grade: (usize, usize),
    /// True when the edge lowers the component count where it appears.
    pub negative: bool,
}

/// Classify every edge as positive or negative.
pub fn classify_edges(grid: &RankGrid) -> Vec<EdgeClass> {
    let o = &grid.ordering;
    o.pair_order
        .iter()
        .map(|&pair| {
            let grade = (o.f_rank[pair.lo].max(o.f_rank[pair.hi]), o.d_rank(pair));
            let negative = grid.counts[grade.0][grade.1] < grid.counts[grade.0][grade.1 - 1];
            EdgeClass { pair, grade, negative }
        })
        .collect()
}

/// Elder-rule barcode of the restriction to a line, from explicit vertex
/// and edge appearance times. Empty bars are dropped.
pub fn oracle_line_barcode(space: &AugmentedMetricSpace, order: &[usize], line: &Line) -> Result<Vec<Bar>> {
    space.validate_order(order)?;
    let n = space.len();
    let position = AugmentedMetricSpace::positions(order);
    let born: Vec<f64> = (0..n).map(|x| line.entry_time(space.f(x))).collect();
    let mut edges: Vec<(f64, Pair)> = space
        .pairs()
        .map(|(p, d)| (born[p.lo].max(born[p.hi]).max(line.t_eps(d)), p))
        .collect();
    edges.sort_by(|a, b| cmp_weighted(a.0, a.1, b.0, b.1));
    let mut dsu = DisjointSet::new(n);
    let mut eldest: Vec<usize> = (0..n).collect();
    let mut death: Vec<Extended> = vec![Extended::Infinite; n];
    let older = |a: usize, b: usize| (born[a], position[a]) < (born[b], position[b]);
    for (t, p) in edges {
        let (ra, rb) = (dsu.find(p.lo), dsu.find(p.hi));
        if ra == rb {
            continue;
        }
        let (ea, eb) = (eldest[ra], eldest[rb]);
        let (keep, lose) = if older(ea, eb) { (ea, eb) } else { (eb, ea) };
        death[lose] = Extended::Finite(t);
        dsu.union(ra, rb);
        let r = dsu.find(ra);
        eldest[r] = keep;
    }
    Ok((0..n)
        .filter(|&x| death[x].exceeds(born[x]))
        .map(|x| Bar { owner: x, birth: born[x], death: death[x] })
        .collect())
}

/// Blocks along the line at parameter `t`, labelled by eldest member.
pub fn oracle_line_partition(space: &AugmentedMetricSpace, order: &[usize], line: &Line, t: f64) -> Vec<Option<usize>> {
    let n = space.len();
    let position = AugmentedMetricSpace::positions(order);
    let present: Vec<bool> = (0..n).map(|x| line.entry_time(space.f(x)) <= t).collect();
    let mut dsu = DisjointSet::new(n);
    for (p, d) in space.pairs() {
        if present[p.lo] && present[p.hi] && line.t_eps(d) <= t {
            dsu.union(p.lo, p.hi);
        }
    }
    eldest_labels(&mut dsu, &present, &position)
}

/// Component count at a real grade.
pub fn oracle_dimension(space: &AugmentedMetricSpace, sigma: f64, eps: f64) -> usize {
    let position: Vec<usize> = (0..space.len()).collect();
    count_blocks(&components_at(space, &position, sigma, eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_space() -> AugmentedMetricSpace {
        AugmentedMetricSpace::from_lower_triangular(vec!["a".into(), "b".into()], vec![0.0, 1.0], vec![vec![2.0]]).unwrap()
    }

    #[test]
    fn two_point_staircode() {
        let s = oracle_staircode(&pair_space(), &[0, 1]).unwrap();
        assert!(s[0].is_quadrant());
        assert_eq!(s[1].steps(), &[Step { sigma: 1.0, u: Extended::Finite(2.0) }]);
    }

    #[test]
    fn two_point_betti() {
        let grid = RankGrid::new(&pair_space());
        let b = oracle_betti(&grid);
        assert_eq!(b[0].keys().copied().collect::<Vec<_>>(), vec![(1, 0), (2, 0)]);
        assert_eq!(b[1].keys().copied().collect::<Vec<_>>(), vec![(2, 1)]);
        assert!(b[2].is_empty());
        assert!(classify_edges(&grid)[0].negative);
    }

    #[test]
    fn line_barcode_of_two_points() {
        let line = Line::parse("0,0:1,1").unwrap();
        let bars = oracle_line_barcode(&pair_space(), &[0, 1], &line).unwrap();
        assert_eq!(bars.len(), 2);
        let r2 = 2f64.sqrt();
        assert!((bars[1].birth - r2).abs() < 1e-12);
        assert!((bars[1].death.finite().unwrap() - 2.0 * r2).abs() < 1e-12);
    }
}
