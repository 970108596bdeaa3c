//! Fixtures and random dataset generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use staircode_core::AugmentedMetricSpace;

pub fn ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Four points with d12 = 3, d23 = 4, d13 = 5, d24 = 1.5, d34 = 2.5, d14 = 3.6.
pub fn d45_with(f: [f64; 4]) -> AugmentedMetricSpace {
    AugmentedMetricSpace::from_lower_triangular(
        ids(4),
        f.to_vec(),
        vec![vec![3.0], vec![5.0, 4.0], vec![3.6, 1.5, 2.5]],
    )
    .unwrap()
}

pub fn d45() -> AugmentedMetricSpace {
    d45_with([1.0, 2.0, 3.0, 4.0])
}

/// Points in the unit cube with uniform filter values.
pub fn random_euclidean(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> AugmentedMetricSpace {
    let coords = (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
    let f = (0..n).map(|_| rng.gen::<f64>()).collect();
    AugmentedMetricSpace::from_coords(ids(n), f, coords).unwrap()
}

/// A symmetric matrix of uniform distances; no triangle inequality.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> AugmentedMetricSpace {
    let rows = (1..n).map(|i| (0..i).map(|_| rng.gen_range(0.01..10.0)).collect()).collect();
    let f = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    AugmentedMetricSpace::from_lower_triangular(ids(n), f, rows).unwrap()
}

/// Small integer values, so ties in both `f` and distances are common.
pub fn random_tied(rng: &mut ChaCha8Rng, n: usize) -> AugmentedMetricSpace {
    let rows = (1..n).map(|i| (0..i).map(|_| rng.gen_range(0..4) as f64).collect()).collect();
    let f = (0..n).map(|_| rng.gen_range(0..3) as f64).collect();
    AugmentedMetricSpace::from_lower_triangular(ids(n), f, rows).unwrap()
}

/// Ultrametric from a random agglomeration with increasing heights.
pub fn random_ultrametric(rng: &mut ChaCha8Rng, n: usize) -> AugmentedMetricSpace {
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut dist = vec![vec![0.0; n]; n];
    let mut height = 0.0;
    while clusters.len() > 1 {
        clusters.shuffle(rng);
        let a = clusters.pop().unwrap();
        let b = clusters.pop().unwrap();
        height += rng.gen_range(0.1..1.0);
        for &x in &a {
            for &y in &b {
                dist[x][y] = height;
                dist[y][x] = height;
            }
        }
        clusters.push([a, b].concat());
    }
    let rows = (1..n).map(|i| dist[i][..i].to_vec()).collect();
    let f = (0..n).map(|_| rng.gen::<f64>()).collect();
    AugmentedMetricSpace::from_lower_triangular(ids(n), f, rows).unwrap()
}

/// A line through a random anchor with a random positive slope.
pub fn random_line(rng: &mut ChaCha8Rng, sigma: (f64, f64), eps_max: f64) -> staircode_core::Line {
    let s0 = rng.gen_range(sigma.0 - 1.0..sigma.1 + 1.0);
    let e0 = rng.gen_range(-eps_max..eps_max);
    let angle = rng.gen_range(0.02..std::f64::consts::FRAC_PI_2 - 0.02);
    staircode_core::Line::through((s0, e0), (s0 + angle.cos(), e0 + angle.sin())).unwrap()
}

pub fn sigma_range(space: &AugmentedMetricSpace) -> (f64, f64) {
    let f = space.f_values();
    (f.iter().copied().fold(f64::INFINITY, f64::min), f.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

pub fn max_dist(space: &AugmentedMetricSpace) -> f64 {
    space.pairs().map(|(_, d)| d).fold(1.0, f64::max)
}
