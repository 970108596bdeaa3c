//! Structural properties that hold for every input.

mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use staircode_core::betti::{rank_betti, rank_staircases};
use staircode_core::mst::{kruskal, Edge, Mst};
use staircode_core::oracle::{eps_levels, sigma_levels};
use staircode_core::staircase::bar_multiset;
use staircode_core::staircode::compute_with_stats;
use staircode_core::treegram::{Leaf, Merge};
use staircode_core::*;

fn any_space(rng: &mut ChaCha8Rng, n: usize, kind: u8) -> AugmentedMetricSpace {
    match kind {
        0 => random_euclidean(rng, n, 2),
        1 => random_matrix(rng, n),
        _ => random_tied(rng, n),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// At rank grades every Betti number is 0 or 1 and the three supports
    /// are pairwise disjoint.
    #[test]
    fn betti_values_are_binary(seed in any::<u64>(), n in 1usize..10, kind in 0u8..3) {
        let space = any_space(&mut ChaCha8Rng::seed_from_u64(seed), n, kind);
        let code = compute_staircode(&space, Mode::Generic).unwrap();
        let beta = rank_betti(&code, &GenericOrdering::new(&space)).unwrap();
        for d in 0..3 {
            prop_assert!(beta[d].values().all(|&c| c == 1));
            for e in d + 1..3 {
                prop_assert!(beta[d].keys().all(|k| !beta[e].contains_key(k)));
            }
        }
        prop_assert_eq!(beta[0].len(), n);
    }

    /// Each staircase indicator is the signed sum of its own corners below.
    #[test]
    fn corners_reconstruct_each_staircase(seed in any::<u64>(), n in 1usize..8, kind in 0u8..3) {
        let space = any_space(&mut ChaCha8Rng::seed_from_u64(seed), n, kind);
        let code = compute_staircode(&space, Mode::Generic).unwrap();
        let sig = sigma_levels(&space);
        let eps = eps_levels(&space);
        for s in code.staircases() {
            let corners = s.corners();
            for &a in sig.iter().chain(&[sig[0] - 1.0]) {
                for &b in eps.iter().chain(&[eps[eps.len() - 1] + 1.0]) {
                    let signed: i32 = corners
                        .iter()
                        .filter(|c| c.sigma <= a && c.eps <= b)
                        .map(|c| if c.kind == CornerType::Type1 { -1 } else { 1 })
                        .sum();
                    prop_assert_eq!(signed, s.contains(a, b) as i32, "at ({}, {})", a, b);
                }
            }
        }
    }

    /// Non-empty bounded staircases have one more inner corner than outer.
    #[test]
    fn corner_counts(seed in any::<u64>(), n in 1usize..10, kind in 0u8..3) {
        let space = any_space(&mut ChaCha8Rng::seed_from_u64(seed), n, kind);
        let code = compute_staircode(&space, Mode::Generic).unwrap();
        for s in code.staircases() {
            let count = |k| s.corners().iter().filter(|c| c.kind == k).count();
            if s.is_empty() {
                prop_assert!(s.corners().is_empty());
            } else if s.is_quadrant() {
                prop_assert_eq!((count(CornerType::Type0), count(CornerType::Type1)), (1, 0));
            } else {
                prop_assert_eq!(count(CornerType::Type0), 1);
                prop_assert_eq!(count(CornerType::Type1), count(CornerType::Type2) + 1);
            }
        }
    }

    /// The rank-graded staircases never terminate: pair ranks start at one.
    #[test]
    fn rank_staircases_are_nonempty(seed in any::<u64>(), n in 1usize..10) {
        let space = random_tied(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let code = compute_staircode(&space, Mode::Generic).unwrap();
        for s in rank_staircases(&code, &GenericOrdering::new(&space)).unwrap() {
            prop_assert!(!s.is_empty());
        }
    }

    /// Ultrametric inputs give rectangles and a constant conqueror.
    #[test]
    fn ultrametric_gives_rectangles(seed in any::<u64>(), n in 2usize..10) {
        let space = random_ultrametric(&mut ChaCha8Rng::seed_from_u64(seed), n);
        prop_assert!(check_ultrametric(&space));
        let code = compute_staircode(&space, Mode::Generic).unwrap();
        for s in code.staircases() {
            prop_assert!(s.is_rectangle() || s.is_quadrant());
        }
        prop_assert_eq!(check_constant_conqueror(&space, &code.order).unwrap(), ConquerorCheck::Holds);
    }

    /// Incremental updates agree with Kruskal on the full prefix.
    #[test]
    fn incremental_mst_matches_kruskal(seed in any::<u64>(), n in 1usize..25, kind in 0u8..3) {
        let space = any_space(&mut ChaCha8Rng::seed_from_u64(seed), n, kind);
        let mut t = Mst::new();
        let mut e = Mst::new();
        for (r, &p) in space.point_order().iter().enumerate() {
            let w: Vec<f64> = t.vertices().iter().map(|&q| space.dist(p, q)).collect();
            t.insert(p, &w).unwrap();
            let all: Vec<Edge> = t
                .vertices()
                .iter()
                .enumerate()
                .flat_map(|(a, &x)| t.vertices()[..a].iter().map(move |&y| (x, y)))
                .map(|(x, y)| Edge::new(x, y, space.dist(x, y)))
                .collect();
            prop_assert_eq!(t.edges(), &kruskal(t.vertices(), &all)[..], "prefix {}", r);
            if kind == 0 {
                e.insert_euclidean(p, space.coords().unwrap()).unwrap();
                prop_assert_eq!(e.edges(), t.edges());
            }
        }
    }

    /// Euclidean and generic sweeps build the same staircode.
    #[test]
    fn modes_agree(seed in any::<u64>(), n in 1usize..30, dim in 1usize..4) {
        let space = random_euclidean(&mut ChaCha8Rng::seed_from_u64(seed), n, dim);
        let a = compute_staircode(&space, Mode::Euclidean).unwrap();
        let b = compute_staircode(&space, Mode::Generic).unwrap();
        prop_assert_eq!(a.entries, b.entries);
    }

    /// The vertical fibre of each staircase at a filter level equals the
    /// elder-rule bar of that point in the single-linkage treegram there.
    #[test]
    fn vertical_fibres_are_treegram_bars(seed in any::<u64>(), n in 1usize..9) {
        let space = random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let code = compute_staircode(&space, Mode::Generic).unwrap();
        for v in sigma_levels(&space) {
            let present: Vec<usize> = (0..n).filter(|&x| space.f(x) <= v).collect();
            let edges: Vec<Edge> = present
                .iter()
                .enumerate()
                .flat_map(|(a, &x)| present[..a].iter().map(move |&y| (x, y)))
                .map(|(x, y)| Edge::new(x, y, space.dist(x, y)))
                .collect();
            let tree = kruskal(&present, &edges);
            let mut sorted = tree.clone();
            sorted.sort_by(Edge::cmp_key);
            let t = build_treegram(&present, &sorted).unwrap();
            for bar in elder_rule_barcode(&t, &code.positions()).unwrap() {
                prop_assert_eq!(Some(bar.death), code.staircase(bar.owner).envelope(v));
            }
        }
    }

    /// Elder-rule barcodes do not depend on how equal births are ordered.
    #[test]
    fn elder_rule_ignores_birth_ties(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let leaves: Vec<Leaf> = (0..n).map(|point| Leaf { point, birth: rng.gen_range(0..3) as f64 }).collect();
        let mut merges = Vec::new();
        let mut blocks: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut h = 3.0;
        while blocks.len() > 1 {
            blocks.shuffle(&mut rng);
            let a = blocks.pop().unwrap();
            let b = blocks.pop().unwrap();
            h += rng.gen_range(0..2) as f64;
            merges.push(Merge { height: h, a: a[0], b: b[0], edge: None });
            blocks.push([a, b].concat());
        }
        let t = Treegram { leaves, merges };
        let mut p1: Vec<usize> = (0..n).collect();
        let base = bar_multiset(&elder_rule_barcode(&t, &p1).unwrap());
        p1.shuffle(&mut rng);
        prop_assert_eq!(bar_multiset(&elder_rule_barcode(&t, &p1).unwrap()), base);
    }

    /// Document and dataset serialisation round-trip exactly.
    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 1usize..12, kind in 0u8..3) {
        let space = any_space(&mut ChaCha8Rng::seed_from_u64(seed), n, kind);
        let again = io::parse_dataset_json(&io::dataset_to_json(&space)).unwrap();
        prop_assert_eq!(&again, &space);
        let doc = analyze(&space, None, Mode::Generic).unwrap();
        let text = doc.to_json();
        let back = StaircodeDocument::from_json(&text).unwrap();
        prop_assert_eq!(&back.staircode.entries, &doc.staircode.entries);
        prop_assert_eq!(&back.staircode.order, &doc.staircode.order);
        prop_assert_eq!(&back.staircode.ids, &doc.staircode.ids);
        prop_assert_eq!(back.to_json(), text);
    }
}

/// Planar insertions only ever add a handful of tree edges.
#[test]
fn planar_insertions_add_few_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let space = random_euclidean(&mut rng, 50, 2);
        let (_, stats) = compute_with_stats(&space, &space.point_order(), Mode::Euclidean).unwrap();
        assert!(stats.max_new_edges <= 12, "{}", stats.max_new_edges);
    }
}

#[test]
fn explicit_order_must_respect_filter() {
    let space = d45();
    assert!(compute_staircode_ordered(&space, &[1, 0, 2, 3], Mode::Generic).is_err());
}

#[test]
fn zero_distance_terminates_staircase() {
    // x3 sits on top of x2 once x2 and x3 are both present, so x3's region
    // is empty, while x2 is separated from x1 by distance 1.
    let space = AugmentedMetricSpace::from_lower_triangular(ids(3), vec![0.0, 1.0, 1.0], vec![vec![1.0], vec![1.0, 0.0]])
        .unwrap();
    let code = compute_staircode(&space, Mode::Generic).unwrap();
    assert!(code.staircase(2).is_empty());
    assert!(code.staircase(2).corners().is_empty());
    assert_eq!(dimension_function(&code, Grade::new(1.0, 0.0)), 2);
}
