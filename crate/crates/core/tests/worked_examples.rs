mod common;

use common::{d45, d45_with};
use staircode_core::betti::{feature_functions, rank_betti, ConquerorCheck, Decomposability};
use staircode_core::mst::{Edge, Mst};
use staircode_core::staircase::bar_multiset;
use staircode_core::treegram::{Leaf, Merge};
use staircode_core::*;

fn fin(v: f64) -> Extended {
    Extended::Finite(v)
}

fn steps(code: &Staircode, x: usize) -> Vec<(f64, Extended)> {
    code.staircase(x).steps().iter().map(|s| (s.sigma, s.u)).collect()
}

#[test]
fn d45_staircases() {
    let code = compute_staircode(&d45(), Mode::Generic).unwrap();
    assert!(code.staircase(0).is_quadrant());
    assert_eq!(code.staircase(0).birth_sigma(), 1.0);
    assert_eq!(steps(&code, 1), vec![(2.0, fin(3.0))]);
    assert_eq!(steps(&code, 2), vec![(3.0, fin(4.0)), (4.0, fin(2.5))]);
    assert_eq!(steps(&code, 3), vec![(4.0, fin(1.5))]);
}

#[test]
fn d45_conquerors() {
    let code = compute_staircode(&d45(), Mode::Generic).unwrap();
    assert_eq!(code.entries[1].conqueror_at(2.0), Some(0));
    assert_eq!(code.entries[2].conqueror_at(4.0), Some(1));
    assert_eq!(code.entries[3].conqueror_at(4.0), Some(1));
}

#[test]
fn d45_membership() {
    let code = compute_staircode(&d45(), Mode::Generic).unwrap();
    assert!(staircase_contains(code.staircase(1), Grade::new(2.5, 2.9)));
    assert!(!staircase_contains(code.staircase(1), Grade::new(2.5, 3.0)));
}

#[test]
fn d45_betti_supports() {
    let space = d45();
    let doc = analyze(&space, None, Mode::Generic).unwrap();
    assert_eq!(doc.betti.support(0), vec![(1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]);
    assert_eq!(doc.betti.support(1), vec![(2.0, 3.0), (3.0, 4.0), (4.0, 1.5), (4.0, 2.5)]);
    assert_eq!(doc.betti.support(2), vec![(4.0, 4.0)]);
    assert_eq!(graded_betti(&doc.staircode), doc.betti.clone().without_ranks());
}

#[test]
fn d45_betti_carries_ranks() {
    let space = d45();
    let doc = analyze(&space, None, Mode::Generic).unwrap();
    let g = doc.betti.entries(2)[0].grade;
    // Distances sorted: 1.5, 2.5, 3, 3.6, 4, 5, so 4 has rank 5.
    assert_eq!((g.sigma_rank, g.eps_rank), (Some(4), Some(5)));
}

#[test]
fn d45_dimension() {
    let space = d45();
    let doc = analyze(&space, None, Mode::Generic).unwrap();
    for (sigma, eps, expected) in [(4.0, 2.0, 3), (4.0, 3.2, 1), (0.5, 0.0, 0), (1.0, 100.0, 1), (3.5, 0.0, 3)] {
        let a = Grade::new(sigma, eps);
        assert_eq!(dimension_function(&doc.staircode, a), expected, "{a:?}");
        assert_eq!(dimension_from_betti(&doc.betti, a), expected as i64, "{a:?}");
    }
}

#[test]
fn d45_mst() {
    let mut t = Mst::from_edges(vec![0, 1], vec![Edge::new(0, 1, 3.0)]).unwrap();
    t.insert(2, &[5.0, 4.0]).unwrap();
    assert_eq!(t.edges(), &[Edge::new(0, 1, 3.0), Edge::new(1, 2, 4.0)]);
    let space = d45();
    t.insert(3, &[space.dist(3, 0), space.dist(3, 1), space.dist(3, 2)]).unwrap();
    let w: Vec<f64> = t.edges().iter().map(|e| e.weight).collect();
    assert_eq!(w, vec![1.5, 2.5, 3.0]);
    assert_eq!(t.total_weight(), 7.0);
}

#[test]
fn d45_prefix_treegram() {
    let edges = vec![Edge::new(0, 1, 3.0), Edge::new(1, 2, 4.0)];
    let t = build_treegram(&[0, 1, 2], &edges).unwrap();
    let d = decorate(&t, &[0, 1, 2, 3]).unwrap();
    let merges: Vec<(f64, usize, usize)> = d.merges.iter().map(|m| (m.height, m.conquered, m.eldest)).collect();
    assert_eq!(merges, vec![(3.0, 1, 0), (4.0, 2, 0)]);
    // The vertical fibre of each staircase at σ = 3 is its bar here.
    let bars = elder_rule_barcode(&t, &[0, 1, 2, 3]).unwrap();
    let deaths: Vec<Extended> = bars.iter().map(|b| b.death).collect();
    assert_eq!(deaths, vec![Extended::Infinite, fin(3.0), fin(4.0)]);
}

#[test]
fn two_leaf_elder_rule() {
    let t = Treegram {
        leaves: vec![Leaf { point: 0, birth: 0.0 }, Leaf { point: 1, birth: 1.0 }],
        merges: vec![Merge { height: 5.0, a: 0, b: 1, edge: None }],
    };
    let bars = bar_multiset(&elder_rule_barcode(&t, &[0, 1]).unwrap());
    assert_eq!(bars, vec![(0.0, Extended::Infinite), (1.0, fin(5.0))]);
}

/// Four leaves: x1 alone first, x2 and x3 born together and joined at once,
/// x4 later, then everything merges.
#[test]
fn staggered_treegram_barcode() {
    let t = Treegram {
        leaves: vec![
            Leaf { point: 0, birth: 0.0 },
            Leaf { point: 1, birth: 1.0 },
            Leaf { point: 2, birth: 1.0 },
            Leaf { point: 3, birth: 1.5 },
        ],
        merges: vec![
            Merge { height: 1.0, a: 1, b: 2, edge: None },
            Merge { height: 2.0, a: 3, b: 2, edge: None },
            Merge { height: 3.0, a: 0, b: 1, edge: None },
        ],
    };
    assert_eq!(t.partition_at(1.0), vec![vec![0], vec![1, 2]]);
    let bars = bar_multiset(&elder_rule_barcode(&t, &[0, 1, 2, 3]).unwrap());
    assert_eq!(bars, vec![(0.0, Extended::Infinite), (1.0, fin(1.0)), (1.0, fin(3.0)), (1.5, fin(2.0))]);
}

/// Five leaves merged along a spanning tree with w(x1, x3) > w(x2, x4).
#[test]
fn five_leaf_decoration() {
    let edges = vec![Edge::new(1, 3, 1.0), Edge::new(2, 4, 1.5), Edge::new(0, 2, 2.0), Edge::new(0, 1, 3.0)];
    let t = build_treegram(&[0, 1, 2, 3, 4], &edges).unwrap();
    let d = decorate(&t, &[0, 1, 2, 3, 4]).unwrap();
    let pairs: Vec<(usize, usize)> = d.merges.iter().map(|m| (m.conquered, m.eldest)).collect();
    assert_eq!(pairs, vec![(3, 1), (4, 2), (2, 0), (1, 0)]);
}

#[test]
fn barcode_along_diagonal_misses_youngest() {
    let code = compute_staircode(&d45(), Mode::Generic).unwrap();
    let index = QueryIndex::build(&code);
    let line = Line::parse("0,0:1,1").unwrap();
    let bars = index.query_barcode(&line);
    let owners: Vec<usize> = bars.iter().map(|b| b.owner).collect();
    assert_eq!(owners, vec![0, 1, 2]);
    let r2 = 2f64.sqrt();
    assert!((bars[1].death.finite().unwrap() - 3.0 * r2).abs() < 1e-12);
    assert!((bars[2].death.finite().unwrap() - 4.0 * r2).abs() < 1e-12);
}

#[test]
fn barcode_through_all_staircases() {
    let code = compute_staircode(&d45(), Mode::Generic).unwrap();
    let line = Line::parse("1.5,0.5:4.5,3.5").unwrap();
    let bars = QueryIndex::build(&code).query_barcode(&line);
    assert_eq!(bars.len(), 3);
    let shallow = Line::parse("0,-10:10,-9").unwrap();
    assert_eq!(QueryIndex::build(&code).query_barcode(&shallow).len(), 4);
}

#[test]
fn reordered_filter_is_not_interval_decomposable() {
    let space = d45_with([1.0, 3.0, 2.0, 4.0]);
    let doc = analyze(&space, None, Mode::Generic).unwrap();
    let gamma = feature_functions(&doc.staircode);
    let key = (4.0.into(), 3.0.into());
    assert_eq!(gamma[1].get(&key), Some(&1));
    assert_eq!(gamma[2].get(&key), Some(&1));
    assert_eq!(doc.betti.value(1, 4.0, 3.0), 0);
    assert_eq!(doc.betti.value(2, 4.0, 3.0), 0);
    match decomposability_necessary_test(&doc.staircode) {
        Decomposability::NotIntervalDecomposable { grades } => {
            assert_eq!(grades.iter().map(|g| (g.sigma, g.eps)).collect::<Vec<_>>(), vec![(4.0, 3.0)]);
        }
        other => panic!("expected a cancellation, got {other:?}"),
    }
    assert_eq!(doc.betti.support(1), vec![(2.0, 5.0), (3.0, 3.0), (3.0, 4.0), (4.0, 1.5), (4.0, 2.5)]);
    assert_eq!(doc.betti.support(2), vec![(3.0, 5.0), (4.0, 4.0)]);
}

#[test]
fn d45_structure_checks() {
    let space = d45();
    let code = compute_staircode(&space, Mode::Generic).unwrap();
    assert_eq!(check_constant_conqueror(&space, &code.order).unwrap(), ConquerorCheck::Holds);
    assert_eq!(decomposability_necessary_test(&code), Decomposability::Consistent);
    assert!(!check_ultrametric(&space));
}

#[test]
fn tied_filter_orders() {
    let space = d45_with([1.0, 2.0, 2.0, 4.0]);
    let a = compute_staircode_ordered(&space, &[0, 1, 2, 3], Mode::Generic).unwrap();
    let b = compute_staircode_ordered(&space, &[0, 2, 1, 3], Mode::Generic).unwrap();
    assert_eq!(a.staircase(0), b.staircase(0));
    assert_eq!(a.staircase(3), b.staircase(3));
    assert_ne!(a.staircase(1), b.staircase(1));
    assert_ne!(a.staircase(2), b.staircase(2));
    assert_eq!(steps(&a, 1), vec![(2.0, fin(3.0))]);
    assert_eq!(steps(&a, 2), vec![(2.0, fin(4.0)), (4.0, fin(2.5))]);
    assert_eq!(steps(&b, 1), vec![(2.0, fin(3.0)), (4.0, fin(2.5))]);
    assert_eq!(steps(&b, 2), vec![(2.0, fin(4.0)), (4.0, fin(3.0))]);
}

#[test]
fn constant_filter_gives_rectangles() {
    let space = d45_with([2.0; 4]);
    let code = compute_staircode(&space, Mode::Generic).unwrap();
    let mut heights = Vec::new();
    for s in code.staircases() {
        assert_eq!(s.birth_sigma(), 2.0);
        assert_eq!(s.steps().len(), 1);
        heights.push(s.steps()[0].u);
    }
    // Single-linkage merge heights of the four points.
    assert_eq!(heights, vec![Extended::Infinite, fin(3.0), fin(2.5), fin(1.5)]);
}

#[test]
fn rank_accounting_matches_real_for_generic_data() {
    let space = d45();
    let code = compute_staircode(&space, Mode::Generic).unwrap();
    let ordering = GenericOrdering::new(&space);
    let beta = rank_betti(&code, &ordering).unwrap();
    assert_eq!(beta[2].keys().copied().collect::<Vec<_>>(), vec![(4, 5)]);
}
