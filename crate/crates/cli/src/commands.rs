//! The subcommands. Each returns the text to print on success.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use staircode_core::betti::{rank_betti, ultrametric_violation};
use staircode_core::oracle::{oracle_betti, oracle_line_barcode, oracle_staircode, RankGrid};
use staircode_core::staircase::{bar_multiset, parse_point};
use staircode_core::{
    analyze, check_constant_conqueror, compute_staircode, decomposability_necessary_test, dimension_from_betti,
    dimension_function, io, AugmentedMetricSpace, ConquerorCheck, Decomposability, Grade, Line, Mode, QueryIndex,
    StaircodeDocument,
};

use crate::Failure;

pub fn default_mode(space: &AugmentedMetricSpace) -> Mode {
    if space.coords().is_some() {
        Mode::Euclidean
    } else {
        Mode::Generic
    }
}

pub fn compute(space: &AugmentedMetricSpace, order: Option<&[usize]>, mode: Mode) -> Result<StaircodeDocument, Failure> {
    if mode == Mode::Euclidean && space.coords().is_none() {
        return Err(Failure::parse("euclidean mode needs coordinates"));
    }
    Ok(analyze(space, order, mode)?)
}

fn grades(list: &[(f64, f64)]) -> String {
    list.iter().map(|(s, e)| format!("({s}, {e})")).collect::<Vec<_>>().join(" ")
}

pub fn betti(doc: &StaircodeDocument) -> String {
    (0..3).map(|d| format!("b{d}: {}\n", grades(&doc.betti.support(d)))).collect()
}

pub fn dim(doc: &StaircodeDocument, grade: &str) -> Result<String, Failure> {
    let (s, e) = parse_point(grade)?;
    let a = Grade::new(s, e);
    let by_staircases = dimension_function(&doc.staircode, a);
    let by_betti = dimension_from_betti(&doc.betti, a);
    if by_staircases as i64 != by_betti {
        return Err(Failure::invariant(format!(
            "dimension at ({s}, {e}): {by_staircases} from staircases but {by_betti} from Betti numbers"
        )));
    }
    Ok(format!("{by_staircases}\n"))
}

/// Barcode JSON for a line, listing owners whose bar is empty when `verbose`.
pub fn barcode_value(doc: &StaircodeDocument, index: &QueryIndex, line: &Line, verbose: bool) -> serde_json::Value {
    let code = &doc.staircode;
    let bars = index.query_barcode(line);
    let mut value = serde_json::to_value(io::barcode_json(code, line, &bars)).expect("barcode serialises");
    if verbose {
        let empty: Vec<&str> = index
            .query_barcode_verbose(line)
            .into_iter()
            .filter(|(_, bar)| bar.is_none())
            .map(|(x, _)| code.ids[x].as_str())
            .collect();
        value["empty"] = json!(empty);
    }
    value
}

pub fn treegram_value(doc: &StaircodeDocument, index: &QueryIndex, line: &Line) -> Result<serde_json::Value, Failure> {
    let t = index.query_treegram(line)?;
    Ok(serde_json::to_value(io::treegram_json(&doc.staircode, line, &t)).expect("treegram serialises"))
}

pub fn query(doc: &StaircodeDocument, line: &str, treegram: bool, verbose: bool) -> Result<String, Failure> {
    let line = Line::parse(line)?;
    let index = QueryIndex::build(&doc.staircode);
    let value = if treegram { treegram_value(doc, &index, &line)? } else { barcode_value(doc, &index, &line, verbose) };
    Ok(serde_json::to_string_pretty(&value).expect("json") + "\n")
}

pub fn check(space: &AugmentedMetricSpace, order: Option<&[usize]>) -> Result<String, Failure> {
    let order = order.map(<[usize]>::to_vec).unwrap_or_else(|| space.point_order());
    let code = staircode_core::compute_staircode_ordered(space, &order, Mode::Generic)?;
    let mut out = String::new();
    match ultrametric_violation(space) {
        None => out.push_str("ultrametric: yes\n"),
        Some([x, y, z]) => {
            let _ = writeln!(out, "ultrametric: no, violated by {}, {}, {}", space.id(x), space.id(y), space.id(z));
        }
    }
    match check_constant_conqueror(space, &order)? {
        ConquerorCheck::Holds => out.push_str("constant conqueror: holds\n"),
        ConquerorCheck::Fails { point, .. } => {
            let _ = writeln!(out, "constant conqueror: fails at {}", space.id(point));
        }
    }
    match decomposability_necessary_test(&code) {
        Decomposability::Consistent => out.push_str("necessary test: consistent\n"),
        Decomposability::NotIntervalDecomposable { grades: g } => {
            let list: Vec<(f64, f64)> = g.iter().map(|a| (a.sigma, a.eps)).collect();
            let _ = writeln!(out, "necessary test: not interval decomposable, cancellation at {}", grades(&list));
        }
    }
    Ok(out)
}

/// A random line crossing the region spanned by the data.
fn random_line(rng: &mut ChaCha8Rng, sigma: (f64, f64), eps_max: f64) -> Line {
    let s0 = rng.gen_range(sigma.0 - 1.0..sigma.1 + 1.0);
    let e0 = rng.gen_range(-eps_max..eps_max);
    let angle = rng.gen_range(0.02..std::f64::consts::FRAC_PI_2 - 0.02);
    Line::through((s0, e0), (s0 + angle.cos(), e0 + angle.sin())).expect("positive slope")
}

fn extent(space: &AugmentedMetricSpace) -> ((f64, f64), f64) {
    let f = space.f_values();
    let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top = space.pairs().map(|(_, d)| d).fold(1.0, f64::max);
    ((lo, hi), top)
}

/// Cross-check the fast algorithms against brute force on one dataset.
pub fn oracle_verify(
    space: &AugmentedMetricSpace,
    order: Option<&[usize]>,
    mode: Mode,
    lines: usize,
    seed: u64,
) -> Result<String, Failure> {
    let doc = compute(space, order, mode)?;
    let code = &doc.staircode;
    let mut out = String::new();

    let expected = oracle_staircode(space, &code.order)?;
    if let Some(x) = (0..space.len()).find(|&x| code.staircase(x) != &expected[x]) {
        return Err(Failure::mismatch(format!("staircase of {} differs from brute force", space.id(x))));
    }
    let _ = writeln!(out, "staircode: ok ({} staircases)", space.len());

    let grid = RankGrid::new(space);
    let ranked = compute_staircode(space, Mode::Generic).and_then(|c| rank_betti(&c, &grid.ordering))?;
    if ranked != oracle_betti(&grid) {
        return Err(Failure::mismatch("graded Betti numbers differ from component counts"));
    }
    out.push_str("betti: ok\n");

    let mut cells = 0;
    for i in 1..=grid.sigma_ranks() {
        for l in 0..=grid.eps_ranks() {
            let a = Grade::new(grid.ordering.sigma_value(space, i), grid.ordering.eps_value(space, l));
            let truth = grid.counts[i][l];
            if dimension_function(code, a) != truth || dimension_from_betti(&doc.betti, a) != truth as i64 {
                return Err(Failure::mismatch(format!("dimension differs at ({}, {})", a.sigma, a.eps)));
            }
            cells += 1;
        }
    }
    let _ = writeln!(out, "dimension: ok ({cells} grades)");

    let index = QueryIndex::build(code);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (sigma, top) = extent(space);
    for _ in 0..lines {
        let line = random_line(&mut rng, sigma, top);
        let want = oracle_line_barcode(space, &code.order, &line)?;
        if bar_multiset(&index.query_barcode(&line)) != bar_multiset(&want) {
            return Err(Failure::mismatch(format!("barcode differs on line {}", line.spec_string())));
        }
    }
    let _ = writeln!(out, "lines: ok ({lines} lines)");
    Ok(out)
}

/// Time the sweep and the line queries on uniform random points.
pub fn bench(n: usize, dim: usize, queries: usize, seed: u64) -> Result<String, Failure> {
    if n == 0 || dim == 0 {
        return Err(Failure::parse("--n and --dim must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = (1..=n).map(|i| format!("x{i}")).collect();
    let f = (0..n).map(|_| rng.gen::<f64>()).collect();
    let coords = (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
    let space = AugmentedMetricSpace::from_coords(ids, f, coords)?;

    let start = Instant::now();
    let code = compute_staircode(&space, Mode::Euclidean)?;
    let sweep = start.elapsed();
    let start = Instant::now();
    let index = QueryIndex::build(&code);
    let build = start.elapsed();
    let lines: Vec<Line> = (0..queries).map(|_| random_line(&mut rng, (0.0, 1.0), 1.5)).collect();
    let start = Instant::now();
    let bars: usize = lines.iter().map(|l| index.query_barcode(l).len()).sum();
    let per_query = start.elapsed().as_secs_f64() / queries.max(1) as f64;

    let mut out = String::new();
    let _ = writeln!(out, "n = {n}, dim = {dim}");
    let _ = writeln!(out, "staircode: {:.3} s", sweep.as_secs_f64());
    let _ = writeln!(out, "index: {:.3} s", build.as_secs_f64());
    let _ = writeln!(out, "query: {:.1} us per line over {queries} lines, {bars} bars", per_query * 1e6);
    Ok(out)
}
