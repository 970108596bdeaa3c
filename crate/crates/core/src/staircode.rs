//! Elder-rule staircodes computed by sweeping points in filter order.
//!
//! Points are inserted one at a time. After each insertion the minimum
//! spanning tree of the prefix is updated, its single-linkage treegram is
//! replayed, and every conquered point records the height at which it joins
//! an older point together with the eldest of the block it joins.
//!
//! Two envelopes are kept. The rank envelope records a step after every
//! insertion and drives graded Betti numbers. The real envelope only records
//! after the last point of each group of equal filter values, since the
//! sublevel set at that value already contains the whole group.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mst::Mst;
use crate::space::{AugmentedMetricSpace, Pair};
use crate::staircase::{Extended, Grade, Staircase, Step};
use crate::treegram::{build_treegram, decorate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Euclidean,
    Generic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Euclidean => "euclidean",
            Mode::Generic => "generic",
        }
    }
}

/// The conqueror named from `sigma_from` until the next span starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConquerorSpan {
    pub sigma_from: f64,
    pub conqueror: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoratedStaircase {
    pub staircase: Staircase,
    /// Empty for the eldest point, which is never conquered.
    pub conquerors: Vec<ConquerorSpan>,
}

impl DecoratedStaircase {
    /// Conqueror in effect at `sigma`.
    pub fn conqueror_at(&self, sigma: f64) -> Option<usize> {
        let k = self.conquerors.partition_point(|c| c.sigma_from <= sigma);
        (k > 0).then(|| self.conquerors[k - 1].conqueror)
    }
}

/// One rank-level step: from insertion `sigma_rank` on, the point is
/// conquered through `edge` (or never, for `None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankedStep {
    pub sigma_rank: usize,
    pub edge: Option<Pair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedEnvelope {
    pub owner: usize,
    pub steps: Vec<RankedStep>,
}

impl RankedEnvelope {
    pub fn birth_rank(&self) -> usize {
        self.steps[0].sigma_rank
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Staircode {
    pub ids: Vec<String>,
    /// Input indices from eldest to youngest.
    pub order: Vec<usize>,
    /// Decorated staircases indexed by input index.
    pub entries: Vec<DecoratedStaircase>,
    /// Rank-level envelopes, present when computed from a dataset.
    pub ranked: Option<Vec<RankedEnvelope>>,
    pub mode: Mode,
    pub tie_breaks: bool,
}

impl Staircode {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn staircase(&self, i: usize) -> &Staircase {
        &self.entries[i].staircase
    }

    pub fn staircases(&self) -> impl Iterator<Item = &Staircase> {
        self.entries.iter().map(|e| &e.staircase)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Position of each input index in `order`.
    pub fn positions(&self) -> Vec<usize> {
        AugmentedMetricSpace::positions(&self.order)
    }

    /// Number of staircases containing `a`.
    pub fn count_containing(&self, a: Grade) -> usize {
        self.staircases().filter(|s| s.contains(a.sigma, a.eps)).count()
    }
}

/// Diagnostics gathered while sweeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// Largest number of edges entering the tree in one insertion.
    pub max_new_edges: usize,
}

/// Staircode under the default `(f, index)` order.
pub fn compute_staircode(space: &AugmentedMetricSpace, mode: Mode) -> Result<Staircode> {
    compute_staircode_ordered(space, &space.point_order(), mode)
}

/// Staircode under an explicit order compatible with `f`.
pub fn compute_staircode_ordered(space: &AugmentedMetricSpace, order: &[usize], mode: Mode) -> Result<Staircode> {
    compute_with_stats(space, order, mode).map(|(s, _)| s)
}

pub fn compute_with_stats(space: &AugmentedMetricSpace, order: &[usize], mode: Mode) -> Result<(Staircode, SweepStats)> {
    space.validate_order(order)?;
    let coords = match mode {
        Mode::Euclidean => Some(
            space
                .coords()
                .ok_or_else(|| Error::InvalidInput("euclidean mode needs coordinates".into()))?,
        ),
        Mode::Generic => None,
    };
    let n = space.len();
    let position = AugmentedMetricSpace::positions(order);
    let mut stats = SweepStats::default();
    let mut mst = Mst::new();
    // Current conquering edge, height and conqueror for each present point.
    let mut current: Vec<Option<(Pair, f64, usize)>> = vec![None; n];
    let mut ranked: Vec<Vec<RankedStep>> = vec![Vec::new(); n];
    let mut real_steps: Vec<Vec<Step>> = vec![Vec::new(); n];
    let mut real_conq: Vec<Vec<ConquerorSpan>> = vec![Vec::new(); n];

    for (r, &p) in order.iter().enumerate() {
        let report = match coords {
            Some(c) => mst.insert_euclidean(p, c)?,
            None => {
                let weights: Vec<f64> = mst.vertices().iter().map(|&q| space.dist(p, q)).collect();
                mst.insert(p, &weights)?
            }
        };
        stats.max_new_edges = stats.max_new_edges.max(report.added.len());

        let tree = build_treegram(mst.vertices(), mst.edges())?;
        let decorated = decorate(&tree, &position)?;
        for m in &decorated.merges {
            let edge = m.edge.ok_or_else(|| Error::Invariant("prefix merge without an edge".into()))?;
            current[m.conquered] = Some((edge, m.height, m.eldest));
        }
        if decorated.merges.len() + 1 != r + 1 {
            return Err(Error::Invariant("prefix treegram must merge every point".into()));
        }

        for &x in &order[..=r] {
            let edge = current[x].map(|c| c.0);
            if ranked[x].last().map_or(true, |s| s.edge != edge) {
                ranked[x].push(RankedStep { sigma_rank: r + 1, edge });
            }
        }

        let closes_group = r + 1 == n || space.f(order[r + 1]) != space.f(p);
        if closes_group {
            let sigma = space.f(p);
            for &x in &order[..=r] {
                let u = current[x].map_or(Extended::Infinite, |c| Extended::Finite(c.1));
                if real_steps[x].last().map_or(true, |s| s.u != u) {
                    real_steps[x].push(Step { sigma, u });
                }
                if let Some((_, _, c)) = current[x] {
                    if real_conq[x].last().map_or(true, |s| s.conqueror != c) {
                        real_conq[x].push(ConquerorSpan { sigma_from: sigma, conqueror: c });
                    }
                }
            }
        }
    }

    let mut entries = Vec::with_capacity(n);
    for (x, (steps, conquerors)) in real_steps.into_iter().zip(real_conq).enumerate() {
        entries.push(DecoratedStaircase { staircase: Staircase::new(x, steps)?, conquerors });
    }
    let ranked = ranked
        .into_iter()
        .enumerate()
        .map(|(owner, steps)| RankedEnvelope { owner, steps })
        .collect();
    let code = Staircode {
        ids: space.ids().to_vec(),
        order: order.to_vec(),
        entries,
        ranked: Some(ranked),
        mode,
        tie_breaks: space.has_ties(),
    };
    Ok((code, stats))
}
