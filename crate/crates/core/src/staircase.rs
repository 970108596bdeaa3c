//! Staircases in the `(σ, ε)` plane and lines of positive slope through it.
//!
//! A staircase is the region `{(σ, ε) : σ ≥ b, 0 ≤ ε < u(σ)}` under a
//! non-increasing step function `u`. Each step is stored as the `σ` where it
//! starts and the envelope value that holds until the next step.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A non-negative value that may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    /// `v < self`, with every finite value below `+∞`.
    pub fn exceeds(self, v: f64) -> bool {
        match self {
            Extended::Finite(u) => v < u,
            Extended::Infinite => true,
        }
    }

    pub fn min(self, other: Extended) -> Extended {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Some(Ordering::Less),
            (Extended::Infinite, Extended::Finite(_)) => Some(Ordering::Greater),
            (Extended::Infinite, Extended::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

/// A point of the parameter plane, optionally carrying integer ranks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grade {
    pub sigma: f64,
    pub eps: f64,
    pub sigma_rank: Option<usize>,
    pub eps_rank: Option<usize>,
}

impl Grade {
    pub fn new(sigma: f64, eps: f64) -> Self {
        Grade { sigma, eps, sigma_rank: None, eps_rank: None }
    }

    /// Product order on the plane.
    pub fn le(&self, other: &Grade) -> bool {
        self.sigma <= other.sigma && self.eps <= other.eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub sigma: f64,
    pub u: Extended,
}

/// Corner kinds: the birth corner, inner corners where a relation appears,
/// and outer corners where two relations meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CornerType {
    Type0 = 0,
    Type1 = 1,
    Type2 = 2,
}

impl CornerType {
    pub fn degree(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub sigma: f64,
    pub eps: f64,
    pub kind: CornerType,
}

/// One staircase, owned by the point with input index `owner`.
#[derive(Debug, Clone, PartialEq)]
pub struct Staircase {
    pub owner: usize,
    steps: Vec<Step>,
}

impl Staircase {
    /// Validate and store steps. Consecutive equal envelope values are merged.
    pub fn new(owner: usize, steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Invariant("a staircase needs at least one step".into()));
        }
        let mut merged: Vec<Step> = Vec::with_capacity(steps.len());
        for s in steps {
            if !s.sigma.is_finite() {
                return Err(Error::Invariant(format!("step position {} is not finite", s.sigma)));
            }
            if let Extended::Finite(u) = s.u {
                if !(u >= 0.0) || !u.is_finite() {
                    return Err(Error::Invariant(format!("envelope value {u} is not a non-negative number")));
                }
            }
            if let Some(last) = merged.last() {
                if s.sigma <= last.sigma {
                    return Err(Error::Invariant("step positions must strictly increase".into()));
                }
                if s.u > last.u {
                    return Err(Error::Invariant("envelope values must not increase".into()));
                }
                if !last.u.is_finite() && s.u.is_finite() {
                    return Err(Error::Invariant("an unbounded staircase must stay unbounded".into()));
                }
                if s.u == last.u {
                    continue;
                }
            }
            merged.push(s);
        }
        Ok(Staircase { owner, steps: merged })
    }

    /// Unbounded quadrant `[b, ∞) × [0, ∞)`.
    pub fn quadrant(owner: usize, birth: f64) -> Self {
        Staircase { owner, steps: vec![Step { sigma: birth, u: Extended::Infinite }] }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn birth_sigma(&self) -> f64 {
        self.steps[0].sigma
    }

    pub fn is_quadrant(&self) -> bool {
        !self.steps[0].u.is_finite()
    }

    /// True when the envelope is a single finite value.
    pub fn is_rectangle(&self) -> bool {
        self.steps.len() == 1 && self.steps[0].u.is_finite()
    }

    /// True when the region has no points at all.
    pub fn is_empty(&self) -> bool {
        self.steps[0].u == Extended::Finite(0.0)
    }

    /// Envelope value at `sigma`, or `None` before the birth.
    pub fn envelope(&self, sigma: f64) -> Option<Extended> {
        let k = self.steps.partition_point(|s| s.sigma <= sigma);
        (k > 0).then(|| self.steps[k - 1].u)
    }

    pub fn contains(&self, sigma: f64, eps: f64) -> bool {
        eps >= 0.0 && self.envelope(sigma).is_some_and(|u| u.exceeds(eps))
    }

    /// Corners of the region, derived from the local inclusion-exclusion of
    /// its indicator: the birth corner, one inner corner at the top-left of
    /// every bounded step, and one outer corner at every drop.
    pub fn corners(&self) -> Vec<Corner> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Corner { sigma: self.birth_sigma(), eps: 0.0, kind: CornerType::Type0 }];
        for (j, s) in self.steps.iter().enumerate() {
            if let Extended::Finite(u) = s.u {
                out.push(Corner { sigma: s.sigma, eps: u, kind: CornerType::Type1 });
            }
            if j > 0 {
                if let Extended::Finite(prev) = self.steps[j - 1].u {
                    out.push(Corner { sigma: s.sigma, eps: prev, kind: CornerType::Type2 });
                }
            }
        }
        out
    }

    /// Entry and exit parameters of `line` through this staircase.
    ///
    /// Returns `None` when the intersection is empty.
    pub fn line_bar(&self, line: &Line) -> Option<(f64, Extended)> {
        let entry = line.entry_time(self.birth_sigma());
        let exit = self.exit_time(line);
        match exit {
            Extended::Finite(t) if t <= entry => None,
            _ => Some((entry, exit)),
        }
    }

    /// First parameter at which the line lies on or above the envelope.
    ///
    /// Within step `j` the line is outside from `max(t(σ_j), t(u_j))` on.
    /// That quantity is unimodal in `j`, so a binary search finds the minimum.
    pub fn exit_time(&self, line: &Line) -> Extended {
        let term = |s: &Step| -> (f64, Extended) {
            let ts = line.t_sigma(s.sigma);
            let te = match s.u {
                Extended::Finite(u) => Extended::Finite(line.t_eps(u)),
                Extended::Infinite => Extended::Infinite,
            };
            (ts, te)
        };
        let k = self.steps.partition_point(|s| {
            let (ts, te) = term(s);
            Extended::Finite(ts) < te
        });
        let mut best = Extended::Infinite;
        if k < self.steps.len() {
            best = best.min(Extended::Finite(term(&self.steps[k]).0));
        }
        if k > 0 {
            best = best.min(term(&self.steps[k - 1]).1);
        }
        best
    }
}

/// Indicator of a staircase at a grade.
pub fn staircase_contains(stair: &Staircase, a: Grade) -> bool {
    stair.contains(a.sigma, a.eps)
}

/// A line of strictly positive slope, parameterised by arc length from the
/// anchor with the smaller `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub anchor: (f64, f64),
    pub other: (f64, f64),
    cos: f64,
    sin: f64,
}

impl Line {
    pub fn through(p: (f64, f64), q: (f64, f64)) -> Result<Line> {
        if ![p.0, p.1, q.0, q.1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidLine("anchor coordinates must be finite".into()));
        }
        let (a, b) = if p.0 <= q.0 { (p, q) } else { (q, p) };
        let ds = b.0 - a.0;
        let de = b.1 - a.1;
        if ds == 0.0 && de == 0.0 {
            return Err(Error::InvalidLine("anchors coincide".into()));
        }
        if ds <= 0.0 || de <= 0.0 {
            return Err(Error::InvalidLine("line must have strictly positive slope".into()));
        }
        let len = ds.hypot(de);
        Ok(Line { anchor: a, other: b, cos: ds / len, sin: de / len })
    }

    /// Parse `σ1,ε1:σ2,ε2`.
    pub fn parse(text: &str) -> Result<Line> {
        let (p, q) = text
            .split_once(':')
            .ok_or_else(|| Error::InvalidLine(format!("expected `s1,e1:s2,e2`, got {text:?}")))?;
        Line::through(parse_point(p)?, parse_point(q)?)
    }

    pub fn slope(&self) -> f64 {
        self.sin / self.cos
    }

    /// Parameter at which the line reaches `σ = v`.
    pub fn t_sigma(&self, v: f64) -> f64 {
        (v - self.anchor.0) / self.cos
    }

    /// Parameter at which the line reaches `ε = e`.
    pub fn t_eps(&self, e: f64) -> f64 {
        (e - self.anchor.1) / self.sin
    }

    /// Parameter where the line enters `{σ ≥ b, ε ≥ 0}`.
    pub fn entry_time(&self, b: f64) -> f64 {
        self.t_sigma(b).max(self.t_eps(0.0))
    }

    pub fn point_at(&self, t: f64) -> (f64, f64) {
        (self.anchor.0 + t * self.cos, self.anchor.1 + t * self.sin)
    }

    pub fn spec_string(&self) -> String {
        format!("{},{}:{},{}", self.anchor.0, self.anchor.1, self.other.0, self.other.1)
    }
}

pub fn parse_point(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| Error::InvalidLine(format!("expected `s,e`, got {text:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::InvalidLine(format!("not a finite number: {s:?}")))
    };
    Ok((parse(a)?, parse(b)?))
}

/// A half-open bar `[birth, death)` in line parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub owner: usize,
    pub birth: f64,
    pub death: Extended,
}

impl Bar {
    pub fn birth_point(&self, line: &Line) -> (f64, f64) {
        line.point_at(self.birth)
    }

    pub fn death_point(&self, line: &Line) -> Option<(f64, f64)> {
        self.death.finite().map(|t| line.point_at(t))
    }
}

/// Sort bars by `(birth, death)` and drop owners, for multiset comparison.
pub fn bar_multiset(bars: &[Bar]) -> Vec<(f64, Extended)> {
    let mut v: Vec<(f64, Extended)> = bars.iter().map(|b| (b.birth, b.death)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal)));
    v
}
