//! Native model-existence solving.
//!
//! Search assigns one base relation to every pair of distinct elements.
//! Domains start from the input constraints and are narrowed whenever two
//! sides of a triangle are fixed: the third side must lie in the
//! corresponding composition-table cell. Conflicts are reported as nogoods
//! over the pair literals that produced them.

mod brute;
mod coloring;
mod engine;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::calculus::{Calculus, Tier};
use crate::network::NormalizedNetwork;
use crate::relation::{RelationIndex, RelationSet};

pub use brute::{brute_force, brute_force_models, BruteForceError, DEFAULT_CANDIDATE_BOUND};
pub use coloring::{color_graph, overlap_graph, solve_with_coloring, ColoringOutcome};
pub use engine::{Literal, Nogood, PartialState, Propagation};

/// How the search is organised, mirroring the encoding tiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Ordered pairs assigned independently, both `(x, y)` and `(y, x)`.
    Gen0,
    /// Unordered pairs; the reverse pair is derived through the converse.
    Gen1,
    /// As `Gen1`, but triangles with an identity side bypass the table.
    Gen2,
    /// As `Gen2`, with conflict nogoods recorded and propagated.
    Propagator,
    /// Strongest mode the calculus is eligible for.
    Auto,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Gen0 => "gen0",
            Mode::Gen1 => "gen1",
            Mode::Gen2 => "gen2",
            Mode::Propagator => "prop",
            Mode::Auto => "auto",
        }
    }

    /// Parses `gen0`, `gen1`, `gen2`, `prop`/`propagator`/`gen3` or `auto`.
    pub fn parse(s: &str) -> Option<Mode> {
        Some(match s.to_ascii_lowercase().as_str() {
            "gen0" => Mode::Gen0,
            "gen1" => Mode::Gen1,
            "gen2" => Mode::Gen2,
            "prop" | "propagator" | "gen3" => Mode::Propagator,
            "auto" => Mode::Auto,
            _ => return None,
        })
    }

    /// Lowest tier that permits this mode.
    pub fn required_tier(self) -> Tier {
        match self {
            Mode::Gen0 | Mode::Auto => Tier::Gen0,
            Mode::Gen1 => Tier::Gen1,
            Mode::Gen2 | Mode::Propagator => Tier::Gen2,
        }
    }

    /// Resolves `Auto` and checks eligibility.
    pub fn resolve(self, calc: &Calculus) -> Result<Mode, SolveError> {
        let tier = calc.classify().tier;
        if self == Mode::Auto {
            return Ok(match tier {
                Tier::Gen2 => Mode::Propagator,
                Tier::Gen1 => Mode::Gen1,
                Tier::Gen0 => Mode::Gen0,
            });
        }
        if tier < self.required_tier() {
            return Err(SolveError::Ineligible { mode: self, tier });
        }
        Ok(self)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub mode: Mode,
    /// `None` enumerates every model.
    pub max_models: Option<usize>,
    /// Only enforced when the caller supplies a [`Clock`].
    pub time_budget_ms: Option<u64>,
    /// Branch on the pair with the smallest domain instead of the next pair
    /// in lexicographic order.
    pub first_fail: bool,
    /// With `false`, domains are never narrowed and complete assignments
    /// are checked afterwards (generate and test).
    pub propagate: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            mode: Mode::Auto,
            max_models: Some(1),
            time_budget_ms: None,
            first_fail: false,
            propagate: true,
        }
    }
}

impl SolveConfig {
    pub fn mode(mode: Mode) -> Self {
        SolveConfig {
            mode,
            ..Default::default()
        }
    }
}

/// Millisecond clock used to enforce time budgets.
pub trait Clock {
    fn elapsed_ms(&mut self) -> u64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Timeout => "TIMEOUT",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Values tried at branching points.
    pub decisions: u64,
    /// Conflicts that undid a decision.
    pub backtracks: u64,
    pub nogoods_added: u64,
    /// Composition-table consultations made while propagating.
    pub propagation_checks: u64,
    /// Triangle narrowings resolved by the identity law without the table.
    pub identity_checks: u64,
    pub elapsed_ms: u64,
    /// Number of pair variables in the search.
    pub peak_pair_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// First model found, present iff `status` is `Sat`.
    pub model: Option<Assignment>,
    /// All models found, in search order, up to `max_models`.
    pub models: Vec<Assignment>,
    pub stats: Stats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    Ineligible { mode: Mode, tier: Tier },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Ineligible { mode, tier } => {
                let missing = match mode.required_tier() {
                    Tier::Gen1 => "involution of converse",
                    _ if *tier == Tier::Gen0 => "involution of converse and the identity law",
                    _ => "the identity law",
                };
                write!(
                    f,
                    "mode {mode} needs a calculus with {missing} (calculus tier is {tier})"
                )
            }
        }
    }
}

impl core::error::Error for SolveError {}

/// A relation for every ordered pair of distinct elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    values: Vec<RelationIndex>,
}

impl Assignment {
    pub const UNSET: RelationIndex = RelationIndex::MAX;

    pub fn new(n: usize) -> Self {
        Assignment {
            n,
            values: vec![Self::UNSET; n * n],
        }
    }

    /// Builds an assignment from `(x, y, r)` triples and fills each missing
    /// reverse pair with the converse.
    pub fn from_pairs(calc: &Calculus, n: usize, pairs: &[(usize, usize, RelationIndex)]) -> Self {
        let mut a = Assignment::new(n);
        for &(x, y, r) in pairs {
            a.set(x, y, r);
        }
        for &(x, y, r) in pairs {
            if a.get(y, x).is_none() {
                a.set(y, x, calc.converse(r));
            }
        }
        a
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, x: usize, y: usize) -> Option<RelationIndex> {
        match self.values[x * self.n + y] {
            Self::UNSET => None,
            r => Some(r),
        }
    }

    pub fn set(&mut self, x: usize, y: usize, r: RelationIndex) {
        self.values[x * self.n + y] = r;
    }

    /// `(x, y, r)` for every pair with `x < y`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, RelationIndex)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |x| {
            (x + 1..n).filter_map(move |y| self.get(x, y).map(|r| (x, y, r)))
        })
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.pairs().map(|(x, y, r)| ((x, y), r)))
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The network was flagged inconsistent during normalization.
    Inconsistent,
    SizeMismatch { expected: usize, found: usize },
    Unassigned { x: usize, y: usize },
    Constraint { x: usize, y: usize, relation: RelationIndex },
    /// `(y, x)` is not the converse of `(x, y)` in an involutive calculus.
    Converse { x: usize, y: usize },
    /// Some orientation of the triangle `x < y < z` breaks the table.
    Triangle { x: usize, y: usize, z: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks a total assignment against the constraints, converse coherence
/// (for involutive calculi) and every ordered triangle of distinct elements.
pub fn verify(calc: &Calculus, net: &NormalizedNetwork, model: &Assignment) -> Verification {
    let mut violations = Vec::new();
    let n = net.len();
    if net.inconsistent {
        violations.push(Violation::Inconsistent);
    }
    if model.len() != n {
        violations.push(Violation::SizeMismatch {
            expected: n,
            found: model.len(),
        });
        return Verification {
            ok: false,
            violations,
        };
    }
    for x in 0..n {
        for y in 0..n {
            if x != y && model.get(x, y).is_none() {
                violations.push(Violation::Unassigned { x, y });
            }
        }
    }
    if !violations.is_empty() {
        return Verification {
            ok: false,
            violations,
        };
    }
    let rel = |x: usize, y: usize| model.get(x, y).unwrap();

    for (&(x, y), &set) in &net.constraints {
        if !set.contains(rel(x, y)) {
            violations.push(Violation::Constraint {
                x,
                y,
                relation: rel(x, y),
            });
        }
    }
    if calc.detect_involution() {
        for x in 0..n {
            for y in x + 1..n {
                if rel(y, x) != calc.converse(rel(x, y)) {
                    violations.push(Violation::Converse { x, y });
                }
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let orientations = [
                    (x, y, z),
                    (x, z, y),
                    (y, x, z),
                    (y, z, x),
                    (z, x, y),
                    (z, y, x),
                ];
                let broken = orientations
                    .iter()
                    .any(|&(a, b, c)| !calc.cell(rel(a, b), rel(b, c)).contains(rel(a, c)));
                if broken {
                    violations.push(Violation::Triangle { x, y, z });
                }
            }
        }
    }
    Verification {
        ok: violations.is_empty(),
        violations,
    }
}

/// Decides model existence for a normalized network.
pub fn solve(
    calc: &Calculus,
    net: &NormalizedNetwork,
    cfg: &SolveConfig,
) -> Result<SolveResult, SolveError> {
    solve_with(calc, net, cfg, None, &mut |_| true)
}

/// [`solve`] with an optional clock for the time budget and a model filter:
/// models rejected by `accept` are skipped and the search continues.
pub fn solve_with(
    calc: &Calculus,
    net: &NormalizedNetwork,
    cfg: &SolveConfig,
    clock: Option<&mut dyn Clock>,
    accept: &mut dyn FnMut(&Assignment) -> bool,
) -> Result<SolveResult, SolveError> {
    let mode = cfg.mode.resolve(calc)?;
    let result = match clock {
        Some(c) => {
            let t0 = c.elapsed_ms();
            let mut r = engine::search(calc, net, mode, cfg, Some(&mut *c), accept);
            r.stats.elapsed_ms = c.elapsed_ms().saturating_sub(t0);
            r
        }
        None => engine::search(calc, net, mode, cfg, None, accept),
    };
    Ok(result)
}

/// Restricts a set to what the calculus allows between distinct elements.
pub(crate) fn initial_domain(calc: &Calculus, net: &NormalizedNetwork, x: usize, y: usize) -> RelationSet {
    net.get(calc, x, y).unwrap_or_else(|| calc.universe())
}
