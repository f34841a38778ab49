//! Backtracking search over pair domains with composition-table propagation.

use alloc::vec;
use alloc::vec::Vec;

use super::{verify, Assignment, Clock, Mode, SolveConfig, SolveError, SolveResult, Stats, Status};
use crate::calculus::Calculus;
use crate::network::NormalizedNetwork;
use crate::relation::{RelationIndex, RelationSet};

const NONE: u32 = u32::MAX;

/// Decisions between clock polls.
const CLOCK_STRIDE: u64 = 256;

/// `relation` holds for the ordered pair `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub x: usize,
    pub y: usize,
    pub relation: RelationIndex,
}

/// A conjunction of pair literals that no model satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nogood {
    pub literals: Vec<Literal>,
}

/// Outcome of running propagation to a fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Ok,
    Conflict(Nogood),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Scheme {
    /// Both orientations of a pair are separate variables.
    Ordered,
    /// One variable per pair; the reverse orientation mirrors its converse.
    Unordered,
}

#[derive(Clone, Copy, Debug)]
enum Reason {
    Decision,
    /// Narrowed from two fixed triangle sides (canonical cells).
    Triangle(u32, u32),
    /// Unit propagation of a recorded nogood.
    Nogood(u32),
}

#[derive(Clone, Copy, Debug)]
struct Event {
    prev: u32,
    reason: Reason,
}

#[derive(Clone, Copy, Debug)]
struct TrailEntry {
    cell: u32,
    old: RelationSet,
    old_last: u32,
}

/// Why propagation failed: `reason` produced an empty domain on `target`,
/// or, without a target, the reason's cells are jointly contradictory.
#[derive(Clone, Copy, Debug)]
struct Clash {
    reason: Reason,
    target: Option<u32>,
}

pub(crate) struct Engine<'a> {
    calc: &'a Calculus,
    n: usize,
    scheme: Scheme,
    identity: Option<RelationIndex>,
    identity_shortcut: bool,
    learn: bool,
    coherence: bool,
    dom: Vec<RelationSet>,
    trail: Vec<TrailEntry>,
    events: Vec<Event>,
    last_event: Vec<u32>,
    queue: Vec<u32>,
    nogoods: Vec<Vec<(u32, RelationIndex)>>,
    watches: Vec<Vec<u32>>,
    stats: Stats,
}

impl<'a> Engine<'a> {
    fn new(calc: &'a Calculus, net: &NormalizedNetwork, mode: Mode) -> Self {
        let n = net.len();
        let scheme = if mode == Mode::Gen0 {
            Scheme::Ordered
        } else {
            Scheme::Unordered
        };
        let mut dom = vec![RelationSet::EMPTY; n * n];
        for x in 0..n {
            if let Some(id) = calc.identity() {
                dom[x * n + x] = RelationSet::singleton(id);
            }
            for y in x + 1..n {
                let d = super::initial_domain(calc, net, x, y);
                dom[x * n + y] = d;
                dom[y * n + x] = match scheme {
                    Scheme::Unordered => calc.converse_set(d),
                    Scheme::Ordered => calc.universe(),
                };
            }
        }
        Engine {
            calc,
            n,
            scheme,
            identity: calc.identity(),
            identity_shortcut: matches!(mode, Mode::Gen2 | Mode::Propagator),
            learn: mode == Mode::Propagator,
            coherence: scheme == Scheme::Ordered && calc.detect_involution(),
            dom,
            trail: Vec::new(),
            events: Vec::new(),
            last_event: vec![NONE; n * n],
            queue: Vec::new(),
            nogoods: Vec::new(),
            watches: vec![Vec::new(); n * n],
            stats: Stats::default(),
        }
    }

    #[inline]
    fn canon(&self, a: usize, b: usize) -> u32 {
        match self.scheme {
            Scheme::Unordered if a > b => (b * self.n + a) as u32,
            _ => (a * self.n + b) as u32,
        }
    }

    #[inline]
    fn split(&self, cell: u32) -> (usize, usize) {
        (cell as usize / self.n, cell as usize % self.n)
    }

    /// Search variables in branching order.
    fn variables(&self) -> Vec<u32> {
        let n = self.n;
        let mut vars = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                vars.push((x * n + y) as u32);
                if self.scheme == Scheme::Ordered {
                    vars.push((y * n + x) as u32);
                }
            }
        }
        vars
    }

    fn queue_initial_singletons(&mut self) {
        for v in self.variables() {
            if self.dom[v as usize].single().is_some() {
                self.queue.push(v);
            }
        }
    }

    /// Composition of two fixed relations.
    #[inline]
    fn compose(&mut self, r: RelationIndex, s: RelationIndex) -> RelationSet {
        if self.identity_shortcut {
            if Some(r) == self.identity {
                self.stats.identity_checks += 1;
                return RelationSet::singleton(s);
            }
            if Some(s) == self.identity {
                self.stats.identity_checks += 1;
                return RelationSet::singleton(r);
            }
        }
        self.stats.propagation_checks += 1;
        self.calc.cell(r, s)
    }

    /// Intersects the domain of the ordered pair `(a, b)` with `set`.
    fn narrow(&mut self, a: usize, b: usize, set: RelationSet, reason: Reason) -> Result<(), Clash> {
        let oriented = a * self.n + b;
        let cur = self.dom[oriented];
        let new = cur & set;
        if new == cur {
            return Ok(());
        }
        let c = self.canon(a, b);
        if new.is_empty() {
            return Err(Clash {
                reason,
                target: Some(c),
            });
        }
        let canonical = if c as usize == oriented {
            new
        } else {
            self.calc.converse_set(new)
        };
        let ci = c as usize;
        self.trail.push(TrailEntry {
            cell: c,
            old: self.dom[ci],
            old_last: self.last_event[ci],
        });
        self.events.push(Event {
            prev: self.last_event[ci],
            reason,
        });
        self.last_event[ci] = (self.events.len() - 1) as u32;
        self.set_domain(c, canonical);
        if canonical.single().is_some() {
            self.queue.push(c);
        }
        Ok(())
    }

    fn set_domain(&mut self, cell: u32, set: RelationSet) {
        self.dom[cell as usize] = set;
        if self.scheme == Scheme::Unordered {
            let (x, y) = self.split(cell);
            self.dom[y * self.n + x] = self.calc.converse_set(set);
        }
    }

    fn decide(&mut self, cell: u32, value: RelationIndex) -> Result<(), Clash> {
        let (x, y) = self.split(cell);
        self.narrow(x, y, RelationSet::singleton(value), Reason::Decision)
    }

    fn undo_to(&mut self, trail_mark: usize, events_mark: usize) {
        while self.trail.len() > trail_mark {
            let e = self.trail.pop().unwrap();
            self.set_domain(e.cell, e.old);
            self.last_event[e.cell as usize] = e.old_last;
        }
        self.events.truncate(events_mark);
        self.queue.clear();
    }

    fn propagate(&mut self) -> Result<(), Clash> {
        while let Some(cell) = self.queue.pop() {
            let (x, y) = self.split(cell);
            self.process(x, y)?;
            match self.scheme {
                Scheme::Unordered => self.process(y, x)?,
                Scheme::Ordered => {
                    if self.coherence {
                        self.check_coherence(x, y)?;
                    }
                }
            }
            if self.learn {
                self.check_nogoods(cell)?;
            }
        }
        Ok(())
    }

    /// Narrows every triangle in which the fixed pair `(a, b)` is one of the
    /// two chained sides and the other chained side is fixed too.
    fn process(&mut self, a: usize, b: usize) -> Result<(), Clash> {
        let n = self.n;
        let Some(r) = self.dom[a * n + b].single() else {
            return Ok(());
        };
        let ab = self.canon(a, b);
        for c in 0..n {
            if c == a || c == b {
                continue;
            }
            if let Some(s) = self.dom[b * n + c].single() {
                let set = self.compose(r, s);
                let bc = self.canon(b, c);
                self.narrow(a, c, set, Reason::Triangle(ab, bc))?;
            }
            if let Some(q) = self.dom[c * n + a].single() {
                let set = self.compose(q, r);
                let ca = self.canon(c, a);
                self.narrow(c, b, set, Reason::Triangle(ca, ab))?;
            }
        }
        Ok(())
    }

    fn check_coherence(&mut self, a: usize, b: usize) -> Result<(), Clash> {
        let n = self.n;
        if let (Some(r), Some(v)) = (self.dom[a * n + b].single(), self.dom[b * n + a].single()) {
            if v != self.calc.converse(r) {
                return Err(Clash {
                    reason: Reason::Triangle(self.canon(a, b), self.canon(b, a)),
                    target: None,
                });
            }
        }
        Ok(())
    }

    fn check_nogoods(&mut self, cell: u32) -> Result<(), Clash> {
        let mut k = 0;
        while k < self.watches[cell as usize].len() {
            let id = self.watches[cell as usize][k];
            k += 1;
            let mut open = None;
            let mut open_count = 0;
            let mut blocked = false;
            for &(c, v) in &self.nogoods[id as usize] {
                let d = self.dom[c as usize];
                if !d.contains(v) {
                    blocked = true;
                    break;
                }
                if d.single().is_none() {
                    open_count += 1;
                    open = Some((c, v));
                }
            }
            if blocked || open_count > 1 {
                continue;
            }
            match open {
                None => {
                    return Err(Clash {
                        reason: Reason::Nogood(id),
                        target: None,
                    })
                }
                Some((c, v)) => {
                    let (x, y) = self.split(c);
                    let keep = self.dom[c as usize].difference(RelationSet::singleton(v));
                    self.narrow(x, y, keep, Reason::Nogood(id))?;
                }
            }
        }
        Ok(())
    }

    fn reason_cells(&self, reason: Reason, this: Option<u32>, out: &mut Vec<u32>) {
        match reason {
            Reason::Decision => out.extend(this),
            Reason::Triangle(p, q) => {
                out.push(p);
                out.push(q);
            }
            Reason::Nogood(id) => out.extend(
                self.nogoods[id as usize]
                    .iter()
                    .map(|&(c, _)| c)
                    .filter(|&c| Some(c) != this),
            ),
        }
    }

    /// Literals whose conjunction caused the clash.
    fn explain(&self, clash: Clash) -> Vec<(u32, RelationIndex)> {
        let mut cells = Vec::new();
        self.reason_cells(clash.reason, clash.target, &mut cells);
        if let Some(t) = clash.target {
            self.history_cells(t, &mut cells);
        }
        self.fixed_literals(cells)
    }

    /// Cells behind every narrowing of `t` so far.
    fn history_cells(&self, t: u32, out: &mut Vec<u32>) {
        let mut e = self.last_event[t as usize];
        while e != NONE {
            let ev = self.events[e as usize];
            self.reason_cells(ev.reason, Some(t), out);
            e = ev.prev;
        }
    }

    fn fixed_literals(&self, mut cells: Vec<u32>) -> Vec<(u32, RelationIndex)> {
        cells.sort_unstable();
        cells.dedup();
        cells
            .into_iter()
            .map(|c| {
                let v = self.dom[c as usize]
                    .single()
                    .expect("explanation literal is fixed");
                (c, v)
            })
            .collect()
    }

    fn to_nogood(&self, lits: &[(u32, RelationIndex)]) -> Nogood {
        Nogood {
            literals: lits
                .iter()
                .map(|&(c, relation)| {
                    let (x, y) = self.split(c);
                    Literal { x, y, relation }
                })
                .collect(),
        }
    }

    fn record(&mut self, lits: Vec<(u32, RelationIndex)>) {
        if lits.len() < 2 {
            return;
        }
        let id = self.nogoods.len() as u32;
        for &(c, _) in &lits {
            self.watches[c as usize].push(id);
        }
        self.nogoods.push(lits);
        self.stats.nogoods_added += 1;
    }

    fn drop_nogoods(&mut self, mark: usize) {
        while self.nogoods.len() > mark {
            let lits = self.nogoods.pop().unwrap();
            for (c, _) in lits {
                self.watches[c as usize].pop();
            }
        }
    }

    fn assignment(&self) -> Assignment {
        let n = self.n;
        let mut a = Assignment::new(n);
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    if let Some(r) = self.dom[x * n + y].single() {
                        a.set(x, y, r);
                    }
                }
            }
        }
        a
    }

    fn pick(&self, vars: &[u32], from: usize, first_fail: bool) -> Option<usize> {
        if first_fail {
            vars.iter()
                .enumerate()
                .filter(|(_, &v)| self.dom[v as usize].len() > 1)
                .min_by_key(|(i, &v)| (self.dom[v as usize].len(), *i))
                .map(|(i, _)| i)
        } else {
            (from..vars.len()).find(|&i| self.dom[vars[i] as usize].len() > 1)
        }
    }
}

struct Frame {
    var: usize,
    remaining: RelationSet,
    trail_mark: usize,
    events_mark: usize,
    nogood_mark: usize,
}

pub(crate) fn search(
    calc: &Calculus,
    net: &NormalizedNetwork,
    mode: Mode,
    cfg: &SolveConfig,
    mut clock: Option<&mut dyn Clock>,
    accept: &mut dyn FnMut(&Assignment) -> bool,
) -> SolveResult {
    let mut eng = Engine::new(calc, net, mode);
    let vars = eng.variables();
    eng.stats.peak_pair_count = vars.len() as u64;
    let limit = cfg.max_models.map(|m| m.max(1));
    let mut models: Vec<Assignment> = Vec::new();

    let finish = |eng: Engine, models: Vec<Assignment>, timed_out: bool| {
        let status = if !models.is_empty() {
            Status::Sat
        } else if timed_out {
            Status::Timeout
        } else {
            Status::Unsat
        };
        SolveResult {
            status,
            model: models.first().cloned(),
            models,
            stats: eng.stats,
        }
    };

    if net.inconsistent {
        return finish(eng, models, false);
    }
    if cfg.propagate {
        eng.queue_initial_singletons();
        if eng.propagate().is_err() {
            return finish(eng, models, false);
        }
    }

    let start = clock.as_deref_mut().map(|c| c.elapsed_ms());
    let mut frames: Vec<Frame> = Vec::new();
    let mut next = 0;
    'outer: loop {
        match eng.pick(&vars, next, cfg.first_fail) {
            None => {
                let complete = cfg.propagate || verify(calc, net, &eng.assignment()).ok;
                if complete {
                    let m = eng.assignment();
                    debug_assert!(verify(calc, net, &m).ok, "search produced an invalid model");
                    if accept(&m) {
                        models.push(m);
                        if limit.is_some_and(|l| models.len() >= l) {
                            break 'outer;
                        }
                    }
                }
            }
            Some(var) => frames.push(Frame {
                var,
                remaining: eng.dom[vars[var] as usize],
                trail_mark: eng.trail.len(),
                events_mark: eng.events.len(),
                nogood_mark: eng.nogoods.len(),
            }),
        }

        loop {
            let Some(top) = frames.last_mut() else {
                break 'outer;
            };
            eng.undo_to(top.trail_mark, top.events_mark);
            let Some(value) = top.remaining.first() else {
                let mark = top.nogood_mark;
                frames.pop();
                eng.drop_nogoods(mark);
                continue;
            };
            top.remaining.remove(value);
            let var = top.var;

            if eng.stats.decisions.is_multiple_of(CLOCK_STRIDE) {
                if let (Some(c), Some(t0), Some(budget)) =
                    (clock.as_deref_mut(), start, cfg.time_budget_ms)
                {
                    if c.elapsed_ms().saturating_sub(t0) > budget {
                        return finish(eng, models, true);
                    }
                }
            }
            eng.stats.decisions += 1;

            let mut res = eng.decide(vars[var], value);
            if res.is_ok() && cfg.propagate {
                res = eng.propagate();
            }
            match res {
                Ok(()) => {
                    next = var + 1;
                    continue 'outer;
                }
                Err(clash) => {
                    eng.stats.backtracks += 1;
                    if eng.learn {
                        let lits = eng.explain(clash);
                        eng.record(lits);
                    }
                }
            }
        }
    }
    finish(eng, models, false)
}

/// A partial assignment that can be propagated step by step.
pub struct PartialState<'a> {
    engine: Engine<'a>,
}

impl<'a> PartialState<'a> {
    pub fn new(calc: &'a Calculus, net: &NormalizedNetwork, mode: Mode) -> Result<Self, SolveError> {
        let mode = mode.resolve(calc)?;
        Ok(PartialState {
            engine: Engine::new(calc, net, mode),
        })
    }

    /// Current domain of the ordered pair `(x, y)`.
    pub fn domain(&self, x: usize, y: usize) -> RelationSet {
        self.engine.dom[x * self.engine.n + y]
    }

    /// Narrows a pair's domain as if it had been given in the input.
    pub fn restrict(&mut self, x: usize, y: usize, set: RelationSet) {
        let e = &mut self.engine;
        let c = e.canon(x, y);
        let oriented = if c as usize == x * e.n + y {
            set
        } else {
            e.calc.converse_set(set)
        };
        let new = e.dom[c as usize] & oriented;
        e.set_domain(c, new);
        if new.single().is_some() {
            e.queue.push(c);
        }
    }

    /// Fixes `(x, y)` to `relation` as a decision; call [`Self::propagate`]
    /// afterwards.
    pub fn assign(&mut self, x: usize, y: usize, relation: RelationIndex) -> Propagation {
        let e = &mut self.engine;
        match e.narrow(x, y, RelationSet::singleton(relation), Reason::Decision) {
            Ok(()) => Propagation::Ok,
            Err(_) => {
                // the value was already excluded: the decision itself plus
                // whatever removed it
                let t = e.canon(x, y);
                let value = if t as usize == x * e.n + y {
                    relation
                } else {
                    e.calc.converse(relation)
                };
                let mut cells = Vec::new();
                e.history_cells(t, &mut cells);
                let mut lits = e.fixed_literals(cells);
                lits.push((t, value));
                Propagation::Conflict(e.to_nogood(&lits))
            }
        }
    }

    pub fn propagate(&mut self) -> Propagation {
        let e = &mut self.engine;
        match e.propagate() {
            Ok(()) => Propagation::Ok,
            Err(clash) => {
                let lits = e.explain(clash);
                let nogood = e.to_nogood(&lits);
                if e.learn {
                    e.record(lits);
                }
                Propagation::Conflict(nogood)
            }
        }
    }

    pub fn stats(&self) -> Stats {
        self.engine.stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rcc5() -> Calculus {
        Calculus::rcc5()
    }

    fn r(c: &Calculus, name: &str) -> RelationIndex {
        c.relation_index(name).unwrap()
    }

    #[test]
    fn pp_pp_against_dr_conflicts() {
        let c = rcc5();
        let net = NormalizedNetwork::unconstrained(3);
        for mode in [Mode::Gen0, Mode::Gen1, Mode::Gen2, Mode::Propagator] {
            let mut st = PartialState::new(&c, &net, mode).unwrap();
            st.restrict(0, 2, RelationSet::singleton(r(&c, "dr")));
            assert_eq!(st.assign(0, 1, r(&c, "pp")), Propagation::Ok);
            assert_eq!(st.assign(1, 2, r(&c, "pp")), Propagation::Ok);
            let Propagation::Conflict(ng) = st.propagate() else {
                panic!("expected conflict in {mode}");
            };
            assert!(ng.literals.len() >= 2);
            assert!(ng.literals.contains(&Literal { x: 0, y: 1, relation: r(&c, "pp") }));
            assert!(ng.literals.contains(&Literal { x: 1, y: 2, relation: r(&c, "pp") }));
        }
    }

    #[test]
    fn lone_pair_propagates_cleanly() {
        let c = rcc5();
        let net = NormalizedNetwork::unconstrained(3);
        let mut st = PartialState::new(&c, &net, Mode::Propagator).unwrap();
        st.assign(0, 1, r(&c, "dr"));
        assert_eq!(st.propagate(), Propagation::Ok);
        assert_eq!(st.domain(0, 2), c.universe());
        assert_eq!(st.domain(1, 0), RelationSet::singleton(r(&c, "dr")));
    }

    #[test]
    fn identity_side_forces_third_relation() {
        let c = rcc5();
        let net = NormalizedNetwork::unconstrained(3);
        let mut st = PartialState::new(&c, &net, Mode::Gen2).unwrap();
        st.restrict(0, 2, c.universe().difference(RelationSet::singleton(r(&c, "po"))));
        st.assign(0, 1, r(&c, "eq"));
        st.assign(1, 2, r(&c, "po"));
        let Propagation::Conflict(ng) = st.propagate() else {
            panic!("expected conflict");
        };
        assert_eq!(ng.literals.len(), 2);
        assert!(st.stats().identity_checks > 0);

        // without the restriction the identity law pins (0, 2) to po
        let mut st = PartialState::new(&c, &net, Mode::Gen2).unwrap();
        st.assign(0, 1, r(&c, "eq"));
        st.assign(1, 2, r(&c, "po"));
        assert_eq!(st.propagate(), Propagation::Ok);
        assert_eq!(st.domain(0, 2), RelationSet::singleton(r(&c, "po")));
    }

    #[test]
    fn narrowing_chain_is_explained() {
        // (0,3) is narrowed by two triangles before the clash; the nogood must
        // mention every literal involved.
        let c = rcc5();
        let net = NormalizedNetwork::unconstrained(4);
        let mut st = PartialState::new(&c, &net, Mode::Gen1).unwrap();
        st.assign(0, 1, r(&c, "pp"));
        st.assign(1, 3, r(&c, "pp"));
        assert_eq!(st.propagate(), Propagation::Ok);
        assert_eq!(st.domain(0, 3), RelationSet::singleton(r(&c, "pp")));
        st.assign(0, 2, r(&c, "dr"));
        st.assign(2, 3, r(&c, "ppi"));
        let Propagation::Conflict(ng) = st.propagate() else {
            panic!("expected conflict");
        };
        assert!(ng.literals.len() >= 3, "{ng:?}");
    }
}
