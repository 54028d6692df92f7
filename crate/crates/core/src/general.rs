//! One-pass selection for general interval streams.
//!
//! The state machine keeps two collections: *actual* intervals `A` drawn
//! from the stream, and *virtual* intervals `V`, each the intersection of
//! two actuals that coexisted at some point. An arrival is rejected when it
//! contains any stored interval; otherwise it joins `A`, stored intervals
//! containing it are dropped, virtual intervals around its endpoints are
//! trimmed into it (or new intersections are recorded), and finally any
//! actual interval strictly enclosing a virtual one on both sides is
//! evicted. The reported solution is the offline optimum of `A`, which is
//! always at least half the optimum of everything seen, while `|V| <= |A|`
//! keeps the memory footprint linear in the output.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::interval::{containment, Containment, Interval, IntervalSet, Kind};
use crate::key::EndpointKey;
use crate::oracle::offline_optimum;

/// Per-point coverage type: (number of actuals, number of virtuals).
pub type Portion = (u32, u32);

/// The left-to-right sequence of maximal coverage portions over the whole
/// line, beginning and ending with `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortionString(pub Vec<Portion>);

impl fmt::Display for PortionString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, y) in &self.0 {
            write!(f, "({x},{y})")?;
        }
        Ok(())
    }
}

/// What a single arrival did to the state.
#[derive(Clone, Debug)]
pub struct RoundOutcome {
    /// False when the arrival contained a stored interval and was dropped
    /// without touching the state.
    pub accepted: bool,
    /// Actual intervals removed during this round.
    pub evicted: Vec<Interval>,
}

/// The pair `(A, V)` plus arrival and peak-size bookkeeping.
///
/// Single-owner state machine: one mutator at a time, with read-only
/// inspection allowed between arrivals.
#[derive(Clone, Debug, Default)]
pub struct GeneralState {
    actuals: BTreeMap<EndpointKey, Interval>,
    virtuals: BTreeMap<EndpointKey, Interval>,
    arrivals: u64,
    peak_actual: usize,
    peak_virtual: usize,
    next_virtual_id: u64,
}

impl GeneralState {
    pub fn new() -> Self {
        GeneralState::default()
    }

    /// Builds a state directly from parts, without any validity checking.
    /// Intended for diagnostics and tests that need hand-made states.
    pub fn from_parts(
        actuals: impl IntoIterator<Item = Interval>,
        virtuals: impl IntoIterator<Item = Interval>,
    ) -> Self {
        let mut state = GeneralState::new();
        for interval in actuals {
            state.actuals.insert(interval.lo.clone(), interval);
        }
        for interval in virtuals {
            state.virtuals.insert(interval.lo.clone(), interval);
        }
        state.peak_actual = state.actuals.len();
        state.peak_virtual = state.virtuals.len();
        state
    }

    pub fn arrivals(&self) -> u64 {
        self.arrivals
    }

    pub fn actual_count(&self) -> usize {
        self.actuals.len()
    }

    pub fn virtual_count(&self) -> usize {
        self.virtuals.len()
    }

    pub fn peak_actual(&self) -> usize {
        self.peak_actual
    }

    pub fn peak_virtual(&self) -> usize {
        self.peak_virtual
    }

    pub fn actuals(&self) -> impl Iterator<Item = &Interval> {
        self.actuals.values()
    }

    pub fn virtuals(&self) -> impl Iterator<Item = &Interval> {
        self.virtuals.values()
    }

    pub fn actual_set(&self) -> IntervalSet {
        self.actuals.values().cloned().collect()
    }

    pub fn virtual_set(&self) -> IntervalSet {
        self.virtuals.values().cloned().collect()
    }

    pub fn contains_actual(&self, interval: &Interval) -> bool {
        self.actuals
            .get(&interval.lo)
            .map_or(false, |stored| stored.hi == interval.hi)
    }

    /// Handles one arrival. The interval must be the next input in stream
    /// order: `interval.id == self.arrivals()`.
    pub fn process(&mut self, interval: &Interval) -> RoundOutcome {
        assert_eq!(interval.kind, Kind::Input, "only input intervals arrive");
        assert_eq!(
            interval.id, self.arrivals,
            "arrivals must be processed in stream order"
        );
        let outcome = self.round(interval);
        self.arrivals += 1;
        self.peak_actual = self.peak_actual.max(self.actuals.len());
        self.peak_virtual = self.peak_virtual.max(self.virtuals.len());
        outcome
    }

    fn round(&mut self, interval: &Interval) -> RoundOutcome {
        if self.holds_member_within(interval) {
            return RoundOutcome {
                accepted: false,
                evicted: Vec::new(),
            };
        }
        self.actuals.insert(interval.lo.clone(), interval.clone());

        let mut evicted = Vec::new();
        for key in containing_keys(&self.actuals, interval, Some(interval.id)) {
            if let Some(removed) = self.actuals.remove(&key) {
                evicted.push(removed);
            }
        }
        for key in containing_keys(&self.virtuals, interval, None) {
            self.virtuals.remove(&key);
        }

        // Around each endpoint: trim the virtual interval covering it into
        // the arrival, or record the intersection with a covering actual.
        // The virtual branch takes precedence when both would apply.
        let mut touched = Vec::new();
        for point in [interval.lo.clone(), interval.hi.clone()] {
            if let Some(covering) = member_covering(&self.virtuals, &point) {
                let replacement = self.make_virtual(interval, &covering);
                self.virtuals.remove(&covering.lo);
                self.virtuals
                    .insert(replacement.lo.clone(), replacement.clone());
                touched.push(replacement);
            } else if let Some(covering) =
                actual_covering(&self.actuals, &point, interval.id)
            {
                let recorded = self.make_virtual(interval, &covering);
                self.virtuals
                    .insert(recorded.lo.clone(), recorded.clone());
                touched.push(recorded);
            }
        }

        // Evict any actual strictly enclosing a virtual on both sides. Only
        // intervals touched this round can newly satisfy the condition.
        for virt in &touched {
            for key in strictly_enclosing_keys(&self.actuals, virt) {
                if let Some(removed) = self.actuals.remove(&key) {
                    evicted.push(removed);
                }
            }
        }
        debug_assert!(
            self.contains_actual(interval),
            "an accepted arrival must survive its own round"
        );

        RoundOutcome {
            accepted: true,
            evicted,
        }
    }

    /// The reported solution: an optimal disjoint subset of the actual set.
    pub fn finalize(&self) -> IntervalSet {
        offline_optimum(&self.actual_set())
    }

    /// Left-to-right coverage scan of the whole line.
    pub fn portion_string(&self) -> PortionString {
        let mut events: Vec<(&EndpointKey, i32, i32)> = Vec::new();
        for interval in self.actuals.values() {
            events.push((&interval.lo, 1, 0));
            events.push((&interval.hi, -1, 0));
        }
        for interval in self.virtuals.values() {
            events.push((&interval.lo, 0, 1));
            events.push((&interval.hi, 0, -1));
        }
        events.sort_by(|a, b| a.0.cmp(b.0));
        let mut out: Vec<Portion> = vec![(0, 0)];
        let mut actual_cover: i32 = 0;
        let mut virtual_cover: i32 = 0;
        let mut idx = 0;
        while idx < events.len() {
            let key = events[idx].0;
            while idx < events.len() && events[idx].0 == key {
                actual_cover += events[idx].1;
                virtual_cover += events[idx].2;
                idx += 1;
            }
            let portion = (actual_cover.max(0) as u32, virtual_cover.max(0) as u32);
            if *out.last().unwrap() != portion {
                out.push(portion);
            }
        }
        PortionString(out)
    }

    /// True when some stored interval lies weakly inside `interval`.
    fn holds_member_within(&self, interval: &Interval) -> bool {
        member_within(&self.actuals, interval, Some(interval.id))
            || member_within(&self.virtuals, interval, None)
    }

    fn make_virtual(&mut self, a: &Interval, b: &Interval) -> Interval {
        let lo = if a.lo >= b.lo { a.lo.clone() } else { b.lo.clone() };
        let hi = if a.hi <= b.hi { a.hi.clone() } else { b.hi.clone() };
        let id = self.next_virtual_id;
        self.next_virtual_id += 1;
        Interval::virtual_over(lo, hi, id)
    }
}

/// Is there a member weakly contained in `interval`?
///
/// Visits entries with `lo` in the arrival's span; each visited non-match
/// must cover the arrival's right endpoint, so the scan stays short.
fn member_within(
    map: &BTreeMap<EndpointKey, Interval>,
    interval: &Interval,
    skip_id: Option<u64>,
) -> bool {
    for candidate in map.range(interval.lo.clone()..).map(|(_, v)| v) {
        if candidate.lo > interval.hi {
            break;
        }
        if skip_id == Some(candidate.id) {
            continue;
        }
        if candidate.hi <= interval.hi {
            return true;
        }
    }
    false
}

/// Keys of members weakly containing `interval`.
fn containing_keys(
    map: &BTreeMap<EndpointKey, Interval>,
    interval: &Interval,
    skip_id: Option<u64>,
) -> Vec<EndpointKey> {
    let mut keys = Vec::new();
    for candidate in map.range(..=interval.lo.clone()).rev().map(|(_, v)| v) {
        if skip_id == Some(candidate.id) {
            continue;
        }
        if candidate.hi < interval.lo {
            break;
        }
        if candidate.hi >= interval.hi {
            keys.push(candidate.lo.clone());
        }
    }
    keys
}

/// The member covering point `p`, if any. Members are pairwise disjoint, so
/// the predecessor by `lo` is the only possible match.
fn member_covering(map: &BTreeMap<EndpointKey, Interval>, p: &EndpointKey) -> Option<Interval> {
    map.range(..=p.clone())
        .next_back()
        .map(|(_, v)| v)
        .filter(|v| v.hi >= *p)
        .cloned()
}

/// An actual interval other than the arrival covering point `p`.
fn actual_covering(
    map: &BTreeMap<EndpointKey, Interval>,
    p: &EndpointKey,
    skip_id: u64,
) -> Option<Interval> {
    for candidate in map.range(..=p.clone()).rev().map(|(_, v)| v) {
        if candidate.id == skip_id {
            continue;
        }
        if candidate.hi < *p {
            break;
        }
        return Some(candidate.clone());
    }
    None
}

/// Keys of actuals strictly enclosing `virt` on both sides.
fn strictly_enclosing_keys(
    map: &BTreeMap<EndpointKey, Interval>,
    virt: &Interval,
) -> Vec<EndpointKey> {
    let mut keys = Vec::new();
    for candidate in map.range(..virt.lo.clone()).rev().map(|(_, v)| v) {
        if candidate.hi < virt.lo {
            break;
        }
        if candidate.hi > virt.hi {
            keys.push(candidate.lo.clone());
        }
    }
    keys
}

/// A broken structural property, reported as data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Two actual intervals where one weakly contains the other.
    NestedActuals { outer: String, inner: String },
    /// A portion covered by more than two actual intervals.
    ActualOverload { portion: usize, count: u32 },
    /// A portion covered by more than one virtual interval.
    VirtualOverload { portion: usize, count: u32 },
    /// Two intersecting actuals whose intersection is not stored virtually.
    MissingWitness { a: String, b: String },
    /// A virtual interval meeting an actual without being strictly inside
    /// it with a shared endpoint.
    UnanchoredVirtual { actual: String, virt: String },
    /// A processed input that no longer contains any stored interval.
    MissingTrace { arrival: u64 },
    /// A virtual endpoint key that never appeared on any input interval.
    ForeignEndpoint { virt: String },
    /// More virtual intervals than actual ones.
    VirtualSurplus { actuals: usize, virtuals: usize },
    /// A coverage pair outside the feasible set.
    InfeasiblePortion { portion: usize, pair: Portion },
    /// A covered component whose portion substring is off-pattern.
    ComponentShape { start: usize },
    /// An uncovered stretch whose portion substring is off-pattern.
    GapShape { start: usize },
    /// An empty portion with no fully-single-actual portion next to it.
    BareEmptyPortion { portion: usize },
    /// An accepted arrival missing from the actual set after its round.
    AcceptedNotStored { arrival: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NestedActuals { outer, inner } => {
                write!(f, "actual {inner} nested inside actual {outer}")
            }
            Violation::ActualOverload { portion, count } => {
                write!(f, "portion {portion} covered by {count} actual intervals")
            }
            Violation::VirtualOverload { portion, count } => {
                write!(f, "portion {portion} covered by {count} virtual intervals")
            }
            Violation::MissingWitness { a, b } => {
                write!(f, "actuals {a} and {b} intersect without a stored witness")
            }
            Violation::UnanchoredVirtual { actual, virt } => {
                write!(f, "virtual {virt} meets actual {actual} without anchoring")
            }
            Violation::MissingTrace { arrival } => {
                write!(f, "input {arrival} left no trace in the state")
            }
            Violation::ForeignEndpoint { virt } => {
                write!(f, "virtual {virt} uses an endpoint never seen on input")
            }
            Violation::VirtualSurplus { actuals, virtuals } => {
                write!(f, "{virtuals} virtuals exceed {actuals} actuals")
            }
            Violation::InfeasiblePortion { portion, pair } => {
                write!(f, "portion {portion} has infeasible coverage ({},{})", pair.0, pair.1)
            }
            Violation::ComponentShape { start } => {
                write!(f, "component substring at portion {start} is off-pattern")
            }
            Violation::GapShape { start } => {
                write!(f, "gap substring at portion {start} is off-pattern")
            }
            Violation::BareEmptyPortion { portion } => {
                write!(f, "empty portion {portion} lacks an adjacent single-actual portion")
            }
            Violation::AcceptedNotStored { arrival } => {
                write!(f, "accepted arrival {arrival} missing from the actual set")
            }
        }
    }
}

/// Retains the processed prefix so the structural invariants that quantify
/// over all seen inputs can be checked after every arrival. The algorithm
/// itself never holds this history; the harness does.
#[derive(Clone, Debug, Default)]
pub struct StreamAuditor {
    seen: Vec<Interval>,
    seen_keys: HashSet<EndpointKey>,
}

impl StreamAuditor {
    pub fn new() -> Self {
        StreamAuditor::default()
    }

    pub fn record(&mut self, interval: &Interval) {
        self.seen_keys.insert(interval.lo.clone());
        self.seen_keys.insert(interval.hi.clone());
        self.seen.push(interval.clone());
    }

    pub fn seen(&self) -> &[Interval] {
        &self.seen
    }

    /// Runs every structural check against the current state. An empty
    /// report means all of them hold.
    pub fn check(&self, state: &GeneralState) -> Vec<Violation> {
        let mut report = Vec::new();
        let actuals: Vec<&Interval> = state.actuals.values().collect();
        let virtuals: Vec<&Interval> = state.virtuals.values().collect();

        if virtuals.len() > actuals.len() {
            report.push(Violation::VirtualSurplus {
                actuals: actuals.len(),
                virtuals: virtuals.len(),
            });
        }

        // Containment and missing-witness checks over actual pairs. Only
        // pairs whose spans meet can violate either, so scan a window.
        for i in 0..actuals.len() {
            for j in (i + 1)..actuals.len() {
                if actuals[j].lo > actuals[i].hi {
                    break;
                }
                let a = actuals[i];
                let b = actuals[j];
                if containment(a, b) != Containment::None
                    || containment(b, a) != Containment::None
                {
                    report.push(Violation::NestedActuals {
                        outer: a.to_string(),
                        inner: b.to_string(),
                    });
                    continue;
                }
                // Intersecting without containment: the overlap must be
                // stored as a virtual interval.
                let lo = if a.lo >= b.lo { &a.lo } else { &b.lo };
                let hi = if a.hi <= b.hi { &a.hi } else { &b.hi };
                let stored = state
                    .virtuals
                    .get(lo)
                    .map_or(false, |v| v.hi == *hi);
                if !stored {
                    report.push(Violation::MissingWitness {
                        a: a.to_string(),
                        b: b.to_string(),
                    });
                }
            }
        }

        // Every virtual touching an actual must sit strictly inside it with
        // a shared endpoint key.
        for virt in &virtuals {
            let first_past = actuals.partition_point(|a| a.lo <= virt.hi);
            for k in (0..first_past).rev() {
                let actual = actuals[k];
                if actual.hi < virt.lo {
                    break;
                }
                let anchored = (actual.lo == virt.lo && virt.hi < actual.hi)
                    || (actual.lo < virt.lo && virt.hi == actual.hi);
                if !anchored {
                    report.push(Violation::UnanchoredVirtual {
                        actual: actual.to_string(),
                        virt: virt.to_string(),
                    });
                }
            }
        }

        // Virtual endpoints must come from inputs already seen.
        for virt in &virtuals {
            if !self.seen_keys.contains(&virt.lo) || !self.seen_keys.contains(&virt.hi) {
                report.push(Violation::ForeignEndpoint {
                    virt: virt.to_string(),
                });
            }
        }

        self.check_traces(state, &mut report);
        check_portions(&state.portion_string(), &mut report);
        report
    }

    /// Every processed input must still weakly contain a stored interval.
    fn check_traces(&self, state: &GeneralState, report: &mut Vec<Violation>) {
        let mut members: Vec<&Interval> = state
            .actuals
            .values()
            .chain(state.virtuals.values())
            .collect();
        members.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        // suffix_min_hi[i] = smallest hi among members[i..]
        let mut suffix_min_hi: Vec<&EndpointKey> = Vec::with_capacity(members.len());
        for member in members.iter().rev() {
            let candidate = &member.hi;
            let best = match suffix_min_hi.last() {
                Some(prev) if *prev < candidate => prev,
                _ => candidate,
            };
            suffix_min_hi.push(best);
        }
        suffix_min_hi.reverse();
        for input in &self.seen {
            let start = members.partition_point(|m| m.lo < input.lo);
            let traced = start < members.len() && *suffix_min_hi[start] <= input.hi;
            if !traced {
                report.push(Violation::MissingTrace { arrival: input.id });
            }
        }
    }
}

/// One-shot invariant check over an explicit seen prefix.
pub fn check_invariants(state: &GeneralState, seen: &[Interval]) -> Vec<Violation> {
    let mut auditor = StreamAuditor::new();
    for interval in seen {
        auditor.record(interval);
    }
    auditor.check(state)
}

const FEASIBLE: [Portion; 5] = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)];

fn check_portions(portions: &PortionString, report: &mut Vec<Violation>) {
    let entries = &portions.0;
    for (idx, pair) in entries.iter().enumerate() {
        if !FEASIBLE.contains(pair) {
            report.push(Violation::InfeasiblePortion {
                portion: idx,
                pair: *pair,
            });
            if pair.0 > 2 {
                report.push(Violation::ActualOverload {
                    portion: idx,
                    count: pair.0,
                });
            }
            if pair.1 > 1 {
                report.push(Violation::VirtualOverload {
                    portion: idx,
                    count: pair.1,
                });
            }
        }
    }

    // Runs of covered portions must look like (1,1)? (1,0) ((2,1)(1,0))* (1,1)?
    // and uncovered runs like (0,0) ((0,1)(0,0))*.
    let mut idx = 0;
    while idx < entries.len() {
        let covered = entries[idx].0 > 0;
        let start = idx;
        while idx < entries.len() && (entries[idx].0 > 0) == covered {
            idx += 1;
        }
        let run = &entries[start..idx];
        if covered {
            if !component_run_ok(run) {
                report.push(Violation::ComponentShape { start });
            }
        } else if !gap_run_ok(run) {
            report.push(Violation::GapShape { start });
        }
    }

    // Each empty portion must touch a bare single-actual portion,
    // except in the empty state.
    if entries.len() > 1 {
        for (idx, pair) in entries.iter().enumerate() {
            if *pair != (0, 0) {
                continue;
            }
            let before = idx.checked_sub(1).map(|i| entries[i]);
            let after = entries.get(idx + 1).copied();
            if before != Some((1, 0)) && after != Some((1, 0)) {
                report.push(Violation::BareEmptyPortion { portion: idx });
            }
        }
    }
}

fn component_run_ok(run: &[Portion]) -> bool {
    let mut i = 0;
    if run.get(i) == Some(&(1, 1)) {
        i += 1;
    }
    if run.get(i) != Some(&(1, 0)) {
        return false;
    }
    i += 1;
    while run.get(i) == Some(&(2, 1)) {
        if run.get(i + 1) != Some(&(1, 0)) {
            return false;
        }
        i += 2;
    }
    if run.get(i) == Some(&(1, 1)) {
        i += 1;
    }
    i == run.len()
}

fn gap_run_ok(run: &[Portion]) -> bool {
    if run.len() % 2 == 0 {
        return false;
    }
    run.iter()
        .enumerate()
        .all(|(i, pair)| *pair == if i % 2 == 0 { (0, 0) } else { (0, 1) })
}
