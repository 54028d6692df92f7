//! Zone-based selection for proper interval streams.
//!
//! For streams with no proper containments a sharper one-pass algorithm
//! applies: partition the covered part of the line into *zones* and remember
//! for each zone only the interval with the leftmost start among those
//! starting there and the one with the rightmost end among those ending
//! there. The reported solution is the offline optimum over all recorded
//! intervals. Zones are created fixed except at the growing ends of a
//! component, where a single flexible zone may later be merged away.
//!
//! Zone boundaries are sided positions ([`Pos`]), so the zones literally
//! partition the covered point set for any mix of open and closed inputs;
//! on half-open streams this reduces to half-open zones.

use std::fmt;

use thiserror::Error;

use crate::interval::{Interval, IntervalSet, Pos};
use crate::oracle::offline_optimum;

/// The stream fed to the zone algorithm was not proper: an arrival properly
/// contains or is properly contained in an earlier interval. Detection is
/// lazy, so misuse may surface on a later arrival than the offending one.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("proper-interval violation at arrival {arrival}: {reason}")]
pub struct ProperViolation {
    pub arrival: u64,
    pub reason: String,
}

/// Which structural rule handled an arrival.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrivalCase {
    /// Both endpoints in uncovered territory: seed a new fixed zone.
    NewComponent,
    /// Both endpoints inside one existing component: records only.
    WithinComponent,
    /// Endpoints in two different components: a new fixed zone bridges them.
    Bridge,
    /// One endpoint inside a component, one beyond it: a new flexible zone
    /// extends the component.
    Extend,
}

/// One zone: a segment of the covered line plus its two recorded intervals.
#[derive(Clone, Debug)]
pub struct Zone {
    pub lo: Pos,
    pub hi: Pos,
    pub fixed: bool,
    /// Input with the leftmost left endpoint among those starting here.
    pub leftmost: Option<Interval>,
    /// Input with the rightmost right endpoint among those ending here.
    pub rightmost: Option<Interval>,
}

impl Zone {
    pub fn new(lo: Pos, hi: Pos, fixed: bool) -> Self {
        assert!(lo <= hi, "zone bounds out of order");
        Zone {
            lo,
            hi,
            fixed,
            leftmost: None,
            rightmost: None,
        }
    }
}

/// The ordered zone collection. Single-owner state machine; read access is
/// fine between arrivals.
#[derive(Clone, Debug, Default)]
pub struct ZoneTable {
    zones: Vec<Zone>,
    arrivals: u64,
    peak_zones: usize,
}

impl ZoneTable {
    pub fn new() -> Self {
        ZoneTable::default()
    }

    /// Builds a table from explicit zones without validity checking; for
    /// diagnostics and tests.
    pub fn from_zones(zones: Vec<Zone>) -> Self {
        let peak_zones = zones.len();
        ZoneTable {
            zones,
            arrivals: 0,
            peak_zones,
        }
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn zone_count(&self) -> usize {
        self.zones.len()
    }

    pub fn peak_zones(&self) -> usize {
        self.peak_zones
    }

    pub fn arrivals(&self) -> u64 {
        self.arrivals
    }

    /// Maximal runs of abutting zones, as index ranges.
    pub fn components(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 0..self.zones.len() {
            if i + 1 == self.zones.len() || !abutting(&self.zones[i], &self.zones[i + 1]) {
                out.push((start, i));
                start = i + 1;
            }
        }
        out
    }

    /// All recorded intervals, duplicates collapsed.
    pub fn stored_set(&self) -> IntervalSet {
        self.zones
            .iter()
            .flat_map(|z| z.leftmost.iter().chain(z.rightmost.iter()))
            .cloned()
            .collect()
    }

    /// The reported solution: offline optimum of the recorded intervals.
    pub fn finalize(&self) -> IntervalSet {
        offline_optimum(&self.stored_set())
    }

    /// Handles one arrival, returning which case applied.
    pub fn process(&mut self, interval: &Interval) -> Result<ArrivalCase, ProperViolation> {
        let result = self.classify_and_apply(interval);
        if result.is_ok() {
            self.arrivals += 1;
            self.peak_zones = self.peak_zones.max(self.zones.len());
        }
        result
    }

    fn classify_and_apply(&mut self, interval: &Interval) -> Result<ArrivalCase, ProperViolation> {
        let s = interval.raw_start();
        let e = interval.raw_end();
        let start_zone = self.zone_containing(&s);
        let end_zone = self.zone_containing(&e);
        match (start_zone, end_zone) {
            (None, None) => self.seed_component(interval, s, e),
            (Some(zi), Some(zj)) => {
                let (c1s, c1e) = self.component_range(zi);
                let (c2s, _c2e) = self.component_range(zj);
                if c1s == c2s {
                    self.within_component(interval, s, e, zi, zj)
                } else {
                    self.bridge(interval, zi, zj, (c1s, c1e), (c2s, _c2e))
                }
            }
            (Some(zi), None) => self.extend_right(interval, e, zi),
            (None, Some(zj)) => self.extend_left(interval, s, zj),
        }
    }

    fn violation(&self, interval: &Interval, reason: &str) -> ProperViolation {
        ProperViolation {
            arrival: interval.id,
            reason: format!("{reason} ({interval})"),
        }
    }

    fn seed_component(
        &mut self,
        interval: &Interval,
        s: Pos,
        e: Pos,
    ) -> Result<ArrivalCase, ProperViolation> {
        let gap_s = self.gap_index(&s);
        let gap_e = self.gap_index(&e);
        if gap_s != gap_e {
            return Err(self.violation(interval, "arrival spans an entire existing component"));
        }
        let mut zone = Zone::new(s, e, true);
        zone.leftmost = Some(interval.clone());
        zone.rightmost = Some(interval.clone());
        self.zones.insert(gap_s, zone);
        Ok(ArrivalCase::NewComponent)
    }

    fn within_component(
        &mut self,
        interval: &Interval,
        s: Pos,
        e: Pos,
        zi: usize,
        zj: usize,
    ) -> Result<ArrivalCase, ProperViolation> {
        if zi == zj {
            // Legal only as an exact duplicate of the interval that seeded
            // the zone; anything else is properly inside a seen interval.
            let zone = &self.zones[zi];
            let duplicate = s == zone.lo
                && e == zone.hi
                && zone.leftmost.as_ref().map_or(false, |l| {
                    l.raw_start() == zone.lo && l.raw_end() == zone.hi
                });
            if !duplicate {
                return Err(self.violation(interval, "arrival confined to a single zone"));
            }
            return Ok(ArrivalCase::WithinComponent);
        }
        // An arrival may legally contain two abutting zones outright when
        // its endpoints land exactly on zone boundaries; three would imply
        // a proper containment among the inputs.
        if self.zones_properly_inside(&s, &e) > 2 {
            return Err(self.violation(interval, "arrival properly contains three zones"));
        }
        update_leftmost(&mut self.zones[zi], interval);
        update_rightmost(&mut self.zones[zj], interval);
        Ok(ArrivalCase::WithinComponent)
    }

    fn bridge(
        &mut self,
        interval: &Interval,
        zi: usize,
        zj: usize,
        (_, c1e): (usize, usize),
        (c2s, _): (usize, usize),
    ) -> Result<ArrivalCase, ProperViolation> {
        if c2s != c1e + 1 {
            return Err(self.violation(interval, "arrival spans a component between its endpoints"));
        }
        let absorb_left = match c1e - zi {
            0 => None,
            1 if !self.zones[c1e].fixed => Some(c1e),
            _ => {
                return Err(self.violation(
                    interval,
                    "arrival overruns fixed zones at the end of the left component",
                ))
            }
        };
        let absorb_right = match zj - c2s {
            0 => None,
            1 if !self.zones[c2s].fixed => Some(c2s),
            _ => {
                return Err(self.violation(
                    interval,
                    "arrival overruns fixed zones at the start of the right component",
                ))
            }
        };

        self.zones[zi].fixed = true;
        self.zones[zj].fixed = true;
        update_leftmost(&mut self.zones[zi], interval);
        update_rightmost(&mut self.zones[zj], interval);

        let left_zone = absorb_left.map(|i| self.zones[i].clone());
        let right_zone = absorb_right.map(|i| self.zones[i].clone());
        let lo = match &left_zone {
            Some(z) => z.lo.clone(),
            None => step_past(&self.zones[c1e].hi),
        };
        let hi = match &right_zone {
            Some(z) => z.hi.clone(),
            None => step_before(&self.zones[c2s].lo),
        };
        let mut zone = Zone::new(lo, hi, true);
        // Only the absorbed flexible zones can hold endpoints of the new
        // zone's span; the bridged stretch itself was uncovered.
        zone.leftmost = merge_leftmost(
            left_zone.as_ref().and_then(|z| z.leftmost.clone()),
            right_zone.as_ref().and_then(|z| z.leftmost.clone()),
        );
        zone.rightmost = merge_rightmost(
            left_zone.as_ref().and_then(|z| z.rightmost.clone()),
            right_zone.as_ref().and_then(|z| z.rightmost.clone()),
        );

        if let Some(i) = absorb_right {
            self.zones.remove(i);
        }
        if let Some(i) = absorb_left {
            self.zones.remove(i);
        }
        let at = c1e + 1 - usize::from(absorb_left.is_some());
        self.zones.insert(at, zone);
        Ok(ArrivalCase::Bridge)
    }

    fn extend_right(
        &mut self,
        interval: &Interval,
        e: Pos,
        zi: usize,
    ) -> Result<ArrivalCase, ProperViolation> {
        let (_, ce) = self.component_range(zi);
        if self.gap_index(&e) != ce + 1 {
            return Err(self.violation(interval, "arrival spans a component to its right"));
        }
        let absorb = match ce - zi {
            0 => None,
            1 if !self.zones[ce].fixed => Some(ce),
            _ => {
                return Err(self.violation(
                    interval,
                    "arrival overruns fixed zones at the end of its component",
                ))
            }
        };
        self.zones[zi].fixed = true;
        update_leftmost(&mut self.zones[zi], interval);

        let absorbed = absorb.map(|i| self.zones[i].clone());
        let lo = match &absorbed {
            Some(z) => z.lo.clone(),
            None => step_past(&self.zones[ce].hi),
        };
        let mut zone = Zone::new(lo, e, false);
        zone.leftmost = absorbed.as_ref().and_then(|z| z.leftmost.clone());
        zone.rightmost = Some(interval.clone());

        if let Some(i) = absorb {
            self.zones.remove(i);
        }
        self.zones
            .insert(ce + 1 - usize::from(absorb.is_some()), zone);
        Ok(ArrivalCase::Extend)
    }

    fn extend_left(
        &mut self,
        interval: &Interval,
        s: Pos,
        zj: usize,
    ) -> Result<ArrivalCase, ProperViolation> {
        let (cs, _) = self.component_range(zj);
        if self.gap_index(&s) != cs {
            return Err(self.violation(interval, "arrival spans a component to its left"));
        }
        let absorb = match zj - cs {
            0 => None,
            1 if !self.zones[cs].fixed => Some(cs),
            _ => {
                return Err(self.violation(
                    interval,
                    "arrival overruns fixed zones at the start of its component",
                ))
            }
        };
        self.zones[zj].fixed = true;
        update_rightmost(&mut self.zones[zj], interval);

        let absorbed = absorb.map(|i| self.zones[i].clone());
        let hi = match &absorbed {
            Some(z) => z.hi.clone(),
            None => step_before(&self.zones[cs].lo),
        };
        let mut zone = Zone::new(s, hi, false);
        zone.leftmost = Some(interval.clone());
        zone.rightmost = absorbed.as_ref().and_then(|z| z.rightmost.clone());

        if let Some(i) = absorb {
            self.zones.remove(i);
        }
        self.zones.insert(cs, zone);
        Ok(ArrivalCase::Extend)
    }

    fn zone_containing(&self, pos: &Pos) -> Option<usize> {
        let idx = self.zones.partition_point(|z| z.lo <= *pos);
        let candidate = idx.checked_sub(1)?;
        (*pos <= self.zones[candidate].hi).then_some(candidate)
    }

    /// Index of the out-region holding `pos`: equals the index of the first
    /// zone to its right. Only meaningful for uncovered positions.
    fn gap_index(&self, pos: &Pos) -> usize {
        self.zones.partition_point(|z| z.lo <= *pos)
    }

    fn component_range(&self, idx: usize) -> (usize, usize) {
        let mut start = idx;
        while start > 0 && abutting(&self.zones[start - 1], &self.zones[start]) {
            start -= 1;
        }
        let mut end = idx;
        while end + 1 < self.zones.len() && abutting(&self.zones[end], &self.zones[end + 1]) {
            end += 1;
        }
        (start, end)
    }

    /// Number of zones properly inside `[s, e]`.
    fn zones_properly_inside(&self, s: &Pos, e: &Pos) -> usize {
        let a = self.zones.partition_point(|z| z.lo < *s);
        let b = self.zones.partition_point(|z| z.hi <= *e);
        if b <= a {
            return 0;
        }
        let mut count = b - a;
        for zone in &self.zones[a..b] {
            if zone.lo == *s && zone.hi == *e {
                count -= 1;
            }
        }
        count
    }
}

fn abutting(a: &Zone, b: &Zone) -> bool {
    a.hi.step_up().as_ref() == Some(&b.lo)
}

fn step_past(pos: &Pos) -> Pos {
    pos.step_up().expect("zone end has a successor position")
}

fn step_before(pos: &Pos) -> Pos {
    pos.step_down().expect("zone start has a predecessor position")
}

fn update_leftmost(zone: &mut Zone, interval: &Interval) {
    let better = zone
        .leftmost
        .as_ref()
        .map_or(true, |cur| interval.raw_start() < cur.raw_start());
    if better {
        zone.leftmost = Some(interval.clone());
    }
}

fn update_rightmost(zone: &mut Zone, interval: &Interval) {
    let better = zone
        .rightmost
        .as_ref()
        .map_or(true, |cur| interval.raw_end() > cur.raw_end());
    if better {
        zone.rightmost = Some(interval.clone());
    }
}

fn merge_leftmost(a: Option<Interval>, b: Option<Interval>) -> Option<Interval> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.raw_start() <= y.raw_start() { x } else { y }),
        (x, y) => x.or(y),
    }
}

fn merge_rightmost(a: Option<Interval>, b: Option<Interval>) -> Option<Interval> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.raw_end() >= y.raw_end() { x } else { y }),
        (x, y) => x.or(y),
    }
}

/// A broken zone-structure property, reported as data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZoneViolation {
    /// A zone not contained in any seen input interval.
    UncoveredZone { index: usize },
    /// An input properly containing more zones than its arrival case allows.
    OvercountedInterval { arrival: u64, zones: usize },
    /// The zones do not partition the covered part of the line.
    PartitionMismatch,
    /// More zones than five times the optimum plus four.
    ZoneBudget { zones: usize, optimum: usize },
    /// Consecutive zones overlap or are out of order.
    DisorderedZones { index: usize },
}

impl fmt::Display for ZoneViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZoneViolation::UncoveredZone { index } => {
                write!(f, "zone {index} is not contained in any input interval")
            }
            ZoneViolation::OvercountedInterval { arrival, zones } => {
                write!(f, "input {arrival} properly contains {zones} zones")
            }
            ZoneViolation::PartitionMismatch => {
                write!(f, "zones do not partition the covered line")
            }
            ZoneViolation::ZoneBudget { zones, optimum } => {
                write!(f, "{zones} zones exceed the 5*{optimum}+4 budget")
            }
            ZoneViolation::DisorderedZones { index } => {
                write!(f, "zones {index} and {} are out of order", index + 1)
            }
        }
    }
}

/// Checks the zone-structure invariants against the retained prefix.
/// `cases` holds the per-arrival case labels recorded by the harness.
pub fn zone_invariants(
    table: &ZoneTable,
    seen: &[Interval],
    cases: &[ArrivalCase],
) -> Vec<ZoneViolation> {
    assert_eq!(seen.len(), cases.len(), "one case label per arrival");
    let mut report = Vec::new();
    let zones = table.zones();

    for i in 0..zones.len().saturating_sub(1) {
        if zones[i].hi >= zones[i + 1].lo {
            report.push(ZoneViolation::DisorderedZones { index: i });
        }
    }

    // Each zone must lie inside some seen interval. Containment may be
    // weak: a zone seeded by a lone arrival coincides with it exactly.
    let mut by_start: Vec<(Pos, Pos)> = seen
        .iter()
        .map(|iv| (iv.raw_start(), iv.raw_end()))
        .collect();
    by_start.sort();
    let mut prefix_max_end: Vec<Pos> = Vec::with_capacity(by_start.len());
    for (_, end) in &by_start {
        let best = match prefix_max_end.last() {
            Some(prev) if prev > end => prev.clone(),
            _ => end.clone(),
        };
        prefix_max_end.push(best);
    }
    for (index, zone) in zones.iter().enumerate() {
        let candidates = by_start.partition_point(|(start, _)| *start <= zone.lo);
        let covered = candidates > 0 && prefix_max_end[candidates - 1] >= zone.hi;
        if !covered {
            report.push(ZoneViolation::UncoveredZone { index });
        }
    }

    // Each input properly contains at most two zones (endpoints landing on
    // zone boundaries make two legal); a bridge arrival's own bridge zone
    // can make it three.
    for (interval, case) in seen.iter().zip(cases) {
        let contained = table.zones_properly_inside(&interval.raw_start(), &interval.raw_end());
        let limit = if *case == ArrivalCase::Bridge { 3 } else { 2 };
        if contained > limit {
            report.push(ZoneViolation::OvercountedInterval {
                arrival: interval.id,
                zones: contained,
            });
        }
    }

    // Zones must partition the support of everything seen.
    let support = merge_ranges(by_start.iter().cloned());
    let zone_union = merge_ranges(zones.iter().map(|z| (z.lo.clone(), z.hi.clone())));
    if support != zone_union {
        report.push(ZoneViolation::PartitionMismatch);
    }

    let optimum = offline_optimum(&seen.iter().cloned().collect()).len();
    if zones.len() > 5 * optimum + 4 {
        report.push(ZoneViolation::ZoneBudget {
            zones: zones.len(),
            optimum,
        });
    }

    report
}

/// Merges sorted position ranges into maximal abutting-or-overlapping runs.
fn merge_ranges(ranges: impl Iterator<Item = (Pos, Pos)>) -> Vec<(Pos, Pos)> {
    let mut sorted: Vec<(Pos, Pos)> = ranges.collect();
    sorted.sort();
    let mut out: Vec<(Pos, Pos)> = Vec::new();
    for (start, end) in sorted {
        match out.last_mut() {
            Some((_, last_end)) if last_end.abuts_or_overlaps(&start) => {
                if end > *last_end {
                    *last_end = end;
                }
            }
            _ => out.push((start, end)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::is_proper;
    use crate::oracle::offline_optimum;
    use crate::rational::{rat, rat_int};

    fn half_open(id: u64, a: (i64, i64), b: (i64, i64)) -> Interval {
        Interval::half_open(id, rat(a.0, a.1), rat(b.0, b.1))
    }

    fn run(stream: &[Interval]) -> (ZoneTable, Vec<ArrivalCase>) {
        let mut table = ZoneTable::new();
        let mut cases = Vec::new();
        for interval in stream {
            cases.push(table.process(interval).expect("proper stream"));
        }
        (table, cases)
    }

    #[test]
    fn first_arrival_seeds_a_fixed_zone() {
        let interval = half_open(0, (0, 1), (1, 1));
        let (table, cases) = run(std::array::from_ref(&interval));
        assert_eq!(cases, vec![ArrivalCase::NewComponent]);
        let zone = &table.zones()[0];
        assert!(zone.fixed);
        assert_eq!(zone.lo, interval.raw_start());
        assert_eq!(zone.hi, interval.raw_end());
        assert_eq!(zone.leftmost.as_ref().unwrap().id, 0);
        assert_eq!(zone.rightmost.as_ref().unwrap().id, 0);
    }

    #[test]
    fn overlap_past_the_component_adds_a_flexible_zone() {
        let stream = vec![half_open(0, (0, 1), (1, 1)), half_open(1, (1, 2), (3, 2))];
        let (table, cases) = run(&stream);
        assert_eq!(cases[1], ArrivalCase::Extend);
        assert_eq!(table.zone_count(), 2);
        let seeded = &table.zones()[0];
        let extension = &table.zones()[1];
        assert!(seeded.fixed);
        assert!(!extension.fixed);
        assert_eq!(extension.lo, Pos::at(rat_int(1)));
        assert_eq!(extension.hi, Pos::before(rat(3, 2)));
        assert!(extension.leftmost.is_none());
        assert_eq!(extension.rightmost.as_ref().unwrap().id, 1);
    }

    #[test]
    fn arrival_inside_one_component_only_refreshes_records() {
        let stream = vec![
            half_open(0, (0, 1), (1, 1)),
            half_open(1, (1, 2), (3, 2)),  // fixes nothing new, zone [1, 3/2)
            half_open(2, (5, 4), (9, 4)),  // fixes [1, 3/2), adds [3/2, 9/4)
            half_open(3, (9, 8), (2, 1)),  // both endpoints inside the component
        ];
        let (table, cases) = run(&stream);
        assert_eq!(cases[3], ArrivalCase::WithinComponent);
        assert_eq!(table.zone_count(), 3);
        // Left endpoint 9/8 beats the recorded 5/4 in the middle zone;
        // right endpoint 2 does not beat the recorded 9/4 in the last one.
        assert_eq!(table.zones()[1].leftmost.as_ref().unwrap().id, 3);
        assert_eq!(table.zones()[2].rightmost.as_ref().unwrap().id, 2);
    }

    #[test]
    fn bridge_merges_flexible_ends() {
        let stream = vec![
            half_open(0, (0, 1), (1, 1)),
            half_open(1, (1, 2), (3, 2)),   // flexible zone [1, 3/2)
            half_open(2, (4, 1), (5, 1)),
            half_open(3, (7, 2), (9, 2)),   // flexible zone [7/2, 4)
            half_open(4, (3, 4), (17, 4)),  // bridges both components
        ];
        let (table, cases) = run(&stream);
        assert_eq!(cases[3], ArrivalCase::Extend);
        assert_eq!(cases[4], ArrivalCase::Bridge);
        assert_eq!(table.components().len(), 1);
        assert_eq!(table.zone_count(), 3);
        let bridge = &table.zones()[1];
        assert!(bridge.fixed);
        assert_eq!(bridge.lo, Pos::at(rat_int(1)));
        assert_eq!(bridge.hi, Pos::before(rat_int(4)));
        // The absorbed flexible zones donate their records.
        assert_eq!(bridge.rightmost.as_ref().unwrap().id, 1);
        assert_eq!(bridge.leftmost.as_ref().unwrap().id, 3);
    }

    #[test]
    fn duplicates_are_absorbed_silently() {
        let first = half_open(0, (0, 1), (1, 1));
        let mut dup = first.clone();
        dup.id = 1;
        dup.lo.arrival = 1;
        dup.hi.arrival = 1;
        let mut table = ZoneTable::new();
        table.process(&first).unwrap();
        assert_eq!(table.process(&dup), Ok(ArrivalCase::WithinComponent));
        assert_eq!(table.zone_count(), 1);
    }

    #[test]
    fn properly_nested_arrival_is_rejected() {
        let mut table = ZoneTable::new();
        table.process(&half_open(0, (0, 1), (10, 1))).unwrap();
        let err = table.process(&half_open(1, (2, 1), (3, 1))).unwrap_err();
        assert_eq!(err.arrival, 1);
    }

    #[test]
    fn arrival_swallowing_a_component_is_rejected() {
        let mut table = ZoneTable::new();
        table.process(&half_open(0, (4, 1), (5, 1))).unwrap();
        let err = table.process(&half_open(1, (0, 1), (9, 1))).unwrap_err();
        assert!(err.reason.contains("spans"));
    }

    #[test]
    fn finalize_on_seeded_zones() {
        let singleton = half_open(0, (0, 1), (1, 1));
        let (table, _) = run(std::array::from_ref(&singleton));
        let selected = table.finalize();
        assert_eq!(selected.len(), 1);

        let spread: Vec<Interval> = (0..5)
            .map(|i| half_open(i, (10 * i as i64, 1), (10 * i as i64 + 1, 1)))
            .collect();
        let (table, _) = run(&spread);
        assert_eq!(table.finalize().len(), 5);
    }

    #[test]
    fn unit_stream_keeps_two_thirds_of_optimum() {
        // 50 deterministic unit intervals with messy overlap structure.
        let stream: Vec<Interval> = (0..50)
            .map(|i| {
                let start = rat((i as i64 * 37) % 120, 7);
                Interval::half_open(i, start.clone(), start + rat_int(1))
            })
            .collect();
        let set: IntervalSet = stream.iter().cloned().collect();
        assert!(is_proper(&set));
        let (table, cases) = run(&stream);
        let opt = offline_optimum(&set).len();
        let out = table.finalize().len();
        assert!(3 * out >= 2 * opt, "3*{out} < 2*{opt}");
        let report = zone_invariants(&table, &stream, &cases);
        assert!(report.is_empty(), "unexpected violations: {report:?}");
    }

    #[test]
    fn uncovered_zone_is_flagged() {
        let seen = vec![half_open(0, (0, 1), (1, 1))];
        let table = ZoneTable::from_zones(vec![
            Zone::new(Pos::at(rat_int(0)), Pos::before(rat_int(1)), true),
            Zone::new(Pos::at(rat_int(5)), Pos::before(rat_int(6)), true),
        ]);
        let report = zone_invariants(&table, &seen, &[ArrivalCase::NewComponent]);
        assert!(report
            .iter()
            .any(|v| matches!(v, ZoneViolation::UncoveredZone { index: 1 })));
        assert!(report.contains(&ZoneViolation::PartitionMismatch));
    }

    #[test]
    fn zone_budget_violation_is_flagged() {
        // One seen interval (optimum 1) but ten zones.
        let seen = vec![half_open(0, (0, 1), (100, 1))];
        let zones: Vec<Zone> = (0..10)
            .map(|i| {
                Zone::new(
                    Pos::at(rat_int(10 * i)),
                    Pos::before(rat_int(10 * i + 5)),
                    true,
                )
            })
            .collect();
        let table = ZoneTable::from_zones(zones);
        let report = zone_invariants(&table, &seen, &[ArrivalCase::NewComponent]);
        assert!(report
            .iter()
            .any(|v| matches!(v, ZoneViolation::ZoneBudget { zones: 10, optimum: 1 })));
    }
}
