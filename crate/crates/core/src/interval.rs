//! Intervals, containment predicates, loads, and ordered interval sets.

use std::cmp::Ordering;
use std::fmt;

use crate::key::{EndpointKey, Openness, Side};
use crate::rational::Rational;

/// Whether an interval came from the stream or was derived as an
/// intersection of stream intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Input,
    Virtual,
}

/// An interval is a pair of endpoint keys plus a stream identity.
///
/// `lo` is always a left-side key, `hi` a right-side key, and `lo` strictly
/// precedes `hi` in the endpoint order. Virtual intervals carry keys
/// inherited from the input intervals they were cut from, never freshly
/// built coordinates, so tie-breaking stays consistent across derivations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: EndpointKey,
    pub hi: EndpointKey,
    pub id: u64,
    pub kind: Kind,
}

impl Interval {
    pub fn new(lo: EndpointKey, hi: EndpointKey, id: u64, kind: Kind) -> Self {
        assert_eq!(lo.side, Side::Left, "lo must be a left endpoint");
        assert_eq!(hi.side, Side::Right, "hi must be a right endpoint");
        assert!(lo < hi, "interval endpoints out of order");
        Interval { lo, hi, id, kind }
    }

    /// Input interval with explicit openness on both ends; the arrival index
    /// of both keys is the stream id.
    pub fn with_openness(
        id: u64,
        left: Rational,
        left_openness: Openness,
        right: Rational,
        right_openness: Openness,
    ) -> Self {
        Interval::new(
            EndpointKey::new(left, left_openness, Side::Left, id),
            EndpointKey::new(right, right_openness, Side::Right, id),
            id,
            Kind::Input,
        )
    }

    /// Closed input interval `[left, right]`.
    pub fn closed(id: u64, left: Rational, right: Rational) -> Self {
        Interval::with_openness(id, left, Openness::Closed, right, Openness::Closed)
    }

    /// Half-open input interval `[left, right)`.
    pub fn half_open(id: u64, left: Rational, right: Rational) -> Self {
        Interval::with_openness(id, left, Openness::Closed, right, Openness::Open)
    }

    /// Virtual interval over existing keys.
    pub fn virtual_over(lo: EndpointKey, hi: EndpointKey, id: u64) -> Self {
        Interval::new(lo, hi, id, Kind::Virtual)
    }

    /// Set identity of the interval: its key pair.
    pub fn key(&self) -> (&EndpointKey, &EndpointKey) {
        (&self.lo, &self.hi)
    }

    /// Whether the point `p` lies in the closed span `[lo, hi]` of key order.
    pub fn covers(&self, p: &EndpointKey) -> bool {
        self.lo <= *p && *p <= self.hi
    }

    /// First position on the real line the interval occupies.
    pub fn raw_start(&self) -> Pos {
        match self.lo.openness {
            Openness::Closed => Pos::at(self.lo.coord.clone()),
            Openness::Open => Pos::after(self.lo.coord.clone()),
        }
    }

    /// Last position on the real line the interval occupies.
    pub fn raw_end(&self) -> Pos {
        match self.hi.openness {
            Openness::Closed => Pos::at(self.hi.coord.clone()),
            Openness::Open => Pos::before(self.hi.coord.clone()),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lb = match self.lo.openness {
            Openness::Closed => '[',
            Openness::Open => '(',
        };
        let rb = match self.hi.openness {
            Openness::Closed => ']',
            Openness::Open => ')',
        };
        write!(
            f,
            "{}{}/{} {}/{}{}",
            lb,
            self.lo.coord.numer(),
            self.lo.coord.denom(),
            self.hi.coord.numer(),
            self.hi.coord.denom(),
            rb
        )
    }
}

/// Result of testing whether one interval contains another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Containment {
    None,
    /// Containment with at least one shared endpoint key.
    Weak,
    /// Strict containment on both sides.
    Proper,
}

/// Do the closed key-order spans of `a` and `b` overlap?
///
/// Because the endpoint order perturbs coinciding coordinates, this agrees
/// with raw open/closed intersection of the underlying point sets.
pub fn intersects(a: &Interval, b: &Interval) -> bool {
    a.lo <= b.hi && b.lo <= a.hi
}

/// How `outer` contains `inner`: `Proper` when strict on both sides, `Weak`
/// when containment holds with a shared endpoint key, `None` otherwise.
pub fn containment(outer: &Interval, inner: &Interval) -> Containment {
    let lo_ok = outer.lo <= inner.lo;
    let hi_ok = inner.hi <= outer.hi;
    if !(lo_ok && hi_ok) {
        return Containment::None;
    }
    if outer.lo < inner.lo && inner.hi < outer.hi {
        Containment::Proper
    } else {
        Containment::Weak
    }
}

/// A set of intervals ordered by `(lo, hi)`, deduplicated on the key pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    items: Vec<Interval>,
}

impl IntervalSet {
    pub fn new() -> Self {
        IntervalSet { items: Vec::new() }
    }

    /// Inserts unless an interval with the same key pair is already present.
    /// Returns whether the interval was added.
    pub fn insert(&mut self, interval: Interval) -> bool {
        match self
            .items
            .binary_search_by(|probe| cmp_key_pair(probe, &interval))
        {
            Ok(_) => false,
            Err(pos) => {
                self.items.insert(pos, interval);
                true
            }
        }
    }

    pub fn contains_keys(&self, lo: &EndpointKey, hi: &EndpointKey) -> bool {
        self.items
            .binary_search_by(|probe| {
                probe
                    .lo
                    .cmp(lo)
                    .then_with(|| probe.hi.cmp(hi))
            })
            .is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn cmp_key_pair(a: &Interval, b: &Interval) -> Ordering {
    a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi))
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        let mut set = IntervalSet::new();
        for interval in iter {
            set.insert(interval);
        }
        set
    }
}

impl<'a> IntoIterator for &'a IntervalSet {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Maximum number of set members covering any single point, computed by a
/// sweep over key-ordered endpoint events.
pub fn load(set: &IntervalSet) -> usize {
    let mut events: Vec<(&EndpointKey, i32)> = Vec::with_capacity(set.len() * 2);
    for interval in set {
        events.push((&interval.lo, 1));
        events.push((&interval.hi, -1));
    }
    // Starts before ends at the same key, so a point shared by an opening
    // and a closing interval counts both.
    events.sort_by(|a, b| a.0.cmp(b.0).then_with(|| b.1.cmp(&a.1)));
    let mut current: i32 = 0;
    let mut max: i32 = 0;
    for (_, delta) in events {
        current += delta;
        max = max.max(current);
    }
    max as usize
}

/// True when no member properly contains another.
pub fn is_proper(set: &IntervalSet) -> bool {
    // Items are sorted by (lo, hi); a proper containment needs a strictly
    // smaller lo with a strictly larger hi, so it suffices to track the
    // maximum hi over strictly earlier lo groups.
    let items = set.as_slice();
    let mut best_prev_hi: Option<&EndpointKey> = None;
    let mut group_start = 0;
    while group_start < items.len() {
        let mut group_end = group_start + 1;
        while group_end < items.len() && items[group_end].lo == items[group_start].lo {
            group_end += 1;
        }
        for item in &items[group_start..group_end] {
            if let Some(prev_hi) = best_prev_hi {
                if item.hi < *prev_hi {
                    return false;
                }
            }
        }
        for item in &items[group_start..group_end] {
            if best_prev_hi.map_or(true, |h| item.hi > *h) {
                best_prev_hi = Some(&item.hi);
            }
        }
        group_start = group_end;
    }
    true
}

/// A real-line position nudged infinitesimally left or right of a
/// coordinate. Models open/closed endpoint geometry exactly: an interval
/// occupies the closed `Pos` range `[raw_start, raw_end]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub coord: Rational,
    nudge: i8,
}

impl Pos {
    pub fn before(coord: Rational) -> Self {
        Pos { coord, nudge: -1 }
    }

    pub fn at(coord: Rational) -> Self {
        Pos { coord, nudge: 0 }
    }

    pub fn after(coord: Rational) -> Self {
        Pos { coord, nudge: 1 }
    }

    /// Next representable position at the same coordinate, if any.
    pub fn step_up(&self) -> Option<Pos> {
        if self.nudge < 1 {
            Some(Pos {
                coord: self.coord.clone(),
                nudge: self.nudge + 1,
            })
        } else {
            None
        }
    }

    /// Previous representable position at the same coordinate, if any.
    pub fn step_down(&self) -> Option<Pos> {
        if self.nudge > -1 {
            Some(Pos {
                coord: self.coord.clone(),
                nudge: self.nudge - 1,
            })
        } else {
            None
        }
    }

    /// Whether `next` begins at or before the position immediately after
    /// `self`, i.e. the two covered ranges touch with no real point between.
    pub fn abuts_or_overlaps(&self, next: &Pos) -> bool {
        if *next <= *self {
            return true;
        }
        match self.step_up() {
            Some(up) => *next <= up,
            None => false,
        }
    }
}

/// Raw point-set intersection of two intervals, openness included.
pub fn intersects_raw(a: &Interval, b: &Interval) -> bool {
    a.raw_start() <= b.raw_end() && b.raw_start() <= a.raw_end()
}
