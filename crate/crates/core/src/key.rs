//! Endpoint keys and the distinct-endpoints total order.
//!
//! A stream can contain intervals that share raw coordinates, and endpoints
//! can be open or closed. All algorithms in this crate are comparison-based,
//! so instead of handling collisions case by case they compare `EndpointKey`s
//! under a single strict total order that perturbs coinciding endpoints into
//! distinct positions:
//!
//! * differing coordinates compare numerically;
//! * at a shared coordinate the groups are ordered
//!   `open right < closed left < closed right < open left`, so two closures
//!   intersect under the key order exactly when the original intervals
//!   intersect as raw point sets;
//! * within a group, ties break on arrival order so that an earlier-arriving
//!   interval is nudged to shrink: its left endpoint compares greater and its
//!   right endpoint compares smaller than a later twin.
//!
//! Two keys compare equal only when they are the same endpoint of the same
//! stream interval. Derived (virtual) intervals reuse the keys of the inputs
//! they came from, so a shared endpoint really is the same point.

use std::cmp::Ordering;

use crate::rational::Rational;

/// Whether an endpoint includes its coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Openness {
    Open,
    Closed,
}

/// Which end of the interval the key belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// One endpoint of a stream interval: coordinate, openness, side, and the
/// stream position of the interval that contributed it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EndpointKey {
    pub coord: Rational,
    pub openness: Openness,
    pub side: Side,
    pub arrival: u64,
}

impl EndpointKey {
    pub fn new(coord: Rational, openness: Openness, side: Side, arrival: u64) -> Self {
        EndpointKey {
            coord,
            openness,
            side,
            arrival,
        }
    }

    /// Rank of this endpoint among the four groups sharing a coordinate.
    ///
    /// The order `open right < closed left < closed right < open left` is
    /// what makes closure intersection under the key order agree with raw
    /// open/closed intersection: an open right end pulls in before anything
    /// at the coordinate, a closed right end still reaches past a closed
    /// left end, and an open left end starts after everything else.
    fn perturbation_rank(&self) -> u8 {
        match (self.side, self.openness) {
            (Side::Right, Openness::Open) => 0,
            (Side::Left, Openness::Closed) => 1,
            (Side::Right, Openness::Closed) => 2,
            (Side::Left, Openness::Open) => 3,
        }
    }
}

impl Ord for EndpointKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coord
            .cmp(&other.coord)
            .then_with(|| self.perturbation_rank().cmp(&other.perturbation_rank()))
            .then_with(|| match self.side {
                // Earlier-arriving left endpoints compare greater, earlier
                // right endpoints compare smaller: earlier intervals shrink.
                Side::Left => other.arrival.cmp(&self.arrival),
                Side::Right => self.arrival.cmp(&other.arrival),
            })
    }
}

impl PartialOrd for EndpointKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The distinct-endpoints comparison: `Less`/`Greater` for any two endpoints
/// that are not the same endpoint of the same interval, `Equal` otherwise.
pub fn compare_endpoints(p: &EndpointKey, q: &EndpointKey) -> Ordering {
    p.cmp(q)
}
