//! Streaming interval selection.
//!
//! The crate implements one-pass selection of a maximum-cardinality disjoint
//! subset of real-line intervals under tight memory budgets, together with the
//! supporting machinery needed to exercise it:
//!
//! * [`general`] — the one-pass 2-approximation that maintains a set of
//!   *actual* intervals plus a set of *virtual* intervals (stored
//!   intersections) in output-linear space.
//! * [`proper`] — the zone-based 3/2-approximation for proper interval
//!   streams (no proper containments).
//! * [`multipass`] — the p-pass extension that pads the tracked set with
//!   next/prev neighbors each pass.
//! * [`online`] — the randomized preemptive online variant: 3-color the
//!   actual set first-fit and keep a random color class.
//! * [`adversary`] — hard-instance stream generators (permutation stacks,
//!   unit-interval gadgets, binary-tree gadgets) and their verifier.
//! * [`stream`] / [`eval`] — the flat-file stream format and the
//!   stats-emitting evaluation loop used by the CLI.
//!
//! All coordinates are exact rationals and every ordering decision goes
//! through a single total order on endpoint keys, so geometry is bit-exact
//! and runs replay deterministically.

pub mod adversary;
pub mod eval;
pub mod general;
pub mod interval;
pub mod key;
pub mod multipass;
pub mod online;
pub mod oracle;
pub mod proper;
pub mod rational;
pub mod stream;

pub use interval::{Containment, Interval, IntervalSet, Kind, Pos};
pub use key::{compare_endpoints, EndpointKey, Openness, Side};
pub use rational::{rat, rat_int, Rational};
