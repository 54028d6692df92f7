//! Offline selection oracles.
//!
//! `offline_optimum` is the classic earliest-finish greedy, which is exactly
//! optimal on interval graphs; `brute_force_optimum` re-derives the optimum
//! by subset enumeration and exists purely to cross-check the greedy and the
//! streaming algorithms in tests.

use crate::interval::{intersects, Interval, IntervalSet};

/// Maximum-cardinality pairwise-disjoint subset: sort by right endpoint,
/// greedily take every interval disjoint from the last one taken.
pub fn offline_optimum(set: &IntervalSet) -> IntervalSet {
    let mut by_hi: Vec<&Interval> = set.iter().collect();
    by_hi.sort_by(|a, b| a.hi.cmp(&b.hi).then_with(|| a.lo.cmp(&b.lo)));
    let mut chosen = IntervalSet::new();
    let mut last: Option<&Interval> = None;
    for interval in by_hi {
        if last.map_or(true, |prev| !intersects(prev, interval)) {
            chosen.insert(interval.clone());
            last = Some(interval);
        }
    }
    chosen
}

/// Exact maximum independent set size by subset enumeration.
///
/// Intended as an independent test oracle; panics above 20 intervals to
/// guard against exponential blowup.
pub fn brute_force_optimum(set: &IntervalSet) -> usize {
    let n = set.len();
    assert!(n <= 20, "brute-force oracle limited to 20 intervals, got {n}");
    let items: Vec<&Interval> = set.iter().collect();
    let mut conflicts = vec![0u32; n];
    for i in 0..n {
        for j in 0..i {
            if intersects(items[i], items[j]) {
                conflicts[i] |= 1 << j;
            }
        }
    }
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let mut ok = true;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            if conflicts[i] & mask != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}
