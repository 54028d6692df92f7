//! Randomized preemptive online selection.
//!
//! Runs the one-pass state machine as a preemptive admission policy over the
//! actual set, first-fit 3-colors every member on admission (an admitted
//! interval meets at most two current members, so three colors always
//! suffice), and reports the members of one color class chosen uniformly at
//! random up front. Averaged over the three classes the solution holds at
//! least a sixth of the optimum, deterministically.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::general::GeneralState;
use crate::interval::{intersects, Interval, IntervalSet};

/// Internal-assertion failure: an admitted interval had no free color.
/// Cannot fire while the load invariants of the inner state hold.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("no free color for arrival {arrival}")]
pub struct ColorExhaustion {
    pub arrival: u64,
}

/// Admission log entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnlineEvent {
    Accepted { id: u64, color: u8 },
    Preempted { id: u64 },
    Rejected { id: u64 },
}

/// What one arrival did.
#[derive(Clone, Debug)]
pub struct ArrivalReport {
    pub accepted: bool,
    /// Color assigned to the arrival, if admitted.
    pub color: Option<u8>,
    /// Members of the actual set the arrival intersected at coloring time.
    pub conflicts: usize,
    /// Ids preempted during the round.
    pub preempted: Vec<u64>,
}

/// Online state: the inner streaming state plus the coloring and the chosen
/// class.
#[derive(Clone, Debug)]
pub struct OnlineState {
    inner: GeneralState,
    colors: std::collections::BTreeMap<u64, u8>,
    chosen: u8,
    seed: u64,
    events: Vec<OnlineEvent>,
}

/// Draws the output color from a seeded deterministic generator; the same
/// seed always replays the same run.
pub fn online_init(seed: u64) -> OnlineState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = rng.gen_range(1..=3u8);
    OnlineState {
        inner: GeneralState::new(),
        colors: std::collections::BTreeMap::new(),
        chosen,
        seed,
        events: Vec::new(),
    }
}

impl OnlineState {
    pub fn chosen_color(&self) -> u8 {
        self.chosen
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn inner(&self) -> &GeneralState {
        &self.inner
    }

    pub fn events(&self) -> &[OnlineEvent] {
        &self.events
    }

    pub fn color_of(&self, id: u64) -> Option<u8> {
        self.colors.get(&id).copied()
    }

    /// Size of one color class of the current actual set.
    pub fn class_size(&self, color: u8) -> usize {
        self.colors.values().filter(|&&c| c == color).count()
    }

    /// Handles one arrival: admission, preemptions, and coloring. Colors are
    /// assigned after the round's evictions settle.
    pub fn arrive(&mut self, interval: &Interval) -> Result<ArrivalReport, ColorExhaustion> {
        let outcome = self.inner.process(interval);
        if !outcome.accepted {
            self.events.push(OnlineEvent::Rejected { id: interval.id });
            return Ok(ArrivalReport {
                accepted: false,
                color: None,
                conflicts: 0,
                preempted: Vec::new(),
            });
        }
        let mut preempted = Vec::new();
        for evicted in &outcome.evicted {
            self.colors.remove(&evicted.id);
            self.events.push(OnlineEvent::Preempted { id: evicted.id });
            preempted.push(evicted.id);
        }
        debug_assert!(self.inner.contains_actual(interval));

        let mut used = [false; 4];
        let mut conflicts = 0;
        for member in self.inner.actuals() {
            if member.lo > interval.hi {
                break;
            }
            if member.id == interval.id || !intersects(member, interval) {
                continue;
            }
            conflicts += 1;
            if let Some(&color) = self.colors.get(&member.id) {
                used[color as usize] = true;
            }
        }
        let color = (1..=3u8).find(|&c| !used[c as usize]).ok_or(ColorExhaustion {
            arrival: interval.id,
        })?;
        self.colors.insert(interval.id, color);
        self.events.push(OnlineEvent::Accepted {
            id: interval.id,
            color,
        });
        Ok(ArrivalReport {
            accepted: true,
            color: Some(color),
            conflicts,
            preempted,
        })
    }

    /// The current solution: members of the actual set wearing the chosen
    /// color. Pairwise disjoint whenever the coloring is proper.
    pub fn solution(&self) -> IntervalSet {
        self.inner
            .actuals()
            .filter(|iv| self.colors.get(&iv.id) == Some(&self.chosen))
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::load;
    use crate::rational::rat_int;

    fn closed(id: u64, a: i64, b: i64) -> Interval {
        Interval::closed(id, rat_int(a), rat_int(b))
    }

    #[test]
    fn same_seed_draws_same_color() {
        for seed in [0u64, 1, 42, u64::MAX] {
            let a = online_init(seed).chosen_color();
            let b = online_init(seed).chosen_color();
            assert_eq!(a, b);
            assert!((1..=3).contains(&a));
        }
    }

    #[test]
    fn color_draw_is_roughly_uniform() {
        let mut counts = [0usize; 4];
        for seed in 0..3000u64 {
            counts[online_init(seed).chosen_color() as usize] += 1;
        }
        for color in 1..=3 {
            assert!(
                (900..=1100).contains(&counts[color]),
                "color {color} drawn {} times",
                counts[color]
            );
        }
    }

    #[test]
    fn disjoint_arrivals_all_get_first_color() {
        let mut state = online_init(7);
        for i in 0..5 {
            let report = state.arrive(&closed(i, 10 * i as i64, 10 * i as i64 + 4)).unwrap();
            assert_eq!(report.color, Some(1));
            assert_eq!(report.conflicts, 0);
        }
        let expected = if state.chosen_color() == 1 { 5 } else { 0 };
        assert_eq!(state.solution().len(), expected);
    }

    #[test]
    fn preempting_chain_recolors_correctly() {
        let mut state = online_init(0);
        state.arrive(&closed(0, 0, 10)).unwrap();
        state.arrive(&closed(1, 5, 15)).unwrap();
        let report = state.arrive(&closed(2, 9, 20)).unwrap();
        assert_eq!(report.preempted, vec![1]);
        assert_eq!(state.color_of(0), Some(1));
        assert_eq!(state.color_of(2), Some(2));
        assert_eq!(state.color_of(1), None);
        assert!(state
            .events()
            .contains(&OnlineEvent::Preempted { id: 1 }));
    }

    #[test]
    fn rejected_arrival_emits_only_a_rejection() {
        let mut state = online_init(3);
        state.arrive(&closed(0, 0, 10)).unwrap();
        state.arrive(&closed(1, 2, 12)).unwrap();
        let events_before = state.events().len();
        let report = state.arrive(&closed(2, 1, 11)).unwrap();
        assert!(!report.accepted);
        assert_eq!(report.color, None);
        assert_eq!(state.events().len(), events_before + 1);
        assert_eq!(
            state.events().last(),
            Some(&OnlineEvent::Rejected { id: 2 })
        );
    }

    #[test]
    fn class_sizes_partition_the_actual_set() {
        let mut state = online_init(11);
        let stream = vec![
            closed(0, 0, 10),
            closed(1, 5, 15),
            closed(2, 9, 20),
            closed(3, 30, 45),
            closed(4, 29, 38),
            closed(5, 12, 31),
        ];
        for interval in &stream {
            let report = state.arrive(interval).unwrap();
            assert!(report.conflicts <= 2);
            let total: usize = (1..=3).map(|c| state.class_size(c)).sum();
            assert_eq!(total, state.inner().actual_count());
            assert!(load(&state.solution()) <= 1);
        }
    }
}
