//! Hard-instance stream generators and their verifier.
//!
//! The constructions revolve around permutation stacks: `n` equal-length
//! half-open intervals whose staggered left endpoints hide a permutation in
//! micro-offsets. A secret index marks one *good* interval per stack, the
//! only one worth selecting. The unit-interval gadget flanks each stack with
//! two unit guards that every non-good interval hits; the tree gadget nests
//! stacks recursively so that each non-good choice swallows one whole
//! subtree of auxiliaries. `verify_gadget` replays a construction from its
//! secret and reports any geometric or ordering deviation.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::interval::{intersects_raw, Interval};
use crate::key::Openness;
use crate::rational::{rat, rat_int, Rational};

/// Parameters of one permutation stack deployed in `[x, y)`.
#[derive(Clone, Debug)]
pub struct StackSpec {
    pub n: usize,
    /// 1-based permutation values: `pi[i - 1]` is the offset rank of
    /// interval `i`.
    pub pi: Vec<usize>,
    pub x: Rational,
    pub y: Rational,
}

impl StackSpec {
    pub fn new(n: usize, pi: Vec<usize>, x: Rational, y: Rational) -> Self {
        assert!(n >= 1);
        assert_eq!(pi.len(), n, "permutation length must match n");
        let mut sorted = pi.clone();
        sorted.sort_unstable();
        assert!(
            sorted.iter().copied().eq(1..=n),
            "pi must be a permutation of 1..=n"
        );
        assert!(x < y, "stack segment must be nonempty");
        StackSpec { n, pi, x, y }
    }

    /// Slot width: the segment splits into `2n - 1/2` of these.
    pub fn slot(&self) -> Rational {
        (&self.y - &self.x) / (rat_int(2 * self.n as i64) - rat(1, 2))
    }

    /// Micro-offset unit hiding the permutation: a `2n`-th of a slot.
    pub fn offset_unit(&self) -> Rational {
        self.slot() / rat_int(2 * self.n as i64)
    }

    /// Common length of every stack interval.
    pub fn interval_length(&self) -> Rational {
        self.slot() * rat_int(self.n as i64)
    }

    /// Left endpoint of interval `i` (1-based).
    pub fn left_of(&self, i: usize) -> Rational {
        &self.x
            + self.slot() * rat_int(i as i64 - 1)
            + self.offset_unit() * rat_int(self.pi[i - 1] as i64)
    }
}

/// Materializes the stack as half-open input intervals with ids starting at
/// `base_id`, in index order.
pub fn make_stack(spec: &StackSpec, base_id: u64) -> Vec<Interval> {
    let length = spec.interval_length();
    (1..=spec.n)
        .map(|i| {
            let left = spec.left_of(i);
            let right = &left + &length;
            Interval::half_open(base_id + (i - 1) as u64, left, right)
        })
        .collect()
}

/// Seeded standalone stack deployed in `[0, 1)` with a uniform random
/// permutation.
pub fn gen_stack(n: usize, seed: u64) -> (Vec<Interval>, StackSpec) {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = StackSpec::new(n, random_permutation(n, &mut rng), rat_int(0), rat_int(1));
    (make_stack(&spec, 0), spec)
}

/// Recovers the hidden permutation value from a stack interval's left
/// endpoint, given the segment start, slot width, and the interval index.
pub fn decode_offset(
    left: &Rational,
    x: &Rational,
    slot: &Rational,
    n: usize,
    index: usize,
) -> Option<usize> {
    let offset_unit = slot / rat_int(2 * n as i64);
    let residue = (left - x - slot * rat_int(index as i64 - 1)) / offset_unit;
    if !residue.is_integer() {
        return None;
    }
    let value: i64 = residue.to_integer().try_into().ok()?;
    (1..=n as i64).contains(&value).then_some(value as usize)
}

/// Which construction a secret describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    UnitGadget,
    TreeGadget,
}

/// One phase of a gadget: the stack's permutation and its good index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase {
    pub pi: Vec<usize>,
    pub index: usize,
}

/// Everything needed to replay a gadget instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetSecret {
    pub kind: GadgetKind,
    pub n: usize,
    /// Blocks for the unit gadget, tree depth for the tree gadget.
    pub size: usize,
    /// Per-stack secrets; pre-order for the tree gadget.
    pub phases: Vec<Phase>,
}

const BLOCK_SPACING: i64 = 4;

fn unit_block_origin(block: usize) -> Rational {
    rat_int(BLOCK_SPACING * block as i64)
}

fn unit_stack_spec(secret: &GadgetSecret, block: usize) -> StackSpec {
    let n = secret.n;
    let x = unit_block_origin(block);
    // Unit-length intervals: segment width (2n - 1/2) / n.
    let y = &x + rat_int(2) - rat(1, 2 * n as i64);
    StackSpec::new(n, secret.phases[block].pi.clone(), x, y)
}

/// Guard intervals of a unit-gadget block: one unit interval ending where
/// the good interval's left endpoint range begins, one starting where its
/// right endpoint range ends.
fn unit_guards(secret: &GadgetSecret, block: usize) -> ((Rational, Rational), (Rational, Rational))
{
    let n = secret.n as i64;
    let i = secret.phases[block].index as i64;
    let x = unit_block_origin(block);
    let left_anchor = &x + rat(i - 1, n);
    let right_anchor = &x + rat(2 * i - 1, 2 * n) + rat_int(1);
    (
        (&left_anchor - rat_int(1), left_anchor),
        (right_anchor.clone(), &right_anchor + rat_int(1)),
    )
}

type Proto = (Rational, Rational);

fn build_unit_protos(secret: &GadgetSecret) -> Vec<Proto> {
    let mut protos = Vec::new();
    for block in 0..secret.size {
        let spec = unit_stack_spec(secret, block);
        let length = spec.interval_length();
        for i in 1..=secret.n {
            let left = spec.left_of(i);
            let right = &left + &length;
            protos.push((left, right));
        }
        let (guard_l, guard_r) = unit_guards(secret, block);
        protos.push(guard_l);
        protos.push(guard_r);
    }
    protos
}

/// Seeded unit-interval gadget: `blocks` stacks of `n` unit intervals, each
/// followed by its two guards, in well-separated segments.
pub fn gen_unit_gadget(blocks: usize, n: usize, seed: u64) -> (Vec<Interval>, GadgetSecret) {
    assert!(n >= 2, "stacks need at least two intervals");
    assert!(blocks >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phases = (0..blocks)
        .map(|_| Phase {
            pi: random_permutation(n, &mut rng),
            index: rng.gen_range(1..=n),
        })
        .collect();
    let secret = GadgetSecret {
        kind: GadgetKind::UnitGadget,
        n,
        size: blocks,
        phases,
    };
    (materialize(build_unit_protos(&secret)), secret)
}

/// Child deployment segments of a stack in `[x, y)` with good index `i`:
/// the half-slot just left of the good interval's left-endpoint range and
/// the half-slot just right of its right-endpoint range.
fn child_segments(spec: &StackSpec, index: usize) -> ((Rational, Rational), (Rational, Rational)) {
    let slot = spec.slot();
    let i = index as i64;
    let n = spec.n as i64;
    let sigma_l = (
        &spec.x + &slot * (rat_int(i) - rat(3, 2)),
        &spec.x + &slot * rat_int(i - 1),
    );
    let sigma_r = (
        &spec.x + &slot * (rat_int(i + n) - rat(1, 2)),
        &spec.x + &slot * rat_int(i + n),
    );
    (sigma_l, sigma_r)
}

fn build_tree_protos(secret: &GadgetSecret) -> Vec<Proto> {
    let mut stacks = Vec::new();
    let mut leaves = Vec::new();
    let mut next_phase = 0usize;
    tree_walk(
        secret,
        (rat_int(0), rat_int(1)),
        secret.size,
        &mut next_phase,
        &mut stacks,
        &mut leaves,
    );
    stacks.extend(leaves);
    stacks
}

fn tree_walk(
    secret: &GadgetSecret,
    segment: Proto,
    levels_left: usize,
    next_phase: &mut usize,
    stacks: &mut Vec<Proto>,
    leaves: &mut Vec<Proto>,
) {
    if levels_left == 0 {
        leaves.push(segment);
        return;
    }
    let phase = &secret.phases[*next_phase];
    *next_phase += 1;
    let spec = StackSpec::new(secret.n, phase.pi.clone(), segment.0, segment.1);
    let length = spec.interval_length();
    for i in 1..=secret.n {
        let left = spec.left_of(i);
        let right = &left + &length;
        stacks.push((left, right));
    }
    let (sigma_l, sigma_r) = child_segments(&spec, phase.index);
    tree_walk(secret, sigma_l, levels_left - 1, next_phase, stacks, leaves);
    tree_walk(secret, sigma_r, levels_left - 1, next_phase, stacks, leaves);
}

/// Seeded binary-tree gadget: `2^depth - 1` stacks in pre-order, the root
/// deployed in `[0, 1)`, and `2^depth` auxiliary leaf intervals arriving
/// last.
///
/// The good index is drawn from `2..=n`: an index of 1 would let a child
/// segment protrude left of its parent segment, breaking the containment
/// guarantees the verifier checks when permutation offsets land on the
/// boundary exactly.
pub fn gen_tree_gadget(depth: usize, n: usize, seed: u64) -> (Vec<Interval>, GadgetSecret) {
    assert!(depth >= 1);
    assert!(n >= 2, "stacks need at least two intervals");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stack_count = (1usize << depth) - 1;
    let phases = (0..stack_count)
        .map(|_| Phase {
            pi: random_permutation(n, &mut rng),
            index: rng.gen_range(2..=n),
        })
        .collect();
    let secret = GadgetSecret {
        kind: GadgetKind::TreeGadget,
        n,
        size: depth,
        phases,
    };
    (materialize(build_tree_protos(&secret)), secret)
}

fn materialize(protos: Vec<Proto>) -> Vec<Interval> {
    protos
        .into_iter()
        .enumerate()
        .map(|(id, (left, right))| Interval::half_open(id as u64, left, right))
        .collect()
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut values: Vec<usize> = (1..=n).collect();
    values.shuffle(rng);
    values
}

/// A deviation between a stream and the construction its secret describes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetViolation {
    /// Stream length differs from the construction.
    CountMismatch { expected: usize, actual: usize },
    /// The interval at this position is not the constructed one.
    Displaced { index: usize },
    /// Right multiset of intervals, wrong arrival order.
    OutOfOrder { index: usize },
    /// A good interval intersects one of its block's guards.
    GoodOverlapsGuard { block: usize, index: usize },
    /// A non-good stack interval hits a number of guards other than one.
    GuardCoverage { block: usize, index: usize, hits: usize },
    /// The segment inequality chain failed at a tree node.
    ChainBroken { node: usize },
    /// A good interval intersects an interval assigned to a descendant.
    GoodOverlapsDescendant { node: usize, index: usize },
    /// A split-adjacent non-good interval fails to cover either child
    /// subtree entirely.
    AdjacentNotCovering { node: usize, index: usize },
    /// Two auxiliary intervals intersect.
    AuxiliariesOverlap { a: usize, b: usize },
}

impl fmt::Display for GadgetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetViolation::CountMismatch { expected, actual } => {
                write!(f, "expected {expected} intervals, found {actual}")
            }
            GadgetViolation::Displaced { index } => {
                write!(f, "interval {index} differs from the construction")
            }
            GadgetViolation::OutOfOrder { index } => {
                write!(f, "interval {index} arrives out of construction order")
            }
            GadgetViolation::GoodOverlapsGuard { block, index } => {
                write!(f, "good interval of block {block} overlaps guard {index}")
            }
            GadgetViolation::GuardCoverage { block, index, hits } => {
                write!(f, "interval {index} of block {block} hits {hits} guards")
            }
            GadgetViolation::ChainBroken { node } => {
                write!(f, "segment chain broken at node {node}")
            }
            GadgetViolation::GoodOverlapsDescendant { node, index } => {
                write!(f, "good interval of node {node} overlaps descendant {index}")
            }
            GadgetViolation::AdjacentNotCovering { node, index } => {
                write!(f, "split neighbor {index} of node {node} covers no child subtree")
            }
            GadgetViolation::AuxiliariesOverlap { a, b } => {
                write!(f, "auxiliary intervals {a} and {b} overlap")
            }
        }
    }
}

/// Checks a stream against the construction its secret describes: exact
/// positions first, then the geometric guarantees the constructions are
/// built to provide. Empty report means the instance is intact.
pub fn verify_gadget(stream: &[Interval], secret: &GadgetSecret) -> Vec<GadgetViolation> {
    let mut report = Vec::new();
    let protos = match secret.kind {
        GadgetKind::UnitGadget => build_unit_protos(secret),
        GadgetKind::TreeGadget => build_tree_protos(secret),
    };
    if stream.len() != protos.len() {
        report.push(GadgetViolation::CountMismatch {
            expected: protos.len(),
            actual: stream.len(),
        });
        return report;
    }
    let mismatches: Vec<usize> = (0..stream.len())
        .filter(|&idx| !matches_proto(&stream[idx], &protos[idx]))
        .collect();
    if !mismatches.is_empty() {
        let mut actual: Vec<Proto> = stream
            .iter()
            .map(|iv| (iv.lo.coord.clone(), iv.hi.coord.clone()))
            .collect();
        let mut expected = protos.clone();
        actual.sort();
        expected.sort();
        let shuffled = actual == expected
            && stream.iter().all(|iv| {
                iv.lo.openness == Openness::Closed && iv.hi.openness == Openness::Open
            });
        for index in mismatches {
            report.push(if shuffled {
                GadgetViolation::OutOfOrder { index }
            } else {
                GadgetViolation::Displaced { index }
            });
        }
    }
    match secret.kind {
        GadgetKind::UnitGadget => verify_unit(stream, secret, &mut report),
        GadgetKind::TreeGadget => verify_tree(stream, secret, &mut report),
    }
    report
}

fn matches_proto(interval: &Interval, proto: &Proto) -> bool {
    interval.lo.coord == proto.0
        && interval.hi.coord == proto.1
        && interval.lo.openness == Openness::Closed
        && interval.hi.openness == Openness::Open
}

fn verify_unit(stream: &[Interval], secret: &GadgetSecret, report: &mut Vec<GadgetViolation>) {
    let n = secret.n;
    let per_block = n + 2;
    let mut guard_indices = Vec::new();
    for block in 0..secret.size {
        let base = block * per_block;
        let guard_l = &stream[base + n];
        let guard_r = &stream[base + n + 1];
        guard_indices.push(base + n);
        guard_indices.push(base + n + 1);
        let good_index = base + secret.phases[block].index - 1;
        for member in 0..n {
            let idx = base + member;
            let interval = &stream[idx];
            let hits = usize::from(intersects_raw(interval, guard_l))
                + usize::from(intersects_raw(interval, guard_r));
            if idx == good_index {
                if hits != 0 {
                    report.push(GadgetViolation::GoodOverlapsGuard { block, index: idx });
                }
            } else if hits != 1 {
                report.push(GadgetViolation::GuardCoverage {
                    block,
                    index: idx,
                    hits,
                });
            }
        }
    }
    check_auxiliaries(stream, &guard_indices, report);
}

fn check_auxiliaries(stream: &[Interval], indices: &[usize], report: &mut Vec<GadgetViolation>) {
    for (pos, &a) in indices.iter().enumerate() {
        for &b in &indices[pos + 1..] {
            if intersects_raw(&stream[a], &stream[b]) {
                report.push(GadgetViolation::AuxiliariesOverlap { a, b });
            }
        }
    }
}

fn verify_tree(stream: &[Interval], secret: &GadgetSecret, report: &mut Vec<GadgetViolation>) {
    let stack_count = (1usize << secret.size) - 1;
    let first_leaf = stack_count * secret.n;
    let mut next_stack = 0usize;
    let mut next_leaf = 0usize;
    verify_tree_node(
        stream,
        secret,
        (rat_int(0), rat_int(1)),
        secret.size,
        first_leaf,
        &mut next_stack,
        &mut next_leaf,
        report,
    );
    let leaf_indices: Vec<usize> = (first_leaf..stream.len()).collect();
    check_auxiliaries(stream, &leaf_indices, report);
}

/// Walks the implicit tree in pre-order, checking each internal node and
/// returning the stream indices assigned to the walked subtree.
#[allow(clippy::too_many_arguments)]
fn verify_tree_node(
    stream: &[Interval],
    secret: &GadgetSecret,
    segment: Proto,
    levels_left: usize,
    first_leaf: usize,
    next_stack: &mut usize,
    next_leaf: &mut usize,
    report: &mut Vec<GadgetViolation>,
) -> Vec<usize> {
    if levels_left == 0 {
        let index = first_leaf + *next_leaf;
        *next_leaf += 1;
        return vec![index];
    }
    let node = *next_stack;
    *next_stack += 1;
    let phase = &secret.phases[node];
    let spec = StackSpec::new(secret.n, phase.pi.clone(), segment.0, segment.1);
    let (sigma_l, sigma_r) = child_segments(&spec, phase.index);
    let base = node * secret.n;
    let slice = &stream[base..base + secret.n];
    let good = &slice[phase.index - 1];

    // Inequality chain tying the child segments to the split neighbors.
    let mut chain_ok = sigma_l.0 < sigma_l.1
        && sigma_r.0 < sigma_r.1
        && sigma_l.1 <= good.lo.coord
        && good.hi.coord <= sigma_r.0;
    if phase.index >= 2 {
        chain_ok &= slice[phase.index - 2].lo.coord <= sigma_l.0;
    }
    if phase.index < secret.n {
        chain_ok &= sigma_r.1 <= slice[phase.index].hi.coord;
    }
    if !chain_ok {
        report.push(GadgetViolation::ChainBroken { node });
    }

    let left_desc = verify_tree_node(
        stream,
        secret,
        sigma_l,
        levels_left - 1,
        first_leaf,
        next_stack,
        next_leaf,
        report,
    );
    let right_desc = verify_tree_node(
        stream,
        secret,
        sigma_r,
        levels_left - 1,
        first_leaf,
        next_stack,
        next_leaf,
        report,
    );

    for &idx in left_desc.iter().chain(&right_desc) {
        if intersects_raw(good, &stream[idx]) {
            report.push(GadgetViolation::GoodOverlapsDescendant { node, index: idx });
        }
    }
    for neighbor in [phase.index.checked_sub(2), Some(phase.index)] {
        let Some(member) = neighbor else { continue };
        if member >= secret.n {
            continue;
        }
        let adjacent = &slice[member];
        let covers_left = covers_all(adjacent, stream, &left_desc);
        let covers_right = covers_all(adjacent, stream, &right_desc);
        if !covers_left && !covers_right {
            report.push(GadgetViolation::AdjacentNotCovering {
                node,
                index: base + member,
            });
        }
    }

    let mut indices: Vec<usize> = (base..base + secret.n).collect();
    indices.extend(left_desc);
    indices.extend(right_desc);
    indices
}

fn covers_all(outer: &Interval, stream: &[Interval], indices: &[usize]) -> bool {
    indices.iter().all(|&idx| {
        let inner = &stream[idx];
        outer.raw_start() <= inner.raw_start() && inner.raw_end() <= outer.raw_end()
    })
}

/// Named random-stream families for fuzzing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamFamily {
    /// Random intervals on a coarse lattice, all four openness shapes,
    /// frequent endpoint collisions.
    UniformGeneral,
    /// Interval bundles sharing centers, producing heavy containment.
    Nested,
    /// Proper intervals of varying length (sorted starts get sorted ends).
    ProperShifted,
    /// Unit-length half-open intervals at distinct starts.
    Unit,
}

/// Deterministic seeded stream from the named family.
pub fn gen_random(count: usize, family: StreamFamily, seed: u64) -> Vec<Interval> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        StreamFamily::UniformGeneral => {
            let span = 3 * count as i64 + 8;
            (0..count)
                .map(|id| {
                    let denom = [1, 2, 3, 4][rng.gen_range(0..4)];
                    let left = rat(rng.gen_range(0..=span), denom);
                    let len = rat(rng.gen_range(1..=10), [1, 2, 4][rng.gen_range(0..3)]);
                    let (lo_open, hi_open) = random_openness(&mut rng);
                    Interval::with_openness(id as u64, left.clone(), lo_open, left + len, hi_open)
                })
                .collect()
        }
        StreamFamily::Nested => {
            let bundles = (count / 6).max(1) as i64;
            (0..count)
                .map(|id| {
                    let center = rat_int(40 * rng.gen_range(0..bundles));
                    let reach_l = rat(rng.gen_range(1..=30), [1, 2, 3][rng.gen_range(0..3)]);
                    let reach_r = rat(rng.gen_range(1..=30), [1, 2, 3][rng.gen_range(0..3)]);
                    let (lo_open, hi_open) = random_openness(&mut rng);
                    Interval::with_openness(
                        id as u64,
                        &center - reach_l,
                        lo_open,
                        &center + reach_r,
                        hi_open,
                    )
                })
                .collect()
        }
        StreamFamily::ProperShifted => {
            let lefts = distinct_lattice(count, 4, 4 * count as i64 + 16, &mut rng);
            let mut prev: Option<Rational> = None;
            let mut items: Vec<Proto> = Vec::with_capacity(count);
            for left in lefts {
                let base = match &prev {
                    Some(p) if *p > left => p.clone(),
                    _ => left.clone(),
                };
                let right = base + rat(rng.gen_range(1..=12), 4);
                prev = Some(right.clone());
                items.push((left, right));
            }
            items.shuffle(&mut rng);
            materialize(items)
        }
        StreamFamily::Unit => {
            let mut lefts = distinct_lattice(count, 8, 6 * count as i64 + 16, &mut rng);
            lefts.shuffle(&mut rng);
            materialize(
                lefts
                    .into_iter()
                    .map(|left| {
                        let right = &left + rat_int(1);
                        (left, right)
                    })
                    .collect(),
            )
        }
    }
}

fn random_openness(rng: &mut ChaCha8Rng) -> (Openness, Openness) {
    let combos = [
        (Openness::Closed, Openness::Closed),
        (Openness::Closed, Openness::Open),
        (Openness::Open, Openness::Closed),
        (Openness::Open, Openness::Open),
    ];
    combos[rng.gen_range(0..4)]
}

fn distinct_lattice(count: usize, denom: i64, span: i64, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let mut seen = BTreeSet::new();
    while seen.len() < count {
        seen.insert(rat(rng.gen_range(0..=span), denom));
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{is_proper, IntervalSet};
    use crate::oracle::{brute_force_optimum, offline_optimum};

    #[test]
    fn four_stack_identity_layout() {
        let spec = StackSpec::new(4, vec![1, 2, 3, 4], rat_int(0), rat_int(1));
        assert_eq!(spec.slot(), rat(2, 15));
        assert_eq!(spec.offset_unit(), rat(1, 60));
        assert_eq!(spec.left_of(1), rat(1, 60));
        assert_eq!(spec.interval_length(), rat(8, 15));
        let stack = make_stack(&spec, 0);
        assert_eq!(stack.len(), 4);
        assert_eq!(stack[0].lo.coord, rat(1, 60));
        assert_eq!(stack[0].hi.coord, rat(1, 60) + rat(8, 15));
    }

    #[test]
    fn stack_core_is_shared_and_stays_in_segment() {
        for seed in 0..12u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..=7);
            let spec = StackSpec::new(
                n,
                random_permutation(n, &mut rng),
                rat_int(rng.gen_range(-3..3)),
                rat_int(rng.gen_range(4..9)),
            );
            let stack = make_stack(&spec, 0);
            // The segment between the last left endpoint and the first
            // right endpoint is inside every member.
            let core_lo = stack.iter().map(|iv| iv.lo.coord.clone()).max().unwrap();
            let core_hi = stack.iter().map(|iv| iv.hi.coord.clone()).min().unwrap();
            assert!(core_lo < core_hi, "stack core must be nonempty");
            for member in &stack {
                assert!(member.lo.coord >= spec.x);
                assert!(member.hi.coord <= spec.y);
            }
        }
    }

    #[test]
    fn unit_block_guard_positions() {
        let secret = GadgetSecret {
            kind: GadgetKind::UnitGadget,
            n: 2,
            size: 1,
            phases: vec![Phase {
                pi: vec![1, 2],
                index: 1,
            }],
        };
        let protos = build_unit_protos(&secret);
        // Stack intervals, then the two guards.
        assert_eq!(protos[0], (rat(1, 8), rat(9, 8)));
        assert_eq!(protos[1], (rat(3, 4), rat(7, 4)));
        assert_eq!(protos[2], (rat_int(-1), rat_int(0)));
        assert_eq!(protos[3], (rat(5, 4), rat(9, 4)));
        let stream = materialize(protos);
        // The good interval misses both guards; the other hits only the
        // right guard.
        assert!(!intersects_raw(&stream[0], &stream[2]));
        assert!(!intersects_raw(&stream[0], &stream[3]));
        assert!(!intersects_raw(&stream[1], &stream[2]));
        assert!(intersects_raw(&stream[1], &stream[3]));
    }

    #[test]
    fn unit_gadget_optimum_is_three_per_block() {
        for (blocks, n, seed) in [(1, 2, 0), (2, 3, 5), (3, 4, 9)] {
            let (stream, _) = gen_unit_gadget(blocks, n, seed);
            let set: IntervalSet = stream.iter().cloned().collect();
            assert_eq!(offline_optimum(&set).len(), 3 * blocks);
            if stream.len() <= 20 {
                assert_eq!(brute_force_optimum(&set), 3 * blocks);
            }
        }
    }

    #[test]
    fn unit_gadget_streams_are_proper() {
        let (stream, _) = gen_unit_gadget(4, 5, 3);
        let set: IntervalSet = stream.iter().cloned().collect();
        assert!(is_proper(&set));
    }

    #[test]
    fn tree_gadget_shape_and_optimum() {
        let (stream, secret) = gen_tree_gadget(1, 3, 2);
        assert_eq!(stream.len(), 3 + 2);
        assert_eq!(secret.phases.len(), 1);

        // depth 2, n = 3: 3 stacks of 3 plus 4 auxiliaries = 13 intervals,
        // small enough for the subset oracle.
        let (stream, _) = gen_tree_gadget(2, 3, 7);
        assert_eq!(stream.len(), 13);
        let set: IntervalSet = stream.iter().cloned().collect();
        let expected = (1 << 3) - 1;
        assert_eq!(brute_force_optimum(&set), expected);
        assert_eq!(offline_optimum(&set).len(), expected);
    }

    #[test]
    fn generated_gadgets_verify_clean() {
        for seed in 0..10u64 {
            let (stream, secret) = gen_unit_gadget(1 + (seed as usize % 4), 2 + (seed as usize % 5), seed);
            assert!(verify_gadget(&stream, &secret).is_empty());
            let (stream, secret) = gen_tree_gadget(1 + (seed as usize % 3), 2 + (seed as usize % 4), seed);
            assert!(verify_gadget(&stream, &secret).is_empty());
        }
    }

    #[test]
    fn shifted_auxiliary_is_reported() {
        let (mut stream, secret) = gen_unit_gadget(2, 3, 11);
        let spec = unit_stack_spec(&secret, 0);
        let shift = spec.offset_unit() / rat_int(2);
        let guard = secret.n; // first block's left guard
        let old = stream[guard].clone();
        stream[guard] = Interval::half_open(
            old.id,
            old.lo.coord + &shift,
            old.hi.coord + &shift,
        );
        let report = verify_gadget(&stream, &secret);
        assert!(report
            .iter()
            .any(|v| matches!(v, GadgetViolation::Displaced { .. })));
    }

    #[test]
    fn swapped_stacks_are_reported_as_reordering() {
        let (mut stream, secret) = gen_tree_gadget(2, 2, 4);
        let n = secret.n;
        // Swap the stacks of the first two pre-order nodes.
        for offset in 0..n {
            stream.swap(offset, n + offset);
        }
        // Restore per-position ids so only geometry is out of order.
        for (idx, interval) in stream.iter_mut().enumerate() {
            let lo = interval.lo.coord.clone();
            let hi = interval.hi.coord.clone();
            *interval = Interval::half_open(idx as u64, lo, hi);
        }
        let report = verify_gadget(&stream, &secret);
        assert!(report
            .iter()
            .any(|v| matches!(v, GadgetViolation::OutOfOrder { .. })));
    }

    #[test]
    fn offset_decode_roundtrip() {
        for seed in 0..8u64 {
            let (stream, secret) = gen_unit_gadget(3, 4, seed);
            for block in 0..secret.size {
                let spec = unit_stack_spec(&secret, block);
                let index = secret.phases[block].index;
                let good = &stream[block * (secret.n + 2) + index - 1];
                let decoded = decode_offset(&good.lo.coord, &spec.x, &spec.slot(), secret.n, index);
                assert_eq!(decoded, Some(secret.phases[block].pi[index - 1]));
            }
        }
    }

    #[test]
    fn random_streams_are_deterministic_and_shaped() {
        for family in [
            StreamFamily::UniformGeneral,
            StreamFamily::Nested,
            StreamFamily::ProperShifted,
            StreamFamily::Unit,
        ] {
            assert!(gen_random(0, family, 1).is_empty());
            let a = gen_random(50, family, 99);
            let b = gen_random(50, family, 99);
            assert_eq!(a, b);
            assert_eq!(a.len(), 50);
        }
        for family in [StreamFamily::ProperShifted, StreamFamily::Unit] {
            let set: IntervalSet = gen_random(80, family, 5).iter().cloned().collect();
            assert!(is_proper(&set));
        }
    }
}
