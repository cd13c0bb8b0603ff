//! Base-10 digit genomes and their decoding into orders.
//!
//! One action occupies `source_width + arc_width + 2` digits:
//! source node, arc index from the source (modulo its degree), proportion of the
//! garrison in 10% steps (`0` = 10%, `9` = 100%) and a post-action wait of `d^2`
//! ticks, never shorter than the side's C2 delay.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::engine::{quantize, GameState, MapGraph, NodeId, Order, Side, World};

/// An order together with how long the side stays idle after issuing it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Action {
    pub order: Order,
    pub wait_after: u32,
}

impl Action {
    pub fn wait(ticks: u32) -> Action {
        Action { order: Order::Wait { ticks }, wait_after: ticks }
    }

    pub fn is_wait(&self) -> bool {
        matches!(self.order, Order::Wait { .. })
    }

    /// Semantic identity: all waits collapse to one action.
    pub fn identity(&self) -> ActionIdentity {
        match self.order {
            Order::Wait { .. } => ActionIdentity::Wait,
            Order::LaunchExpedition { size, from, to } => ActionIdentity::Launch {
                from,
                to,
                size: quantize(size),
                wait: self.wait_after,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionIdentity {
    Wait,
    Launch { from: NodeId, to: NodeId, size: i64, wait: u32 },
}

/// Number of decimal digits in `value`.
fn decimal_width(value: usize) -> usize {
    let mut width = 1;
    let mut v = value / 10;
    while v > 0 {
        width += 1;
        v /= 10;
    }
    width
}

/// Digit layout for one map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Codec {
    pub source_width: usize,
    pub arc_width: usize,
}

impl Codec {
    /// One source digit below 10 nodes, two from 10 to 99; one arc digit up to 10 arcs per node.
    pub fn for_map(map: &MapGraph) -> Codec {
        Codec {
            source_width: decimal_width(map.node_count()),
            arc_width: decimal_width(map.max_degree().saturating_sub(1)),
        }
    }

    pub fn digits_per_action(&self) -> usize {
        self.source_width + self.arc_width + 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Genome {
    digits: Vec<u8>,
    actions: usize,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenomeError {
    #[error("genome contains a non-digit character")]
    NotADigit,
    #[error("genome of {len} digits does not hold a whole number of {per_action}-digit actions")]
    Length { len: usize, per_action: usize },
}

impl Genome {
    pub fn new(digits: Vec<u8>, codec: Codec) -> Result<Genome, GenomeError> {
        if digits.iter().any(|&d| d > 9) {
            return Err(GenomeError::NotADigit);
        }
        let per = codec.digits_per_action();
        if digits.is_empty() || !digits.len().is_multiple_of(per) {
            return Err(GenomeError::Length { len: digits.len(), per_action: per });
        }
        let actions = digits.len() / per;
        Ok(Genome { digits, actions })
    }

    pub fn parse(text: &str, codec: Codec) -> Result<Genome, GenomeError> {
        let digits = text
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or(GenomeError::NotADigit))
            .collect::<Result<Vec<_>, _>>()?;
        Genome::new(digits, codec)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, actions: usize, codec: Codec) -> Genome {
        let digits = (0..actions * codec.digits_per_action())
            .map(|_| rng.gen_range(0..10u8))
            .collect();
        Genome { digits, actions }
    }

    /// Each digit is redrawn uniformly with probability `rate`. A child identical to
    /// its parent gets one position forced to a different digit.
    pub fn mutate<R: Rng + ?Sized>(&self, rate: f64, rng: &mut R) -> Genome {
        let mut digits = self.digits.clone();
        let mut changed = false;
        for d in digits.iter_mut() {
            if rng.gen::<f64>() < rate {
                let new = rng.gen_range(0..10u8);
                changed |= new != *d;
                *d = new;
            }
        }
        if !changed {
            let pos = rng.gen_range(0..digits.len());
            let shift = rng.gen_range(1..10u8);
            digits[pos] = (digits[pos] + shift) % 10;
        }
        Genome { digits, actions: self.actions }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    /// Digits of the `index`-th action.
    pub fn block(&self, index: usize) -> &[u8] {
        let per = self.digits.len() / self.actions;
        &self.digits[index * per..(index + 1) * per]
    }

    /// Drop the first action and append a random one.
    pub fn shifted<R: Rng + ?Sized>(&self, rng: &mut R) -> Genome {
        let per = self.digits.len() / self.actions;
        let mut digits = self.digits[per..].to_vec();
        digits.extend((0..per).map(|_| rng.gen_range(0..10u8)));
        Genome { digits, actions: self.actions }
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for Genome {
    type Err = GenomeError;

    /// Parses a single-digit-layout genome (maps under 10 nodes, degree under 11).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Genome::parse(s, Codec { source_width: 1, arc_width: 1 })
    }
}

fn read_number(digits: &[u8]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * 10 + d as usize)
}

fn wait_ticks(world: &World, side: Side, digit: u8) -> u32 {
    let c2 = world.params().side(side).c2_min_delay;
    (digit as u32 * digit as u32).max(c2).max(1)
}

fn round_micro(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Decode the action starting at `offset`. Never fails: an unusable source yields a
/// Wait lasting the decoded wait.
pub fn decode_action(
    world: &World,
    digits: &[u8],
    offset: usize,
    state: &GameState,
    side: Side,
) -> (Action, usize) {
    let codec = Codec::for_map(world.map());
    let consumed = codec.digits_per_action();
    let block = &digits[offset..offset + consumed];
    let (src, rest) = block.split_at(codec.source_width);
    let (arc, rest) = rest.split_at(codec.arc_width);
    let (proportion, wait) = (rest[0], rest[1]);
    let wait = wait_ticks(world, side, wait);

    let source = read_number(src);
    if source >= world.map().node_count() {
        return (Action::wait(wait), consumed);
    }
    let node = state.node(source);
    if node.owner != Some(side) || node.garrison <= 0.0 {
        return (Action::wait(wait), consumed);
    }
    let neighbors = world.map().neighbors(source);
    let target = neighbors[read_number(arc) % neighbors.len()].node;
    let size = if proportion == 9 {
        node.garrison
    } else {
        round_micro((proportion as f64 + 1.0) * node.garrison / 10.0).min(node.garrison)
    };
    if size <= 0.0 {
        return (Action::wait(wait), consumed);
    }
    let order = Order::LaunchExpedition { size, from: source, to: target };
    (Action { order, wait_after: wait }, consumed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodedPlan {
    pub steps: Vec<Action>,
}

/// Decode every action against one snapshot. Execution re-decodes each block
/// against the state current at that time.
pub fn decode_genome(world: &World, genome: &Genome, state: &GameState, side: Side) -> DecodedPlan {
    let mut steps = Vec::with_capacity(genome.actions());
    let mut offset = 0;
    for _ in 0..genome.actions() {
        let (action, used) = decode_action(world, genome.digits(), offset, state, side);
        steps.push(action);
        offset += used;
    }
    DecodedPlan { steps }
}

/// Up to `k` semantically distinct actions, drawn by decoding random digit blocks.
/// Gives up after `100 * k` draws.
pub fn sample_distinct_actions<R: Rng + ?Sized>(
    world: &World,
    state: &GameState,
    side: Side,
    k: usize,
    rng: &mut R,
) -> Vec<Action> {
    let codec = Codec::for_map(world.map());
    let per = codec.digits_per_action();
    let mut block = vec![0u8; per];
    let mut seen = HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    let has_garrison = state
        .nodes()
        .iter()
        .any(|n| n.owner == Some(side) && n.garrison > 0.0);
    if !has_garrison {
        return vec![Action::wait(wait_ticks(world, side, rng.gen_range(0..10u8)))];
    }
    for _ in 0..k * 100 {
        for d in block.iter_mut() {
            *d = rng.gen_range(0..10u8);
        }
        let (action, _) = decode_action(world, &block, 0, state, side);
        if seen.insert(action.identity()) {
            out.push(action);
            if out.len() == k {
                break;
            }
        }
    }
    out
}
