//! Event-driven Ground War forward model.
//!
//! A [`World`] holds the immutable map and rules; a [`GameState`] is the mutable
//! snapshot that planners clone. [`World::advance`] skips directly from one event
//! tick to the next (arrival, arc meeting, decision due) and stops whenever a side
//! has to choose an order.

pub mod lanchester;
pub mod map;
pub mod trace;

use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lanchester::{resolve_lanchester, BattleOutcome, BattleWinner};
pub use map::{ArcSpec, MapGraph, Neighbor, NodeId, NodeSpec};
pub use trace::{EventKind, GameEvent};

/// Strength below this after a split is treated as an empty garrison.
const STRENGTH_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Blue,
    Red,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Blue, Side::Red];

    pub fn opponent(self) -> Side {
        match self {
            Side::Blue => Side::Red,
            Side::Red => Side::Blue,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Blue => "blue",
            Side::Red => "red",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("start nodes must be distinct valid node ids (blue {blue}, red {red})")]
    InvalidStart { blue: NodeId, red: NodeId },
}

/// Reasons an order is refused. Planners substitute a Wait for any of these.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum OrderError {
    #[error("command and control delay has not elapsed (next order at tick {next_order_tick})")]
    C2Violation { next_order_tick: u32 },
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("source node {0} is not owned by the issuing side")]
    UnownedSource(NodeId),
    #[error("expedition size exceeds the garrison at node {0}")]
    InsufficientForce(NodeId),
    #[error("nodes {0} and {1} are not connected by an arc")]
    NotAdjacent(NodeId, NodeId),
    #[error("expedition size must be positive and finite")]
    InvalidSize,
    #[error("wait must last at least one tick")]
    InvalidWait,
    #[error("side has no pending wait to resume")]
    NothingToResume,
}

impl OrderError {
    /// Stable numeric code, shared with the C interface.
    pub fn code(self) -> i32 {
        match self {
            OrderError::C2Violation { .. } => 10,
            OrderError::UnknownNode(_) => 11,
            OrderError::UnownedSource(_) => 12,
            OrderError::InsufficientForce(_) => 13,
            OrderError::NotAdjacent(..) => 14,
            OrderError::InvalidSize => 15,
            OrderError::InvalidWait => 16,
            OrderError::NothingToResume => 17,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SideParams {
    /// Arc-length units per tick.
    pub speed: f64,
    /// Attrition coefficient this side inflicts in battle.
    pub lanchester_coeff: f64,
    /// Minimum number of ticks between two orders.
    pub c2_min_delay: u32,
}

impl Default for SideParams {
    fn default() -> Self {
        SideParams { speed: 1.0, lanchester_coeff: 1.0, c2_min_delay: 10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct GameParams {
    pub node_points: u32,
    pub unit_points: u32,
    pub max_ticks: u32,
    pub blue: SideParams,
    pub red: SideParams,
    /// Opposing expeditions on the same arc fight when they meet.
    pub arc_battles: bool,
}

impl Default for GameParams {
    fn default() -> Self {
        GameParams {
            node_points: 5,
            unit_points: 1,
            max_ticks: 1000,
            blue: SideParams::default(),
            red: SideParams::default(),
            arc_battles: true,
        }
    }
}

impl GameParams {
    pub fn side(&self, side: Side) -> &SideParams {
        match side {
            Side::Blue => &self.blue,
            Side::Red => &self.red,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_ticks == 0 {
            return Err(EngineError::InvalidParams("max_ticks must be positive".into()));
        }
        for side in Side::BOTH {
            let p = self.side(side);
            if !(p.speed > 0.0 && p.speed.is_finite()) {
                return Err(EngineError::InvalidParams(format!("{} speed must be positive", side.name())));
            }
            if !(p.lanchester_coeff > 0.0 && p.lanchester_coeff.is_finite()) {
                return Err(EngineError::InvalidParams(format!(
                    "{} attrition coefficient must be positive",
                    side.name()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeState {
    pub owner: Option<Side>,
    pub garrison: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expedition {
    pub side: Side,
    pub size: f64,
    pub from: NodeId,
    pub to: NodeId,
    pub depart: u32,
    pub arrive: u32,
}

impl Expedition {
    fn sort_key(&self) -> (u32, Side, NodeId, NodeId, u32, u64) {
        (self.arrive, self.side, self.from, self.to, self.depart, self.size.to_bits())
    }
}

pub const WAIT_FOREVER: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    LaunchExpedition { size: f64, from: NodeId, to: NodeId },
    /// `ticks == WAIT_FOREVER` never expires on its own.
    Wait { ticks: u32 },
}

impl Order {
    pub fn is_launch(&self) -> bool {
        matches!(self, Order::LaunchExpedition { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecisionRequest {
    Decide(Side),
    Terminal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    BlueWin,
    RedWin,
    Draw,
}

/// Tick-invariant content hash of a state, used by the transposition tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(pub u64);

#[derive(Clone, Debug)]
pub struct GameState {
    tick: u32,
    nodes: Vec<NodeState>,
    /// Kept sorted by (arrive, side, from, to, depart, size).
    expeditions: Vec<Expedition>,
    next_order_tick: [u32; 2],
    /// Tick at which the side's current wait expires; `None` waits forever.
    wake_tick: [Option<u32>; 2],
    interrupted: [bool; 2],
    /// Events scheduled for `tick` have been applied.
    resolved: bool,
    stream: u64,
    events: u64,
}

impl GameState {
    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeState {
        &self.nodes[id]
    }

    pub fn expeditions(&self) -> &[Expedition] {
        &self.expeditions
    }

    pub fn next_order_tick(&self, side: Side) -> u32 {
        self.next_order_tick[side.index()]
    }

    pub fn wake_tick(&self, side: Side) -> Option<u32> {
        self.wake_tick[side.index()]
    }

    pub fn is_interrupted(&self, side: Side) -> bool {
        self.interrupted[side.index()]
    }

    /// Seed of the random stream attached to this snapshot.
    /// Interrupted while an earlier wait is still running, so [`World::resume`] applies.
    pub fn can_resume(&self, side: Side) -> bool {
        let i = side.index();
        self.interrupted[i] && !self.wake_tick[i].is_some_and(|w| w <= self.tick)
    }

    pub fn rng_stream(&self) -> u64 {
        self.stream
    }

    /// Number of event ticks the forward model has resolved for this lineage.
    pub fn events_processed(&self) -> u64 {
        self.events
    }

    pub fn owner(&self, id: NodeId) -> Option<Side> {
        self.nodes[id].owner
    }

    pub fn garrison(&self, id: NodeId) -> f64 {
        self.nodes[id].garrison
    }

    pub fn owned_nodes(&self, side: Side) -> usize {
        self.nodes.iter().filter(|n| n.owner == Some(side)).count()
    }

    /// Garrisons plus forces in transit.
    pub fn total_strength(&self, side: Side) -> f64 {
        let garrisons: f64 = self
            .nodes
            .iter()
            .filter(|n| n.owner == Some(side))
            .map(|n| n.garrison)
            .sum();
        let moving: f64 = self
            .expeditions
            .iter()
            .filter(|e| e.side == side)
            .map(|e| e.size)
            .sum();
        garrisons + moving
    }

    /// Enemy strength currently travelling towards `node`.
    pub fn inbound_strength(&self, node: NodeId, attacker: Side) -> f64 {
        self.expeditions
            .iter()
            .filter(|e| e.to == node && e.side == attacker)
            .map(|e| e.size)
            .sum()
    }

    /// Deep copy carrying a fresh random stream.
    pub fn copy_state(&self) -> GameState {
        let mut copy = self.clone();
        copy.stream = splitmix64(self.stream ^ 0xA076_1D64_78BD_642F);
        copy
    }

    /// Stable hash of ownership, garrisons (to 1e-6), expeditions and clocks,
    /// all measured relative to the current tick.
    pub fn state_key(&self) -> StateKey {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        let t = self.tick as i64;
        for node in &self.nodes {
            node.owner.hash(&mut h);
            quantize(node.garrison).hash(&mut h);
        }
        self.expeditions.len().hash(&mut h);
        for e in &self.expeditions {
            e.side.hash(&mut h);
            e.from.hash(&mut h);
            e.to.hash(&mut h);
            (e.depart as i64 - t).hash(&mut h);
            (e.arrive as i64 - t).hash(&mut h);
            quantize(e.size).hash(&mut h);
        }
        for i in 0..2 {
            (self.next_order_tick[i] as i64 - t).max(0).hash(&mut h);
            self.wake_tick[i].map(|w| (w as i64 - t).max(0)).hash(&mut h);
            self.interrupted[i].hash(&mut h);
        }
        StateKey(h.finish())
    }

    fn strength_exhausted(&self, side: Side) -> bool {
        self.total_strength(side) <= 0.0
    }

    fn decision_due(&self, side: Side) -> bool {
        let i = side.index();
        if self.tick < self.next_order_tick[i] {
            return false;
        }
        self.interrupted[i] || self.wake_tick[i].is_some_and(|w| w <= self.tick)
    }

    fn decision_tick(&self, side: Side) -> Option<u32> {
        let i = side.index();
        let wake = if self.interrupted[i] { Some(self.tick) } else { self.wake_tick[i] };
        wake.map(|w| w.max(self.next_order_tick[i]))
    }

    fn interrupt(&mut self, side: Side) {
        let i = side.index();
        if !self.wake_tick[i].is_some_and(|w| w <= self.tick) {
            self.interrupted[i] = true;
        }
    }
}

pub fn quantize(strength: f64) -> i64 {
    (strength * 1e6).round() as i64
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// First integer tick at which two opposing expeditions on the same arc have met:
/// their combined fractional progress along the arc reaches 1.
pub fn meeting_tick(e1: &Expedition, e2: &Expedition) -> u32 {
    let (t1, t2) = ((e1.arrive - e1.depart) as u64, (e2.arrive - e2.depart) as u64);
    let num = t1 * t2 + e1.depart as u64 * t2 + e2.depart as u64 * t1;
    num.div_ceil(t1 + t2) as u32
}

fn opposed_on_arc(e1: &Expedition, e2: &Expedition) -> bool {
    e1.side != e2.side && e1.from == e2.to && e1.to == e2.from
}

/// Map plus rules: everything about a game that never changes while it is played.
#[derive(Clone, Debug)]
pub struct World {
    map: MapGraph,
    params: GameParams,
}

impl World {
    pub fn new(map: MapGraph, params: GameParams) -> Result<World, EngineError> {
        params.validate()?;
        Ok(World { map, params })
    }

    pub fn map(&self) -> &MapGraph {
        &self.map
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn create_state(
        &self,
        blue_start: NodeId,
        red_start: NodeId,
        start_force: f64,
    ) -> Result<GameState, EngineError> {
        let n = self.map.node_count();
        if blue_start == red_start || blue_start >= n || red_start >= n {
            return Err(EngineError::InvalidStart { blue: blue_start, red: red_start });
        }
        if !(start_force > 0.0 && start_force.is_finite()) {
            return Err(EngineError::InvalidParams("start force must be positive".into()));
        }
        let mut nodes = vec![NodeState { owner: None, garrison: 0.0 }; n];
        nodes[blue_start] = NodeState { owner: Some(Side::Blue), garrison: start_force };
        nodes[red_start] = NodeState { owner: Some(Side::Red), garrison: start_force };
        Ok(GameState {
            tick: 0,
            nodes,
            expeditions: Vec::new(),
            next_order_tick: [0, 0],
            wake_tick: [Some(0), Some(0)],
            interrupted: [false, false],
            resolved: false,
            stream: splitmix64(((blue_start as u64) << 32) | red_start as u64),
            events: 0,
        })
    }

    /// Build an arbitrary position (scenarios, tests, foreign callers). Both sides
    /// are due to decide at `tick`.
    pub fn state_from_parts(
        &self,
        tick: u32,
        nodes: Vec<NodeState>,
        expeditions: Vec<Expedition>,
    ) -> Result<GameState, EngineError> {
        let bad = |msg: String| Err(EngineError::InvalidParams(msg));
        if nodes.len() != self.map.node_count() {
            return bad(format!("expected {} node states, got {}", self.map.node_count(), nodes.len()));
        }
        for (id, node) in nodes.iter().enumerate() {
            if !(node.garrison >= 0.0 && node.garrison.is_finite()) {
                return bad(format!("garrison at node {id} must be finite and non-negative"));
            }
            if node.owner.is_none() && node.garrison != 0.0 {
                return bad(format!("neutral node {id} cannot hold a garrison"));
            }
        }
        for e in &expeditions {
            let Some(length) = self.map.arc_length(e.from, e.to) else {
                return bad(format!("expedition {}->{} does not follow an arc", e.from, e.to));
            };
            if !(e.size > 0.0 && e.size.is_finite()) {
                return bad("expedition size must be positive".into());
            }
            if e.depart > tick || e.arrive <= tick || e.arrive != e.depart + self.travel_ticks(e.side, length) {
                return bad(format!("expedition {}->{} has inconsistent timing", e.from, e.to));
            }
        }
        let mut expeditions = expeditions;
        expeditions.sort_by_key(Expedition::sort_key);
        Ok(GameState {
            tick,
            nodes,
            expeditions,
            next_order_tick: [tick, tick],
            wake_tick: [Some(tick), Some(tick)],
            interrupted: [false, false],
            resolved: true,
            stream: splitmix64(tick as u64),
            events: 0,
        })
    }

    pub fn travel_ticks(&self, side: Side, length: u32) -> u32 {
        ((length as f64 / self.params.side(side).speed).ceil() as u32).max(1)
    }

    fn c2_gap(&self, side: Side) -> u32 {
        self.params.side(side).c2_min_delay.max(1)
    }

    pub fn validate_order(&self, state: &GameState, side: Side, order: &Order) -> Result<(), OrderError> {
        if state.tick < state.next_order_tick[side.index()] {
            return Err(OrderError::C2Violation { next_order_tick: state.next_order_tick[side.index()] });
        }
        match *order {
            Order::Wait { ticks } => {
                if ticks == 0 {
                    return Err(OrderError::InvalidWait);
                }
            }
            Order::LaunchExpedition { size, from, to } => {
                let n = self.map.node_count();
                if from >= n {
                    return Err(OrderError::UnknownNode(from));
                }
                if to >= n {
                    return Err(OrderError::UnknownNode(to));
                }
                if state.nodes[from].owner != Some(side) {
                    return Err(OrderError::UnownedSource(from));
                }
                if self.map.arc_length(from, to).is_none() {
                    return Err(OrderError::NotAdjacent(from, to));
                }
                if !(size > 0.0 && size.is_finite()) {
                    return Err(OrderError::InvalidSize);
                }
                if size > state.nodes[from].garrison + STRENGTH_EPS {
                    return Err(OrderError::InsufficientForce(from));
                }
            }
        }
        Ok(())
    }

    /// Issue an order; after a launch the side decides again as soon as C2 allows.
    pub fn issue_order(&self, state: &mut GameState, side: Side, order: Order) -> Result<(), OrderError> {
        self.issue_order_then_wait(state, side, order, 0)
    }

    /// Issue an order and stay idle for `wait_after` ticks afterwards (launches only;
    /// a Wait order carries its own duration). The idle period is interruptible.
    pub fn issue_order_then_wait(
        &self,
        state: &mut GameState,
        side: Side,
        order: Order,
        wait_after: u32,
    ) -> Result<(), OrderError> {
        self.validate_order(state, side, &order)?;
        self.apply_order(state, side, order, wait_after, None);
        Ok(())
    }

    pub fn issue_order_logged(
        &self,
        state: &mut GameState,
        side: Side,
        order: Order,
        wait_after: u32,
        log: &mut Vec<GameEvent>,
    ) -> Result<(), OrderError> {
        self.validate_order(state, side, &order)?;
        self.apply_order(state, side, order, wait_after, Some(log));
        Ok(())
    }

    /// Ignore an interruption and keep the wait that was already scheduled.
    pub fn resume(&self, state: &mut GameState, side: Side) -> Result<(), OrderError> {
        let i = side.index();
        if !state.can_resume(side) {
            return Err(OrderError::NothingToResume);
        }
        state.interrupted[i] = false;
        Ok(())
    }

    fn apply_order(
        &self,
        state: &mut GameState,
        side: Side,
        order: Order,
        wait_after: u32,
        log: Option<&mut Vec<GameEvent>>,
    ) {
        let i = side.index();
        let t = state.tick;
        let gap = self.c2_gap(side);
        state.next_order_tick[i] = t + gap;
        state.interrupted[i] = false;
        state.events += 1;
        match order {
            Order::Wait { ticks } => {
                state.wake_tick[i] = if ticks == WAIT_FOREVER { None } else { t.checked_add(ticks) };
                if let Some(log) = log {
                    let ev = self.event(state, EventKind::Wait, Some(side), 0, 0, ticks as f64, 0.0);
                    log.push(ev);
                }
            }
            Order::LaunchExpedition { size, from, to } => {
                let node = &mut state.nodes[from];
                let moved = size.min(node.garrison);
                node.garrison -= moved;
                if node.garrison < STRENGTH_EPS {
                    node.garrison = 0.0;
                }
                let length = self.map.arc_length(from, to).expect("validated arc");
                let exp = Expedition {
                    side,
                    size: moved,
                    from,
                    to,
                    depart: t,
                    arrive: t + self.travel_ticks(side, length),
                };
                let pos = state.expeditions.partition_point(|e| e.sort_key() <= exp.sort_key());
                state.expeditions.insert(pos, exp);
                state.wake_tick[i] = Some(t + wait_after.max(1));
                state.interrupt(side.opponent());
                if let Some(log) = log {
                    let ev = self.event(state, EventKind::Launch, Some(side), from, to, moved, 0.0);
                    log.push(ev);
                }
            }
        }
    }

    pub fn is_terminal(&self, state: &GameState) -> bool {
        state.tick >= self.params.max_ticks
            || state.strength_exhausted(Side::Blue)
            || state.strength_exhausted(Side::Red)
    }

    /// Node points per owned node plus unit points per unit of strength, own minus opponent.
    pub fn material_score(&self, state: &GameState, side: Side) -> f64 {
        self.side_material(state, side) - self.side_material(state, side.opponent())
    }

    fn side_material(&self, state: &GameState, side: Side) -> f64 {
        self.params.node_points as f64 * state.owned_nodes(side) as f64
            + self.params.unit_points as f64 * state.total_strength(side)
    }

    pub fn outcome(&self, state: &GameState) -> Outcome {
        let score = self.material_score(state, Side::Blue);
        if score > 0.0 {
            Outcome::BlueWin
        } else if score < 0.0 {
            Outcome::RedWin
        } else {
            Outcome::Draw
        }
    }

    /// Run the simulation forward until a side must decide or the game ends.
    pub fn advance(&self, state: &mut GameState) -> DecisionRequest {
        self.advance_inner(state, None, u32::MAX).expect("max ticks bounds every game")
    }

    pub fn advance_logged(&self, state: &mut GameState, log: &mut Vec<GameEvent>) -> DecisionRequest {
        self.advance_inner(state, Some(log), u32::MAX).expect("max ticks bounds every game")
    }

    /// Like [`World::advance`], but stops once nothing more can happen at or before
    /// `limit`, leaving the state at tick `limit` and returning `None`.
    pub fn advance_until(&self, state: &mut GameState, limit: u32) -> Option<DecisionRequest> {
        self.advance_inner(state, None, limit)
    }

    fn advance_inner(
        &self,
        state: &mut GameState,
        mut log: Option<&mut Vec<GameEvent>>,
        limit: u32,
    ) -> Option<DecisionRequest> {
        loop {
            if !state.resolved {
                self.resolve_tick(state, log.as_deref_mut());
                state.resolved = true;
            }
            if self.is_terminal(state) {
                return Some(DecisionRequest::Terminal);
            }
            for side in Side::BOTH {
                if state.decision_due(side) {
                    return Some(DecisionRequest::Decide(side));
                }
            }
            let next = self.next_event_tick(state);
            if next > limit {
                state.tick = state.tick.max(limit);
                return None;
            }
            state.tick = next;
            state.resolved = false;
        }
    }

    /// Earliest tick after the current one at which anything can happen.
    pub fn next_event_tick(&self, state: &GameState) -> u32 {
        let t = state.tick;
        let mut next = self.params.max_ticks.max(t + 1);
        for e in &state.expeditions {
            if e.arrive > t {
                next = next.min(e.arrive);
            }
        }
        if self.params.arc_battles {
            let exps = &state.expeditions;
            for (k, e1) in exps.iter().enumerate() {
                for e2 in &exps[k + 1..] {
                    if opposed_on_arc(e1, e2) {
                        next = next.min(meeting_tick(e1, e2).max(t + 1));
                    }
                }
            }
        }
        for side in Side::BOTH {
            if let Some(d) = state.decision_tick(side) {
                next = next.min(d.max(t + 1));
            }
        }
        next
    }

    fn resolve_tick(&self, state: &mut GameState, mut log: Option<&mut Vec<GameEvent>>) {
        let t = state.tick;
        let mut any = false;
        if self.params.arc_battles {
            while let Some((i, j)) = Self::find_meeting(state) {
                any = true;
                self.arc_battle(state, i, j, log.as_deref_mut());
            }
        }
        if state.expeditions.iter().any(|e| e.arrive == t) {
            any = true;
            let mut arriving: Vec<Expedition> = state.expeditions.iter().filter(|e| e.arrive == t).copied().collect();
            arriving.sort_by(|a, b| {
                (a.to, a.side, a.from, a.depart, a.size.to_bits())
                    .cmp(&(b.to, b.side, b.from, b.depart, b.size.to_bits()))
            });
            // Later arrivals stay in transit (and in the score) until their own turn.
            for exp in arriving {
                let pos = state
                    .expeditions
                    .iter()
                    .position(|e| e.sort_key() == exp.sort_key())
                    .expect("arrival still in transit");
                state.expeditions.remove(pos);
                self.arrive(state, exp, log.as_deref_mut());
            }
        }
        if any {
            state.events += 1;
        }
    }

    fn find_meeting(state: &GameState) -> Option<(usize, usize)> {
        let t = state.tick;
        let exps = &state.expeditions;
        for (i, e1) in exps.iter().enumerate() {
            for (j, e2) in exps.iter().enumerate().skip(i + 1) {
                if opposed_on_arc(e1, e2) && meeting_tick(e1, e2) <= t {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn arc_battle(&self, state: &mut GameState, i: usize, j: usize, log: Option<&mut Vec<GameEvent>>) {
        let (e1, e2) = (state.expeditions[i], state.expeditions[j]);
        let out = resolve_lanchester(
            e1.size,
            e2.size,
            self.params.side(e1.side).lanchester_coeff,
            self.params.side(e2.side).lanchester_coeff,
        );
        // j > i, so removing j first keeps i valid.
        match out.winner {
            BattleWinner::A => {
                state.expeditions.remove(j);
                state.expeditions[i].size = out.survivors;
            }
            BattleWinner::B => {
                state.expeditions[j].size = out.survivors;
                state.expeditions.remove(i);
            }
            BattleWinner::Draw => {
                state.expeditions.remove(j);
                state.expeditions.remove(i);
            }
        }
        state.expeditions.sort_by_key(Expedition::sort_key);
        state.interrupt(Side::Blue);
        state.interrupt(Side::Red);
        if let Some(log) = log {
            let winner = match out.winner {
                BattleWinner::A => Some(e1.side),
                BattleWinner::B => Some(e2.side),
                BattleWinner::Draw => None,
            };
            let blue = if e1.side == Side::Blue { e1 } else { e2 };
            let ev = self.event(state, EventKind::ArcBattle, winner, blue.from, blue.to, e1.size + e2.size, out.survivors);
            log.push(ev);
        }
    }

    fn arrive(&self, state: &mut GameState, exp: Expedition, log: Option<&mut Vec<GameEvent>>) {
        let node = state.nodes[exp.to];
        let (kind, survivors) = match node.owner {
            Some(owner) if owner == exp.side => {
                state.nodes[exp.to].garrison += exp.size;
                (EventKind::Reinforce, state.nodes[exp.to].garrison)
            }
            None => {
                state.nodes[exp.to] = NodeState { owner: Some(exp.side), garrison: exp.size };
                (EventKind::Occupy, exp.size)
            }
            Some(defender) => {
                let out = resolve_lanchester(
                    exp.size,
                    node.garrison,
                    self.params.side(exp.side).lanchester_coeff,
                    self.params.side(defender).lanchester_coeff,
                );
                state.interrupt(Side::Blue);
                state.interrupt(Side::Red);
                match out.winner {
                    BattleWinner::A => {
                        state.nodes[exp.to] = NodeState { owner: Some(exp.side), garrison: out.survivors };
                        (EventKind::Capture, out.survivors)
                    }
                    BattleWinner::B => {
                        state.nodes[exp.to].garrison = out.survivors;
                        (EventKind::Repulse, out.survivors)
                    }
                    BattleWinner::Draw => {
                        state.nodes[exp.to].garrison = 0.0;
                        (EventKind::Draw, 0.0)
                    }
                }
            }
        };
        if let Some(log) = log {
            let ev = self.event(state, kind, Some(exp.side), exp.from, exp.to, exp.size, survivors);
            log.push(ev);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn event(
        &self,
        state: &GameState,
        kind: EventKind,
        side: Option<Side>,
        from: NodeId,
        to: NodeId,
        size: f64,
        survivors: f64,
    ) -> GameEvent {
        GameEvent {
            tick: state.tick,
            side,
            kind,
            from,
            to,
            size,
            survivors,
            score_blue: self.material_score(state, Side::Blue),
        }
    }
}
