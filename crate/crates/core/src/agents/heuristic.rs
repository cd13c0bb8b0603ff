use crate::engine::{GameState, NodeId, Order, Side, World};

use super::{HeuristicAction, HeuristicParams, HEURISTIC_WAIT};

const RATIO_EPS: f64 = 1e-9;

/// Per-decision view of who threatens what.
pub struct Threats<'a> {
    world: &'a World,
    state: &'a GameState,
    side: Side,
    /// Enemy strength in transit towards each node.
    inbound: Vec<f64>,
    /// Node has an enemy-owned neighbour.
    enemy_adjacent: Vec<bool>,
}

impl<'a> Threats<'a> {
    pub fn new(world: &'a World, state: &'a GameState, side: Side) -> Threats<'a> {
        let n = world.map().node_count();
        let enemy = side.opponent();
        let mut inbound = vec![0.0; n];
        for e in state.expeditions().iter().filter(|e| e.side == enemy) {
            inbound[e.to] += e.size;
        }
        let enemy_adjacent = (0..n)
            .map(|v| world.map().neighbors(v).iter().any(|nb| state.owner(nb.node) == Some(enemy)))
            .collect();
        Threats { world, state, side, inbound, enemy_adjacent }
    }

    fn owned(&self, node: NodeId) -> bool {
        self.state.owner(node) == Some(self.side)
    }

    fn enemy(&self, node: NodeId) -> bool {
        self.state.owner(node) == Some(self.side.opponent())
    }

    /// No enemy neighbour and nothing inbound. Meaningful for owned and neutral nodes.
    pub fn unthreatened(&self, node: NodeId) -> bool {
        !self.enemy(node) && !self.enemy_adjacent[node] && self.inbound[node] <= 0.0
    }

    pub fn inbound(&self, node: NodeId) -> f64 {
        self.inbound[node]
    }

    fn defender_strength(&self, node: NodeId, count_inbound: bool) -> f64 {
        let mut s = self.state.garrison(node);
        if count_inbound {
            s += self
                .state
                .expeditions()
                .iter()
                .filter(|e| e.to == node && e.side != self.side)
                .map(|e| e.size)
                .sum::<f64>();
        }
        s
    }

    fn owned_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.world.map().node_count()).filter(move |&v| self.owned(v))
    }
}

/// Smallest multiple of 10% of `source` that brings `base` up to `required`, or the
/// whole source when even that falls short.
fn tenths_needed(base: f64, source: f64, required: f64) -> (f64, bool) {
    for k in 1..=10 {
        let sent = if k == 10 { source } else { k as f64 * source / 10.0 };
        if base + sent >= required - RATIO_EPS {
            return (sent, true);
        }
    }
    (source, false)
}

pub fn attack_order(world: &World, state: &GameState, side: Side, offence: f64) -> Option<Order> {
    attack_with(&Threats::new(world, state, side), offence, true)
}

fn attack_with(t: &Threats, offence: f64, count_inbound: bool) -> Option<Order> {
    // (odds, target, source); higher odds first, then lower target id, then lower source id.
    let mut best: Option<(f64, NodeId, NodeId)> = None;
    for a in t.owned_nodes() {
        let g = t.state.garrison(a);
        if g <= 0.0 {
            continue;
        }
        for nb in t.world.map().neighbors(a) {
            if !t.enemy(nb.node) {
                continue;
            }
            let defender = t.defender_strength(nb.node, count_inbound);
            if g < offence * defender - RATIO_EPS {
                continue;
            }
            let odds = if defender > 0.0 { g / defender } else { f64::INFINITY };
            let better = match best {
                None => true,
                Some((bo, bt, bs)) => odds > bo || (odds == bo && (nb.node, a) < (bt, bs)),
            };
            if better {
                best = Some((odds, nb.node, a));
            }
        }
    }
    best.map(|(_, to, from)| Order::LaunchExpedition { size: t.state.garrison(from), from, to })
}

pub fn withdraw_order(world: &World, state: &GameState, side: Side, defence: f64) -> Option<Order> {
    withdraw_with(&Threats::new(world, state, side), defence)
}

fn withdraw_with(t: &Threats, defence: f64) -> Option<Order> {
    for b in t.owned_nodes() {
        let g = t.state.garrison(b);
        let inbound = t.inbound(b);
        if g <= 0.0 || inbound <= 0.0 || g >= defence * inbound {
            continue;
        }
        let refuge = t
            .world
            .map()
            .neighbors(b)
            .iter()
            .filter(|nb| t.unthreatened(nb.node))
            .min_by_key(|nb| (nb.length, nb.node));
        if let Some(nb) = refuge {
            return Some(Order::LaunchExpedition { size: g, from: b, to: nb.node });
        }
    }
    None
}

pub fn reinforce_order(world: &World, state: &GameState, side: Side, defence: f64) -> Option<Order> {
    reinforce_with(&Threats::new(world, state, side), defence)
}

fn reinforce_with(t: &Threats, defence: f64) -> Option<Order> {
    let map = t.world.map();
    for b in t.owned_nodes() {
        let biggest_threat = map
            .neighbors(b)
            .iter()
            .filter(|nb| t.enemy(nb.node))
            .map(|nb| t.state.garrison(nb.node))
            .fold(0.0, f64::max);
        let g = t.state.garrison(b);
        let required = defence * biggest_threat;
        if biggest_threat <= 0.0 || g >= required {
            continue;
        }
        let source = map
            .neighbors(b)
            .iter()
            .map(|nb| nb.node)
            .filter(|&u| t.owned(u) && t.unthreatened(u) && t.state.garrison(u) > 0.0)
            .max_by(|&u, &v| {
                t.state
                    .garrison(u)
                    .total_cmp(&t.state.garrison(v))
                    .then(v.cmp(&u))
            });
        if let Some(u) = source {
            let (sent, _) = tenths_needed(g, t.state.garrison(u), required);
            return Some(Order::LaunchExpedition { size: sent, from: u, to: b });
        }
    }
    None
}

pub fn redeploy_order(world: &World, state: &GameState, side: Side, offence: f64) -> Option<Order> {
    redeploy_with(&Threats::new(world, state, side), offence, true)
}

fn redeploy_with(t: &Threats, offence: f64, count_inbound: bool) -> Option<Order> {
    let map = t.world.map();
    // (sent, target, source)
    let mut best: Option<(f64, NodeId, NodeId)> = None;
    for target in t.owned_nodes() {
        let g = t.state.garrison(target);
        for enemy in map.neighbors(target).iter().filter(|nb| t.enemy(nb.node)) {
            let required = offence * t.defender_strength(enemy.node, count_inbound);
            if g >= required - RATIO_EPS {
                continue;
            }
            for src in map.neighbors(target) {
                let u = src.node;
                if !(t.owned(u) && t.unthreatened(u) && t.state.garrison(u) > 0.0) {
                    continue;
                }
                let (sent, enough) = tenths_needed(g, t.state.garrison(u), required);
                if !enough {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bs, bt, bu)) => sent < bs || (sent == bs && (target, u) < (bt, bu)),
                };
                if better {
                    best = Some((sent, target, u));
                }
            }
        }
    }
    best.map(|(size, to, from)| Order::LaunchExpedition { size, from, to })
}

/// Runs the action list in order and executes the first one that applies.
pub fn heuristic_decide(world: &World, state: &GameState, side: Side, params: &HeuristicParams) -> Order {
    let t = Threats::new(world, state, side);
    for action in &params.actions {
        let order = match action {
            HeuristicAction::Attack => attack_with(&t, params.offence, params.count_inbound),
            HeuristicAction::Withdraw => withdraw_with(&t, params.defence),
            HeuristicAction::Reinforce => reinforce_with(&t, params.defence),
            HeuristicAction::Redeploy => redeploy_with(&t, params.offence, params.count_inbound),
        };
        if let Some(order) = order {
            return order;
        }
    }
    Order::Wait { ticks: HEURISTIC_WAIT }
}
