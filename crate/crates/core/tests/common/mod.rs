//! Independent oracles shared by the integration tests and the acceptance harness.

#![allow(dead_code)]

use groundwar::engine::{
    ArcSpec, DecisionRequest, EventKind, Expedition, GameEvent, GameParams, GameState, MapGraph, NodeSpec, NodeState,
    Order, Side, SideParams, World, WAIT_FOREVER,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One scripted decision. `Launch` falls back to a wait when the source is unusable.
#[derive(Clone, Copy, Debug)]
pub enum Step {
    Launch { from: usize, arc: usize, tenths: u32, wait: u32 },
    Wait(u32),
    /// Keep an interrupted wait; a plain wait of the given length if nothing can resume.
    Resume(u32),
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub map: MapGraph,
    pub params: GameParams,
    pub nodes: Vec<NodeState>,
    pub expeditions: Vec<Expedition>,
    /// Start from `create_state` (blue, red) rather than explicit parts.
    pub starts: Option<(usize, usize)>,
    pub scripts: [Vec<Step>; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub events: Vec<GameEvent>,
    /// (tick, side, step index) of every decision answered.
    pub decisions: Vec<(u32, Side, usize)>,
    pub final_tick: u32,
    pub final_nodes: Vec<NodeState>,
    pub final_expeditions: Vec<Expedition>,
}

fn small_map(rng: &mut ChaCha8Rng) -> MapGraph {
    let n = rng.gen_range(2..=6);
    let nodes: Vec<NodeSpec> = (0..n).map(|id| NodeSpec { id, x: id as f64, y: 0.0 }).collect();
    let mut arcs = Vec::new();
    let mut linked = vec![vec![false; n]; n];
    for b in 1..n {
        let a = rng.gen_range(0..b);
        linked[a][b] = true;
        arcs.push(ArcSpec { a, b, length: rng.gen_range(1..=15) });
    }
    for _ in 0..rng.gen_range(0..n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (a, b) = (a.min(b), a.max(b));
        if a != b && !linked[a][b] {
            linked[a][b] = true;
            arcs.push(ArcSpec { a, b, length: rng.gen_range(1..=15) });
        }
    }
    MapGraph::new(nodes, arcs).expect("tree plus chords is connected")
}

fn side_params(rng: &mut ChaCha8Rng) -> SideParams {
    SideParams {
        speed: [0.5, 1.0, 1.5, 2.0, 3.0][rng.gen_range(0..5)],
        lanchester_coeff: rng.gen_range(0.5..2.0),
        c2_min_delay: rng.gen_range(0..=15),
    }
}

fn script(rng: &mut ChaCha8Rng, n: usize) -> Vec<Step> {
    (0..rng.gen_range(0..30))
        .map(|_| match rng.gen_range(0..10) {
            0..=5 => Step::Launch {
                from: rng.gen_range(0..n),
                arc: rng.gen_range(0..6),
                tenths: rng.gen_range(1..=10),
                wait: rng.gen_range(0..40),
            },
            6..=7 => Step::Wait(rng.gen_range(1..60)),
            8 => Step::Wait(WAIT_FOREVER),
            _ => Step::Resume(rng.gen_range(1..30)),
        })
        .collect()
}

/// A random small position with random rules and scripted orders for both sides.
pub fn scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = small_map(&mut rng);
    let n = map.node_count();
    let params = GameParams {
        max_ticks: rng.gen_range(60..300),
        blue: side_params(&mut rng),
        red: side_params(&mut rng),
        arc_battles: rng.gen_bool(0.8),
        ..GameParams::default()
    };
    let world = World::new(map.clone(), params).expect("valid params");
    let scripts = [script(&mut rng, n), script(&mut rng, n)];
    if rng.gen_bool(0.5) {
        let blue = rng.gen_range(0..n);
        let red = (blue + rng.gen_range(1..n)) % n;
        return Scenario { map, params, nodes: Vec::new(), expeditions: Vec::new(), starts: Some((blue, red)), scripts };
    }
    let mut nodes: Vec<NodeState> = (0..n)
        .map(|_| match rng.gen_range(0..3) {
            0 => NodeState { owner: None, garrison: 0.0 },
            1 => NodeState { owner: Some(Side::Blue), garrison: rng.gen_range(0.0..120.0) },
            _ => NodeState { owner: Some(Side::Red), garrison: rng.gen_range(0.0..120.0) },
        })
        .collect();
    nodes[0] = NodeState { owner: Some(Side::Blue), garrison: rng.gen_range(10.0..120.0) };
    nodes[n - 1] = NodeState { owner: Some(Side::Red), garrison: rng.gen_range(10.0..120.0) };
    let mut expeditions = Vec::new();
    for arc in map.arcs() {
        for (from, to) in [(arc.a, arc.b), (arc.b, arc.a)] {
            if rng.gen_bool(0.3) {
                let side = if rng.gen_bool(0.5) { Side::Blue } else { Side::Red };
                let travel = world.travel_ticks(side, arc.length);
                expeditions.push(Expedition { side, size: rng.gen_range(1.0..80.0), from, to, depart: 0, arrive: travel });
            }
        }
    }
    Scenario { map, params, nodes, expeditions, starts: None, scripts }
}

fn scripted_step(step: Option<&Step>) -> Step {
    step.copied().unwrap_or(Step::Wait(WAIT_FOREVER))
}

fn launch_size(garrison: f64, tenths: u32) -> f64 {
    if tenths == 10 {
        garrison
    } else {
        garrison * tenths as f64 / 10.0
    }
}

/// Play the scenario through the event-driven engine.
pub fn run_engine(sc: &Scenario) -> Trace {
    let world = World::new(sc.map.clone(), sc.params).expect("valid params");
    let mut state: GameState = match sc.starts {
        Some((b, r)) => world.create_state(b, r, 100.0).expect("valid start"),
        None => world.state_from_parts(0, sc.nodes.clone(), sc.expeditions.clone()).expect("valid parts"),
    };
    let mut events = Vec::new();
    let mut decisions = Vec::new();
    let mut cursor = [0usize; 2];
    while let DecisionRequest::Decide(side) = world.advance_logged(&mut state, &mut events) {
        let i = side.index();
        decisions.push((state.tick(), side, cursor[i]));
        let step = scripted_step(sc.scripts[i].get(cursor[i]));
        cursor[i] += 1;
        let (order, wait_after) = match step {
            Step::Resume(_) if state.can_resume(side) => {
                world.resume(&mut state, side).expect("resumable");
                continue;
            }
            Step::Resume(w) | Step::Wait(w) => (Order::Wait { ticks: w.max(1) }, 0),
            Step::Launch { from, arc, tenths, wait } => {
                let node = state.node(from);
                if node.owner == Some(side) && node.garrison > 0.0 {
                    let nbs = world.map().neighbors(from);
                    let to = nbs[arc % nbs.len()].node;
                    (Order::LaunchExpedition { size: launch_size(node.garrison, tenths), from, to }, wait)
                } else {
                    (Order::Wait { ticks: wait.max(1) }, 0)
                }
            }
        };
        world
            .issue_order_logged(&mut state, side, order, wait_after, &mut events)
            .expect("scripted orders are legal");
    }
    Trace {
        events,
        decisions,
        final_tick: state.tick(),
        final_nodes: state.nodes().to_vec(),
        final_expeditions: state.expeditions().to_vec(),
    }
}

/// Naive tick-by-tick reimplementation of the rules.
struct Naive<'a> {
    map: &'a MapGraph,
    p: GameParams,
    tick: u32,
    nodes: Vec<NodeState>,
    exps: Vec<Expedition>,
    next_order: [u32; 2],
    wake: [Option<u32>; 2],
    interrupted: [bool; 2],
    events: Vec<GameEvent>,
}

fn key(e: &Expedition) -> (u32, Side, usize, usize, u32, u64) {
    (e.arrive, e.side, e.from, e.to, e.depart, e.size.to_bits())
}

fn square_law(a: f64, b: f64, alpha: f64, beta: f64) -> (i8, f64) {
    let inv = alpha * a * a - beta * b * b;
    if inv > 0.0 {
        (1, (inv / alpha).sqrt())
    } else if inv < 0.0 {
        (-1, (-inv / beta).sqrt())
    } else {
        (0, 0.0)
    }
}

impl Naive<'_> {
    fn side(&self, s: Side) -> &SideParams {
        if s == Side::Blue {
            &self.p.blue
        } else {
            &self.p.red
        }
    }

    fn strength(&self, s: Side) -> f64 {
        let g: f64 = self.nodes.iter().filter(|n| n.owner == Some(s)).map(|n| n.garrison).sum();
        let m: f64 = self.exps.iter().filter(|e| e.side == s).map(|e| e.size).sum();
        g + m
    }

    fn material(&self, s: Side) -> f64 {
        let owned = self.nodes.iter().filter(|n| n.owner == Some(s)).count();
        self.p.node_points as f64 * owned as f64 + self.p.unit_points as f64 * self.strength(s)
    }

    fn score_blue(&self) -> f64 {
        self.material(Side::Blue) - self.material(Side::Red)
    }

    fn log(&mut self, kind: EventKind, side: Option<Side>, from: usize, to: usize, size: f64, survivors: f64) {
        let ev = GameEvent { tick: self.tick, side, kind, from, to, size, survivors, score_blue: self.score_blue() };
        self.events.push(ev);
    }

    fn interrupt(&mut self, s: Side) {
        let i = s.index();
        let expired = matches!(self.wake[i], Some(w) if w <= self.tick);
        if !expired {
            self.interrupted[i] = true;
        }
    }

    fn met(&self, a: &Expedition, b: &Expedition) -> bool {
        if a.side == b.side || a.from != b.to || a.to != b.from {
            return false;
        }
        let t = self.tick as u64;
        let (ta, tb) = ((a.arrive - a.depart) as u64, (b.arrive - b.depart) as u64);
        // Fractions of the arc covered sum to at least one.
        (t - a.depart as u64) * tb + (t - b.depart as u64) * ta >= ta * tb
    }

    fn resolve(&mut self) {
        if self.p.arc_battles {
            'again: loop {
                for i in 0..self.exps.len() {
                    for j in i + 1..self.exps.len() {
                        if self.met(&self.exps[i], &self.exps[j]) {
                            let (a, b) = (self.exps[i], self.exps[j]);
                            let (w, s) = square_law(
                                a.size,
                                b.size,
                                self.side(a.side).lanchester_coeff,
                                self.side(b.side).lanchester_coeff,
                            );
                            self.exps.remove(j);
                            self.exps.remove(i);
                            let winner = match w {
                                1 => Some(a),
                                -1 => Some(b),
                                _ => None,
                            };
                            if let Some(mut e) = winner {
                                e.size = s;
                                self.exps.push(e);
                            }
                            self.exps.sort_by_key(key);
                            self.interrupt(Side::Blue);
                            self.interrupt(Side::Red);
                            let blue = if a.side == Side::Blue { a } else { b };
                            self.log(EventKind::ArcBattle, winner.map(|e| e.side), blue.from, blue.to, a.size + b.size, s);
                            continue 'again;
                        }
                    }
                }
                break;
            }
        }
        let mut arriving: Vec<Expedition> = self.exps.iter().filter(|e| e.arrive == self.tick).copied().collect();
        arriving.sort_by(|a, b| {
            (a.to, a.side, a.from, a.depart, a.size.to_bits()).cmp(&(b.to, b.side, b.from, b.depart, b.size.to_bits()))
        });
        for e in arriving {
            let pos = self.exps.iter().position(|x| key(x) == key(&e)).unwrap();
            self.exps.remove(pos);
            let node = self.nodes[e.to];
            match node.owner {
                Some(o) if o == e.side => {
                    self.nodes[e.to].garrison += e.size;
                    let g = self.nodes[e.to].garrison;
                    self.log(EventKind::Reinforce, Some(e.side), e.from, e.to, e.size, g);
                }
                None => {
                    self.nodes[e.to] = NodeState { owner: Some(e.side), garrison: e.size };
                    self.log(EventKind::Occupy, Some(e.side), e.from, e.to, e.size, e.size);
                }
                Some(d) => {
                    let (w, s) =
                        square_law(e.size, node.garrison, self.side(e.side).lanchester_coeff, self.side(d).lanchester_coeff);
                    self.interrupt(Side::Blue);
                    self.interrupt(Side::Red);
                    let kind = match w {
                        1 => {
                            self.nodes[e.to] = NodeState { owner: Some(e.side), garrison: s };
                            EventKind::Capture
                        }
                        -1 => {
                            self.nodes[e.to].garrison = s;
                            EventKind::Repulse
                        }
                        _ => {
                            self.nodes[e.to].garrison = 0.0;
                            EventKind::Draw
                        }
                    };
                    self.log(kind, Some(e.side), e.from, e.to, e.size, s);
                }
            }
        }
    }

    fn terminal(&self) -> bool {
        self.tick >= self.p.max_ticks || self.strength(Side::Blue) <= 0.0 || self.strength(Side::Red) <= 0.0
    }

    fn due(&self, s: Side) -> bool {
        let i = s.index();
        self.tick >= self.next_order[i] && (self.interrupted[i] || matches!(self.wake[i], Some(w) if w <= self.tick))
    }

    fn can_resume(&self, s: Side) -> bool {
        let i = s.index();
        self.interrupted[i] && !matches!(self.wake[i], Some(w) if w <= self.tick)
    }

    fn order(&mut self, s: Side, step: Step) {
        let i = s.index();
        let t = self.tick;
        let wait_order = |me: &mut Self, w: u32| {
            me.next_order[i] = t + me.side(s).c2_min_delay.max(1);
            me.interrupted[i] = false;
            me.wake[i] = if w == WAIT_FOREVER { None } else { Some(t + w) };
            me.log(EventKind::Wait, Some(s), 0, 0, w as f64, 0.0);
        };
        match step {
            Step::Resume(_) if self.can_resume(s) => self.interrupted[i] = false,
            Step::Resume(w) | Step::Wait(w) => wait_order(self, w.max(1)),
            Step::Launch { from, arc, tenths, wait } => {
                let node = self.nodes[from];
                if !(node.owner == Some(s) && node.garrison > 0.0) {
                    wait_order(self, wait.max(1));
                    return;
                }
                let nb = self.map.neighbors(from)[arc % self.map.degree(from)];
                let size = launch_size(node.garrison, tenths);
                let moved = size.min(node.garrison);
                let mut left = node.garrison - moved;
                if left < 1e-9 {
                    left = 0.0;
                }
                self.nodes[from].garrison = left;
                let travel = ((nb.length as f64 / self.side(s).speed).ceil() as u32).max(1);
                self.exps.push(Expedition { side: s, size: moved, from, to: nb.node, depart: t, arrive: t + travel });
                self.exps.sort_by_key(key);
                self.next_order[i] = t + self.side(s).c2_min_delay.max(1);
                self.interrupted[i] = false;
                self.wake[i] = Some(t + wait.max(1));
                self.interrupt(s.opponent());
                self.log(EventKind::Launch, Some(s), from, nb.node, moved, 0.0);
            }
        }
    }
}

/// Play the scenario one tick at a time, without any event scheduling.
pub fn run_oracle(sc: &Scenario) -> Trace {
    let (nodes, mut exps) = match sc.starts {
        Some((b, r)) => {
            let mut nodes = vec![NodeState { owner: None, garrison: 0.0 }; sc.map.node_count()];
            nodes[b] = NodeState { owner: Some(Side::Blue), garrison: 100.0 };
            nodes[r] = NodeState { owner: Some(Side::Red), garrison: 100.0 };
            (nodes, Vec::new())
        }
        None => (sc.nodes.clone(), sc.expeditions.clone()),
    };
    exps.sort_by_key(key);
    let mut g = Naive {
        map: &sc.map,
        p: sc.params,
        tick: 0,
        nodes,
        exps,
        next_order: [0, 0],
        wake: [Some(0), Some(0)],
        interrupted: [false, false],
        events: Vec::new(),
    };
    let mut decisions = Vec::new();
    let mut cursor = [0usize; 2];
    'game: loop {
        g.resolve();
        loop {
            if g.terminal() {
                break 'game;
            }
            let Some(side) = Side::BOTH.into_iter().find(|&s| g.due(s)) else { break };
            let i = side.index();
            decisions.push((g.tick, side, cursor[i]));
            let step = scripted_step(sc.scripts[i].get(cursor[i]));
            cursor[i] += 1;
            g.order(side, step);
        }
        g.tick += 1;
    }
    Trace { events: g.events, decisions, final_tick: g.tick, final_nodes: g.nodes, final_expeditions: g.exps }
}

/// Integrate dA/dt = -beta B, dB/dt = -alpha A with classical RK4 until one force is
/// exhausted, halving the step whenever it would overshoot zero.
pub fn lanchester_ode(a: f64, b: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let f = |x: f64, y: f64| (-beta * y, -alpha * x);
    let (mut x, mut y) = (a, b);
    let mut h = 1e-3 / (alpha * beta).sqrt();
    while h > 1e-15 {
        let (k1x, k1y) = f(x, y);
        let (k2x, k2y) = f(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
        let (k3x, k3y) = f(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
        let (k4x, k4y) = f(x + h * k3x, y + h * k3y);
        let nx = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        let ny = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        if nx <= 0.0 || ny <= 0.0 {
            h *= 0.5;
            continue;
        }
        x = nx;
        y = ny;
    }
    (x.max(0.0), y.max(0.0))
}

/// A generated map advanced by random play to a decision point of some side.
pub fn midgame(seed: u64) -> (World, GameState, Side) {
    use groundwar::experiments::{run_map, start_nodes};
    use groundwar::search::{AgentSpec, Player, SearchSettings};
    let world = World::new(run_map(seed, 0), GameParams::default()).expect("default params");
    let (b, r) = start_nodes(world.map().node_count(), seed);
    let mut state = world.create_state(b, r, 100.0).expect("valid start");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut players = [
        Player::new(AgentSpec::Random, SearchSettings::default(), rng.gen()),
        Player::new(AgentSpec::Random, SearchSettings::default(), rng.gen()),
    ];
    let target = rng.gen_range(0..12);
    let mut last = None;
    for _ in 0..=target {
        match world.advance(&mut state) {
            DecisionRequest::Decide(side) => {
                last = Some((state.clone(), side));
                let action = players[side.index()].decide(&world, &state, side).expect("random agents never fail");
                groundwar::search::play(&world, &mut state, side, action);
            }
            DecisionRequest::Terminal => break,
        }
    }
    let (state, side) = last.expect("the opening is a decision point");
    (world, state, side)
}

/// Blue holds one node next to Red's only, much weaker, node. Other arcs lead to
/// neutral nodes too far away to reach within a planning horizon. Returns the world,
/// the position with Blue to move, and the smallest attack that captures Red's node.
pub fn dominant_attack(seed: u64) -> (World, GameState, usize, usize, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5);
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        ids.swap(i, rng.gen_range(0..=i));
    }
    let (blue, red) = (ids[0], ids[1]);
    let mut arcs = vec![ArcSpec { a: blue.min(red), b: blue.max(red), length: rng.gen_range(3..=20) }];
    for &far in &ids[2..] {
        arcs.push(ArcSpec { a: blue.min(far), b: blue.max(far), length: rng.gen_range(150..=250) });
    }
    let nodes = (0..n).map(|id| NodeSpec { id, x: id as f64, y: 0.0 }).collect();
    let world = World::new(MapGraph::new(nodes, arcs).expect("star is connected"), GameParams::default())
        .expect("default params");
    let g = rng.gen_range(60.0..140.0);
    let weak = g * rng.gen_range(0.05..0.25);
    let mut state_nodes = vec![NodeState { owner: None, garrison: 0.0 }; n];
    state_nodes[blue] = NodeState { owner: Some(Side::Blue), garrison: g };
    state_nodes[red] = NodeState { owner: Some(Side::Red), garrison: weak };
    let state = world.state_from_parts(0, state_nodes, Vec::new()).expect("valid parts");
    (world, state, blue, red, weak)
}

pub fn is_capture(order: &Order, blue: usize, red: usize, weak: f64) -> bool {
    matches!(*order, Order::LaunchExpedition { size, from, to } if from == blue && to == red && size > weak)
}

/// `P(X <= k)` for `X ~ Binomial(n, num/den)` summed exactly over the mass function.
pub fn exact_cdf(k: u64, n: u64, num: u32, den: u32) -> f64 {
    let a = BigUint::from(num);
    let c = BigUint::from(den - num);
    let mut a_pow = vec![BigUint::from(1u32)];
    let mut c_pow = vec![BigUint::from(1u32)];
    for i in 1..=n as usize {
        a_pow.push(&a_pow[i - 1] * &a);
        c_pow.push(&c_pow[i - 1] * &c);
    }
    let mut choose = BigUint::from(1u32);
    let mut below = BigUint::from(0u32);
    for i in 0..=k {
        below += &choose * &a_pow[i as usize] * &c_pow[(n - i) as usize];
        choose = choose * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    let total = BigUint::from(den).pow(n as u32);
    let shift = 64 * ((n as usize * 10) / 64 + 4);
    let q: BigUint = (below << shift) / total;
    let bits = q.bits() as i64;
    if bits == 0 {
        return 0.0;
    }
    let drop = (bits - 62).max(0);
    let top = (&q >> drop as usize).to_u64_digits().first().copied().unwrap_or(0);
    top as f64 * 2f64.powi((drop - shift as i64) as i32)
}

/// A random separable-plus-coupled unimodal landscape on `sizes` with its unique peak.
pub fn landscape(rng: &mut ChaCha8Rng, sizes: &[usize]) -> (Vec<usize>, Vec<f64>) {
    let peak: Vec<usize> = sizes.iter().map(|&n| rng.gen_range(0..n)).collect();
    let weights: Vec<f64> = sizes.iter().map(|_| rng.gen_range(0.5..2.0)).collect();
    (peak, weights)
}

pub fn height(point: &[usize], peak: &[usize], weights: &[f64]) -> f64 {
    let d: Vec<f64> = point.iter().zip(peak).map(|(&p, &q)| (p as f64 - q as f64).abs()).collect();
    -d.iter().zip(weights).map(|(d, w)| w * d).sum::<f64>() - 0.3 * d[0] * d[1]
}
