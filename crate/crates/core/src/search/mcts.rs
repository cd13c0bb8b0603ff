use std::collections::HashMap;

use rand::Rng;

use crate::actionspace::{sample_distinct_actions, Action};
use crate::engine::{DecisionRequest, GameState, Side, StateKey, World};

use super::{discounted, model_step, play, rollout_step, FinalSelection, MctsConfig, OpponentModel, SearchError, SearchOutcome};

/// Statistics kept for one decision state. The action set is fixed when the node is created.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub actions: Vec<Action>,
    pub visits: Vec<u32>,
    pub mean: Vec<f64>,
    pub total: u32,
}

impl TreeNode {
    fn new(actions: Vec<Action>) -> TreeNode {
        let n = actions.len();
        TreeNode { actions, visits: vec![0; n], mean: vec![0.0; n], total: 0 }
    }

    fn update(&mut self, a: usize, value: f64) {
        self.total += 1;
        self.visits[a] += 1;
        self.mean[a] += (value - self.mean[a]) / self.visits[a] as f64;
    }

    /// Visit-weighted mean over actions.
    pub fn value(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let sum: f64 = self.visits.iter().zip(&self.mean).map(|(&n, &q)| n as f64 * q).sum();
        sum / self.total as f64
    }
}

fn argmax_random<R: Rng + ?Sized>(scores: impl Iterator<Item = f64>, rng: &mut R) -> Option<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<usize> = Vec::new();
    for (i, s) in scores.enumerate() {
        if s.is_nan() {
            continue;
        }
        if s > best {
            best = s;
            ties.clear();
            ties.push(i);
        } else if s == best {
            ties.push(i);
        }
    }
    match ties.len() {
        0 => None,
        1 => Some(ties[0]),
        n => Some(ties[rng.gen_range(0..n)]),
    }
}

struct Tree {
    side: Side,
    table: HashMap<StateKey, TreeNode>,
    path: Vec<(StateKey, usize)>,
    /// Still descending this iteration (no expansion or cycle yet).
    active: bool,
    /// The tree was consulted this iteration.
    touched: bool,
    /// Sum and count of values backed up in iterations that consulted the tree.
    entry: (f64, u32),
}

enum TreeMove {
    Descend,
    /// Left the tree this iteration; the caller switches to rollout play.
    Left,
}

impl Tree {
    fn new(side: Side) -> Tree {
        Tree { side, table: HashMap::new(), path: Vec::new(), active: true, touched: false, entry: (0.0, 0) }
    }

    fn expand<R: Rng + ?Sized>(&mut self, world: &World, state: &GameState, key: StateKey, k: usize, rng: &mut R) {
        let actions = sample_distinct_actions(world, state, self.side, k, rng);
        self.table.insert(key, TreeNode::new(actions));
    }

    /// One step of tree policy at a decision point of this tree's side.
    fn step<R: Rng + ?Sized>(
        &mut self,
        world: &World,
        state: &mut GameState,
        config: &MctsConfig,
        rng: &mut R,
    ) -> TreeMove {
        self.touched = true;
        let key = state.state_key();
        if self.path.iter().any(|(k, _)| *k == key) {
            self.active = false;
            return TreeMove::Left;
        }
        let Some(node) = self.table.get(&key) else {
            self.expand(world, state, key, config.actions_per_node, rng);
            self.active = false;
            return TreeMove::Left;
        };
        let parent = node.total;
        let c = config.exploration_c;
        let a = argmax_random(
            node.visits.iter().zip(&node.mean).map(|(&n, &q)| super::uct_value(q, n, parent, c)),
            rng,
        )
        .expect("nodes always hold at least one action");
        let action = node.actions[a];
        self.path.push((key, a));
        play(world, state, self.side, action);
        TreeMove::Descend
    }

    fn backup(&mut self, value: f64) {
        for (key, a) in self.path.drain(..) {
            self.table.get_mut(&key).expect("path nodes exist").update(a, value);
        }
        if self.touched {
            self.entry.0 += value;
            self.entry.1 += 1;
        }
        self.active = true;
        self.touched = false;
    }
}

/// Single-tree MCTS; the opponent follows `model` at its decision points.
/// `OpponentModel::MctsTree` runs the dual-tree variant.
pub fn mcts_decide<R: Rng + ?Sized>(
    world: &World,
    state: &GameState,
    side: Side,
    config: &MctsConfig,
    model: &OpponentModel,
    rng: &mut R,
) -> Result<SearchOutcome, SearchError> {
    mcts_search(world, state, side, config, model, rng).map(|(outcome, _)| outcome)
}

/// Transposition tables left behind by a search.
#[derive(Clone, Debug)]
pub struct MctsTables {
    pub root: StateKey,
    pub mine: HashMap<StateKey, TreeNode>,
    pub theirs: Option<HashMap<StateKey, TreeNode>>,
}

/// As [`mcts_decide`], also returning the trees.
pub fn mcts_search<R: Rng + ?Sized>(
    world: &World,
    state: &GameState,
    side: Side,
    config: &MctsConfig,
    model: &OpponentModel,
    rng: &mut R,
) -> Result<(SearchOutcome, MctsTables), SearchError> {
    config.validate()?;
    let dual = matches!(model, OpponentModel::MctsTree);
    let mut mine = Tree::new(side);
    let mut theirs = dual.then(|| Tree::new(side.opponent()));
    let root_key = state.state_key();
    mine.expand(world, state, root_key, config.actions_per_node, rng);

    let mut events = 0;
    let mut opponent_launches = 0;
    for _ in 0..config.iterations {
        let mut sim = state.copy_state();
        let start_events = sim.events_processed();
        let mut horizon = u32::MAX;
        loop {
            let Some(DecisionRequest::Decide(who)) = world.advance_until(&mut sim, horizon) else {
                break;
            };
            if who == side {
                if mine.active {
                    if let TreeMove::Left = mine.step(world, &mut sim, config, rng) {
                        horizon = sim.tick().saturating_add(config.rollout_ticks);
                        rollout_step(world, &mut sim, side, config.actions_per_node, rng);
                    }
                } else {
                    rollout_step(world, &mut sim, side, config.actions_per_node, rng);
                }
            } else if let Some(tree) = theirs.as_mut().filter(|t| t.active) {
                if let TreeMove::Left = tree.step(world, &mut sim, config, rng) {
                    rollout_step(world, &mut sim, who, config.actions_per_node, rng);
                }
            } else if dual {
                rollout_step(world, &mut sim, who, config.actions_per_node, rng);
            } else if model_step(world, &mut sim, who, model, rng) {
                opponent_launches += 1;
            }
        }
        let value = discounted(world, &sim, side, state.tick(), config.discount);
        mine.backup(value);
        if let Some(tree) = theirs.as_mut() {
            tree.backup(-value);
        }
        events += sim.events_processed() - start_events;
    }

    let root = &mine.table[&root_key];
    let choice = match config.final_selection {
        FinalSelection::MostVisits => argmax_random(root.visits.iter().map(|&n| n as f64), rng),
        FinalSelection::HighestScore => argmax_random(
            root.visits
                .iter()
                .zip(&root.mean)
                .map(|(&n, &q)| if n > 0 { q } else { f64::NEG_INFINITY }),
            rng,
        ),
    }
    .expect("root holds at least one action");
    let opponent_value = theirs.as_ref().map(opponent_root_value);
    let outcome = SearchOutcome {
        action: root.actions[choice],
        evaluations: config.iterations,
        events,
        value: root.value(),
        tree_sizes: [mine.table.len(), theirs.as_ref().map_or(0, |t| t.table.len())],
        opponent_value,
        opponent_launches,
    };
    let tables = MctsTables { root: root_key, mine: mine.table, theirs: theirs.map(|t| t.table) };
    Ok((outcome, tables))
}

/// Mean value the tree received over the iterations in which it made a decision.
fn opponent_root_value(tree: &Tree) -> f64 {
    let (sum, n) = tree.entry;
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// MCTS with a second tree for the opponent, one expansion per tree per iteration.
pub fn mcts_dual_decide<R: Rng + ?Sized>(
    world: &World,
    state: &GameState,
    side: Side,
    config: &MctsConfig,
    rng: &mut R,
) -> Result<SearchOutcome, SearchError> {
    mcts_decide(world, state, side, config, &OpponentModel::MctsTree, rng)
}
