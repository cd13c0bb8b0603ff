//! Statistical forward planners: MCTS over a transposition table and a (1+1)
//! rolling horizon EA, both driving the engine as their forward model.

mod mcts;
mod player;
mod rhea;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actionspace::{sample_distinct_actions, Action};
use crate::agents::{heuristic_decide, random_decide, HeuristicParams};
use crate::engine::{GameState, Order, Side, World, WAIT_FOREVER};

pub use mcts::{mcts_decide, mcts_dual_decide, mcts_search, MctsTables, TreeNode};
pub use player::{AgentSpec, ModelSpec, Player, SpecError};
pub use rhea::{evaluate_plan, rhea_decide, PlanEvaluation, RheaRun};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error("the MCTS-tree opponent model is only available inside MCTS")]
    TreeModelOutsideMcts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FinalSelection {
    MostVisits,
    HighestScore,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct MctsConfig {
    pub iterations: u32,
    pub exploration_c: f64,
    pub rollout_ticks: u32,
    pub discount: f64,
    pub actions_per_node: usize,
    pub final_selection: FinalSelection,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig {
            iterations: 50,
            exploration_c: 3.0,
            rollout_ticks: 100,
            discount: 0.999,
            actions_per_node: 20,
            final_selection: FinalSelection::MostVisits,
        }
    }
}

impl MctsConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        if self.iterations == 0 {
            return bad("mcts iterations must be at least 1");
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return bad("mcts discount must lie in (0, 1]");
        }
        if !(self.exploration_c >= 0.0 && self.exploration_c.is_finite()) {
            return bad("exploration constant must be finite and non-negative");
        }
        if self.actions_per_node == 0 {
            return bad("actions per node must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct RheaConfig {
    pub iterations: u32,
    pub plan_length: usize,
    pub mutation_rate: f64,
    pub horizon_ticks: u32,
    pub discount: f64,
    /// Seed each decision with the previous best plan shifted left by one action.
    pub retain_plan: bool,
}

impl Default for RheaConfig {
    fn default() -> Self {
        RheaConfig {
            iterations: 50,
            plan_length: 4,
            mutation_rate: 0.5,
            horizon_ticks: 100,
            discount: 0.999,
            retain_plan: false,
        }
    }
}

impl RheaConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        if self.iterations == 0 {
            return bad("rhea iterations must be at least 1");
        }
        if self.plan_length == 0 {
            return bad("plan length must be at least 1");
        }
        if !(self.mutation_rate > 0.0 && self.mutation_rate <= 1.0) {
            return bad("mutation rate must lie in (0, 1]");
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return bad("rhea discount must lie in (0, 1]");
        }
        Ok(())
    }
}

/// Both planners' settings, as carried by experiment configs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSettings {
    pub mcts: MctsConfig,
    pub rhea: RheaConfig,
}

/// Policy substituted for the adversary inside simulations.
#[derive(Clone, Debug, PartialEq)]
pub enum OpponentModel {
    DoNothing,
    Random,
    Heuristic(HeuristicParams),
    /// A second search tree grown alongside the planner's own (dual-tree MCTS).
    MctsTree,
}

/// What one decision cost and concluded.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub action: Action,
    /// Plan evaluations (RHEA) or tree iterations (MCTS) actually run.
    pub evaluations: u32,
    /// Forward-model events processed across all simulations.
    pub events: u64,
    /// Best plan score (RHEA) or the root's visit-weighted mean value (MCTS).
    pub value: f64,
    /// Transposition table sizes: planner's tree, then the opponent tree.
    pub tree_sizes: [usize; 2],
    /// Mean value backed up into the opponent tree over the iterations it decided in (dual-tree only).
    pub opponent_value: Option<f64>,
    /// Launch orders the opponent model issued inside simulations.
    pub opponent_launches: u64,
}

/// `q + c * sqrt(ln(parent) / n)`; unvisited actions score `+inf`.
pub fn uct_value(q: f64, n: u32, parent: u32, c: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    q + c * ((parent.max(1) as f64).ln() / n as f64).sqrt()
}

pub(crate) fn discounted(world: &World, state: &GameState, side: Side, root_tick: u32, gamma: f64) -> f64 {
    let elapsed = state.tick().saturating_sub(root_tick);
    world.material_score(state, side) * gamma.powi(elapsed as i32)
}

/// Issue an action; anything the engine rejects degrades to a short wait.
pub fn play(world: &World, state: &mut GameState, side: Side, action: Action) {
    if world.issue_order_then_wait(state, side, action.order, action.wait_after).is_err() {
        let c2 = world.params().side(side).c2_min_delay.max(1);
        world
            .issue_order(state, side, Order::Wait { ticks: c2 })
            .expect("a wait is always legal at a decision point");
    }
}

/// Rollout policy for a searching side: keep an interrupted wait, otherwise act at random.
pub(crate) fn rollout_step<R: Rng + ?Sized>(world: &World, state: &mut GameState, side: Side, k: usize, rng: &mut R) {
    if state.can_resume(side) {
        world.resume(state, side).expect("resumable");
        return;
    }
    let actions = sample_distinct_actions(world, state, side, k, rng);
    let action = actions[rng.gen_range(0..actions.len())];
    play(world, state, side, action);
}

/// Answer an opponent decision point with the model. Returns whether a launch was issued.
pub(crate) fn model_step<R: Rng + ?Sized>(
    world: &World,
    state: &mut GameState,
    side: Side,
    model: &OpponentModel,
    rng: &mut R,
) -> bool {
    let action = match model {
        OpponentModel::DoNothing => {
            if state.can_resume(side) {
                world.resume(state, side).expect("resumable");
                return false;
            }
            Action::wait(WAIT_FOREVER)
        }
        OpponentModel::Random => random_decide(world, state, side, rng),
        OpponentModel::Heuristic(params) => {
            Action { order: heuristic_decide(world, state, side, params), wait_after: 0 }
        }
        OpponentModel::MctsTree => {
            rollout_step(world, state, side, 20, rng);
            return false;
        }
    };
    let launched = action.order.is_launch();
    play(world, state, side, action);
    launched
}
