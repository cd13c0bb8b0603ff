//! Scripted policies: the parameterised heuristic, uniform random and do-nothing.

mod heuristic;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actionspace::{sample_distinct_actions, Action};
use crate::engine::{GameState, Order, Side, World, WAIT_FOREVER};

pub use heuristic::{attack_order, heuristic_decide, redeploy_order, reinforce_order, withdraw_order, Threats};

/// Idle duration the heuristic picks when none of its actions applies.
pub const HEURISTIC_WAIT: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeuristicAction {
    Attack,
    Withdraw,
    Reinforce,
    Redeploy,
}

impl HeuristicAction {
    pub fn code(self) -> &'static str {
        match self {
            HeuristicAction::Attack => "A",
            HeuristicAction::Withdraw => "W",
            HeuristicAction::Reinforce => "RF",
            HeuristicAction::Redeploy => "RD",
        }
    }
}

impl FromStr for HeuristicAction {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" => Ok(HeuristicAction::Attack),
            "W" => Ok(HeuristicAction::Withdraw),
            "RF" => Ok(HeuristicAction::Reinforce),
            "RD" => Ok(HeuristicAction::Redeploy),
            other => Err(ParamsError::UnknownAction(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("offence {0} outside [1, 10]")]
    Offence(f64),
    #[error("defence {0} outside [0, 5]")]
    Defence(f64),
    #[error("action list must be non-empty without duplicates")]
    Actions,
    #[error("unknown heuristic action `{0}` (expected A, W, RF or RD)")]
    UnknownAction(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicParams {
    /// Strength ratio (attacker : defender) required before attacking.
    pub offence: f64,
    /// Strength ratio (defender : inbound) below which a node is abandoned.
    pub defence: f64,
    pub actions: Vec<HeuristicAction>,
    /// Count enemy forces already inbound to a target as part of its defence.
    #[serde(default = "default_true")]
    pub count_inbound: bool,
}

fn default_true() -> bool {
    true
}

impl HeuristicParams {
    pub fn new(offence: f64, defence: f64, actions: Vec<HeuristicAction>) -> Result<Self, ParamsError> {
        let params = HeuristicParams { offence, defence, actions, count_inbound: true };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if !(1.0..=10.0).contains(&self.offence) {
            return Err(ParamsError::Offence(self.offence));
        }
        if !(0.0..=5.0).contains(&self.defence) {
            return Err(ParamsError::Defence(self.defence));
        }
        let mut seen = Vec::new();
        for a in &self.actions {
            if seen.contains(a) {
                return Err(ParamsError::Actions);
            }
            seen.push(*a);
        }
        if seen.is_empty() {
            return Err(ParamsError::Actions);
        }
        Ok(())
    }

    /// Comma separated codes, e.g. `RD,A,W,RF`.
    pub fn action_string(&self) -> String {
        self.actions.iter().map(|a| a.code()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_actions(text: &str) -> Result<Vec<HeuristicAction>, ParamsError> {
        text.split(',').map(str::parse).collect()
    }

    pub fn with_odds(&self, offence: f64, defence: f64) -> HeuristicParams {
        HeuristicParams { offence, defence, ..self.clone() }
    }
}

impl fmt::Display for HeuristicParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = roster().iter().find(|(_, p)| p == self).map(|(n, _)| n) {
            return f.write_str(name);
        }
        write!(f, "H({};{};{})", self.offence, self.defence, self.action_string())
    }
}

/// Named heuristic presets H0..H5.
pub fn roster() -> Vec<(&'static str, HeuristicParams)> {
    use HeuristicAction::*;
    let h = |o: f64, d: f64, a: &[HeuristicAction]| HeuristicParams {
        offence: o,
        defence: d,
        actions: a.to_vec(),
        count_inbound: true,
    };
    vec![
        ("H0", h(3.0, 1.2, &[Withdraw, Attack])),
        ("H1", h(1.0, 0.5, &[Redeploy, Attack, Withdraw, Reinforce])),
        ("H2", h(10.0, 1.5, &[Redeploy, Attack, Withdraw, Reinforce])),
        ("H3", h(10.0, 1.0, &[Redeploy, Withdraw, Attack, Reinforce])),
        ("H4", h(10.0, 1.2, &[Attack, Withdraw, Reinforce, Redeploy])),
        ("H5", h(3.0, 0.5, &[Withdraw, Redeploy, Attack, Reinforce])),
    ]
}

pub fn preset(name: &str) -> Option<HeuristicParams> {
    roster().into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}

/// A heuristic preset as it appears in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicPreset {
    pub name: String,
    pub offence: f64,
    pub defence: f64,
    /// Order string such as `RD,A,W,RF`.
    pub actions: String,
}

impl HeuristicPreset {
    pub fn to_params(&self) -> Result<HeuristicParams, ParamsError> {
        HeuristicParams::new(self.offence, self.defence, HeuristicParams::parse_actions(&self.actions)?)
    }
}

/// Uniform choice among up to 20 distinct sampled actions.
pub fn random_decide<R: Rng + ?Sized>(world: &World, state: &GameState, side: Side, rng: &mut R) -> Action {
    let actions = sample_distinct_actions(world, state, side, 20, rng);
    actions[rng.gen_range(0..actions.len())]
}

/// Never moves; every decision point answers with an endless wait.
pub fn do_nothing_decide(_state: &GameState, _side: Side) -> Order {
    Order::Wait { ticks: WAIT_FOREVER }
}
