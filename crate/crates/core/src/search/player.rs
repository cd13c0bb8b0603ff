use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actionspace::{Action, Genome};
use crate::agents::{do_nothing_decide, heuristic_decide, preset, random_decide, HeuristicParams, ParamsError};
use crate::engine::{GameState, Side, World};

use super::{mcts_decide, rhea_decide, OpponentModel, SearchError, SearchOutcome, SearchSettings};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("unknown agent `{0}`")]
    Unknown(String),
    #[error("opponent model `{0}` is not available to {1}")]
    Model(String, &'static str),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

/// Opponent model named in an agent spec; `None` plans against a passive opponent.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    None,
    Random,
    Heuristic(HeuristicParams),
    Mcts,
}

impl ModelSpec {
    pub fn to_model(&self) -> OpponentModel {
        match self {
            ModelSpec::None => OpponentModel::DoNothing,
            ModelSpec::Random => OpponentModel::Random,
            ModelSpec::Heuristic(p) => OpponentModel::Heuristic(p.clone()),
            ModelSpec::Mcts => OpponentModel::MctsTree,
        }
    }
}

/// Agent roster entry, written as `RHEA`, `RHEA+H3`, `MCTS+RND`, `MCTS+MCTS`, `H0`..`H5`,
/// `H(offence;defence;actions)`, `RND` or `NONE`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AgentSpec {
    Rhea(ModelSpec),
    Mcts(ModelSpec),
    Heuristic(HeuristicParams),
    Random,
    DoNothing,
}

fn parse_heuristic(text: &str) -> Result<Option<HeuristicParams>, SpecError> {
    if let Some(p) = preset(text) {
        return Ok(Some(p));
    }
    let Some(inner) = text.strip_prefix("H(").and_then(|t| t.strip_suffix(')')) else {
        return Ok(None);
    };
    let parts: Vec<&str> = inner.split(';').collect();
    let [o, d, acts] = parts.as_slice() else {
        return Err(SpecError::Unknown(text.to_string()));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| SpecError::Unknown(text.to_string()));
    let params = HeuristicParams::new(num(o)?, num(d)?, HeuristicParams::parse_actions(acts)?)?;
    Ok(Some(params))
}

impl FromStr for AgentSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "RND" => return Ok(AgentSpec::Random),
            "NONE" => return Ok(AgentSpec::DoNothing),
            _ => {}
        }
        if let Some(h) = parse_heuristic(s)? {
            return Ok(AgentSpec::Heuristic(h));
        }
        let (algo, model) = match s.split_once('+') {
            Some((a, m)) => (a, Some(m)),
            None => (s, None),
        };
        let model = match model {
            None => ModelSpec::None,
            Some("RND") => ModelSpec::Random,
            Some("NONE") => ModelSpec::None,
            Some("MCTS") => ModelSpec::Mcts,
            Some(m) => ModelSpec::Heuristic(parse_heuristic(m)?.ok_or_else(|| SpecError::Unknown(s.to_string()))?),
        };
        match algo {
            "RHEA" if model == ModelSpec::Mcts => Err(SpecError::Model("MCTS".into(), "RHEA")),
            "RHEA" => Ok(AgentSpec::Rhea(model)),
            "MCTS" => Ok(AgentSpec::Mcts(model)),
            _ => Err(SpecError::Unknown(s.to_string())),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::None => Ok(()),
            ModelSpec::Random => f.write_str("+RND"),
            ModelSpec::Heuristic(p) => write!(f, "+{p}"),
            ModelSpec::Mcts => f.write_str("+MCTS"),
        }
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Rhea(m) => write!(f, "RHEA{m}"),
            AgentSpec::Mcts(m) => write!(f, "MCTS{m}"),
            AgentSpec::Heuristic(p) => write!(f, "{p}"),
            AgentSpec::Random => f.write_str("RND"),
            AgentSpec::DoNothing => f.write_str("NONE"),
        }
    }
}

impl TryFrom<String> for AgentSpec {
    type Error = SpecError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<AgentSpec> for String {
    fn from(spec: AgentSpec) -> String {
        spec.to_string()
    }
}

impl AgentSpec {
    pub fn is_search(&self) -> bool {
        matches!(self, AgentSpec::Rhea(_) | AgentSpec::Mcts(_))
    }
}

/// A seeded, stateful agent that answers decision points in a real game.
#[derive(Clone, Debug)]
pub struct Player {
    spec: AgentSpec,
    settings: SearchSettings,
    model: Option<OpponentModel>,
    rng: ChaCha8Rng,
    plan: Option<Genome>,
    pub decisions: u64,
    pub events: u64,
}

impl Player {
    pub fn new(spec: AgentSpec, settings: SearchSettings, seed: u64) -> Player {
        let model = match &spec {
            AgentSpec::Rhea(m) | AgentSpec::Mcts(m) => Some(m.to_model()),
            _ => None,
        };
        Player {
            spec,
            settings,
            model,
            rng: ChaCha8Rng::seed_from_u64(seed),
            plan: None,
            decisions: 0,
            events: 0,
        }
    }

    pub fn spec(&self) -> &AgentSpec {
        &self.spec
    }

    /// Choose the action for `side` at a decision point.
    pub fn decide(&mut self, world: &World, state: &GameState, side: Side) -> Result<Action, SearchError> {
        self.decisions += 1;
        let action = match &self.spec {
            AgentSpec::Heuristic(p) => Action { order: heuristic_decide(world, state, side, p), wait_after: 0 },
            AgentSpec::Random => random_decide(world, state, side, &mut self.rng),
            AgentSpec::DoNothing => Action { order: do_nothing_decide(state, side), wait_after: 0 },
            AgentSpec::Mcts(_) => {
                let model = self.model.as_ref().expect("search agents carry a model");
                let out = mcts_decide(world, state, side, &self.settings.mcts, model, &mut self.rng)?;
                self.record(&out)
            }
            AgentSpec::Rhea(_) => {
                let model = self.model.as_ref().expect("search agents carry a model");
                let cfg = &self.settings.rhea;
                let seed = if cfg.retain_plan {
                    self.plan.as_ref().map(|g| g.shifted(&mut self.rng))
                } else {
                    None
                };
                let run = rhea_decide(world, state, side, cfg, model, &mut self.rng, seed.as_ref())?;
                if cfg.retain_plan {
                    self.plan = Some(run.best.clone());
                }
                self.record(&run.outcome)
            }
        };
        Ok(action)
    }

    fn record(&mut self, out: &SearchOutcome) -> Action {
        self.events += out.events;
        out.action
    }
}
