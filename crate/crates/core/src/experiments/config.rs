use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{roster, HeuristicParams, HeuristicPreset};
use crate::engine::GameParams;
use crate::search::{AgentSpec, SearchSettings, SpecError};
use crate::tuner::NtbeaConfig;

use super::{Planner, SweepMode};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("agent `{name}`: {source}")]
    Agent { name: String, source: SpecError },
    #[error("heuristic preset `{name}`: {reason}")]
    Preset { name: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct PlaySection {
    pub blue: String,
    pub red: String,
}

impl Default for PlaySection {
    fn default() -> Self {
        PlaySection { blue: "MCTS+MCTS".into(), red: "H1".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct TournamentSection {
    pub agents: Vec<String>,
    /// Each map is played twice per pair.
    pub maps: usize,
    /// Per-column significance level of the best-agent marks.
    pub alpha: f64,
}

impl Default for TournamentSection {
    fn default() -> Self {
        TournamentSection {
            agents: ["H0", "H1", "H2", "H3", "H4", "H5", "RHEA+H0", "RHEA+H1", "RHEA+H2", "RHEA+H3", "RHEA+H4", "RHEA+RND", "RHEA"]
                .map(String::from)
                .to_vec(),
            maps: 50,
            alpha: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct SweepSection {
    pub mode: SweepMode,
    pub planner: Planner,
    pub fixed: String,
    pub games_per_cell: usize,
    /// Defaults to ten times `gamesPerCell`.
    pub baseline_games: Option<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { mode: SweepMode::Model, planner: Planner::Rhea, fixed: "H3".into(), games_per_cell: 100, baseline_games: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct TuneSection {
    pub target: String,
    pub games_per_evaluation: usize,
    #[serde(flatten)]
    pub ntbea: NtbeaConfig,
}

impl Default for TuneSection {
    fn default() -> Self {
        TuneSection { target: "H0".into(), games_per_evaluation: 5, ntbea: NtbeaConfig::default() }
    }
}

/// Everything a run needs; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub engine: GameParams,
    pub search: SearchSettings,
    /// Named heuristics usable in agent names. Entries named like a built-in preset
    /// replace it.
    pub heuristics: Vec<HeuristicPreset>,
    pub play: PlaySection,
    pub tournament: TournamentSection,
    pub sweep: SweepSection,
    pub tune: TuneSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            workers: 1,
            out_dir: PathBuf::from("out"),
            engine: GameParams::default(),
            search: SearchSettings::default(),
            heuristics: roster()
                .into_iter()
                .map(|(name, p)| HeuristicPreset { name: name.to_string(), offence: p.offence, defence: p.defence, actions: p.action_string() })
                .collect(),
            play: PlaySection::default(),
            tournament: TournamentSection::default(),
            sweep: SweepSection::default(),
            tune: TuneSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.engine.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.search.mcts.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.search.rhea.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        for h in &self.heuristics {
            h.to_params().map_err(|e| ConfigError::Preset { name: h.name.clone(), reason: e.to_string() })?;
        }
        if self.tournament.maps == 0 {
            return Err(ConfigError::Invalid("tournament.maps must be at least 1".into()));
        }
        Ok(())
    }

    fn preset(&self, name: &str) -> Option<HeuristicParams> {
        self.heuristics.iter().find(|h| h.name == name).and_then(|h| h.to_params().ok())
    }

    /// Parse an agent name, resolving heuristic names through the configured presets.
    pub fn agent(&self, name: &str) -> Result<AgentSpec, ConfigError> {
        let resolved: Vec<String> = name
            .trim()
            .split('+')
            .map(|part| match self.preset(part.trim()) {
                Some(p) => format!("H({};{};{})", p.offence, p.defence, p.action_string()),
                None => part.trim().to_string(),
            })
            .collect();
        resolved
            .join("+")
            .parse()
            .map_err(|source| ConfigError::Agent { name: name.to_string(), source })
    }

    pub fn agents(&self, names: &[String]) -> Result<Vec<AgentSpec>, ConfigError> {
        names.iter().map(|n| self.agent(n)).collect()
    }

    /// The heuristic a sweep holds fixed.
    pub fn heuristic(&self, name: &str) -> Result<HeuristicParams, ConfigError> {
        match self.agent(name)? {
            AgentSpec::Heuristic(p) => Ok(p),
            other => Err(ConfigError::Invalid(format!("`{other}` is not a heuristic"))),
        }
    }
}
