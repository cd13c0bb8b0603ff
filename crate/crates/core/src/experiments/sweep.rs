use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::HeuristicParams;
use crate::engine::{GameParams, Side, World};
use crate::search::{AgentSpec, ModelSpec, SearchError, SearchSettings};

use super::stats::{wilson_interval, Z99};
use super::tournament::{pool, run_map};
use super::{mix_seed, play_game};

pub const OFFENCE_VALUES: [f64; 10] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
pub const DEFENCE_VALUES: [f64; 10] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SweepMode {
    /// Vary the planner's opponent model; the real opponent is fixed.
    Model,
    /// Vary the real opponent; the planner's model is fixed.
    Opponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Planner {
    #[serde(rename = "RHEA")]
    Rhea,
    #[serde(rename = "MCTS")]
    Mcts,
}

impl Planner {
    pub fn with_model(self, model: ModelSpec) -> AgentSpec {
        match self {
            Planner::Rhea => AgentSpec::Rhea(model),
            Planner::Mcts => AgentSpec::Mcts(model),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub planner: Planner,
    /// The fixed opponent (model mode) or fixed opponent model (opponent mode). Its action
    /// list is shared by every swept heuristic.
    pub fixed: HeuristicParams,
    pub games_per_cell: usize,
    /// Games for the no-model baseline in model mode; opponent mode plays a full
    /// baseline grid at `games_per_cell` instead.
    pub baseline_games: usize,
    pub seed: u64,
    pub params: GameParams,
    pub settings: SearchSettings,
    /// Offence values to sweep; defaults to 1..=10.
    pub offences: Vec<f64>,
}

impl SweepConfig {
    pub fn new(mode: SweepMode, planner: Planner, fixed: HeuristicParams, games_per_cell: usize, seed: u64) -> Self {
        SweepConfig {
            mode,
            planner,
            fixed,
            games_per_cell,
            baseline_games: games_per_cell * 10,
            seed,
            params: GameParams::default(),
            settings: SearchSettings::default(),
            offences: OFFENCE_VALUES.to_vec(),
        }
    }
}

/// Planner's tally in one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub offence: f64,
    pub defence: f64,
    pub games: u64,
    /// Planner's points (draws count 0.5).
    pub points: f64,
}

impl SweepCell {
    pub fn rate(&self) -> f64 {
        if self.games == 0 {
            0.0
        } else {
            self.points / self.games as f64
        }
    }

    pub fn ci99(&self) -> (f64, f64) {
        wilson_interval(self.points, self.games, Z99)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub mode: SweepMode,
    pub planner: Planner,
    pub fixed: String,
    /// Offence-major grid.
    pub cells: Vec<SweepCell>,
    /// Model mode: a single cell. Opponent mode: a grid matching `cells`.
    pub baseline: Vec<SweepCell>,
    pub complete: bool,
}

impl SweepResult {
    /// Aggregate `cells` over defence for each offence value.
    pub fn marginal(cells: &[SweepCell]) -> Vec<SweepCell> {
        let mut out: Vec<SweepCell> = Vec::new();
        for c in cells {
            match out.iter_mut().find(|m| m.offence == c.offence) {
                Some(m) => {
                    m.games += c.games;
                    m.points += c.points;
                }
                None => out.push(SweepCell { offence: c.offence, defence: f64::NAN, games: c.games, points: c.points }),
            }
        }
        out
    }

    /// Baseline tally to compare with the marginal point at `offence`.
    pub fn baseline_for(&self, offence: f64) -> SweepCell {
        match self.mode {
            SweepMode::Model => self.baseline[0].clone(),
            SweepMode::Opponent => Self::marginal(&self.baseline)
                .into_iter()
                .find(|c| c.offence == offence)
                .expect("baseline grid covers every offence"),
        }
    }
}

struct Job {
    /// Index into the cell list; `None` for the single model-mode baseline.
    cell: Option<usize>,
    baseline: bool,
    game: usize,
}

/// The accuracy experiment: 10 x 10 heuristic variants, each cell played on its own fresh
/// random maps. Every map is played twice with the planner on alternating sides.
pub fn accuracy_sweep(config: &SweepConfig, workers: usize, cancel: Option<&AtomicBool>) -> Result<SweepResult, SearchError> {
    let grid: Vec<(f64, f64)> = config
        .offences
        .iter()
        .flat_map(|&o| DEFENCE_VALUES.iter().map(move |&d| (o, d)))
        .collect();
    let swept: Vec<HeuristicParams> = grid.iter().map(|&(o, d)| config.fixed.with_odds(o, d)).collect();
    let fixed = AgentSpec::Heuristic(config.fixed.clone());
    let plain = config.planner.with_model(ModelSpec::None);
    let matchup = |cell: Option<usize>, baseline: bool| -> (AgentSpec, AgentSpec) {
        match (config.mode, cell) {
            (SweepMode::Model, None) => (plain.clone(), fixed.clone()),
            (SweepMode::Model, Some(c)) => (config.planner.with_model(ModelSpec::Heuristic(swept[c].clone())), fixed.clone()),
            (SweepMode::Opponent, Some(c)) => {
                let hero = if baseline { plain.clone() } else { config.planner.with_model(ModelSpec::Heuristic(config.fixed.clone())) };
                (hero, AgentSpec::Heuristic(swept[c].clone()))
            }
            (SweepMode::Opponent, None) => unreachable!("opponent mode has no single baseline"),
        }
    };

    let mut jobs = Vec::new();
    for c in 0..grid.len() {
        for game in 0..config.games_per_cell {
            jobs.push(Job { cell: Some(c), baseline: false, game });
        }
    }
    match config.mode {
        SweepMode::Model => {
            for game in 0..config.baseline_games {
                jobs.push(Job { cell: None, baseline: true, game });
            }
        }
        SweepMode::Opponent => {
            for c in 0..grid.len() {
                for game in 0..config.games_per_cell {
                    jobs.push(Job { cell: Some(c), baseline: true, game });
                }
            }
        }
    }
    let run = |job: &Job| -> Option<Result<f64, SearchError>> {
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return None;
        }
        let (hero, villain) = matchup(job.cell, job.baseline);
        let hero_side = if job.game.is_multiple_of(2) { Side::Blue } else { Side::Red };
        let (blue, red) = if hero_side == Side::Blue { (&hero, &villain) } else { (&villain, &hero) };
        let stream = mix_seed(&[config.seed, job.baseline as u64, job.cell.map_or(u64::MAX, |c| c as u64)]);
        let map = job.game / 2;
        let world = match World::new(run_map(stream, map), config.params) {
            Ok(w) => w,
            Err(e) => return Some(Err(SearchError::InvalidConfig(e.to_string()))),
        };
        let seed = mix_seed(&[stream, job.game as u64]);
        Some(play_game(&world, map, blue, red, &config.settings, seed, None).map(|r| r.points(hero_side)))
    };
    let outputs: Vec<Option<Result<f64, SearchError>>> = pool(workers)?.install(|| jobs.par_iter().map(run).collect());

    let blank = |&(offence, defence): &(f64, f64)| SweepCell { offence, defence, games: 0, points: 0.0 };
    let mut cells: Vec<SweepCell> = grid.iter().map(blank).collect();
    let mut baseline: Vec<SweepCell> = match config.mode {
        SweepMode::Model => vec![SweepCell { offence: f64::NAN, defence: f64::NAN, games: 0, points: 0.0 }],
        SweepMode::Opponent => grid.iter().map(blank).collect(),
    };
    let mut complete = true;
    for (job, out) in jobs.iter().zip(outputs) {
        let Some(out) = out else {
            complete = false;
            continue;
        };
        let points = out?;
        let target = match (job.baseline, job.cell) {
            (false, Some(c)) => &mut cells[c],
            (true, Some(c)) => &mut baseline[c],
            (_, None) => &mut baseline[0],
        };
        target.games += 1;
        target.points += points;
    }
    Ok(SweepResult {
        mode: config.mode,
        planner: config.planner,
        fixed: config.fixed.to_string(),
        cells,
        baseline,
        complete,
    })
}
