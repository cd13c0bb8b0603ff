use std::sync::atomic::{AtomicBool, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{GameParams, MapGraph, Side, World};
use crate::search::{AgentSpec, SearchError, SearchSettings};

use super::stats::{binomial_best, whole_wins};
use super::{generate_map, mix_seed, play_game, GameRecord, MAX_NODES, MIN_NODES};

/// The `index`-th map of a run seeded with `seed`.
pub fn run_map(seed: u64, index: usize) -> MapGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, 0x4D41_5053, index as u64]));
    let n = rng.gen_range(MIN_NODES..=MAX_NODES);
    generate_map(&mut rng, n)
}

/// Pairwise win percentages, row agent against column agent.
#[derive(Clone, Debug, PartialEq)]
pub struct WinRateTable {
    pub agents: Vec<String>,
    /// Points scored by the row agent against the column agent (draws count 0.5).
    pub points: Vec<Vec<f64>>,
    pub games: Vec<Vec<u64>>,
}

impl WinRateTable {
    pub fn new(agents: Vec<String>) -> WinRateTable {
        let n = agents.len();
        WinRateTable { agents, points: vec![vec![0.0; n]; n], games: vec![vec![0; n]; n] }
    }

    pub fn record(&mut self, row: usize, col: usize, row_points: f64) {
        self.points[row][col] += row_points;
        self.points[col][row] += 1.0 - row_points;
        self.games[row][col] += 1;
        self.games[col][row] += 1;
    }

    /// Percentage; the diagonal and unplayed pairs read 50.
    pub fn rate(&self, row: usize, col: usize) -> f64 {
        if row == col || self.games[row][col] == 0 {
            return 50.0;
        }
        100.0 * self.points[row][col] / self.games[row][col] as f64
    }

    /// Mean of the row's rates over every column, the diagonal included.
    pub fn average(&self, row: usize) -> f64 {
        let n = self.agents.len();
        (0..n).map(|c| self.rate(row, c)).sum::<f64>() / n as f64
    }

    /// Per column, which row agents are within the one-tailed 95% exact binomial bound of
    /// the best row against that opponent. The diagonal is never marked.
    pub fn marks(&self, alpha: f64) -> Vec<Vec<bool>> {
        let n = self.agents.len();
        let mut marks = vec![vec![false; n]; n];
        for col in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != col && self.games[r][col] > 0).collect();
            let wins: Vec<u64> = rows.iter().map(|&r| whole_wins(self.points[r][col])).collect();
            let games: Vec<u64> = rows.iter().map(|&r| self.games[r][col]).collect();
            for (k, marked) in binomial_best(&wins, &games, alpha).into_iter().enumerate() {
                marks[rows[k]][col] = marked;
            }
        }
        marks
    }

    pub fn index_of(&self, agent: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == agent)
    }
}

#[derive(Clone, Debug)]
pub struct TournamentConfig {
    pub agents: Vec<AgentSpec>,
    pub maps: usize,
    pub seed: u64,
    pub params: GameParams,
    pub settings: SearchSettings,
}

#[derive(Clone, Debug)]
pub struct TournamentResult {
    pub table: WinRateTable,
    /// In job order: pair, then map, then side order.
    pub records: Vec<GameRecord>,
    /// False when cancelled before every game finished.
    pub complete: bool,
}

struct Job {
    row: usize,
    col: usize,
    pair: usize,
    map: usize,
    /// Row agent plays Red.
    swapped: bool,
}

/// Every unordered pair of agents plays each map twice, once from each side.
pub fn round_robin(
    config: &TournamentConfig,
    workers: usize,
    cancel: Option<&AtomicBool>,
) -> Result<TournamentResult, SearchError> {
    let n = config.agents.len();
    if n < 2 {
        return Err(SearchError::InvalidConfig("a tournament needs at least two agents".into()));
    }
    let worlds: Vec<World> = (0..config.maps)
        .map(|m| World::new(run_map(config.seed, m), config.params))
        .collect::<Result<_, _>>()
        .map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
    let mut jobs = Vec::new();
    let mut pair = 0;
    for row in 0..n {
        for col in row + 1..n {
            for map in 0..config.maps {
                for swapped in [false, true] {
                    jobs.push(Job { row, col, pair, map, swapped });
                }
            }
            pair += 1;
        }
    }
    let run = |job: &Job| -> Option<Result<GameRecord, SearchError>> {
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return None;
        }
        let (blue, red) = if job.swapped { (job.col, job.row) } else { (job.row, job.col) };
        let seed = mix_seed(&[config.seed, job.map as u64, job.pair as u64, job.swapped as u64]);
        Some(play_game(
            &worlds[job.map],
            job.map,
            &config.agents[blue],
            &config.agents[red],
            &config.settings,
            seed,
            None,
        ))
    };
    let outputs: Vec<Option<Result<GameRecord, SearchError>>> = pool(workers)?.install(|| jobs.par_iter().map(run).collect());

    let mut table = WinRateTable::new(config.agents.iter().map(ToString::to_string).collect());
    let mut records = Vec::with_capacity(jobs.len());
    let mut complete = true;
    for (job, out) in jobs.iter().zip(outputs) {
        let Some(out) = out else {
            complete = false;
            continue;
        };
        let record = out?;
        let row_side = if job.swapped { Side::Red } else { Side::Blue };
        table.record(job.row, job.col, record.points(row_side));
        records.push(record);
    }
    Ok(TournamentResult { table, records, complete })
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool, SearchError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SearchError::InvalidConfig(format!("worker pool: {e}")))
}
