//! Map generation, game orchestration, tournaments, accuracy sweeps and their statistics.

mod config;
mod game;
mod mapgen;
mod output;
mod stats;
mod sweep;
mod tournament;

pub use config::{ConfigError, ExperimentConfig, PlaySection, SweepSection, TournamentSection, TuneSection};
pub use game::{play_from, play_game, start_nodes, GameRecord, START_FORCE};
pub use mapgen::{generate_map, MAX_NODES, MIN_NODES};
pub use output::{against_baseline, write_marks, write_records, write_sweep_grid, write_sweep_marginal, write_win_rates};
pub use stats::{binomial_best, binomial_cdf, whole_wins, wilson_interval, Z99};
pub use sweep::{accuracy_sweep, Planner, SweepCell, SweepConfig, SweepMode, SweepResult, DEFENCE_VALUES, OFFENCE_VALUES};
pub use tournament::{round_robin, run_map, TournamentConfig, TournamentResult, WinRateTable};

/// Order-sensitive seed combiner built on splitmix64.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |acc, &p| crate::engine::splitmix64(acc ^ crate::engine::splitmix64(p)))
}
