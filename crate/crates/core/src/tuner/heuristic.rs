use std::sync::atomic::{AtomicBool, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agents::{HeuristicAction, HeuristicParams};
use crate::engine::{GameParams, Side, World};
use crate::experiments::{mix_seed, play_game, run_map};
use crate::search::{AgentSpec, SearchSettings};

use super::{ntbea, Dimension, NtbeaConfig, NtbeaResult, SearchSpace, TunerError};

/// Every non-empty ordered selection of the four heuristic actions (64 lists), shortest
/// first, then lexicographic in A, W, RF, RD order.
pub fn action_orders() -> Vec<Vec<HeuristicAction>> {
    use HeuristicAction::*;
    let all = [Attack, Withdraw, Reinforce, Redeploy];
    let mut out: Vec<Vec<HeuristicAction>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..all.len() {
        let mut next = Vec::new();
        for prefix in &frontier {
            for i in 0..all.len() {
                if !prefix.contains(&i) {
                    let mut p = prefix.clone();
                    p.push(i);
                    next.push(p);
                }
            }
        }
        out.extend(next.iter().map(|p| p.iter().map(|&i| all[i]).collect::<Vec<_>>()));
        frontier = next;
    }
    out
}

/// Offence 1..10, defence 0.5..5.0 in steps of 0.5, and an index into [`action_orders`].
pub fn heuristic_space() -> SearchSpace {
    SearchSpace::new(vec![
        Dimension { name: "offence".into(), values: (1..=10).map(f64::from).collect() },
        Dimension { name: "defence".into(), values: (1..=10).map(|d| f64::from(d) * 0.5).collect() },
        Dimension { name: "actions".into(), values: (0..action_orders().len()).map(|i| i as f64).collect() },
    ])
    .expect("fixed space is valid")
}

pub fn point_to_params(point: &[usize]) -> HeuristicParams {
    let values = heuristic_space().values(point);
    let actions = action_orders().swap_remove(point[2]);
    HeuristicParams::new(values[0], values[1], actions).expect("space holds valid parameters")
}

#[derive(Clone, Debug)]
pub struct HeuristicTuneConfig {
    pub target: AgentSpec,
    pub games_per_evaluation: usize,
    pub ntbea: NtbeaConfig,
    pub seed: u64,
    pub params: GameParams,
    pub settings: SearchSettings,
}

#[derive(Clone, Debug)]
pub struct HeuristicTuning {
    pub space: SearchSpace,
    pub best: HeuristicParams,
    pub result: NtbeaResult,
    pub complete: bool,
}

/// Tune a heuristic against `target`. Each evaluation plays a batch of games on fresh maps,
/// alternating sides, and scores the mean sign of the final material score.
pub fn tune_heuristic(
    config: &HeuristicTuneConfig,
    workers: usize,
    cancel: Option<&AtomicBool>,
) -> Result<HeuristicTuning, TunerError> {
    let space = heuristic_space();
    let games = config.games_per_evaluation.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| TunerError::Setup(e.to_string()))?;
    let mut failure: Option<TunerError> = None;
    let cancelled = || cancel.is_some_and(|c| c.load(Ordering::Relaxed));
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[config.seed, 0x4E54]));
    let fitness = |point: &[usize], index: usize| -> f64 {
        let tuned = AgentSpec::Heuristic(point_to_params(point));
        let signs: Vec<Result<f64, String>> = pool.install(|| {
            (0..games)
                .into_par_iter()
                .map(|g| {
                    let game = index * games + g;
                    let world = World::new(run_map(config.seed, game), config.params).map_err(|e| e.to_string())?;
                    let side = if g % 2 == 0 { Side::Blue } else { Side::Red };
                    let (blue, red) = if side == Side::Blue { (&tuned, &config.target) } else { (&config.target, &tuned) };
                    let seed = mix_seed(&[config.seed, 0x5455, game as u64]);
                    let record = play_game(&world, game, blue, red, &config.settings, seed, None).map_err(|e| e.to_string())?;
                    let score = if side == Side::Blue { record.final_score_blue } else { -record.final_score_blue };
                    Ok(if score > 0.0 {
                        1.0
                    } else if score < 0.0 {
                        -1.0
                    } else {
                        0.0
                    })
                })
                .collect()
        });
        let mut total = 0.0;
        for s in signs {
            match s {
                Ok(v) => total += v,
                Err(e) => {
                    failure.get_or_insert(TunerError::Setup(e));
                }
            }
        }
        total / games as f64
    };
    let result = ntbea(&space, &config.ntbea, &mut rng, fitness, cancelled)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let complete = result.log.len() == config.ntbea.budget;
    Ok(HeuristicTuning { best: point_to_params(&result.best), space, result, complete })
}
