//! Quick invariant checks runnable from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{resolve_lanchester, BattleWinner, DecisionRequest, GameParams, Side, World};
use crate::experiments::{
    binomial_cdf, generate_map, mix_seed, play_game, round_robin, run_map, start_nodes, TournamentConfig, START_FORCE,
};
use crate::search::{AgentSpec, Player, SearchSettings};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn check(name: &'static str, result: Result<(), String>) -> Check {
    Check { name, failure: result.err() }
}

fn lanchester_invariant(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..1000 {
        let (a, b) = (rng.gen_range(0.0..200.0), rng.gen_range(0.0..200.0));
        let (alpha, beta) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
        let out = resolve_lanchester(a, b, alpha, beta);
        let before = alpha * a * a - beta * b * b;
        let after = match out.winner {
            BattleWinner::A => alpha * out.survivors * out.survivors,
            BattleWinner::B => -beta * out.survivors * out.survivors,
            BattleWinner::Draw => 0.0,
        };
        if (before - after).abs() > 1e-9 * before.abs().max(1.0) {
            return Err(format!("invariant drift for a={a} b={b} alpha={alpha} beta={beta}"));
        }
    }
    Ok(())
}

fn maps_well_formed(seed: u64) -> Result<(), String> {
    for i in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, i]));
        let n = rng.gen_range(8..=10);
        let map = generate_map(&mut rng, n);
        if !map.is_connected() {
            return Err(format!("map {i} is disconnected"));
        }
        if (0..n).any(|v| !(2..=6).contains(&map.degree(v))) {
            return Err(format!("map {i} has a node degree outside [2, 6]"));
        }
    }
    Ok(())
}

/// Random agents play out; neither side's total strength may grow between decisions.
fn strength_never_grows(seed: u64) -> Result<(), String> {
    let settings = SearchSettings::default();
    for g in 0..50u64 {
        let world = World::new(run_map(seed, g as usize), GameParams::default()).map_err(|e| e.to_string())?;
        let (b, r) = start_nodes(world.map().node_count(), mix_seed(&[seed, g]));
        let mut state = world.create_state(b, r, START_FORCE).map_err(|e| e.to_string())?;
        let mut players = [
            Player::new(AgentSpec::Random, settings.clone(), mix_seed(&[seed, g, 1])),
            Player::new(AgentSpec::Random, settings.clone(), mix_seed(&[seed, g, 2])),
        ];
        let mut last = [START_FORCE, START_FORCE];
        loop {
            let request = world.advance(&mut state);
            for side in Side::BOTH {
                let now = state.total_strength(side);
                if now > last[side.index()] + 1e-9 {
                    return Err(format!("game {g}: {} strength rose from {} to {now}", side.name(), last[side.index()]));
                }
                last[side.index()] = now;
            }
            let DecisionRequest::Decide(side) = request else { break };
            let action = players[side.index()].decide(&world, &state, side).map_err(|e| e.to_string())?;
            crate::search::play(&world, &mut state, side, action);
        }
    }
    Ok(())
}

fn games_deterministic(seed: u64) -> Result<(), String> {
    let world = World::new(run_map(seed, 0), GameParams::default()).map_err(|e| e.to_string())?;
    let settings = SearchSettings::default();
    for (blue, red) in [("MCTS+MCTS", "H1"), ("RHEA+H3", "RND"), ("MCTS+RND", "RHEA")] {
        let blue: AgentSpec = blue.parse().map_err(|e: crate::search::SpecError| e.to_string())?;
        let red: AgentSpec = red.parse().map_err(|e: crate::search::SpecError| e.to_string())?;
        let first = play_game(&world, 0, &blue, &red, &settings, seed, None).map_err(|e| e.to_string())?;
        let second = play_game(&world, 0, &blue, &red, &settings, seed, None).map_err(|e| e.to_string())?;
        if first != second {
            return Err(format!("{blue} vs {red} differs between identical runs"));
        }
    }
    Ok(())
}

fn table_antisymmetric(seed: u64) -> Result<(), String> {
    let agents: Vec<AgentSpec> = ["H0", "H1", "RND"].iter().map(|a| a.parse().expect("roster name")).collect();
    let config = TournamentConfig {
        agents,
        maps: 2,
        seed,
        params: GameParams::default(),
        settings: SearchSettings::default(),
    };
    let result = round_robin(&config, 1, None).map_err(|e| e.to_string())?;
    let t = &result.table;
    for i in 0..3 {
        for j in 0..3 {
            if (t.rate(i, j) + t.rate(j, i) - 100.0).abs() > 1e-9 {
                return Err(format!("rates for {} and {} do not sum to 100", t.agents[i], t.agents[j]));
            }
        }
    }
    if result.records.len() != 12 {
        return Err(format!("expected 12 games, played {}", result.records.len()));
    }
    Ok(())
}

fn binomial_matches_sum() -> Result<(), String> {
    for n in [1u64, 7, 30, 100] {
        for p in [0.05f64, 0.5, 0.93] {
            let mut coef = 1.0f64;
            let mut sum = 0.0;
            for k in 0..=n {
                if k > 0 {
                    coef *= (n - k + 1) as f64 / k as f64;
                }
                sum += coef * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
                let exact = binomial_cdf(k, n, p);
                if (exact - sum.min(1.0)).abs() > 1e-10 {
                    return Err(format!("P(X <= {k} | {n}, {p}) = {exact}, summation gives {sum}"));
                }
            }
        }
    }
    Ok(())
}

/// Run every check with the given seed.
pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        check("lanchester square-law invariant", lanchester_invariant(&mut rng)),
        check("generated maps connected with degree 2..6", maps_well_formed(seed)),
        check("side strength never increases", strength_never_grows(seed)),
        check("identical seeds give identical games", games_deterministic(seed)),
        check("win-rate table antisymmetric", table_antisymmetric(seed)),
        check("binomial tail matches summation", binomial_matches_sum()),
    ]
}
