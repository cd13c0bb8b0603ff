//! Rough per-decision and per-game timings for every agent family.

use std::time::Instant;

use groundwar::engine::{GameParams, World};
use groundwar::experiments::{generate_map, play_game};
use groundwar::search::{AgentSpec, SearchSettings};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let settings = SearchSettings::default();
    let pairs = [("RHEA", "H1"), ("RHEA+H3", "H3"), ("MCTS", "H1"), ("MCTS+H0", "H3"), ("MCTS+MCTS", "H1"), ("RHEA", "MCTS")];
    for (a, b) in pairs {
        let (a, b): (AgentSpec, AgentSpec) = (a.parse().unwrap(), b.parse().unwrap());
        let started = Instant::now();
        let mut decisions = 0;
        let mut micros = 0.0;
        let mut wins = 0.0;
        let games = 10;
        for g in 0..games {
            let map = generate_map(&mut ChaCha8Rng::seed_from_u64(g), 10);
            let world = World::new(map, GameParams::default()).unwrap();
            let r = play_game(&world, g as usize, &a, &b, &settings, g, None).unwrap();
            decisions += r.decisions[0];
            micros += r.micros_per_decision[0] * r.decisions[0] as f64;
            wins += r.points(groundwar::engine::Side::Blue);
        }
        println!(
            "{a} vs {b}: {:.1} ms/game, {:.0} decisions/game, {:.3} ms/decision, blue points {wins}/{games}",
            started.elapsed().as_secs_f64() * 1e3 / games as f64,
            decisions as f64 / games as f64,
            micros / decisions.max(1) as f64 / 1e3,
        );
    }
}
