//! Quick head-to-head win rates: `matchups GAMES AGENT...` (first agent vs each other one).

use groundwar::engine::{GameParams, Side, World};
use groundwar::experiments::{generate_map, play_game};
use groundwar::search::{AgentSpec, SearchSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let games: u64 = args[1].parse().unwrap();
    let hero: AgentSpec = args[2].parse().unwrap();
    let settings = SearchSettings::default();
    for other in &args[3..] {
        let other: AgentSpec = other.parse().unwrap();
        let (mut points, mut draws, mut ticks) = (0.0, 0, 0u64);
        for g in 0..games {
            let mut rng = ChaCha8Rng::seed_from_u64(g / 2);
            let n = rng.gen_range(8..=10);
            let world = World::new(generate_map(&mut rng, n), GameParams::default()).unwrap();
            let (blue, red, side) = if g % 2 == 0 { (&hero, &other, Side::Blue) } else { (&other, &hero, Side::Red) };
            let r = play_game(&world, 0, blue, red, &settings, g / 2, None).unwrap();
            points += r.points(side);
            draws += (r.winner == groundwar::engine::Outcome::Draw) as u32;
            ticks += r.ticks_played as u64;
        }
        println!("{hero} vs {other}: {:.1}% ({draws} draws, mean ticks {})", 100.0 * points / games as f64, ticks / games);
    }
}
