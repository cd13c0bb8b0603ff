//! Print the event trace of one seeded game: `trace_game BLUE RED SEED`.

use groundwar::engine::trace::write_trace;
use groundwar::engine::{GameParams, World};
use groundwar::experiments::{generate_map, play_game};
use groundwar::search::{AgentSpec, SearchSettings};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let blue: AgentSpec = args.get(1).map_or("RHEA", String::as_str).parse().unwrap();
    let red: AgentSpec = args.get(2).map_or("H1", String::as_str).parse().unwrap();
    let seed: u64 = args.get(3).map_or(0, |s| s.parse().unwrap());
    let map = generate_map(&mut ChaCha8Rng::seed_from_u64(seed), 10);
    println!("{}", map.to_json());
    let world = World::new(map, GameParams::default()).unwrap();
    let mut log = Vec::new();
    let record = play_game(&world, 0, &blue, &red, &SearchSettings::default(), seed, Some(&mut log)).unwrap();
    write_trace(std::io::stdout(), &log).unwrap();
    println!("{record:?}");
}
