use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{DecisionRequest, GameEvent, Outcome, Side, World};
use crate::search::{AgentSpec, Player, SearchError, SearchSettings};

use super::mix_seed;

/// Starting garrison at each side's home node.
pub const START_FORCE: f64 = 100.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GameRecord {
    pub map_id: usize,
    pub seed: u64,
    pub blue_agent: String,
    pub red_agent: String,
    pub blue_start: usize,
    pub red_start: usize,
    pub winner: Outcome,
    pub final_score_blue: f64,
    pub ticks_played: u32,
    /// Decisions taken by Blue, Red.
    pub decisions: [u64; 2],
    /// Forward-model events spent in search by Blue, Red.
    pub search_events: [u64; 2],
    /// Mean wall time per decision in microseconds, Blue, Red.
    pub micros_per_decision: [f64; 2],
}

/// Equality ignores wall-clock timing.
impl PartialEq for GameRecord {
    fn eq(&self, o: &Self) -> bool {
        self.map_id == o.map_id
            && self.seed == o.seed
            && self.blue_agent == o.blue_agent
            && self.red_agent == o.red_agent
            && self.blue_start == o.blue_start
            && self.red_start == o.red_start
            && self.winner == o.winner
            && self.final_score_blue.to_bits() == o.final_score_blue.to_bits()
            && self.ticks_played == o.ticks_played
            && self.decisions == o.decisions
            && self.search_events == o.search_events
    }
}

impl GameRecord {
    /// 1, 0.5 or 0 for the given side.
    pub fn points(&self, side: Side) -> f64 {
        match (self.winner, side) {
            (Outcome::Draw, _) => 0.5,
            (Outcome::BlueWin, Side::Blue) | (Outcome::RedWin, Side::Red) => 1.0,
            _ => 0.0,
        }
    }
}

/// Seed-derived distinct start nodes.
pub fn start_nodes(node_count: usize, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, 0x5747]));
    let blue = rng.gen_range(0..node_count);
    let mut red = rng.gen_range(0..node_count - 1);
    if red >= blue {
        red += 1;
    }
    (blue, red)
}

/// Play one game to the end. Fully determined by the arguments.
pub fn play_game(
    world: &World,
    map_id: usize,
    blue: &AgentSpec,
    red: &AgentSpec,
    settings: &SearchSettings,
    seed: u64,
    log: Option<&mut Vec<GameEvent>>,
) -> Result<GameRecord, SearchError> {
    let (blue_start, red_start) = start_nodes(world.map().node_count(), seed);
    play_from(world, map_id, blue, red, settings, seed, (blue_start, red_start), log)
}

/// As [`play_game`] with explicit start nodes.
#[allow(clippy::too_many_arguments)]
pub fn play_from(
    world: &World,
    map_id: usize,
    blue: &AgentSpec,
    red: &AgentSpec,
    settings: &SearchSettings,
    seed: u64,
    (blue_start, red_start): (usize, usize),
    mut log: Option<&mut Vec<GameEvent>>,
) -> Result<GameRecord, SearchError> {
    let mut state = world
        .create_state(blue_start, red_start, START_FORCE)
        .map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
    let mut players = [
        Player::new(blue.clone(), settings.clone(), mix_seed(&[seed, 1])),
        Player::new(red.clone(), settings.clone(), mix_seed(&[seed, 2])),
    ];
    let mut nanos = [0u128; 2];
    loop {
        let request = match log.as_deref_mut() {
            Some(l) => world.advance_logged(&mut state, l),
            None => world.advance(&mut state),
        };
        let DecisionRequest::Decide(side) = request else { break };
        let i = side.index();
        let started = Instant::now();
        let action = players[i].decide(world, &state, side)?;
        nanos[i] += started.elapsed().as_nanos();
        let issued = match log.as_deref_mut() {
            Some(l) => world.issue_order_logged(&mut state, side, action.order, action.wait_after, l),
            None => world.issue_order_then_wait(&mut state, side, action.order, action.wait_after),
        };
        if issued.is_err() {
            crate::search::play(world, &mut state, side, crate::actionspace::Action::wait(10));
        }
    }
    let decisions = [players[0].decisions, players[1].decisions];
    let per = |i: usize| if decisions[i] == 0 { 0.0 } else { nanos[i] as f64 / decisions[i] as f64 / 1e3 };
    Ok(GameRecord {
        map_id,
        seed,
        blue_agent: blue.to_string(),
        red_agent: red.to_string(),
        blue_start,
        red_start,
        winner: world.outcome(&state),
        final_score_blue: world.material_score(&state, Side::Blue),
        ticks_played: state.tick(),
        decisions,
        search_events: [players[0].events, players[1].events],
        micros_per_decision: [per(0), per(1)],
    })
}
