mod common;

use groundwar::actionspace::{Action, Codec, Genome};
use groundwar::agents::preset;
use groundwar::engine::{
    resolve_lanchester, DecisionRequest, GameParams, GameState, MapGraph, NodeState, Order, Side, SideParams, World,
};
use groundwar::search::{
    evaluate_plan, mcts_decide, mcts_search, rhea_decide, MctsConfig, OpponentModel, RheaConfig, SearchSettings,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn mcts_finds_the_dominant_attack() {
    let config = MctsConfig::default();
    let mut hits = [0; 2];
    for seed in 0..30 {
        let (world, state, blue, red, weak) = common::dominant_attack(seed);
        for (slot, model) in [OpponentModel::DoNothing, OpponentModel::MctsTree].iter().enumerate() {
            let out = mcts_decide(&world, &state, Side::Blue, &config, model, &mut rng(seed)).unwrap();
            hits[slot] += common::is_capture(&out.action.order, blue, red, weak) as u32;
        }
    }
    assert!(hits.iter().all(|&h| h >= 27), "captures chosen {hits:?} of 30");
}

#[test]
fn rhea_plan_contains_the_dominant_attack() {
    let config = RheaConfig::default();
    let mut hits = 0;
    for seed in 0..30 {
        let (world, state, blue, red, weak) = common::dominant_attack(seed);
        let run = rhea_decide(&world, &state, Side::Blue, &config, &OpponentModel::DoNothing, &mut rng(seed), None).unwrap();
        let plan = groundwar::actionspace::decode_genome(&world, &run.best, &state, Side::Blue);
        let found = plan.steps.iter().any(|a| common::is_capture(&a.order, blue, red, weak));
        hits += found as u32;
        if found {
            // The capture ends the game ahead of the static position.
            assert!(run.outcome.value > world.material_score(&state, Side::Blue));
        }
    }
    assert!(hits >= 27, "capture in final plan {hits} of 30");
}

#[test]
fn single_iteration_returns_a_root_action() {
    let (world, state, side) = common::midgame(11);
    let config = MctsConfig { iterations: 1, ..MctsConfig::default() };
    let (out, tables) = mcts_search(&world, &state, side, &config, &OpponentModel::DoNothing, &mut rng(1)).unwrap();
    let root = &tables.mine[&tables.root];
    assert!(root.actions.contains(&out.action));
    assert_eq!(root.total, 1);
    assert!(out.tree_sizes[0] <= 2);
}

/// Blue on 0 and 2 of the line 0-1-2-3, Red on 3 behind a long arc. A C2 delay of 100
/// makes every wait digit decode to the same wait, so the action sets stay small.
fn transposition_world() -> (World, GameState) {
    let side = SideParams { c2_min_delay: 100, ..SideParams::default() };
    let params = GameParams { blue: side, red: side, ..GameParams::default() };
    let world = World::new(MapGraph::line(&[4, 4, 60]).unwrap(), params).unwrap();
    let nodes = vec![
        NodeState { owner: Some(Side::Blue), garrison: 40.0 },
        NodeState { owner: None, garrison: 0.0 },
        NodeState { owner: Some(Side::Blue), garrison: 40.0 },
        NodeState { owner: Some(Side::Red), garrison: 30.0 },
    ];
    let state = world.state_from_parts(0, nodes, Vec::new()).unwrap();
    (world, state)
}

fn next_blue_decision(world: &World, state: &mut GameState) {
    loop {
        match world.advance(state) {
            DecisionRequest::Decide(Side::Blue) | DecisionRequest::Terminal => return,
            DecisionRequest::Decide(Side::Red) => {
                if state.can_resume(Side::Red) {
                    world.resume(state, Side::Red).unwrap();
                } else {
                    world.issue_order(state, Side::Red, Order::Wait { ticks: u32::MAX }).unwrap();
                }
            }
        }
    }
}

#[test]
fn transposed_state_collects_visits_from_both_paths() {
    let (world, start) = transposition_world();
    let a1 = Action { order: Order::LaunchExpedition { size: 20.0, from: 0, to: 1 }, wait_after: 100 };
    let a2 = Action { order: Order::LaunchExpedition { size: 20.0, from: 2, to: 1 }, wait_after: 100 };
    let after = |first: Action, second: Option<Action>| {
        let mut s = start.clone();
        next_blue_decision(&world, &mut s);
        groundwar::search::play(&world, &mut s, Side::Blue, first);
        next_blue_decision(&world, &mut s);
        if let Some(a) = second {
            groundwar::search::play(&world, &mut s, Side::Blue, a);
            next_blue_decision(&world, &mut s);
        }
        s
    };
    let (s1, s2) = (after(a1, None), after(a2, None));
    let (s12, s21) = (after(a1, Some(a2)), after(a2, Some(a1)));
    assert_ne!(s1.state_key(), s2.state_key());
    assert_eq!(s12.state_key(), s21.state_key());

    let mut root_state = start.clone();
    next_blue_decision(&world, &mut root_state);
    // A large exploration constant spreads visits over both orderings.
    let config = MctsConfig { iterations: 4000, actions_per_node: 40, exploration_c: 1000.0, ..MctsConfig::default() };
    let (_, tables) =
        mcts_search(&world, &root_state, Side::Blue, &config, &OpponentModel::DoNothing, &mut rng(2)).unwrap();
    let edge = |key, action: Action| {
        let node = &tables.mine[&key];
        let i = node.actions.iter().position(|a| a.identity() == action.identity()).expect("action sampled");
        node.visits[i]
    };
    let via_first = edge(s1.state_key(), a2);
    let via_second = edge(s2.state_key(), a1);
    assert!(via_first > 0 && via_second > 0, "both paths explored: {via_first}, {via_second}");
    let shared = &tables.mine[&s12.state_key()];
    // Every pass along either edge reaches the shared node; the first of them only expands it.
    assert_eq!(shared.total, via_first + via_second - 1);
}

#[test]
fn all_wait_plan_scores_the_discounted_static_material() {
    let (world, state, side) = common::midgame(4);
    let codec = Codec::for_map(world.map());
    // A source of all nines never names an owned node, so every step is a wait.
    let nines = Genome::new(vec![9; 4 * codec.digits_per_action()], codec).unwrap();
    let config = RheaConfig::default();
    let mut still = state.clone();
    let mut quiet = true;
    for e in still.expeditions() {
        quiet &= e.arrive > state.tick() + config.horizon_ticks;
    }
    let eval = evaluate_plan(&world, &state, side, &nines, &OpponentModel::DoNothing, &config, &mut rng(0)).unwrap();
    if quiet && world.map().node_count() < 10 {
        let expected = world.material_score(&still, side) * config.discount.powi(config.horizon_ticks as i32);
        assert!((eval.score - expected).abs() < 1e-9);
    }
    still = world.create_state(0, 1, 100.0).unwrap();
    let eval = evaluate_plan(&world, &still, Side::Blue, &nines, &OpponentModel::DoNothing, &config, &mut rng(0)).unwrap();
    assert_eq!(eval.score, 0.0);
    assert_eq!(eval.opponent_launches, 0);
}

#[test]
fn single_attack_plan_matches_battle_arithmetic() {
    // Blue 100 on 0 faces Red 40 on 1. Red's reserve on 2 sits next to a weak Blue outpost on 3.
    let world = World::new(MapGraph::line(&[30, 200, 5]).unwrap(), GameParams::default()).unwrap();
    let nodes = vec![
        NodeState { owner: Some(Side::Blue), garrison: 100.0 },
        NodeState { owner: Some(Side::Red), garrison: 40.0 },
        NodeState { owner: Some(Side::Red), garrison: 30.0 },
        NodeState { owner: Some(Side::Blue), garrison: 5.0 },
    ];
    let state = world.state_from_parts(0, nodes, Vec::new()).unwrap();
    let codec = Codec::for_map(world.map());
    // Node 0, first arc, 100%, then waits on an unowned source.
    let genome = Genome::parse("0099999999999999", codec).unwrap();
    let config = RheaConfig::default();
    let eval = evaluate_plan(&world, &state, Side::Blue, &genome, &OpponentModel::DoNothing, &config, &mut rng(0)).unwrap();
    let survivors = resolve_lanchester(100.0, 40.0, 1.0, 1.0).survivors;
    let before = world.material_score(&state, Side::Blue);
    assert_eq!(before, (10.0 + 105.0) - (10.0 + 70.0));
    // Blue keeps the emptied node 0 and gains node 1.
    let after = (15.0 + survivors + 5.0) - (5.0 + 30.0);
    // Node swing of 2 x 5 points plus the net unit trade.
    assert!((after - before - (10.0 + (survivors - 100.0) + 40.0)).abs() < 1e-9);
    let expected = after * config.discount.powi(config.horizon_ticks as i32);
    assert!((eval.score - expected).abs() < 1e-9, "{} vs {expected}", eval.score);

    let h1 = OpponentModel::Heuristic(preset("H1").unwrap());
    let with_h1 = evaluate_plan(&world, &state, Side::Blue, &genome, &h1, &config, &mut rng(0)).unwrap();
    assert!(with_h1.opponent_launches > 0);
    assert_ne!(with_h1.score, eval.score);
}

#[test]
fn flat_landscape_returns_a_legal_first_action() {
    // Red is unreachable within the horizon and Blue has nowhere useful to go.
    let world = World::new(MapGraph::line(&[300]).unwrap(), GameParams::default()).unwrap();
    let state = world.create_state(0, 1, 100.0).unwrap();
    let mut s = state.clone();
    world.advance(&mut s);
    let run = rhea_decide(&world, &s, Side::Blue, &RheaConfig::default(), &OpponentModel::DoNothing, &mut rng(9), None)
        .unwrap();
    assert!(world.validate_order(&s, Side::Blue, &run.outcome.action.order).is_ok());
    assert!(run.history.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn dual_tree_values_mirror_each_other() {
    let world = World::new(MapGraph::line(&[6, 6, 6, 6]).unwrap(), GameParams::default()).unwrap();
    let mut state = world.create_state(0, 4, 100.0).unwrap();
    world.advance(&mut state);
    let config = MctsConfig { iterations: 400, ..MctsConfig::default() };
    let mut sum = 0.0;
    let mut scale = 0.0;
    for seed in 0..10 {
        let out = mcts_decide(&world, &state, Side::Blue, &config, &OpponentModel::MctsTree, &mut rng(seed)).unwrap();
        let theirs = out.opponent_value.expect("dual tree reports the opponent value");
        sum += out.value + theirs;
        scale += out.value.abs() + theirs.abs();
        assert!(out.tree_sizes[1] > 0);
    }
    assert!(sum.abs() <= 0.1 * scale.max(1.0), "values do not mirror: sum {sum}, scale {scale}");
}

#[test]
fn plan_length_one_simulates_fewer_events() {
    let mut long = 0;
    let mut short = 0;
    for seed in 0..20 {
        let (world, state, side) = common::midgame(seed);
        for (len, acc) in [(4, &mut long), (1, &mut short)] {
            let config = RheaConfig { plan_length: len, ..RheaConfig::default() };
            let run = rhea_decide(&world, &state, side, &config, &OpponentModel::DoNothing, &mut rng(seed), None).unwrap();
            *acc += run.outcome.events;
        }
    }
    assert!(long > short, "plan length 4 used {long} events, length 1 used {short}");
}

#[test]
fn dual_tree_costs_no_more_than_a_random_opponent() {
    let (mut dual, mut single) = (0, 0);
    for seed in 0..30 {
        let (world, state, side) = common::midgame(seed);
        let config = MctsConfig::default();
        dual += mcts_decide(&world, &state, side, &config, &OpponentModel::MctsTree, &mut rng(seed)).unwrap().events;
        single += mcts_decide(&world, &state, side, &config, &OpponentModel::Random, &mut rng(seed)).unwrap().events;
    }
    assert!(dual as f64 <= 1.1 * single as f64, "dual {dual} events, single {single}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rhea_is_elitist(seed in any::<u64>(), len in 1usize..5) {
        let (world, state, side) = common::midgame(seed);
        let config = RheaConfig { plan_length: len, ..RheaConfig::default() };
        let run = rhea_decide(&world, &state, side, &config, &OpponentModel::Random, &mut rng(seed), None).unwrap();
        prop_assert_eq!(run.history.len(), config.iterations as usize);
        prop_assert!(run.history.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(run.outcome.value, *run.history.last().unwrap());
        prop_assert!(world.validate_order(&state, side, &run.outcome.action.order).is_ok());
    }

    #[test]
    fn mcts_tries_every_root_action_first(seed in any::<u64>()) {
        let (world, state, side) = common::midgame(seed);
        let mut probe = rng(seed);
        let (_, tables) = mcts_search(&world, &state, side, &MctsConfig { iterations: 1, ..MctsConfig::default() }, &OpponentModel::DoNothing, &mut probe).unwrap();
        let width = tables.mine[&tables.root].actions.len() as u32;
        let config = MctsConfig { iterations: width, ..MctsConfig::default() };
        let (_, tables) = mcts_search(&world, &state, side, &config, &OpponentModel::DoNothing, &mut rng(seed)).unwrap();
        let root = &tables.mine[&tables.root];
        prop_assert!(root.visits.iter().all(|&v| v <= 1));
        prop_assert_eq!(root.total, root.visits.iter().sum::<u32>());
    }

    #[test]
    fn mcts_statistics_are_consistent(seed in any::<u64>(), dual in any::<bool>()) {
        let (world, state, side) = common::midgame(seed);
        let config = MctsConfig::default();
        let model = if dual { OpponentModel::MctsTree } else { OpponentModel::DoNothing };
        let (out, tables) = mcts_search(&world, &state, side, &config, &model, &mut rng(seed)).unwrap();
        let root = &tables.mine[&tables.root];
        prop_assert_eq!(root.total, config.iterations);
        prop_assert!(tables.mine.len() <= config.iterations as usize + 1);
        for node in tables.mine.values().chain(tables.theirs.iter().flat_map(|t| t.values())) {
            prop_assert_eq!(node.total, node.visits.iter().sum::<u32>());
            prop_assert!(node.mean.iter().all(|m| m.is_finite()));
        }
        if let Some(theirs) = &tables.theirs {
            prop_assert!(theirs.len() <= config.iterations as usize + 1);
        }
        prop_assert!(root.actions.contains(&out.action));
        let best = *root.visits.iter().max().unwrap();
        let chosen = root.actions.iter().position(|a| *a == out.action).unwrap();
        prop_assert_eq!(root.visits[chosen], best);
    }

    #[test]
    fn do_nothing_opponent_never_moves_in_simulation(seed in any::<u64>()) {
        let (world, state, side) = common::midgame(seed);
        let run = rhea_decide(&world, &state, side, &RheaConfig::default(), &OpponentModel::DoNothing, &mut rng(seed), None).unwrap();
        prop_assert_eq!(run.outcome.opponent_launches, 0);
        let out = mcts_decide(&world, &state, side, &MctsConfig::default(), &OpponentModel::DoNothing, &mut rng(seed)).unwrap();
        prop_assert_eq!(out.opponent_launches, 0);
    }

    #[test]
    fn search_leaves_the_real_state_untouched(seed in any::<u64>()) {
        let (world, state, side) = common::midgame(seed);
        let before = state.clone();
        let settings = SearchSettings::default();
        mcts_decide(&world, &state, side, &settings.mcts, &OpponentModel::MctsTree, &mut rng(seed)).unwrap();
        rhea_decide(&world, &state, side, &settings.rhea, &OpponentModel::Random, &mut rng(seed), None).unwrap();
        prop_assert_eq!(state.state_key(), before.state_key());
        prop_assert_eq!(state.tick(), before.tick());
        prop_assert_eq!(state.events_processed(), before.events_processed());
    }
}
