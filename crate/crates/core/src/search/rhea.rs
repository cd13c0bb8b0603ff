use rand::Rng;

use crate::actionspace::{decode_action, Action, Codec, Genome};
use crate::engine::{DecisionRequest, GameState, Side, World, WAIT_FOREVER};

use super::{discounted, model_step, play, OpponentModel, RheaConfig, SearchError, SearchOutcome};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanEvaluation {
    pub score: f64,
    pub events: u64,
    /// Plan steps actually issued before the horizon.
    pub steps_issued: usize,
    pub opponent_launches: u64,
}

/// Play `genome` forward from `state` for `config.horizon_ticks` ticks and return the
/// discounted material score. Each step is decoded against the state at the moment it
/// executes. Interrupted waits are resumed; once the plan runs out the side idles.
pub fn evaluate_plan<R: Rng + ?Sized>(
    world: &World,
    state: &GameState,
    side: Side,
    genome: &Genome,
    model: &OpponentModel,
    config: &RheaConfig,
    rng: &mut R,
) -> Result<PlanEvaluation, SearchError> {
    if matches!(model, OpponentModel::MctsTree) {
        return Err(SearchError::TreeModelOutsideMcts);
    }
    let mut sim = state.copy_state();
    let start_events = sim.events_processed();
    let horizon = state.tick().saturating_add(config.horizon_ticks);
    let per_action = genome.digits().len() / genome.actions().max(1);
    let mut step = 0;
    let mut opponent_launches = 0;
    while let Some(DecisionRequest::Decide(who)) = world.advance_until(&mut sim, horizon) {
        if who != side {
            if model_step(world, &mut sim, who, model, rng) {
                opponent_launches += 1;
            }
            continue;
        }
        if step > 0 && sim.can_resume(side) {
            world.resume(&mut sim, side).expect("resumable");
            continue;
        }
        let action = if step < genome.actions() {
            decode_action(world, genome.digits(), step * per_action, &sim, side).0
        } else {
            Action::wait(WAIT_FOREVER)
        };
        step += 1;
        play(world, &mut sim, side, action);
    }
    Ok(PlanEvaluation {
        score: discounted(world, &sim, side, state.tick(), config.discount),
        events: sim.events_processed() - start_events,
        steps_issued: step.min(genome.actions()),
        opponent_launches,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RheaRun {
    pub outcome: SearchOutcome,
    /// Final parent genome.
    pub best: Genome,
    /// Parent score after each generation (first entry: the starting genome).
    pub history: Vec<f64>,
}

/// (1+1) EA over digit genomes. `seed` (a previous best plan, already shifted) replaces
/// the random starting genome when its length fits. Returns the chosen first action
/// together with the final best genome and the score history.
pub fn rhea_decide<R: Rng + ?Sized>(
    world: &World,
    state: &GameState,
    side: Side,
    config: &RheaConfig,
    model: &OpponentModel,
    rng: &mut R,
    seed: Option<&Genome>,
) -> Result<RheaRun, SearchError> {
    config.validate()?;
    if matches!(model, OpponentModel::MctsTree) {
        return Err(SearchError::TreeModelOutsideMcts);
    }
    let codec = Codec::for_map(world.map());
    let mut parent = match seed {
        Some(g) if g.actions() == config.plan_length && g.digits().len() == config.plan_length * codec.digits_per_action() => {
            g.clone()
        }
        _ => Genome::random(rng, config.plan_length, codec),
    };
    let first = evaluate_plan(world, state, side, &parent, model, config, rng)?;
    let mut best = first.score;
    let mut events = first.events;
    let mut opponent_launches = first.opponent_launches;
    let mut history = Vec::with_capacity(config.iterations as usize);
    history.push(best);
    for _ in 1..config.iterations {
        let child = parent.mutate(config.mutation_rate, rng);
        let eval = evaluate_plan(world, state, side, &child, model, config, rng)?;
        events += eval.events;
        opponent_launches += eval.opponent_launches;
        if eval.score >= best {
            best = eval.score;
            parent = child;
        }
        history.push(best);
    }
    let (action, _) = decode_action(world, parent.digits(), 0, state, side);
    let outcome = SearchOutcome {
        action,
        evaluations: config.iterations,
        events,
        value: best,
        tree_sizes: [0, 0],
        opponent_value: None,
        opponent_launches,
    };
    Ok(RheaRun { outcome, best: parent, history })
}
