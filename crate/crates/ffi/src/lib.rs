//! C interface to the Ground War engine and agents.
//!
//! Every function returns a status code (`GW_OK` on success) and writes results through
//! out-pointers. On failure `gw_last_error` describes the most recent error on the calling
//! thread. Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use groundwar::actionspace::Action;
use groundwar::engine::{DecisionRequest, GameParams, GameState, MapGraph, Order, Outcome, Side, World};
use groundwar::experiments::{generate_map, mix_seed, play_game, MAX_NODES, MIN_NODES};
use groundwar::search::{play, AgentSpec, Player, SearchSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GW_OK: i32 = 0;
pub const GW_ERR_NULL: i32 = 1;
pub const GW_ERR_ARGUMENT: i32 = 2;
pub const GW_ERR_UTF8: i32 = 3;
pub const GW_ERR_PARSE: i32 = 4;
pub const GW_ERR_ENGINE: i32 = 5;
pub const GW_ERR_SEARCH: i32 = 6;
pub const GW_ERR_NOT_TERMINAL: i32 = 7;
pub const GW_ERR_PANIC: i32 = 9;
/// Refused orders return 10..=17, one code per refusal reason.
pub const GW_ERR_ORDER_C2: i32 = 10;
pub const GW_ERR_ORDER_UNKNOWN_NODE: i32 = 11;
pub const GW_ERR_ORDER_UNOWNED_SOURCE: i32 = 12;
pub const GW_ERR_ORDER_INSUFFICIENT_FORCE: i32 = 13;
pub const GW_ERR_ORDER_NOT_ADJACENT: i32 = 14;
pub const GW_ERR_ORDER_INVALID_SIZE: i32 = 15;
pub const GW_ERR_ORDER_INVALID_WAIT: i32 = 16;
pub const GW_ERR_ORDER_NOTHING_TO_RESUME: i32 = 17;

pub const GW_SIDE_BLUE: i32 = 0;
pub const GW_SIDE_RED: i32 = 1;
/// Written by `gw_game_advance` when the game is over.
pub const GW_TERMINAL: i32 = -1;

pub const GW_OUTCOME_BLUE_WIN: i32 = 0;
pub const GW_OUTCOME_RED_WIN: i32 = 1;
pub const GW_OUTCOME_DRAW: i32 = 2;

pub const GW_ACTION_LAUNCH: i32 = 0;
pub const GW_ACTION_WAIT: i32 = 1;

/// A wait of this many ticks never expires on its own.
pub const GW_WAIT_FOREVER: u32 = u32::MAX;

/// Map topology.
pub struct GwMap(MapGraph);

/// A game in progress: rules, map and mutable state.
pub struct GwGame {
    world: World,
    state: GameState,
}

/// An agent with its own random stream.
pub struct GwAgent(Player);

/// An agent's chosen action. For launches `size` is in units; `wait_after` is the idle
/// period the agent wants after the launch. For waits only `ticks` is used.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GwAction {
    pub kind: i32,
    pub from: u32,
    pub to: u32,
    pub size: f64,
    pub ticks: u32,
    pub wait_after: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(i32, String);

type Res<T> = Result<T, Fail>;

fn fail<T>(code: i32, msg: impl Into<String>) -> Res<T> {
    Err(Fail(code, msg.into()))
}

fn guard(body: impl FnOnce() -> Res<()>) -> i32 {
    let result = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(GW_ERR_PANIC, "internal panic"));
    match result {
        Ok(()) => GW_OK,
        Err(Fail(code, msg)) => {
            let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
            LAST_ERROR.with(|e| *e.borrow_mut() = text);
            code
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Res<&'a str> {
    if p.is_null() {
        return fail(GW_ERR_NULL, format!("{what} is null"));
    }
    CStr::from_ptr(p).to_str().or_else(|_| fail(GW_ERR_UTF8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Res<&'a T> {
    p.as_ref().map_or_else(|| fail(GW_ERR_NULL, format!("{what} is null")), Ok)
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Res<&'a mut T> {
    p.as_mut().map_or_else(|| fail(GW_ERR_NULL, format!("{what} is null")), Ok)
}

unsafe fn put<T>(out: *mut T, value: T) -> Res<()> {
    if out.is_null() {
        return fail(GW_ERR_NULL, "output pointer is null");
    }
    out.write(value);
    Ok(())
}

fn side(code: i32) -> Res<Side> {
    match code {
        GW_SIDE_BLUE => Ok(Side::Blue),
        GW_SIDE_RED => Ok(Side::Red),
        other => fail(GW_ERR_ARGUMENT, format!("side must be 0 (blue) or 1 (red), got {other}")),
    }
}

fn side_code(side: Side) -> i32 {
    match side {
        Side::Blue => GW_SIDE_BLUE,
        Side::Red => GW_SIDE_RED,
    }
}

fn order_result(r: Result<(), groundwar::engine::OrderError>) -> Res<()> {
    r.or_else(|e| fail(e.code(), e.to_string()))
}

/// Message for the last failed call on this thread; empty if none. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn gw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Generate a random connected map. `node_count` of 0 picks 8 to 10 nodes from the seed.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_map_generate(seed: u64, node_count: u32, out: *mut *mut GwMap) -> i32 {
    guard(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed]));
        let n = match node_count as usize {
            0 => rng.gen_range(MIN_NODES..=MAX_NODES),
            n if (MIN_NODES..=MAX_NODES).contains(&n) => n,
            n => return fail(GW_ERR_ARGUMENT, format!("node count {n} outside {MIN_NODES}..={MAX_NODES}")),
        };
        put(out, Box::into_raw(Box::new(GwMap(generate_map(&mut rng, n)))))
    })
}

/// Parse a map from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_map_from_json(json: *const c_char, out: *mut *mut GwMap) -> i32 {
    guard(|| {
        let map = MapGraph::from_json(text(json, "json")?).or_else(|e| fail(GW_ERR_PARSE, e.to_string()))?;
        put(out, Box::into_raw(Box::new(GwMap(map))))
    })
}

/// Serialise a map to JSON; free the result with `gw_string_free`.
///
/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_map_to_json(map: *const GwMap, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let map = handle(map, "map")?;
        let s = CString::new(map.0.to_json()).or_else(|e| fail(GW_ERR_ARGUMENT, e.to_string()))?;
        put(out, s.into_raw())
    })
}

/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_map_node_count(map: *const GwMap, out: *mut u32) -> i32 {
    guard(|| put(out, handle(map, "map")?.0.node_count() as u32))
}

/// # Safety
/// `map` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gw_map_free(map: *mut GwMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Start a game on a copy of `map`. `params_json` may be null for the default rules.
///
/// # Safety
/// `map` must be a live handle, `params_json` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gw_game_new(
    map: *const GwMap,
    blue_start: u32,
    red_start: u32,
    start_force: f64,
    params_json: *const c_char,
    out: *mut *mut GwGame,
) -> i32 {
    guard(|| {
        let map = handle(map, "map")?;
        let params: GameParams = if params_json.is_null() {
            GameParams::default()
        } else {
            serde_json::from_str(text(params_json, "params_json")?).or_else(|e| fail(GW_ERR_PARSE, e.to_string()))?
        };
        let world = World::new(map.0.clone(), params).or_else(|e| fail(GW_ERR_ENGINE, e.to_string()))?;
        let state = world
            .create_state(blue_start as usize, red_start as usize, start_force)
            .or_else(|e| fail(GW_ERR_ENGINE, e.to_string()))?;
        put(out, Box::into_raw(Box::new(GwGame { world, state })))
    })
}

/// Independent copy of a game, for use as a forward model.
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_game_clone(game: *const GwGame, out: *mut *mut GwGame) -> i32 {
    guard(|| {
        let g = handle(game, "game")?;
        put(out, Box::into_raw(Box::new(GwGame { world: g.world.clone(), state: g.state.copy_state() })))
    })
}

/// Run to the next decision. Writes the side to move, or `GW_TERMINAL`.
///
/// # Safety
/// `game` must be a live handle and `out_side` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_game_advance(game: *mut GwGame, out_side: *mut i32) -> i32 {
    guard(|| {
        let g = handle_mut(game, "game")?;
        let code = match g.world.advance(&mut g.state) {
            DecisionRequest::Decide(s) => side_code(s),
            DecisionRequest::Terminal => GW_TERMINAL,
        };
        put(out_side, code)
    })
}

/// Launch `size` units from `from` to the adjacent node `to`, then idle for `wait_after`
/// ticks (0 to decide again as soon as allowed).
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gw_game_launch(game: *mut GwGame, side_code: i32, from: u32, to: u32, size: f64, wait_after: u32) -> i32 {
    guard(|| {
        let g = handle_mut(game, "game")?;
        let order = Order::LaunchExpedition { size, from: from as usize, to: to as usize };
        order_result(g.world.issue_order_then_wait(&mut g.state, side(side_code)?, order, wait_after))
    })
}

/// Stay idle for `ticks` (`GW_WAIT_FOREVER` for good). Enemy launches interrupt a wait.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gw_game_wait(game: *mut GwGame, side_code: i32, ticks: u32) -> i32 {
    guard(|| {
        let g = handle_mut(game, "game")?;
        order_result(g.world.issue_order(&mut g.state, side(side_code)?, Order::Wait { ticks }))
    })
}

/// Ignore an interruption and keep the wait already scheduled.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gw_game_resume(game: *mut GwGame, side_code: i32) -> i32 {
    guard(|| {
        let g = handle_mut(game, "game")?;
        order_result(g.world.resume(&mut g.state, side(side_code)?))
    })
}

/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_game_tick(game: *const GwGame, out: *mut u32) -> i32 {
    guard(|| put(out, handle(game, "game")?.state.tick()))
}

/// Material score from `side`'s point of view.
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_game_score(game: *const GwGame, side_code: i32, out: *mut f64) -> i32 {
    guard(|| {
        let g = handle(game, "game")?;
        put(out, g.world.material_score(&g.state, side(side_code)?))
    })
}

/// Owner (`GW_SIDE_*`, or -1 when neutral) and garrison of a node.
///
/// # Safety
/// `game` must be a live handle and both outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gw_game_node(game: *const GwGame, node: u32, out_owner: *mut i32, out_garrison: *mut f64) -> i32 {
    guard(|| {
        let g = handle(game, "game")?;
        let node = node as usize;
        if node >= g.world.map().node_count() {
            return fail(GW_ERR_ARGUMENT, format!("node {node} does not exist"));
        }
        put(out_owner, g.state.owner(node).map_or(-1, side_code))?;
        put(out_garrison, g.state.garrison(node))
    })
}

/// Result of a finished game; `GW_ERR_NOT_TERMINAL` while it is still running.
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_game_outcome(game: *const GwGame, out: *mut i32) -> i32 {
    guard(|| {
        let g = handle(game, "game")?;
        if !g.world.is_terminal(&g.state) {
            return fail(GW_ERR_NOT_TERMINAL, "game is still running");
        }
        put(
            out,
            match g.world.outcome(&g.state) {
                Outcome::BlueWin => GW_OUTCOME_BLUE_WIN,
                Outcome::RedWin => GW_OUTCOME_RED_WIN,
                Outcome::Draw => GW_OUTCOME_DRAW,
            },
        )
    })
}

/// # Safety
/// `game` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gw_game_free(game: *mut GwGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Create an agent from its name (`RHEA`, `MCTS+H3`, `H1`, `H(4;2.5;A,RF)`, `RND`, `NONE`).
/// `settings_json` may be null for the default planner settings.
///
/// # Safety
/// `spec` must be NUL-terminated, `settings_json` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gw_agent_new(spec: *const c_char, seed: u64, settings_json: *const c_char, out: *mut *mut GwAgent) -> i32 {
    guard(|| {
        let spec: AgentSpec = text(spec, "spec")?.parse().or_else(|e: groundwar::search::SpecError| fail(GW_ERR_PARSE, e.to_string()))?;
        let settings: SearchSettings = if settings_json.is_null() {
            SearchSettings::default()
        } else {
            serde_json::from_str(text(settings_json, "settings_json")?).or_else(|e| fail(GW_ERR_PARSE, e.to_string()))?
        };
        put(out, Box::into_raw(Box::new(GwAgent(Player::new(spec, settings, seed)))))
    })
}

fn decide(agent: &mut GwAgent, g: &GwGame, side: Side) -> Res<Action> {
    agent.0.decide(&g.world, &g.state, side).or_else(|e| fail(GW_ERR_SEARCH, e.to_string()))
}

/// Choose an action for `side` without applying it.
///
/// # Safety
/// `agent` and `game` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gw_agent_decide(agent: *mut GwAgent, game: *const GwGame, side_code: i32, out: *mut GwAction) -> i32 {
    guard(|| {
        let action = decide(handle_mut(agent, "agent")?, handle(game, "game")?, side(side_code)?)?;
        let a = match action.order {
            Order::LaunchExpedition { size, from, to } => GwAction {
                kind: GW_ACTION_LAUNCH,
                from: from as u32,
                to: to as u32,
                size,
                ticks: 0,
                wait_after: action.wait_after,
            },
            Order::Wait { ticks } => GwAction { kind: GW_ACTION_WAIT, ticks, ..GwAction::default() },
        };
        put(out, a)
    })
}

/// Choose an action for `side` and apply it. A refused order becomes a short wait.
///
/// # Safety
/// `agent` and `game` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn gw_agent_act(agent: *mut GwAgent, game: *mut GwGame, side_code: i32) -> i32 {
    guard(|| {
        let side = side(side_code)?;
        let g = handle_mut(game, "game")?;
        let action = decide(handle_mut(agent, "agent")?, g, side)?;
        play(&g.world, &mut g.state, side, action);
        Ok(())
    })
}

/// # Safety
/// `agent` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gw_agent_free(agent: *mut GwAgent) {
    if !agent.is_null() {
        drop(Box::from_raw(agent));
    }
}

/// Play a whole game with seed-derived start nodes and default rules. Any output pointer
/// may be null.
///
/// # Safety
/// `map` must be a live handle; `blue` and `red` NUL-terminated agent names.
#[no_mangle]
pub unsafe extern "C" fn gw_play_game(
    map: *const GwMap,
    blue: *const c_char,
    red: *const c_char,
    seed: u64,
    out_outcome: *mut i32,
    out_score_blue: *mut f64,
    out_ticks: *mut u32,
) -> i32 {
    guard(|| {
        let map = handle(map, "map")?;
        let parse = |p, what| -> Res<AgentSpec> {
            text(p, what)?.parse().or_else(|e: groundwar::search::SpecError| fail(GW_ERR_PARSE, e.to_string()))
        };
        let (blue, red) = (parse(blue, "blue")?, parse(red, "red")?);
        let world = World::new(map.0.clone(), GameParams::default()).or_else(|e| fail(GW_ERR_ENGINE, e.to_string()))?;
        let record = play_game(&world, 0, &blue, &red, &SearchSettings::default(), seed, None)
            .or_else(|e| fail(GW_ERR_SEARCH, e.to_string()))?;
        if !out_outcome.is_null() {
            let code = match record.winner {
                Outcome::BlueWin => GW_OUTCOME_BLUE_WIN,
                Outcome::RedWin => GW_OUTCOME_RED_WIN,
                Outcome::Draw => GW_OUTCOME_DRAW,
            };
            out_outcome.write(code);
        }
        if !out_score_blue.is_null() {
            out_score_blue.write(record.final_score_blue);
        }
        if !out_ticks.is_null() {
            out_ticks.write(record.ticks_played);
        }
        Ok(())
    })
}
