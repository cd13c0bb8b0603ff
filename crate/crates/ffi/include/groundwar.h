#ifndef GROUNDWAR_H
#define GROUNDWAR_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GW_OK 0

#define GW_ERR_NULL 1

#define GW_ERR_ARGUMENT 2

#define GW_ERR_UTF8 3

#define GW_ERR_PARSE 4

#define GW_ERR_ENGINE 5

#define GW_ERR_SEARCH 6

#define GW_ERR_NOT_TERMINAL 7

#define GW_ERR_PANIC 9

/**
 * Refused orders return 10..=17, one code per refusal reason.
 */
#define GW_ERR_ORDER_C2 10

#define GW_ERR_ORDER_UNKNOWN_NODE 11

#define GW_ERR_ORDER_UNOWNED_SOURCE 12

#define GW_ERR_ORDER_INSUFFICIENT_FORCE 13

#define GW_ERR_ORDER_NOT_ADJACENT 14

#define GW_ERR_ORDER_INVALID_SIZE 15

#define GW_ERR_ORDER_INVALID_WAIT 16

#define GW_ERR_ORDER_NOTHING_TO_RESUME 17

#define GW_SIDE_BLUE 0

#define GW_SIDE_RED 1

/**
 * Written by `gw_game_advance` when the game is over.
 */
#define GW_TERMINAL -1

#define GW_OUTCOME_BLUE_WIN 0

#define GW_OUTCOME_RED_WIN 1

#define GW_OUTCOME_DRAW 2

#define GW_ACTION_LAUNCH 0

#define GW_ACTION_WAIT 1

/**
 * A wait of this many ticks never expires on its own.
 */
#define GW_WAIT_FOREVER UINT32_MAX

/**
 * An agent with its own random stream.
 */
typedef struct GwAgent GwAgent;

/**
 * A game in progress: rules, map and mutable state.
 */
typedef struct GwGame GwGame;

/**
 * Map topology.
 */
typedef struct GwMap GwMap;

/**
 * An agent's chosen action. For launches `size` is in units; `wait_after` is the idle
 * period the agent wants after the launch. For waits only `ticks` is used.
 */
typedef struct GwAction {
  int32_t kind;
  uint32_t from;
  uint32_t to;
  double size;
  uint32_t ticks;
  uint32_t wait_after;
} GwAction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. Valid until the next
 * failing call on the same thread.
 */
const char *gw_last_error(void);

/**
 * Library version as a static string.
 */
const char *gw_version(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gw_string_free(char *s);

/**
 * Generate a random connected map. `node_count` of 0 picks 8 to 10 nodes from the seed.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t gw_map_generate(uint64_t seed, uint32_t node_count, struct GwMap **out);

/**
 * Parse a map from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
int32_t gw_map_from_json(const char *json, struct GwMap **out);

/**
 * Serialise a map to JSON; free the result with `gw_string_free`.
 *
 * # Safety
 * `map` must be a live handle and `out` a valid pointer.
 */
int32_t gw_map_to_json(const struct GwMap *map, char **out);

/**
 * # Safety
 * `map` must be a live handle and `out` a valid pointer.
 */
int32_t gw_map_node_count(const struct GwMap *map, uint32_t *out);

/**
 * # Safety
 * `map` must come from this library and not have been freed; null is ignored.
 */
void gw_map_free(struct GwMap *map);

/**
 * Start a game on a copy of `map`. `params_json` may be null for the default rules.
 *
 * # Safety
 * `map` must be a live handle, `params_json` null or NUL-terminated, `out` valid.
 */
int32_t gw_game_new(const struct GwMap *map,
                    uint32_t blue_start,
                    uint32_t red_start,
                    double start_force,
                    const char *params_json,
                    struct GwGame **out);

/**
 * Independent copy of a game, for use as a forward model.
 *
 * # Safety
 * `game` must be a live handle and `out` a valid pointer.
 */
int32_t gw_game_clone(const struct GwGame *game, struct GwGame **out);

/**
 * Run to the next decision. Writes the side to move, or `GW_TERMINAL`.
 *
 * # Safety
 * `game` must be a live handle and `out_side` a valid pointer.
 */
int32_t gw_game_advance(struct GwGame *game, int32_t *out_side);

/**
 * Launch `size` units from `from` to the adjacent node `to`, then idle for `wait_after`
 * ticks (0 to decide again as soon as allowed).
 *
 * # Safety
 * `game` must be a live handle.
 */
int32_t gw_game_launch(struct GwGame *game,
                       int32_t side_code,
                       uint32_t from,
                       uint32_t to,
                       double size,
                       uint32_t wait_after);

/**
 * Stay idle for `ticks` (`GW_WAIT_FOREVER` for good). Enemy launches interrupt a wait.
 *
 * # Safety
 * `game` must be a live handle.
 */
int32_t gw_game_wait(struct GwGame *game, int32_t side_code, uint32_t ticks);

/**
 * Ignore an interruption and keep the wait already scheduled.
 *
 * # Safety
 * `game` must be a live handle.
 */
int32_t gw_game_resume(struct GwGame *game, int32_t side_code);

/**
 * # Safety
 * `game` must be a live handle and `out` a valid pointer.
 */
int32_t gw_game_tick(const struct GwGame *game, uint32_t *out);

/**
 * Material score from `side`'s point of view.
 *
 * # Safety
 * `game` must be a live handle and `out` a valid pointer.
 */
int32_t gw_game_score(const struct GwGame *game, int32_t side_code, double *out);

/**
 * Owner (`GW_SIDE_*`, or -1 when neutral) and garrison of a node.
 *
 * # Safety
 * `game` must be a live handle and both outputs valid pointers.
 */
int32_t gw_game_node(const struct GwGame *game,
                     uint32_t node,
                     int32_t *out_owner,
                     double *out_garrison);

/**
 * Result of a finished game; `GW_ERR_NOT_TERMINAL` while it is still running.
 *
 * # Safety
 * `game` must be a live handle and `out` a valid pointer.
 */
int32_t gw_game_outcome(const struct GwGame *game, int32_t *out);

/**
 * # Safety
 * `game` must come from this library and not have been freed; null is ignored.
 */
void gw_game_free(struct GwGame *game);

/**
 * Create an agent from its name (`RHEA`, `MCTS+H3`, `H1`, `H(4;2.5;A,RF)`, `RND`, `NONE`).
 * `settings_json` may be null for the default planner settings.
 *
 * # Safety
 * `spec` must be NUL-terminated, `settings_json` null or NUL-terminated, `out` valid.
 */
int32_t gw_agent_new(const char *spec,
                     uint64_t seed,
                     const char *settings_json,
                     struct GwAgent **out);

/**
 * Choose an action for `side` without applying it.
 *
 * # Safety
 * `agent` and `game` must be live handles and `out` a valid pointer.
 */
int32_t gw_agent_decide(struct GwAgent *agent,
                        const struct GwGame *game,
                        int32_t side_code,
                        struct GwAction *out);

/**
 * Choose an action for `side` and apply it. A refused order becomes a short wait.
 *
 * # Safety
 * `agent` and `game` must be live handles.
 */
int32_t gw_agent_act(struct GwAgent *agent, struct GwGame *game, int32_t side_code);

/**
 * # Safety
 * `agent` must come from this library and not have been freed; null is ignored.
 */
void gw_agent_free(struct GwAgent *agent);

/**
 * Play a whole game with seed-derived start nodes and default rules. Any output pointer
 * may be null.
 *
 * # Safety
 * `map` must be a live handle; `blue` and `red` NUL-terminated agent names.
 */
int32_t gw_play_game(const struct GwMap *map,
                     const char *blue,
                     const char *red,
                     uint64_t seed,
                     int32_t *out_outcome,
                     double *out_score_blue,
                     uint32_t *out_ticks);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROUNDWAR_H */
