#ifndef FLOWDEC_H
#define FLOWDEC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FlowdecFormulation {
  FLOWDEC_FORMULATION_MA = 0,
  FLOWDEC_FORMULATION_LA = 1,
  FLOWDEC_FORMULATION_NAIVE = 2,
} FlowdecFormulation;

typedef enum FlowdecStatus {
  FLOWDEC_STATUS_OK = 0,
  FLOWDEC_STATUS_NULL_POINTER = 1,
  FLOWDEC_STATUS_INVALID_UTF8 = 2,
  FLOWDEC_STATUS_PARSE = 3,
  FLOWDEC_STATUS_INVALID_INPUT = 4,
  FLOWDEC_STATUS_INFEASIBLE = 5,
  FLOWDEC_STATUS_TIME_LIMIT = 6,
  FLOWDEC_STATUS_OUT_OF_RANGE = 7,
  FLOWDEC_STATUS_INTERNAL = 8,
  FLOWDEC_STATUS_PANIC = 9,
} FlowdecStatus;

typedef struct FlowdecAdjustable FlowdecAdjustable;

typedef struct FlowdecInstance FlowdecInstance;

typedef struct FlowdecSolution FlowdecSolution;

/**
 * Solver settings; zero selects the default for every field.
 */
typedef struct FlowdecOptions {
  size_t kbar;
  uint64_t wmax;
  /**
   * Seconds per solve, or per master problem for two-stage runs.
   */
  double time_limit;
} FlowdecOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 */
const char *flowdec_last_error(void);

const char *flowdec_version(void);

/**
 * Parses an instance in the JSON file format.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum FlowdecStatus flowdec_instance_parse(const char *json, struct FlowdecInstance **out);

/**
 * Loads one of the bundled instances by name.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum FlowdecStatus flowdec_instance_bundled(const char *name, struct FlowdecInstance **out);

/**
 * # Safety
 * `instance` must come from this library or be null.
 */
void flowdec_instance_free(struct FlowdecInstance *instance);

/**
 * # Safety
 * `instance` must be a live handle or null (then 0 is returned).
 */
size_t flowdec_instance_edge_count(const struct FlowdecInstance *instance);

/**
 * Deterministic decomposition minimizing `a_y·k + a_w·Σw`. `options` may be null.
 *
 * # Safety
 * `instance` must be a live handle; `out` a valid pointer.
 */
enum FlowdecStatus flowdec_solve(const struct FlowdecInstance *instance,
                                 double a_y,
                                 double a_w,
                                 const struct FlowdecOptions *options,
                                 struct FlowdecSolution **out);

/**
 * # Safety
 * `solution` must come from this library or be null.
 */
void flowdec_solution_free(struct FlowdecSolution *solution);

/**
 * # Safety
 * `solution` must be a live handle or null (then 0 is returned).
 */
size_t flowdec_solution_path_count(const struct FlowdecSolution *solution);

/**
 * # Safety
 * `solution` must be a live handle or null.
 */
double flowdec_solution_objective(const struct FlowdecSolution *solution);

/**
 * `1` when the solution is proven optimal, `0` otherwise.
 *
 * # Safety
 * `solution` must be a live handle or null.
 */
int32_t flowdec_solution_is_optimal(const struct FlowdecSolution *solution);

/**
 * Weight of path `index` and its length in edges.
 *
 * # Safety
 * `solution` must be a live handle; `weight` and `len` valid pointers.
 */
enum FlowdecStatus flowdec_solution_path(const struct FlowdecSolution *solution,
                                         size_t index,
                                         uint64_t *weight,
                                         size_t *len);

/**
 * Copies the edge ids of path `index` into `buffer`, which must hold at
 * least the path length reported by `flowdec_solution_path`.
 *
 * # Safety
 * `solution` must be a live handle and `buffer` valid for `capacity` writes.
 */
enum FlowdecStatus flowdec_solution_path_edges(const struct FlowdecSolution *solution,
                                               const struct FlowdecInstance *instance,
                                               size_t index,
                                               uint32_t *buffer,
                                               size_t capacity);

/**
 * Two-stage solve over a scenario file's contents. `options` may be null.
 *
 * # Safety
 * `instance` must be a live handle, `scenarios_json` nul-terminated and
 * `out` a valid pointer.
 */
enum FlowdecStatus flowdec_adjustable_solve(const struct FlowdecInstance *instance,
                                            const char *scenarios_json,
                                            enum FlowdecFormulation formulation,
                                            const struct FlowdecOptions *options,
                                            struct FlowdecAdjustable **out);

/**
 * # Safety
 * `result` must come from this library or be null.
 */
void flowdec_adjustable_free(struct FlowdecAdjustable *result);

/**
 * Path count `Y`.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
size_t flowdec_adjustable_path_count(const struct FlowdecAdjustable *result);

/**
 * Largest per-scenario weight total `W`.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
uint64_t flowdec_adjustable_weight(const struct FlowdecAdjustable *result);

/**
 * # Safety
 * `result` must be a live handle or null.
 */
double flowdec_adjustable_objective(const struct FlowdecAdjustable *result);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FLOWDEC_H */
