#ifndef NAS_NAS_H
#define NAS_NAS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NAS_API __declspec(dllexport)
#else
#define NAS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status; on failure nas_last_error() describes it. */
typedef enum nas_status {
  NAS_OK = 0,
  NAS_ERR_INVALID_INPUT = 1,
  NAS_ERR_PARSE = 2,
  NAS_ERR_VALIDATION = 3,
  NAS_ERR_NODE_BUDGET = 4,
  NAS_ERR_NO_SOLUTION = 5,
  NAS_ERR_IO = 6,
  NAS_ERR_DEGENERATE = 7,
  NAS_ERR_INFEASIBLE = 8,
  NAS_ERR_INTERNAL = 9
} nas_status;

typedef enum nas_effector { NAS_LEFT = 0, NAS_RIGHT = 1 } nas_effector;

typedef enum nas_objective {
  NAS_OBJECTIVE_FEASIBILITY = 0,
  NAS_OBJECTIVE_MIN_SUM_SQUARED_STEPS = 1
} nas_objective;

typedef enum nas_solve_status {
  NAS_SOLVE_FEASIBLE = 0,
  NAS_SOLVE_MARGINAL = 1,
  NAS_SOLVE_INFEASIBLE = 2,
  NAS_SOLVE_ITERATION_LIMIT = 3
} nas_solve_status;

typedef struct nas_instance nas_instance;
typedef struct nas_tree nas_tree;
typedef struct nas_plan nas_plan;
typedef struct nas_footsteps nas_footsteps;

/* Message of the last failed call on this thread ("" if none). */
NAS_API const char* nas_last_error(void);
NAS_API const char* nas_version(void);
/* Releases strings returned through char** out-parameters. */
NAS_API void nas_free_string(char* s);

/* Instances */
NAS_API nas_status nas_instance_load(const char* path, nas_instance** out);
NAS_API nas_status nas_instance_parse(const char* json, nas_instance** out);
NAS_API nas_status nas_instance_save(const nas_instance* inst, const char* path);
NAS_API nas_status nas_instance_to_json(const nas_instance* inst, char** out);
/* JSON array of load warnings. */
NAS_API nas_status nas_instance_warnings(const nas_instance* inst, char** out);
NAS_API nas_status nas_instance_set_max_steps(nas_instance* inst, int max_steps);
/* Yaw options in degrees; count 0 clears them. */
NAS_API nas_status nas_instance_set_yaw(nas_instance* inst, const double* degrees, size_t count);
/* Generated scene family ("stepping_stones", "tilted_stones", "flat_grid"). */
NAS_API nas_status nas_instance_generate(const char* family, int m, uint64_t seed, int max_steps,
                                         nas_instance** out);

typedef struct nas_instance_info {
  size_t surface_count;
  int max_steps;
  size_t yaw_count;
  int goal_effector;
  int goal_surface_id;
} nas_instance_info;

NAS_API nas_status nas_instance_get_info(const nas_instance* inst, nas_instance_info* out);
NAS_API void nas_instance_free(nas_instance* inst);

/* Trees */
typedef struct nas_build_options {
  int merge;              /* nonzero merges equal regions (default 1) */
  unsigned threads;       /* layer workers, 0 = hardware (default 1) */
  uint64_t node_budget;   /* 0 = default (NAS_NODE_BUDGET or 5000000) */
  int truncate_on_budget; /* keep the complete layers instead of failing */
  int has_stop;           /* stop at the first layer containing stop_point */
  double stop_point[3];
  int stop_effector;
} nas_build_options;

NAS_API void nas_build_options_init(nas_build_options* opts);
NAS_API nas_status nas_tree_build(const nas_instance* inst, const nas_build_options* opts,
                                  nas_tree** out);
NAS_API nas_status nas_tree_save(const nas_tree* tree, const char* path);
NAS_API nas_status nas_tree_load(const char* path, nas_tree** out);
NAS_API void nas_tree_free(nas_tree* tree);
NAS_API size_t nas_tree_node_count(const nas_tree* tree);
NAS_API size_t nas_tree_layer_count(const nas_tree* tree);
/* Writes min(capacity, layers) counts; *written receives the layer count. */
NAS_API nas_status nas_tree_layer_counts(const nas_tree* tree, size_t* counts, size_t capacity,
                                         size_t* written);
/* {"layers":[...],"build_ms":..,"merged":..,"truncated":..,"stopped_early":..} */
NAS_API nas_status nas_tree_stats_json(const nas_tree* tree, char** out);
/* Copy of the instance the tree was built from. */
NAS_API nas_status nas_tree_instance(const nas_tree* tree, nas_instance** out);

typedef struct nas_node_info {
  int id;
  int depth;
  int effector;
  int surface_id; /* -1 for the goal node */
  int valid;
  size_t vertex_count;
  double chebyshev_center[3];
} nas_node_info;

NAS_API nas_status nas_node_get(const nas_tree* tree, int node_id, nas_node_info* out);

/* Queries. Ids are written in ascending (depth, id); *count receives the
   total number of hits even when it exceeds capacity. */
NAS_API nas_status nas_find_nodes(const nas_tree* tree, const double point[3], int effector,
                                  int* ids, size_t capacity, size_t* count);
NAS_API nas_status nas_extract_plan(const nas_tree* tree, int node_id, nas_plan** out);
NAS_API nas_status nas_invalidate_surface(nas_tree* tree, int surface_id, size_t* count);
/* NAS_ERR_NO_SOLUTION when no valid chain exists. */
NAS_API nas_status nas_replan(const nas_tree* tree, const double point[3], int effector,
                              nas_plan** out);

NAS_API size_t nas_plan_length(const nas_plan* plan);
/* Entry i in 0..length: 0 is the start node, length the goal node. */
NAS_API nas_status nas_plan_entry(const nas_plan* plan, size_t i, int* node_id, int* surface_id,
                                  int* effector);
NAS_API nas_status nas_plan_to_json(const nas_plan* plan, char** out);
NAS_API void nas_plan_free(nas_plan* plan);

/* Footstep positions along a plan */
typedef struct nas_footstep_options {
  int horizon;   /* steps to place, 0 = whole plan */
  int objective; /* nas_objective */
} nas_footstep_options;

NAS_API void nas_footstep_options_init(nas_footstep_options* opts);
NAS_API nas_status nas_footstep_solve(const nas_tree* tree, const nas_plan* plan,
                                      const double start[3], const nas_footstep_options* opts,
                                      nas_footsteps** out);
NAS_API int nas_footsteps_status(const nas_footsteps* steps);
NAS_API size_t nas_footsteps_count(const nas_footsteps* steps);
NAS_API nas_status nas_footsteps_position(const nas_footsteps* steps, size_t i, double out[3],
                                          int* effector, int* surface_id);
NAS_API double nas_footsteps_objective(const nas_footsteps* steps);
NAS_API double nas_footsteps_max_violation(const nas_footsteps* steps);
NAS_API nas_status nas_footsteps_to_json(const nas_footsteps* steps, char** out);
NAS_API void nas_footsteps_free(nas_footsteps* steps);

/* Top-view SVG of the tree's scene and regions; steps may be NULL. */
NAS_API nas_status nas_svg(const nas_tree* tree, const nas_footsteps* steps, int max_depth,
                           char** out);

/* Benchmarks */
typedef struct nas_bench_options {
  const char* families; /* comma separated, NULL = all */
  const int* m_values;  /* NULL = {4,10,22,43} */
  size_t m_count;
  const int* n_values;  /* NULL = suite default */
  size_t n_count;
  uint64_t seed;
  uint64_t no_merge_budget;
  int query_samples;
  int plan_samples;
  int threads;
  int include_no_merge; /* growth suite only */
} nas_bench_options;

NAS_API void nas_bench_options_init(nas_bench_options* opts);
/* suite is "growth" or "timing"; *csv receives the CSV text and, when
   summary is not NULL, *summary a short text digest. */
NAS_API nas_status nas_bench_run(const char* suite, const nas_bench_options* opts, char** csv,
                                 char** summary);

/* Verification */
typedef struct nas_verify_options {
  int rollouts;
  uint64_t seed;
  int merge_samples_per_layer;
  uint64_t merge_budget;
  int check_merge;
} nas_verify_options;

NAS_API void nas_verify_options_init(nas_verify_options* opts);
/* expected may be NULL. *passed is 1 or 0; *report receives a text report. */
NAS_API nas_status nas_verify(const nas_tree* tree, const nas_instance* expected,
                              const nas_verify_options* opts, int* passed, char** report);

#ifdef __cplusplus
}
#endif

#endif
