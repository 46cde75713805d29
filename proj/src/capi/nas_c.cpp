#include "nas/nas.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

#include <json.hpp>

#include "bench.hpp"
#include "scenarios.hpp"
#include "svg.hpp"
#include "verify.hpp"

using nlohmann::json;

struct nas_instance {
  std::shared_ptr<nas::ProblemInstance> inst;
};

// The tree is mutable only through nas_invalidate_surface; callers must not
// run it concurrently with queries on the same handle.
struct nas_tree {
  nas::FeasibilityTree tree;
  nas::SpatialIndex index;
};

struct nas_plan {
  nas::SurfacePlan plan;
};

struct nas_footsteps {
  nas::FootstepPlan plan;
  nas::Vec3 start;
  nas::Effector start_effector;
  nas::Objective objective_kind;
};

namespace {

thread_local std::string g_last_error;

nas_status to_status(nas::ErrorCode c) {
  switch (c) {
    case nas::ErrorCode::kInvalidInput: return NAS_ERR_INVALID_INPUT;
    case nas::ErrorCode::kParse: return NAS_ERR_PARSE;
    case nas::ErrorCode::kValidation: return NAS_ERR_VALIDATION;
    case nas::ErrorCode::kNodeBudget: return NAS_ERR_NODE_BUDGET;
    case nas::ErrorCode::kNoSolution: return NAS_ERR_NO_SOLUTION;
    case nas::ErrorCode::kIo: return NAS_ERR_IO;
    case nas::ErrorCode::kDegenerateOperand: return NAS_ERR_DEGENERATE;
    case nas::ErrorCode::kInfeasible: return NAS_ERR_INFEASIBLE;
  }
  return NAS_ERR_INTERNAL;
}

template <class F>
nas_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return NAS_OK;
  } catch (const nas::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return NAS_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NAS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NAS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return NAS_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw nas::Error(nas::ErrorCode::kInvalidInput, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nas::Effector effector_of(int e) {
  require(e == NAS_LEFT || e == NAS_RIGHT, "effector must be NAS_LEFT or NAS_RIGHT");
  return e == NAS_LEFT ? nas::Effector::kLeft : nas::Effector::kRight;
}

nas::Vec3 point_of(const double* p) {
  require(p != nullptr, "point is null");
  const nas::Vec3 v(p[0], p[1], p[2]);
  require(nas::is_finite(v), "point is not finite");
  return v;
}

json vec_json(const nas::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json stats_json(const nas::TreeStats& s) {
  return {{"layers", s.layer_counts()},
          {"total_nodes", s.total_nodes()},
          {"build_ms", s.build_ms},
          {"merged", s.merged},
          {"truncated", s.truncated},
          {"stopped_early", s.stopped_early},
          {"mean_branching", s.mean_branching()}};
}

nas_tree* wrap_tree(nas::FeasibilityTree tree) {
  auto* t = new nas_tree{std::move(tree), {}};
  t->index = nas::SpatialIndex(t->tree);
  return t;
}

std::vector<std::string> split_commas(const char* s) {
  std::vector<std::string> out;
  if (!s) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

extern "C" {

const char* nas_last_error(void) { return g_last_error.c_str(); }

const char* nas_version(void) { return "1.0.0"; }

void nas_free_string(char* s) { std::free(s); }

nas_status nas_instance_load(const char* path, nas_instance** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new nas_instance{std::make_shared<nas::ProblemInstance>(nas::load_instance(path))};
  });
}

nas_status nas_instance_parse(const char* text, nas_instance** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new nas_instance{std::make_shared<nas::ProblemInstance>(nas::parse_instance(text))};
  });
}

nas_status nas_instance_save(const nas_instance* inst, const char* path) {
  return guarded([&] {
    require(inst && path, "null argument");
    nas::save_instance(*inst->inst, path);
  });
}

nas_status nas_instance_to_json(const nas_instance* inst, char** out) {
  return guarded([&] {
    require(inst && out, "null argument");
    *out = dup_string(nas::instance_to_json(*inst->inst));
  });
}

nas_status nas_instance_warnings(const nas_instance* inst, char** out) {
  return guarded([&] {
    require(inst && out, "null argument");
    *out = dup_string(json(inst->inst->warnings).dump());
  });
}

nas_status nas_instance_set_max_steps(nas_instance* inst, int max_steps) {
  return guarded([&] {
    require(inst != nullptr, "null argument");
    require(max_steps >= 0, "max_steps must be non-negative");
    auto copy = std::make_shared<nas::ProblemInstance>(*inst->inst);
    copy->max_steps = max_steps;
    inst->inst = std::move(copy);
  });
}

nas_status nas_instance_set_yaw(nas_instance* inst, const double* degrees, size_t count) {
  return guarded([&] {
    require(inst != nullptr, "null argument");
    require(count == 0 || degrees != nullptr, "null yaw array");
    std::vector<double> yaw(degrees, degrees + count);
    for (double d : yaw) require(std::isfinite(d), "yaw angle is not finite");
    auto copy = std::make_shared<nas::ProblemInstance>(*inst->inst);
    copy->yaw_angles_deg = std::move(yaw);
    inst->inst = std::move(copy);
  });
}

nas_status nas_instance_generate(const char* family, int m, uint64_t seed, int max_steps,
                                 nas_instance** out) {
  return guarded([&] {
    require(family && out, "null argument");
    require(max_steps >= 0, "max_steps must be non-negative");
    *out = new nas_instance{std::make_shared<nas::ProblemInstance>(
        nas::instance_on_scene(nas::family_scene(family, m, seed), max_steps))};
  });
}

nas_status nas_instance_get_info(const nas_instance* inst, nas_instance_info* out) {
  return guarded([&] {
    require(inst && out, "null argument");
    const auto& i = *inst->inst;
    out->surface_count = i.scene.surfaces.size();
    out->max_steps = i.max_steps;
    out->yaw_count = i.yaw_angles_deg.size();
    out->goal_effector = i.goal_effector == nas::Effector::kLeft ? NAS_LEFT : NAS_RIGHT;
    out->goal_surface_id = i.goal_surface_id;
  });
}

void nas_instance_free(nas_instance* inst) { delete inst; }

void nas_build_options_init(nas_build_options* o) {
  if (!o) return;
  *o = nas_build_options{};
  o->merge = 1;
  o->threads = 1;
  o->stop_effector = NAS_LEFT;
}

nas_status nas_tree_build(const nas_instance* inst, const nas_build_options* opts,
                          nas_tree** out) {
  return guarded([&] {
    require(inst && out, "null argument");
    nas_build_options o;
    nas_build_options_init(&o);
    if (opts) o = *opts;
    nas::BuildOptions bo;
    bo.merge = o.merge != 0;
    bo.threads = o.threads;
    if (o.node_budget > 0) bo.node_budget = static_cast<std::size_t>(o.node_budget);
    bo.truncate_on_budget = o.truncate_on_budget != 0;
    if (o.has_stop)
      bo.stop_at = nas::StopCondition{point_of(o.stop_point), effector_of(o.stop_effector)};
    auto frozen = std::make_shared<const nas::ProblemInstance>(*inst->inst);
    *out = wrap_tree(nas::build_tree(frozen, bo));
  });
}

nas_status nas_tree_save(const nas_tree* tree, const char* path) {
  return guarded([&] {
    require(tree && path, "null argument");
    nas::save_tree(tree->tree, path);
  });
}

nas_status nas_tree_load(const char* path, nas_tree** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = wrap_tree(nas::load_tree(path));
  });
}

void nas_tree_free(nas_tree* tree) { delete tree; }

size_t nas_tree_node_count(const nas_tree* tree) { return tree ? tree->tree.size() : 0; }

size_t nas_tree_layer_count(const nas_tree* tree) { return tree ? tree->tree.depth_count() : 0; }

nas_status nas_tree_layer_counts(const nas_tree* tree, size_t* counts, size_t capacity,
                                 size_t* written) {
  return guarded([&] {
    require(tree && written, "null argument");
    require(capacity == 0 || counts, "null output array");
    const auto& layers = tree->tree.layers();
    for (std::size_t i = 0; i < std::min(capacity, layers.size()); ++i) counts[i] = layers[i].size();
    *written = layers.size();
  });
}

nas_status nas_tree_stats_json(const nas_tree* tree, char** out) {
  return guarded([&] {
    require(tree && out, "null argument");
    *out = dup_string(stats_json(tree->tree.stats()).dump());
  });
}

nas_status nas_tree_instance(const nas_tree* tree, nas_instance** out) {
  return guarded([&] {
    require(tree && out, "null argument");
    *out = new nas_instance{std::make_shared<nas::ProblemInstance>(tree->tree.instance())};
  });
}

nas_status nas_node_get(const nas_tree* tree, int node_id, nas_node_info* out) {
  return guarded([&] {
    require(tree && out, "null argument");
    require(node_id >= 0 && static_cast<std::size_t>(node_id) < tree->tree.size(),
            "unknown node id");
    const nas::Node& n = tree->tree.node(node_id);
    out->id = n.id;
    out->depth = n.depth;
    out->effector = n.effector == nas::Effector::kLeft ? NAS_LEFT : NAS_RIGHT;
    out->surface_id = n.surface_id;
    out->valid = n.valid ? 1 : 0;
    out->vertex_count = n.region.vertices().size();
    const nas::Vec3 c = nas::chebyshev_center(n.region).center;
    for (int i = 0; i < 3; ++i) out->chebyshev_center[i] = c[i];
  });
}

nas_status nas_find_nodes(const nas_tree* tree, const double point[3], int effector, int* ids,
                          size_t capacity, size_t* count) {
  return guarded([&] {
    require(tree && count, "null argument");
    require(capacity == 0 || ids, "null output array");
    const auto hits = tree->index.find_nodes(tree->tree, point_of(point), effector_of(effector));
    for (std::size_t i = 0; i < std::min(capacity, hits.size()); ++i) ids[i] = hits[i];
    *count = hits.size();
  });
}

nas_status nas_extract_plan(const nas_tree* tree, int node_id, nas_plan** out) {
  return guarded([&] {
    require(tree && out, "null argument");
    require(node_id >= 0 && static_cast<std::size_t>(node_id) < tree->tree.size(),
            "unknown node id");
    *out = new nas_plan{nas::extract_plan(tree->tree, node_id)};
  });
}

nas_status nas_invalidate_surface(nas_tree* tree, int surface_id, size_t* count) {
  return guarded([&] {
    require(tree != nullptr, "null argument");
    const auto n = nas::invalidate_surface(tree->tree, tree->index, surface_id);
    if (count) *count = n;
  });
}

nas_status nas_replan(const nas_tree* tree, const double point[3], int effector, nas_plan** out) {
  return guarded([&] {
    require(tree && out, "null argument");
    auto plan = nas::replan(tree->tree, tree->index, point_of(point), effector_of(effector));
    if (!plan) throw nas::Error(nas::ErrorCode::kNoSolution, "no valid plan reaches the goal");
    *out = new nas_plan{std::move(*plan)};
  });
}

size_t nas_plan_length(const nas_plan* plan) {
  return plan ? static_cast<size_t>(plan->plan.length()) : 0;
}

nas_status nas_plan_entry(const nas_plan* plan, size_t i, int* node_id, int* surface_id,
                          int* effector) {
  return guarded([&] {
    require(plan != nullptr, "null argument");
    require(i < plan->plan.entries.size(), "plan entry out of range");
    const auto& e = plan->plan.entries[i];
    if (node_id) *node_id = e.node_id;
    if (surface_id) *surface_id = e.surface_id;
    if (effector) *effector = e.effector == nas::Effector::kLeft ? NAS_LEFT : NAS_RIGHT;
  });
}

nas_status nas_plan_to_json(const nas_plan* plan, char** out) {
  return guarded([&] {
    require(plan && out, "null argument");
    json entries = json::array();
    for (const auto& e : plan->plan.entries) {
      json region = json::array();
      for (const auto& v : e.region.vertices()) region.push_back(vec_json(v));
      json j = {{"node_id", e.node_id},
                {"surface_id", e.surface_id},
                {"effector", nas::to_string(e.effector)},
                {"region", region}};
      j["yaw"] = e.yaw ? json(*e.yaw) : json(nullptr);
      entries.push_back(std::move(j));
    }
    *out = dup_string(json{{"length", plan->plan.length()}, {"entries", entries}}.dump());
  });
}

void nas_plan_free(nas_plan* plan) { delete plan; }

void nas_footstep_options_init(nas_footstep_options* o) {
  if (!o) return;
  o->horizon = 0;
  o->objective = NAS_OBJECTIVE_FEASIBILITY;
}

nas_status nas_footstep_solve(const nas_tree* tree, const nas_plan* plan, const double start[3],
                              const nas_footstep_options* opts, nas_footsteps** out) {
  return guarded([&] {
    require(tree && plan && out, "null argument");
    nas_footstep_options o;
    nas_footstep_options_init(&o);
    if (opts) o = *opts;
    require(o.objective == NAS_OBJECTIVE_FEASIBILITY ||
                o.objective == NAS_OBJECTIVE_MIN_SUM_SQUARED_STEPS,
            "unknown objective");
    const int horizon = o.horizon > 0 ? o.horizon : plan->plan.length();
    const auto objective = o.objective == NAS_OBJECTIVE_FEASIBILITY
                               ? nas::Objective::kFeasibility
                               : nas::Objective::kMinSumSquaredSteps;
    const nas::Vec3 p0 = point_of(start);
    const auto problem = nas::assemble_problem(plan->plan, p0, horizon, objective,
                                               tree->tree.instance().kinematics);
    *out = new nas_footsteps{nas::solve(problem), p0, problem.start_effector, objective};
  });
}

int nas_footsteps_status(const nas_footsteps* s) {
  if (!s) return NAS_SOLVE_INFEASIBLE;
  switch (s->plan.status) {
    case nas::SolveStatus::kFeasible: return NAS_SOLVE_FEASIBLE;
    case nas::SolveStatus::kMarginal: return NAS_SOLVE_MARGINAL;
    case nas::SolveStatus::kInfeasible: return NAS_SOLVE_INFEASIBLE;
    case nas::SolveStatus::kIterationLimit: return NAS_SOLVE_ITERATION_LIMIT;
  }
  return NAS_SOLVE_INFEASIBLE;
}

size_t nas_footsteps_count(const nas_footsteps* s) { return s ? s->plan.positions.size() : 0; }

nas_status nas_footsteps_position(const nas_footsteps* s, size_t i, double out[3], int* effector,
                                  int* surface_id) {
  return guarded([&] {
    require(s && out, "null argument");
    require(i < s->plan.positions.size(), "footstep index out of range");
    for (int k = 0; k < 3; ++k) out[k] = s->plan.positions[i][k];
    if (effector) *effector = s->plan.effectors[i] == nas::Effector::kLeft ? NAS_LEFT : NAS_RIGHT;
    if (surface_id) *surface_id = s->plan.surfaces[i];
  });
}

double nas_footsteps_objective(const nas_footsteps* s) { return s ? s->plan.objective : 0.0; }

double nas_footsteps_max_violation(const nas_footsteps* s) {
  return s ? s->plan.max_violation : 0.0;
}

nas_status nas_footsteps_to_json(const nas_footsteps* s, char** out) {
  return guarded([&] {
    require(s && out, "null argument");
    json steps = json::array();
    for (std::size_t i = 0; i < s->plan.positions.size(); ++i)
      steps.push_back({{"position", vec_json(s->plan.positions[i])},
                       {"effector", nas::to_string(s->plan.effectors[i])},
                       {"surface_id", s->plan.surfaces[i]}});
    const json j = {{"status", nas::to_string(s->plan.status)},
                    {"objective_kind", nas::to_string(s->objective_kind)},
                    {"objective", s->plan.objective},
                    {"max_violation", s->plan.max_violation},
                    {"iterations", s->plan.iterations},
                    {"start", vec_json(s->start)},
                    {"start_effector", nas::to_string(s->start_effector)},
                    {"steps", steps}};
    *out = dup_string(j.dump());
  });
}

void nas_footsteps_free(nas_footsteps* s) { delete s; }

nas_status nas_svg(const nas_tree* tree, const nas_footsteps* steps, int max_depth, char** out) {
  return guarded([&] {
    require(tree && out, "null argument");
    nas::SvgOptions opt;
    opt.max_depth = max_depth;
    nas::SvgFootsteps fs;
    if (steps) fs = {steps->start, steps->start_effector, &steps->plan};
    *out = dup_string(
        nas::svg_top_view(tree->tree.instance(), &tree->tree, steps ? &fs : nullptr, opt));
  });
}

void nas_bench_options_init(nas_bench_options* o) {
  if (!o) return;
  const nas::BenchOptions d;
  *o = nas_bench_options{};
  o->seed = d.seed;
  o->no_merge_budget = d.no_merge_budget;
  o->query_samples = d.query_samples;
  o->plan_samples = d.plan_samples;
  o->threads = d.threads;
  o->include_no_merge = 1;
}

nas_status nas_bench_run(const char* suite, const nas_bench_options* opts, char** csv,
                         char** summary) {
  return guarded([&] {
    require(suite && csv, "null argument");
    const std::string name(suite);
    require(name == "growth" || name == "timing", "suite must be growth or timing");
    nas_bench_options o;
    nas_bench_options_init(&o);
    if (opts) o = *opts;
    nas::BenchOptions b;
    b.families = split_commas(o.families);
    for (const auto& f : b.families) {
      const auto all = nas::scene_families();
      require(std::find(all.begin(), all.end(), f) != all.end(), "unknown scene family");
    }
    if (o.m_values) b.m_values.assign(o.m_values, o.m_values + o.m_count);
    if (o.n_values)
      b.n_values.assign(o.n_values, o.n_values + o.n_count);
    else if (name == "timing")
      b.n_values = {10, 25, 61, 100};
    for (int m : b.m_values) require(m > 0, "m must be positive");
    for (int n : b.n_values) require(n >= 0, "n must be non-negative");
    b.seed = o.seed;
    if (o.no_merge_budget > 0) b.no_merge_budget = static_cast<std::size_t>(o.no_merge_budget);
    if (o.query_samples > 0) b.query_samples = o.query_samples;
    if (o.plan_samples > 0) b.plan_samples = o.plan_samples;
    b.threads = std::max(1, o.threads);
    b.without_merge = o.include_no_merge != 0;
    const auto rows = name == "growth" ? nas::growth_suite(b) : nas::timing_suite(b);
    char* text = dup_string(nas::to_csv(rows));
    if (summary) {
      try {
        *summary = dup_string(nas::summarize(rows));
      } catch (...) {
        std::free(text);
        throw;
      }
    }
    *csv = text;
  });
}

void nas_verify_options_init(nas_verify_options* o) {
  if (!o) return;
  const nas::VerifyOptions d;
  o->rollouts = d.rollouts;
  o->seed = d.seed;
  o->merge_samples_per_layer = d.merge_samples_per_layer;
  o->merge_budget = d.merge_budget;
  o->check_merge = d.check_merge ? 1 : 0;
}

nas_status nas_verify(const nas_tree* tree, const nas_instance* expected,
                      const nas_verify_options* opts, int* passed, char** report) {
  return guarded([&] {
    require(tree && passed, "null argument");
    nas_verify_options o;
    nas_verify_options_init(&o);
    if (opts) o = *opts;
    require(o.rollouts >= 0 && o.merge_samples_per_layer >= 0, "negative sample count");
    nas::VerifyOptions v;
    v.rollouts = o.rollouts;
    v.seed = o.seed;
    v.merge_samples_per_layer = o.merge_samples_per_layer;
    v.merge_budget = static_cast<std::size_t>(o.merge_budget);
    v.check_merge = o.check_merge != 0;
    const auto rep = nas::verify_tree(tree->tree, v, expected ? expected->inst.get() : nullptr);
    *passed = rep.passed() ? 1 : 0;
    if (report) *report = dup_string(rep.to_text());
  });
}

}  // extern "C"
