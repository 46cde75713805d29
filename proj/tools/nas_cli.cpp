#include <CLI11.hpp>

#include <nas/nas.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

// 0 ok, 1 validation or input error, 2 node budget, 3 no solution.
int exit_code(nas_status s) {
  switch (s) {
    case NAS_OK: return 0;
    case NAS_ERR_NODE_BUDGET: return 2;
    case NAS_ERR_NO_SOLUTION:
    case NAS_ERR_INFEASIBLE: return 3;
    default: return 1;
  }
}

struct Failure {
  nas_status status;
};

void check(nas_status s, const char* what) {
  if (s == NAS_OK) return;
  std::cerr << "error: " << what << ": " << nas_last_error() << "\n";
  throw Failure{s};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Instance = Handle<nas_instance, nas_instance_free>;
using Tree = Handle<nas_tree, nas_tree_free>;
using Plan = Handle<nas_plan, nas_plan_free>;
using Steps = Handle<nas_footsteps, nas_footsteps_free>;

struct Text {
  char* p = nullptr;
  ~Text() { nas_free_string(p); }
  std::string str() const { return p ? p : ""; }
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::min(v.size(), std::max<std::size_t>(idx, 1)) - 1];
}

int effector_id(const std::string& e) { return e == "right" ? NAS_RIGHT : NAS_LEFT; }

const char* effector_name(int e) { return e == NAS_RIGHT ? "right" : "left"; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write " << path << "\n";
    throw Failure{NAS_ERR_IO};
  }
  f << text;
}

void print_plan(const nas_plan* plan) {
  const std::size_t k = nas_plan_length(plan);
  std::cout << "plan: " << k << " step" << (k == 1 ? "" : "s") << "\n";
  for (std::size_t i = 0; i <= k; ++i) {
    int node = 0, surface = 0, eff = 0;
    check(nas_plan_entry(plan, i, &node, &surface, &eff), "plan entry");
    std::cout << "  depth " << (k - i) << "  node " << node << "  surface " << surface << "  "
              << effector_name(eff) << (i == k ? "  (goal)" : "") << "\n";
  }
}

struct PointArgs {
  std::vector<double> point;
  std::string effector = "left";
  void add(CLI::App* app) {
    app->add_option("--point", point, "Query position x y z")->expected(3)->required();
    app->add_option("--effector", effector, "Effector at the query position")
        ->check(CLI::IsMember({"left", "right"}));
  }
};

// build --------------------------------------------------------------------

struct BuildArgs {
  std::string instance;
  int steps = -1;
  bool merge = true;
  std::vector<double> yaw;
  std::string out;
  std::string svg;
  unsigned threads = 1;
  bool truncate = false;
};

int cmd_build(const BuildArgs& a) {
  Instance inst;
  check(nas_instance_load(a.instance.c_str(), inst.out()), "loading instance");
  if (a.steps >= 0) check(nas_instance_set_max_steps(inst.get(), a.steps), "steps");
  if (!a.yaw.empty()) check(nas_instance_set_yaw(inst.get(), a.yaw.data(), a.yaw.size()), "yaw");
  Text warnings;
  check(nas_instance_warnings(inst.get(), &warnings.p), "warnings");
  if (warnings.str() != "[]") std::cerr << "warnings: " << warnings.str() << "\n";
  nas_instance_info info;
  check(nas_instance_get_info(inst.get(), &info), "instance info");

  nas_build_options bo;
  nas_build_options_init(&bo);
  bo.merge = a.merge ? 1 : 0;
  bo.threads = a.threads;
  bo.truncate_on_budget = a.truncate ? 1 : 0;
  Tree tree;
  check(nas_tree_build(inst.get(), &bo, tree.out()), "building tree");
  if (!a.out.empty()) check(nas_tree_save(tree.get(), a.out.c_str()), "saving tree");
  if (!a.svg.empty()) {
    Text svg;
    check(nas_svg(tree.get(), nullptr, -1, &svg.p), "svg");
    write_file(a.svg, svg.str());
  }

  std::vector<std::size_t> layers(nas_tree_layer_count(tree.get()));
  std::size_t n_layers = 0;
  check(nas_tree_layer_counts(tree.get(), layers.data(), layers.size(), &n_layers), "layers");
  Text stats;
  check(nas_tree_stats_json(tree.get(), &stats.p), "stats");
  const std::string s = stats.str();
  const bool truncated = s.find("\"truncated\":true") != std::string::npos;
  const auto ms_pos = s.find("\"build_ms\":");
  const double build_ms = ms_pos == std::string::npos ? 0.0 : std::stod(s.substr(ms_pos + 11));

  std::string layer_json = "[";
  for (std::size_t i = 0; i < layers.size(); ++i)
    layer_json += (i ? "," : "") + std::to_string(layers[i]);
  layer_json += "]";
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", build_ms);
  std::cout << "scene,m,n,merge,yaw,h,layers,build_ms,q_p50_ms,q_p99_ms,qp_ms,status\n"
            << std::filesystem::path(a.instance).stem().string() << ',' << info.surface_count
            << ',' << info.max_steps << ',' << (a.merge ? 1 : 0) << ',' << info.yaw_count << ','
            << nas_tree_node_count(tree.get()) << ",\"" << layer_json << "\"," << ms << ",,,,"
            << (truncated ? "truncated" : "ok") << "\n";
  return 0;
}

// query --------------------------------------------------------------------

int cmd_query(const std::string& tree_path, const PointArgs& pa, int repeats) {
  Tree tree;
  check(nas_tree_load(tree_path.c_str(), tree.out()), "loading tree");
  const int eff = effector_id(pa.effector);
  std::vector<double> times;
  nas_status last = NAS_OK;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    Plan plan;
    const auto t0 = Clock::now();
    last = nas_replan(tree.get(), pa.point.data(), eff, plan.out());
    times.push_back(ms_since(t0));
    if (r == 0 && last == NAS_OK) print_plan(plan.get());
  }
  if (last == NAS_ERR_NO_SOLUTION) std::cout << "no-solution\n";
  std::printf("latency: p50 %.4f ms  p99 %.4f ms  (%zu repeats)\n", percentile(times, 0.50),
              percentile(times, 0.99), times.size());
  if (last != NAS_OK && last != NAS_ERR_NO_SOLUTION) check(last, "query");
  return exit_code(last);
}

// plan ---------------------------------------------------------------------

struct PlanArgs {
  std::string tree;
  PointArgs point;
  int horizon = 0;
  std::string objective = "feasibility";
  std::string svg;
  bool json = false;
};

int solve_and_print(const nas_tree* tree, const nas_plan* plan, const PlanArgs& a,
                    Clock::time_point t0) {
  if (nas_plan_length(plan) == 0) {
    std::cout << "already at the goal: 0 steps\n";
    return 0;
  }
  nas_footstep_options fo;
  nas_footstep_options_init(&fo);
  fo.horizon = a.horizon;
  fo.objective = a.objective == "min_sum_sq" ? NAS_OBJECTIVE_MIN_SUM_SQUARED_STEPS
                                             : NAS_OBJECTIVE_FEASIBILITY;
  Steps steps;
  check(nas_footstep_solve(tree, plan, a.point.point.data(), &fo, steps.out()), "footsteps");
  const double elapsed = ms_since(t0);
  const int status = nas_footsteps_status(steps.get());
  if (a.json) {
    Text j;
    check(nas_footsteps_to_json(steps.get(), &j.p), "json");
    std::cout << j.str() << "\n";
  } else {
    const char* names[] = {"feasible", "marginal", "infeasible", "iteration_limit"};
    std::cout << "status: " << names[status] << "\n";
    for (std::size_t i = 0; i < nas_footsteps_count(steps.get()); ++i) {
      double p[3];
      int eff = 0, surface = 0;
      check(nas_footsteps_position(steps.get(), i, p, &eff, &surface), "position");
      std::printf("  step %zu  %-5s  surface %3d  (%.6f, %.6f, %.6f)\n", i + 1,
                  effector_name(eff), surface, p[0], p[1], p[2]);
    }
    std::printf("objective: %.9g\nmax violation: %.3g\ntime (query + qp): %.3f ms\n",
                nas_footsteps_objective(steps.get()), nas_footsteps_max_violation(steps.get()),
                elapsed);
  }
  if (!a.svg.empty()) {
    Text svg;
    check(nas_svg(tree, steps.get(), -1, &svg.p), "svg");
    write_file(a.svg, svg.str());
  }
  return status == NAS_SOLVE_FEASIBLE ? 0 : 3;
}

int cmd_plan(const PlanArgs& a) {
  Tree tree;
  check(nas_tree_load(a.tree.c_str(), tree.out()), "loading tree");
  const auto t0 = Clock::now();
  Plan plan;
  const nas_status s = nas_replan(tree.get(), a.point.point.data(),
                                  effector_id(a.point.effector), plan.out());
  if (s == NAS_ERR_NO_SOLUTION) {
    std::cout << "no-solution\n";
    return 3;
  }
  check(s, "query");
  if (!a.json) print_plan(plan.get());
  return solve_and_print(tree.get(), plan.get(), a, t0);
}

// replan -------------------------------------------------------------------

int cmd_replan(const PlanArgs& a, const std::vector<int>& invalidate) {
  Tree tree;
  check(nas_tree_load(a.tree.c_str(), tree.out()), "loading tree");
  for (int sid : invalidate) {
    std::size_t count = 0;
    check(nas_invalidate_surface(tree.get(), sid, &count), "invalidating surface");
    std::cout << "invalidated surface " << sid << ": " << count << " nodes\n";
  }
  const auto t0 = Clock::now();
  Plan plan;
  const nas_status s = nas_replan(tree.get(), a.point.point.data(),
                                  effector_id(a.point.effector), plan.out());
  if (s == NAS_ERR_NO_SOLUTION) {
    std::cout << "no-solution\n";
    return 3;
  }
  check(s, "replanning");
  print_plan(plan.get());
  std::printf("time: %.3f ms\n", ms_since(t0));
  if (!a.svg.empty()) return solve_and_print(tree.get(), plan.get(), a, t0);
  return 0;
}

// bench --------------------------------------------------------------------

struct BenchArgs {
  std::string suite = "growth";
  std::string out = "-";
  std::uint64_t seed = 1;
  std::string families;
  std::vector<int> m;
  std::vector<int> n;
  std::uint64_t no_merge_budget = 0;
  int threads = 1;
  bool merge_only = false;
  int query_samples = 0;
  int plan_samples = 0;
};

int cmd_bench(const BenchArgs& a) {
  nas_bench_options o;
  nas_bench_options_init(&o);
  o.families = a.families.empty() ? nullptr : a.families.c_str();
  if (!a.m.empty()) {
    o.m_values = a.m.data();
    o.m_count = a.m.size();
  }
  if (!a.n.empty()) {
    o.n_values = a.n.data();
    o.n_count = a.n.size();
  }
  o.seed = a.seed;
  if (a.no_merge_budget) o.no_merge_budget = a.no_merge_budget;
  o.threads = a.threads;
  o.include_no_merge = a.merge_only ? 0 : 1;
  if (a.query_samples) o.query_samples = a.query_samples;
  if (a.plan_samples) o.plan_samples = a.plan_samples;
  Text csv, summary;
  check(nas_bench_run(a.suite.c_str(), &o, &csv.p, &summary.p), "bench");
  if (a.out == "-") {
    std::cout << csv.str();
    std::cerr << summary.str();
  } else {
    write_file(a.out, csv.str());
    std::cout << summary.str() << "wrote " << a.out << "\n";
  }
  return 0;
}

// verify -------------------------------------------------------------------

struct VerifyArgs {
  std::string tree;
  std::string instance;
  int rollouts = 500;
  std::uint64_t seed = 1;
  int merge_samples = 1000;
  bool skip_merge = false;
};

int cmd_verify(const VerifyArgs& a) {
  Tree tree;
  check(nas_tree_load(a.tree.c_str(), tree.out()), "loading tree");
  Instance inst;
  if (!a.instance.empty())
    check(nas_instance_load(a.instance.c_str(), inst.out()), "loading instance");
  nas_verify_options vo;
  nas_verify_options_init(&vo);
  vo.rollouts = a.rollouts;
  vo.seed = a.seed;
  vo.merge_samples_per_layer = a.merge_samples;
  vo.check_merge = a.skip_merge ? 0 : 1;
  int passed = 0;
  Text report;
  check(nas_verify(tree.get(), inst.get(), &vo, &passed, &report.p), "verifying");
  std::cout << report.str();
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Footstep feasibility trees: build, query, plan, replan, bench, verify"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build a feasibility tree and print its stats row");
  b->add_option("instance", build.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  b->add_option("-n,--steps", build.steps, "Number of layers to expand (default: instance)");
  b->add_flag("--merge,!--no-merge", build.merge, "Merge identical regions (default on)");
  b->add_option("--yaw", build.yaw, "Yaw options in degrees");
  b->add_option("-o,--out", build.out, "Tree output path (JSONL)");
  b->add_option("--svg", build.svg, "Top-view SVG output path");
  b->add_option("--threads", build.threads, "Layer expansion threads (0 = all cores)");
  b->add_flag("--truncate", build.truncate, "Keep complete layers when the budget is hit");

  std::string query_tree;
  PointArgs query_point;
  int repeats = 1000;
  auto* q = app.add_subcommand("query", "Shortest surface plan for a position");
  q->add_option("tree", query_tree, "Tree file")->required()->check(CLI::ExistingFile);
  query_point.add(q);
  q->add_option("--repeats", repeats, "Timed repetitions for the latency report");

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Footstep positions along the shortest plan");
  p->add_option("tree", plan.tree, "Tree file")->required()->check(CLI::ExistingFile);
  plan.point.add(p);
  p->add_option("--horizon", plan.horizon, "Steps to place (0 = whole plan)");
  p->add_option("--objective", plan.objective, "feasibility or min_sum_sq")
      ->check(CLI::IsMember({"feasibility", "min_sum_sq"}));
  p->add_option("--svg", plan.svg, "Top-view SVG output path");
  p->add_flag("--json", plan.json, "Print the footsteps as JSON");

  PlanArgs replan;
  std::vector<int> invalidate;
  auto* r = app.add_subcommand("replan", "Invalidate surfaces and plan around them");
  r->add_option("tree", replan.tree, "Tree file")->required()->check(CLI::ExistingFile);
  replan.point.add(r);
  r->add_option("--invalidate", invalidate, "Surface ids to mark impassable");
  r->add_option("--svg", replan.svg, "Also place footsteps and write a top-view SVG");

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "Growth or timing benchmark as CSV");
  be->add_option("--suite", bench.suite, "growth or timing")
      ->check(CLI::IsMember({"growth", "timing"}));
  be->add_option("--out", bench.out, "CSV path, - for stdout");
  be->add_option("--seed", bench.seed, "Scene generator seed");
  be->add_option("--families", bench.families, "Comma separated scene families");
  be->add_option("--m", bench.m, "Surface counts");
  be->add_option("--n", bench.n, "Step counts");
  be->add_option("--no-merge-budget", bench.no_merge_budget, "Node cap for unmerged builds");
  be->add_option("--threads", bench.threads, "Concurrent scene builds");
  be->add_flag("--merge-only", bench.merge_only, "Skip unmerged builds");
  be->add_option("--query-samples", bench.query_samples, "Timing suite query samples");
  be->add_option("--plan-samples", bench.plan_samples, "Timing suite plan samples");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Completeness, soundness and merge checks");
  v->add_option("tree", verify.tree, "Tree file")->required()->check(CLI::ExistingFile);
  v->add_option("instance", verify.instance, "Instance the tree should match")
      ->check(CLI::ExistingFile);
  v->add_option("--rollouts", verify.rollouts, "Backward rollouts");
  v->add_option("--seed", verify.seed, "Sampling seed");
  v->add_option("--merge-samples", verify.merge_samples, "Samples per layer for the merge check");
  v->add_flag("--skip-merge-check", verify.skip_merge, "Do not rebuild for the merge check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*b) return cmd_build(build);
    if (*q) return cmd_query(query_tree, query_point, repeats);
    if (*p) return cmd_plan(plan);
    if (*r) return cmd_replan(replan, invalidate);
    if (*be) return cmd_bench(bench);
    if (*v) return cmd_verify(verify);
  } catch (const Failure& f) {
    return exit_code(f.status);
  }
  return 1;
}
