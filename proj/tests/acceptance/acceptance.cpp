// Acceptance run: one PASS/FAIL line per criterion with the measured values.
// Usage: nas_acceptance CLI_PATH [WORK_DIR]

#include <nas/nas.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bench.hpp"
#include "oracles.hpp"
#include "query.hpp"
#include "scenarios.hpp"
#include "verify.hpp"

using namespace nas;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --- CSV -----------------------------------------------------------------------

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (char c : line) {
    if (c == '"')
      quoted = !quoted;
    else if (c == ',' && !quoted)
      out.emplace_back();
    else
      out.back() += c;
  }
  return out;
}

struct Row {
  std::string scene;
  int m = 0, n = 0;
  bool merge = true;
  std::size_t h = 0;
  std::vector<std::size_t> layers;
  double build_ms = 0, q_p99 = -1, qp = -1;
  std::string status;
};

std::vector<Row> parse_csv(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) throw std::runtime_error("bad csv row: " + line);
    Row r;
    r.scene = f[0];
    r.m = std::stoi(f[1]);
    r.n = std::stoi(f[2]);
    r.merge = f[3] == "1";
    r.h = std::stoull(f[5]);
    for (const auto& v : nlohmann::json::parse(f[6])) r.layers.push_back(v.get<std::size_t>());
    r.build_ms = std::stod(f[7]);
    if (!f[9].empty()) r.q_p99 = std::stod(f[9]);
    if (!f[10].empty()) r.qp = std::stod(f[10]);
    r.status = f[11];
    rows.push_back(r);
  }
  return rows;
}

// Blanks build_ms, q_p50_ms, q_p99_ms and qp_ms.
std::string strip_times(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    auto f = split_csv(line);
    if (f.size() == 12 && f[0] != "scene")
      for (int k = 7; k <= 10; ++k) f[static_cast<std::size_t>(k)].clear();
    for (std::size_t k = 0; k < f.size(); ++k) out += (k ? "," : "") + f[k];
    out += '\n';
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// --- test scenes ----------------------------------------------------------------

struct TestScene {
  std::string name;
  FeasibilityTree tree;
};

std::vector<TestScene> test_scenes() {
  std::vector<TestScene> out;
  auto add = [&](std::string name, ProblemInstance inst) {
    out.push_back({std::move(name), build_tree(std::make_shared<const ProblemInstance>(
                                        std::move(inst)))});
  };
  add("demo", load_instance(std::string(NAS_DATA_DIR) + "/demo.json"));
  add("staircase", make_instance(staircase(6, 0.1, 0.3, 0.6), KinematicModel::synthetic_default(),
                                 {{1.65, 0.0, 0.5}}, {.max_steps = 8}));
  add("stepping_stones_10", instance_on_scene(family_scene("stepping_stones", 10, 5), 25));
  add("tilted_stones_10", instance_on_scene(family_scene("tilted_stones", 10, 2), 25));
  add("flat_grid_22", instance_on_scene(family_scene("flat_grid", 22, 1), 20));
  add("stepping_stones_43", instance_on_scene(family_scene("stepping_stones", 43, 3), 12));
  return out;
}

// Half the points inside random node regions, half around random surfaces.
Vec3 random_point(const FeasibilityTree& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < 0.5) {
    std::uniform_int_distribution<std::size_t> pick(0, t.size() - 1);
    const auto& region = t.node(static_cast<int>(pick(rng))).region;
    if (region.area() > 1e-12) return sample_in_polygon(region, rng);
    return region.vertices().front();
  }
  const auto& surfaces = t.instance().scene.surfaces;
  std::uniform_int_distribution<std::size_t> pick(0, surfaces.size() - 1);
  const auto& poly = surfaces[pick(rng)].polygon;
  Vec2 mn = poly.to_plane(poly.vertices()[0]), mx = mn;
  for (const auto& v : poly.vertices()) {
    mn = mn.cwiseMin(poly.to_plane(v));
    mx = mx.cwiseMax(poly.to_plane(v));
  }
  const Vec2 q = mn + (mx - mn).cwiseProduct(Vec2(u(rng), u(rng)) * 1.2 - Vec2(0.1, 0.1));
  return poly.from_plane(q);
}

std::vector<int> linear_scan(const FeasibilityTree& t, const Vec3& p, Effector e) {
  std::vector<int> out;
  for (const auto& n : t.nodes())
    if (n.valid && n.effector == e && n.region.contains(p)) out.push_back(n.id);
  std::stable_sort(out.begin(), out.end(),
                   [&](int a, int b) { return t.node(a).depth < t.node(b).depth; });
  return out;
}

// Depth-first search from `id` to the root through valid parents.
bool reaches_root(const FeasibilityTree& t, int id, std::vector<signed char>& memo) {
  auto& m = memo[static_cast<std::size_t>(id)];
  if (m >= 0) return m;
  const Node& n = t.node(id);
  bool ok = n.valid && n.depth == 0;
  if (n.valid)
    for (int p : n.parents) ok = ok || reaches_root(t, p, memo);
  m = ok;
  return ok;
}

// --- criteria -------------------------------------------------------------------

struct BenchRuns {
  std::string csv_a, csv_b, summary;
  double seconds_a = 0, seconds_b = 0;
  bool ok = false;
};

BenchRuns run_growth_twice(const std::string& cli, const fs::path& dir) {
  BenchRuns r;
  const fs::path a = dir / "growth_a.csv", b = dir / "growth_b.csv", s = dir / "growth_summary.txt";
  const std::string base = "\"" + cli + "\" bench --suite growth --seed 7 --out ";
  auto t0 = Clock::now();
  const int ra = std::system((base + "\"" + a.string() + "\" > \"" + s.string() + "\"").c_str());
  r.seconds_a = seconds_since(t0);
  t0 = Clock::now();
  const int rb = std::system((base + "\"" + b.string() + "\" > /dev/null").c_str());
  r.seconds_b = seconds_since(t0);
  r.ok = ra == 0 && rb == 0;
  r.csv_a = read_file(a);
  r.csv_b = read_file(b);
  r.summary = read_file(s);
  return r;
}

Outcome criterion_growth(const std::vector<Row>& rows, double seconds) {
  std::vector<BenchRecord> recs;
  for (const auto& r : rows)
    recs.push_back({.scene = r.scene, .m = r.m, .n = r.n, .merge = r.merge, .h = r.h});
  Outcome o{true, fmt("growth sweep %.0f s;", seconds)};
  for (const auto& fam : scene_families()) {
    const auto fit = fit_growth(recs, fam);
    const bool ok = fit.rows == 16 && fit.relative_residual <= 0.25;
    o.pass = o.pass && ok;
    o.detail += fmt(" %s a=%.2f residual %.3f (worst row %.2f, %d rows);", fam.c_str(), fit.a,
                    fit.relative_residual, fit.worst_row, fit.rows);
  }
  // Saturation: every layer after the saturation layer stays within m of it.
  int checked = 0, saturated = 0, prefix_ok = 0, short_rows = 0;
  long long worst_dev = 0;
  std::map<std::pair<std::string, int>, const Row*> deepest;
  for (const auto& r : rows) {
    if (!r.merge) continue;
    auto& d = deepest[{r.scene, r.m}];
    if (!d || d->n < r.n) d = &r;
  }
  for (const auto& r : rows) {
    if (!r.merge) continue;
    const auto c = check_saturation(r.layers, r.m);
    if (c.saturated) {
      ++saturated;
      worst_dev = std::max(worst_dev, c.max_deviation);
      o.pass = o.pass && c.max_deviation <= r.m;
    } else {
      ++short_rows;
    }
    ++checked;
    // shorter horizons are prefixes of the deepest tree on the same scene
    const Row* d = deepest[{r.scene, r.m}];
    if (std::equal(r.layers.begin(), r.layers.end(), d->layers.begin())) ++prefix_ok;
    if (r.n >= 25 && !c.saturated) o.pass = false;
  }
  o.pass = o.pass && prefix_ok == checked;
  o.detail += fmt(" saturation: %d/%d merged rows saturated (max deviation %lld <= m), "
                  "%d rows with n=10 end before 5 post-saturation layers; "
                  "%d/%d rows are prefixes of the n=100 tree",
                  saturated, checked, worst_dev, short_rows, prefix_ok, checked);
  return o;
}

Outcome criterion_no_merge(const std::vector<Row>& rows) {
  Outcome o{false, "no unmerged m=10 stepping_stones row"};
  const Row* best = nullptr;
  for (const auto& r : rows)
    if (!r.merge && r.scene == "stepping_stones" && r.m == 10 && (!best || r.n > best->n))
      best = &r;
  if (!best) return o;
  const auto streak = ratio_streak(best->layers, 1.3);
  std::string layers;
  for (std::size_t k = 0; k < best->layers.size(); ++k)
    layers += (k ? "," : "") + std::to_string(best->layers[k]);
  o.pass = streak >= 5;
  o.detail = fmt("stepping_stones m=10 n=%d (%s): ratio >= 1.3 over %zu consecutive layers; "
                 "layers [%s]",
                 best->n, best->status.c_str(), streak, layers.c_str());
  for (const auto& r : rows)
    if (!r.merge && r.m == 10 && r.n == best->n && r.scene != "stepping_stones")
      o.detail += fmt("; %s streak %zu", r.scene.c_str(), ratio_streak(r.layers, 1.3));
  return o;
}

Outcome criterion_build_time(const std::vector<Row>& rows) {
  Outcome o{false, "no m=43 n=100 merged row"};
  double worst = -1;
  for (const auto& r : rows)
    if (r.merge && r.m == 43 && r.n == 100) {
      worst = std::max(worst, r.build_ms);
      o.detail = "";
    }
  if (worst < 0) return o;
  o.pass = worst < 15 * 60e3;
  o.detail = fmt("slowest m=43 n=100 merged build %.2f s (target 300 s, hard limit 900 s)",
                 worst / 1e3);
  return o;
}

Outcome criterion_determinism(const BenchRuns& b) {
  const bool same = !b.csv_a.empty() && strip_times(b.csv_a) == strip_times(b.csv_b);
  const auto lines = std::count(b.csv_a.begin(), b.csv_a.end(), '\n');
  return {same, fmt("two CLI bench runs (seed 7, %.0f s and %.0f s), %ld lines each: %s",
                    b.seconds_a, b.seconds_b, static_cast<long>(lines),
                    same ? "identical without time columns" : "DIFFERENT")};
}

std::vector<Row> run_timing(double& seconds) {
  nas_bench_options o;
  nas_bench_options_init(&o);
  o.seed = 7;
  o.query_samples = 1000;
  o.plan_samples = 1000;
  char* csv = nullptr;
  const auto t0 = Clock::now();
  if (nas_bench_run("timing", &o, &csv, nullptr) != NAS_OK)
    throw std::runtime_error(std::string("timing suite: ") + nas_last_error());
  seconds = seconds_since(t0);
  const auto rows = parse_csv(csv);
  nas_free_string(csv);
  return rows;
}

Outcome criterion_query(const std::vector<Row>& rows) {
  double small = 0, largest_p99 = 0;
  std::size_t largest_h = 0, small_rows = 0;
  for (const auto& r : rows) {
    if (r.h <= 10000) {
      small = std::max(small, r.q_p99);
      ++small_rows;
    }
    if (r.h > largest_h) largest_h = r.h, largest_p99 = r.q_p99;
  }
  return {small_rows > 0 && small <= 25.0 && largest_p99 <= 100.0,
          fmt("1000 in-region points per tree; h <= 1e4 (%zu trees): worst p99 %.4f ms; "
              "largest tree h=%zu: p99 %.4f ms",
              small_rows, small, largest_h, largest_p99)};
}

Outcome criterion_plan(const std::vector<Row>& rows) {
  double worst = 0;
  int count = 0;
  std::string where;
  for (const auto& r : rows)
    if (r.n <= 61) {
      ++count;
      if (r.qp > worst) {
        worst = r.qp;
        where = fmt("%s m=%d n=%d", r.scene.c_str(), r.m, r.n);
      }
    }
  double deep = 0;
  for (const auto& r : rows)
    if (r.n > 61) deep = std::max(deep, r.qp);
  return {count > 0 && worst <= 100.0,
          fmt("query + full-horizon feasibility QP, 1000 plans per tree; n <= 61 (%d trees): "
              "worst p99 %.3f ms (%s); n=100 worst p99 %.3f ms",
              count, worst, where.c_str(), deep)};
}

Outcome criterion_completeness(const std::vector<TestScene>& scenes) {
  Outcome o{true, ""};
  const auto t0 = Clock::now();
  for (const auto& s : scenes) {
    const SpatialIndex index(s.tree);
    const auto c = completeness_rollouts(s.tree, index, 500, 11);
    o.pass = o.pass && c.rollouts >= 500 && c.misses == 0;
    o.detail += fmt("%s %d rollouts %d points %d misses; ", s.name.c_str(), c.rollouts, c.points,
                    c.misses);
  }
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < 60.0;
  o.detail += fmt("%.1f s", secs);
  return o;
}

Outcome criterion_soundness(const std::vector<TestScene>& scenes) {
  Outcome o{true, ""};
  const auto t0 = Clock::now();
  double worst = 0;
  for (const auto& s : scenes) {
    const auto r = soundness_sweep(s.tree);
    const int expected = static_cast<int>(s.tree.size()) - 1;
    o.pass = o.pass && s.tree.size() <= 10000 && r.failures == 0 && r.checked == expected &&
             r.worst_violation <= 1e-8;
    worst = std::max(worst, r.worst_violation);
    o.detail += fmt("%s %d/%zu nodes %d failures; ", s.name.c_str(), r.checked, s.tree.size(),
                    r.failures);
  }
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < 300.0;
  o.detail += fmt("worst violation %.2e, %.1f s", worst, secs);
  return o;
}

// Minkowski sum against the hull of all vertex sums, checked without the
// hull code: output vertices are vertex sums, every vertex sum satisfies the
// output's constraints, support values agree, and membership of random
// points matches a non-negative least squares convex-combination test.
struct MinkowskiTally {
  int pairs = 0, failures = 0, points = 0;
};

void check_minkowski_pair(const std::vector<Vec3>& a, const Polytope& sum,
                          const std::vector<Vec3>& b, std::mt19937_64& rng, MinkowskiTally& t) {
  ++t.pairs;
  std::vector<Vec3> sums;
  for (const auto& va : a)
    for (const auto& vb : b) sums.push_back(va + vb);
  bool ok = !sum.empty();
  for (const auto& v : sum.vertices()) {
    double best = 1e9;
    for (const auto& s : sums) best = std::min(best, (v - s).norm());
    ok = ok && best <= kGeomEps;
  }
  for (const auto& s : sums) ok = ok && contains(sum, s, kGeomEps);
  for (int k = 0; k < 200; ++k) {
    const Vec3 d = testing::random_unit(rng);
    double hs = -1e300, hv = -1e300;
    for (const auto& s : sums) hs = std::max(hs, d.dot(s));
    for (const auto& v : sum.vertices()) hv = std::max(hv, d.dot(v));
    ok = ok && std::abs(hs - hv) <= kGeomEps;
  }
  const Box3& bb = sum.bounds();
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  for (int k = 0; k < 100; ++k) {
    Vec3 x;
    if (sum.dimension() == 3) {
      const Vec3 span = bb.max() - bb.min();
      x = bb.min() + Vec3(u(rng) * span.x(), u(rng) * span.y(), u(rng) * span.z());
    } else {
      x = testing::random_combination(sum.vertices(), rng) +
          0.2 * (testing::random_combination(sum.vertices(), rng) - sum.vertices().front());
    }
    double margin = 1e300;
    for (const auto& h : sum.facets()) margin = std::min(margin, std::abs(h.signed_distance(x)));
    if (margin < 1e-6) continue;  // too close to the boundary for the residual test
    const bool oracle = testing::minkowski_membership_residual(a, b, x) < 1e-7;
    ++t.points;
    ok = ok && oracle == contains(sum, x);
  }
  if (!ok) ++t.failures;
}

MinkowskiTally minkowski_oracle(int pairs) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto kin = KinematicModel::synthetic_default();
  MinkowskiTally t;
  for (int i = 0; i < pairs; ++i) {
    std::vector<Vec3> flat;
    const Vec3 normal = (Vec3::UnitZ() + 0.3 * Vec3(u(rng), u(rng), 0)).normalized();
    const Rotation3 tilt = rotation_to_normal(normal);
    for (int k = 0; k < 3 + i % 6; ++k) flat.push_back(tilt * Vec3(u(rng), u(rng), 0));
    const auto region = *PlanarPolygon::from_points(flat, normal);
    Polytope b;
    if (i % 2 == 0) {
      b = rotate_z(kin.antecedent(i % 4 == 0 ? Effector::kLeft : Effector::kRight).rotated(tilt),
                   u(rng) * 3.14159);
    } else {
      std::vector<Vec3> cloud;
      for (int k = 0; k < 12; ++k) cloud.push_back(testing::random_in_ball(rng));
      b = convex_hull(cloud);
    }
    if (i % 3 == 2) {
      std::vector<Vec3> cloud;
      for (int k = 0; k < 10; ++k) cloud.push_back(testing::random_in_ball(rng));
      const auto a = convex_hull(cloud);
      check_minkowski_pair(a.vertices(), minkowski_sum(a, b), b.vertices(), rng, t);
    } else {
      check_minkowski_pair(region.vertices(), minkowski_sum(region, b), b.vertices(), rng, t);
    }
  }
  return t;
}

Outcome criterion_oracles(const std::vector<TestScene>& scenes) {
  Outcome o{true, ""};
  std::mt19937_64 rng(23);
  int scans = 0, scan_mismatch = 0;
  for (const auto& s : scenes) {
    const SpatialIndex index(s.tree);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 p = random_point(s.tree, rng);
      for (Effector e : {Effector::kLeft, Effector::kRight}) {
        ++scans;
        if (index.find_nodes(s.tree, p, e) != linear_scan(s.tree, p, e)) ++scan_mismatch;
      }
    }
  }
  o.pass = scan_mismatch == 0;
  o.detail += fmt("find_nodes vs linear scan: %d queries over %zu trees, %d mismatches; ", scans,
                  scenes.size(), scan_mismatch);

  const auto mk = minkowski_oracle(100);
  o.pass = o.pass && mk.pairs == 100 && mk.failures == 0;
  o.detail += fmt("minkowski_sum vs vertex-sum hull: %d pairs, %d membership points, %d failures; ",
                  mk.pairs, mk.points, mk.failures);

  int layers = 0, samples = 0, mismatches = 0;
  for (const auto& s : scenes) {
    const auto m = merge_neutrality(s.tree, 1000, 29, 200000);
    layers += m.layers;
    samples += m.samples;
    mismatches += m.mismatches;
    o.pass = o.pass && !m.skipped && m.layers >= 3;
  }
  o.pass = o.pass && mismatches == 0;
  o.detail += fmt("merge neutrality: %d layers, %d samples, %d mismatches", layers, samples,
                  mismatches);
  return o;
}

Outcome criterion_replan(const std::vector<TestScene>& scenes) {
  Outcome o{true, ""};
  std::mt19937_64 rng(31);
  int trials = 0, queries = 0, found = 0, bad = 0;
  for (const auto& s : scenes) {
    const int m = static_cast<int>(s.tree.instance().scene.size());
    std::uniform_int_distribution<int> pick(0, m - 1);
    std::uniform_int_distribution<int> how_many(1, std::min(3, m));
    for (int trial = 0; trial < 100; ++trial, ++trials) {
      auto t = s.tree;
      SpatialIndex index(t);
      for (int k = how_many(rng); k > 0; --k) invalidate_surface(t, index, pick(rng));
      std::vector<signed char> memo(t.size(), -1);
      for (int q = 0; q < 10; ++q) {
        const Vec3 p = random_point(t, rng);
        for (Effector e : {Effector::kLeft, Effector::kRight}) {
          ++queries;
          int best = -1;
          for (int id : linear_scan(t, p, e))
            if (reaches_root(t, id, memo) && (best < 0 || t.node(id).depth < best))
              best = t.node(id).depth;
          const auto plan = replan(t, index, p, e);
          bool ok = plan.has_value() == (best >= 0);
          if (plan) {
            ++found;
            ok = ok && plan->length() == best && plan->entries.back().node_id == 0;
            for (std::size_t i = 0; i < plan->entries.size(); ++i) {
              const Node& n = t.node(plan->entries[i].node_id);
              ok = ok && n.valid && n.depth == plan->length() - static_cast<int>(i);
              if (i + 1 < plan->entries.size()) {
                const int next = plan->entries[i + 1].node_id;
                ok = ok && std::find(n.parents.begin(), n.parents.end(), next) != n.parents.end();
              }
            }
            ok = ok && t.node(plan->entries.front().node_id).region.contains(p);
          }
          if (!ok) ++bad;
        }
      }
    }
  }
  o.pass = bad == 0;
  o.detail = fmt("%d invalidation trials over %zu scenes, %d queries (%d with a plan), "
                 "%d disagreements with the DFS oracle or invalid plans",
                 trials, scenes.size(), queries, found, bad);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: nas_acceptance CLI_PATH [WORK_DIR]\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path dir = argc > 2 ? fs::path(argv[2]) : fs::current_path();
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;

  const auto t_all = Clock::now();
  std::cout << "running the growth suite twice through the CLI..." << std::endl;
  const auto bench = run_growth_twice(cli, dir);
  std::vector<Row> growth;
  if (bench.ok) growth = parse_csv(bench.csv_a);
  std::cout << "running the timing suite..." << std::endl;
  double timing_s = 0;
  const auto timing = run_timing(timing_s);
  std::cout << "building test scenes..." << std::endl;
  const auto scenes = test_scenes();
  for (const auto& s : scenes)
    std::cout << "  " << s.name << ": " << s.tree.size() << " nodes, "
              << s.tree.depth_count() - 1 << " steps" << std::endl;

  criteria.emplace_back("1 bilinear growth with merging",
                        [&] { return criterion_growth(growth, bench.seconds_a); });
  criteria.emplace_back("2 exponential growth without merging",
                        [&] { return criterion_no_merge(growth); });
  criteria.emplace_back("3 build time m=43 n=100", [&] { return criterion_build_time(growth); });
  criteria.emplace_back("4 query latency", [&] { return criterion_query(timing); });
  criteria.emplace_back("5 query + QP latency", [&] { return criterion_plan(timing); });
  criteria.emplace_back("6 completeness rollouts", [&] { return criterion_completeness(scenes); });
  criteria.emplace_back("7 soundness sweep", [&] { return criterion_soundness(scenes); });
  criteria.emplace_back("8 oracle equivalences", [&] { return criterion_oracles(scenes); });
  criteria.emplace_back("9 replanning safety", [&] { return criterion_replan(scenes); });
  criteria.emplace_back("10 determinism", [&] { return criterion_determinism(bench); });

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail
              << std::endl;
  }
  std::cout << "\ngrowth summary:\n" << bench.summary;
  std::cout << fmt("timing suite %.1f s, total %.1f s\n", timing_s, seconds_since(t_all));
  std::cout << (failed ? fmt("%d criteria failed\n", failed) : std::string("all criteria passed\n"));
  return failed ? 1 : 0;
}
