#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "scenarios.hpp"
#include "verify.hpp"

namespace nas {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<std::string> families_of(const BenchOptions& o) {
  return o.families.empty() ? scene_families() : o.families;
}

// Runs jobs on a small pool; results land at their job index.
void run_jobs(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads))));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::uint64_t scene_seed(const BenchOptions& o, const std::string& family, int m) {
  std::uint64_t h = o.seed * 0x9E3779B97F4A7C15ull;
  for (char c : family) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001B3ull;
  return h ^ static_cast<std::uint64_t>(m);
}

struct Job {
  std::string family;
  int m = 0;
  int n = 0;
  bool merge = true;
};

BenchRecord run_build(const Job& job, const BenchOptions& o, FeasibilityTree* keep = nullptr) {
  const Scene scene = family_scene(job.family, job.m, scene_seed(o, job.family, job.m));
  auto inst = std::make_shared<const ProblemInstance>(instance_on_scene(scene, job.n));
  BuildOptions bo;
  bo.merge = job.merge;
  bo.truncate_on_budget = true;
  if (!job.merge) bo.node_budget = std::min(bo.node_budget, o.no_merge_budget);
  const auto t0 = Clock::now();
  FeasibilityTree tree = build_tree(inst, bo);
  BenchRecord r;
  r.build_ms = ms_since(t0);
  r.scene = job.family;
  r.m = job.m;
  r.n = job.n;
  r.merge = job.merge;
  r.yaw = static_cast<int>(inst->yaw_angles_deg.size());
  r.layers = tree.stats().layer_counts();
  r.h = tree.size();
  r.status = tree.stats().truncated ? "truncated" : "ok";
  if (keep) *keep = std::move(tree);
  return r;
}

std::string fmt_ms(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string layers_json(const std::vector<std::size_t>& layers) {
  std::string s = "[";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(layers[i]);
  }
  return s + "]";
}

std::string csv(const std::vector<BenchRecord>& records, bool times) {
  std::string out = std::string(kBenchCsvHeader) + "\n";
  for (const auto& r : records) {
    out += r.scene + ',' + std::to_string(r.m) + ',' + std::to_string(r.n) + ',' +
           (r.merge ? "1" : "0") + ',' + std::to_string(r.yaw) + ',' + std::to_string(r.h) +
           ",\"" + layers_json(r.layers) + "\",";
    if (times)
      out += fmt_ms(r.build_ms) + ',' + fmt_ms(r.q_p50_ms) + ',' + fmt_ms(r.q_p99_ms) + ',' +
             fmt_ms(r.qp_ms);
    else
      out += ",,,";
    out += ',' + r.status + '\n';
  }
  return out;
}

// Node drawn uniformly among nodes with positive area and depth <= max_depth,
// then a uniform point in its region.
struct PointSampler {
  PointSampler(const FeasibilityTree& tree, int max_depth) : tree_(tree) {
    for (const auto& n : tree.nodes())
      if (n.valid && n.region.area() > kAreaEps && (max_depth < 0 || n.depth <= max_depth))
        ids_.push_back(n.id);
  }
  bool empty() const { return ids_.empty(); }
  const Node& draw(std::mt19937_64& rng, Vec3& p) const {
    const Node& n = tree_.node(ids_[rng() % ids_.size()]);
    p = sample_in_polygon(n.region, rng);
    return n;
  }

 private:
  const FeasibilityTree& tree_;
  std::vector<int> ids_;
};

}  // namespace

LatencyStats latency_stats(std::vector<double> s) {
  LatencyStats st;
  if (s.empty()) return st;
  std::sort(s.begin(), s.end());
  auto pct = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(s.size()))) - 1;
    return s[std::min(idx, s.size() - 1)];
  };
  st.p50_ms = pct(0.50);
  st.p99_ms = pct(0.99);
  st.max_ms = s.back();
  return st;
}

LatencyStats measure_queries(const FeasibilityTree& tree, const SpatialIndex& index, int samples,
                             std::uint64_t seed) {
  const PointSampler sampler(tree, -1);
  if (sampler.empty()) return {};
  std::mt19937_64 rng(seed);
  std::vector<double> times;
  std::size_t sink = 0;
  for (int i = 0; i < samples; ++i) {
    Vec3 p;
    const Node& n = sampler.draw(rng, p);
    const auto t0 = Clock::now();
    sink += index.find_nodes(tree, p, n.effector).size();
    times.push_back(ms_since(t0));
  }
  if (sink == 0) throw Error(ErrorCode::kInvalidInput, "sampled points hit no node");
  return latency_stats(std::move(times));
}

LatencyStats measure_plans(const FeasibilityTree& tree, const SpatialIndex& index, int samples,
                           std::uint64_t seed, int max_depth) {
  const PointSampler sampler(tree, max_depth);
  if (sampler.empty()) return {};
  std::mt19937_64 rng(seed);
  std::vector<double> times;
  for (int i = 0; i < samples; ++i) {
    Vec3 p;
    const Node& n = sampler.draw(rng, p);
    const auto t0 = Clock::now();
    const auto hits = index.find_nodes(tree, p, n.effector);
    if (hits.empty()) throw Error(ErrorCode::kNoSolution, "sampled point hit no node");
    const auto plan = extract_plan(tree, hits.front());
    if (plan.length() > 0) {
      const auto sol = solve(assemble_problem(plan, p, plan.length(), Objective::kFeasibility,
                                              tree.instance().kinematics));
      if (sol.status != SolveStatus::kFeasible)
        throw Error(ErrorCode::kInfeasible, "plan from an in-region point is infeasible");
    }
    times.push_back(ms_since(t0));
  }
  return latency_stats(std::move(times));
}

std::vector<BenchRecord> growth_suite(const BenchOptions& o) {
  std::vector<Job> jobs;
  for (const auto& f : families_of(o))
    for (int m : o.m_values)
      for (int n : o.n_values) {
        if (o.with_merge) jobs.push_back({f, m, n, true});
        if (o.without_merge) jobs.push_back({f, m, n, false});
      }
  std::vector<BenchRecord> out(jobs.size());
  run_jobs(jobs.size(), o.threads, [&](std::size_t i) { out[i] = run_build(jobs[i], o); });
  sort_records(out);
  return out;
}

std::vector<BenchRecord> timing_suite(const BenchOptions& o) {
  std::vector<Job> jobs;
  for (const auto& f : families_of(o))
    for (int m : o.m_values)
      for (int n : o.n_values) jobs.push_back({f, m, n, true});
  std::vector<BenchRecord> out(jobs.size());
  // Latencies are measured one scene at a time so that workers do not
  // compete for the same core.
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    FeasibilityTree tree;
    BenchRecord r = run_build(jobs[i], o, &tree);
    const SpatialIndex index(tree);
    const auto q = measure_queries(tree, index, o.query_samples, o.seed + i);
    const auto p = measure_plans(tree, index, o.plan_samples, o.seed + i);
    r.q_p50_ms = q.p50_ms;
    r.q_p99_ms = q.p99_ms;
    r.qp_ms = p.p99_ms;
    out[i] = std::move(r);
  }
  sort_records(out);
  return out;
}

void sort_records(std::vector<BenchRecord>& records) {
  std::sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::tie(a.scene, a.m, a.n, b.merge, a.yaw) < std::tie(b.scene, b.m, b.n, a.merge, b.yaw);
  });
}

std::string to_csv(const std::vector<BenchRecord>& records) { return csv(records, true); }

std::string to_csv_without_times(const std::vector<BenchRecord>& records) {
  return csv(records, false);
}

GrowthFit fit_growth(const std::vector<BenchRecord>& records, const std::string& family) {
  GrowthFit fit;
  std::vector<std::pair<double, double>> pts;
  double sxh = 0.0, sxx = 0.0, shh = 0.0;
  for (const auto& r : records) {
    if (r.scene != family || !r.merge || r.status != "ok" || r.h == 0) continue;
    const double x = static_cast<double>(r.m) * r.n;
    const double h = static_cast<double>(r.h);
    pts.emplace_back(x, h);
    sxh += x * h;
    sxx += x * x;
    shh += h * h;
  }
  fit.rows = static_cast<int>(pts.size());
  if (pts.empty() || sxx == 0.0) return fit;
  fit.a = sxh / sxx;
  double ss = 0.0;
  for (const auto& [x, h] : pts) {
    const double r = h - fit.a * x;
    ss += r * r;
    fit.worst_row = std::max(fit.worst_row, std::abs(r) / h);
  }
  fit.relative_residual = std::sqrt(ss / shh);
  return fit;
}

SaturationCheck check_saturation(const std::vector<std::size_t>& layers, int m,
                                 std::size_t min_layers) {
  SaturationCheck c;
  if (layers.empty()) return c;
  // Scan from the end: s is valid while every later layer is within m.
  const auto v = [&](std::size_t k) { return static_cast<long long>(layers[k]); };
  std::size_t s = layers.size() - 1;
  for (std::size_t k = layers.size() - 1; k-- > 0;) {
    bool ok = true;
    for (std::size_t j = k + 1; j < layers.size() && ok; ++j) ok = std::abs(v(j) - v(k)) <= m;
    if (ok) s = k;
  }
  c.saturation_layer = s;
  c.saturated_value = layers[s];
  for (std::size_t j = s + 1; j < layers.size(); ++j)
    c.max_deviation = std::max(c.max_deviation, std::abs(v(j) - v(s)));
  c.saturated = layers.size() - 1 - s >= min_layers;
  return c;
}

std::size_t ratio_streak(const std::vector<std::size_t>& layers, double threshold) {
  std::size_t best = 0, run = 0;
  for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
    const bool grows = layers[k] > 0 &&
                       static_cast<double>(layers[k + 1]) >= threshold * static_cast<double>(layers[k]);
    run = grows ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

std::string summarize(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  std::vector<std::string> families;
  for (const auto& r : records)
    if (std::find(families.begin(), families.end(), r.scene) == families.end())
      families.push_back(r.scene);
  for (const auto& f : families) {
    const auto fit = fit_growth(records, f);
    if (fit.rows > 0)
      os << f << ": h ~ " << fit.a << " m n, relative residual " << fit.relative_residual
         << ", worst row " << fit.worst_row << " (" << fit.rows << " rows)\n";
    // Longest merged and unmerged row per m.
    std::map<int, const BenchRecord*> merged, plain;
    for (const auto& r : records) {
      if (r.scene != f) continue;
      auto& slot = r.merge ? merged[r.m] : plain[r.m];
      if (!slot || r.n > slot->n) slot = &r;
    }
    for (const auto& [m, r] : merged) {
      const auto sat = check_saturation(r->layers, m);
      os << "  m=" << m << " n=" << r->n << ": ";
      if (sat.saturated)
        os << "saturated at layer " << sat.saturation_layer << " with " << sat.saturated_value
           << " nodes, max deviation " << sat.max_deviation;
      else
        os << "not saturated";
      if (r->q_p99_ms)
        os << ", query p99 " << *r->q_p99_ms << " ms, plan p99 " << r->qp_ms.value_or(0.0)
           << " ms";
      os << "\n";
    }
    for (const auto& [m, r] : plain)
      os << "  m=" << m << " unmerged: " << r->layers.size() << " layers, " << r->h
         << " nodes, ratio >= 1.3 over " << ratio_streak(r->layers, 1.3)
         << " consecutive layers (" << r->status << ")\n";
  }
  return os.str();
}

}  // namespace nas
