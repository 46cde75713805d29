#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "footstep.hpp"

namespace nas {

// One CSV row. Time fields are empty (nullopt) when the suite does not
// measure them.
struct BenchRecord {
  std::string scene;
  int m = 0;
  int n = 0;
  bool merge = true;
  int yaw = 0;  // number of yaw options, 0 = none
  std::size_t h = 0;
  std::vector<std::size_t> layers;
  double build_ms = 0.0;
  std::optional<double> q_p50_ms;
  std::optional<double> q_p99_ms;
  std::optional<double> qp_ms;  // p99 of query + plan extraction + feasibility QP
  std::string status = "ok";    // ok | truncated
};

struct BenchOptions {
  std::vector<std::string> families;  // empty = all
  std::vector<int> m_values = {4, 10, 22, 43};
  std::vector<int> n_values = {10, 25, 50, 100};
  bool with_merge = true;
  bool without_merge = true;
  std::uint64_t seed = 1;
  // Cap for builds without merging; the environment override still applies
  // when it is smaller.
  std::size_t no_merge_budget = 200000;
  int query_samples = 1000;
  int plan_samples = 200;
  int threads = 1;  // concurrent scene builds
};

inline const char* kBenchCsvHeader =
    "scene,m,n,merge,yaw,h,layers,build_ms,q_p50_ms,q_p99_ms,qp_ms,status";

// Merged and unmerged trees over every (family, m, n).
std::vector<BenchRecord> growth_suite(const BenchOptions& options);

// Merged trees with query latency over random in-region points and
// end-to-end planning latency.
std::vector<BenchRecord> timing_suite(const BenchOptions& options);

struct LatencyStats {
  double p50_ms = 0.0;
  double p99_ms = 0.0;
  double max_ms = 0.0;
};
LatencyStats latency_stats(std::vector<double> samples_ms);

// Query latency of find_nodes at `samples` uniform points inside node regions.
LatencyStats measure_queries(const FeasibilityTree& tree, const SpatialIndex& index, int samples,
                             std::uint64_t seed);

// Query, plan extraction and full-horizon feasibility QP from random
// in-region points, at most `max_depth` steps deep.
LatencyStats measure_plans(const FeasibilityTree& tree, const SpatialIndex& index, int samples,
                           std::uint64_t seed, int max_depth = -1);

// Sorted by (scene, m, n, merge, yaw).
void sort_records(std::vector<BenchRecord>& records);
std::string to_csv(const std::vector<BenchRecord>& records);
// Same rows with the time columns blanked.
std::string to_csv_without_times(const std::vector<BenchRecord>& records);

// Least-squares fit h = a m n over merged rows of one family.
// `relative_residual` is |h - a m n| / |h| (Euclidean norms over the rows);
// `worst_row` is the largest per-row |h - a m n| / h.
struct GrowthFit {
  double a = 0.0;
  double relative_residual = 0.0;
  double worst_row = 0.0;
  int rows = 0;
};
GrowthFit fit_growth(const std::vector<BenchRecord>& records, const std::string& family);

// Saturation layer s: the first layer such that every later layer stays
// within m of it. `saturated` requires at least `min_layers` layers after s.
struct SaturationCheck {
  bool saturated = false;
  std::size_t saturation_layer = 0;
  std::size_t saturated_value = 0;
  long long max_deviation = 0;  // over layers after s
};
SaturationCheck check_saturation(const std::vector<std::size_t>& layers, int m,
                                 std::size_t min_layers = 5);

// Longest run of consecutive layer ratios L[k+1] / L[k] >= threshold.
std::size_t ratio_streak(const std::vector<std::size_t>& layers, double threshold);

// Human-readable digest: growth fits, saturation and unmerged growth for
// the growth suite; latency maxima for the timing suite.
std::string summarize(const std::vector<BenchRecord>& records);

}  // namespace nas
