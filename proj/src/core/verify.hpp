#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "footstep.hpp"

namespace nas {

struct VerifyOptions {
  int rollouts = 500;
  std::uint64_t seed = 1;
  int merge_samples_per_layer = 1000;
  // Budget for the counterpart build used by the merge check; layers past
  // the budget are not compared.
  std::size_t merge_budget = 200000;
  bool check_merge = true;
};

struct CompletenessResult {
  int rollouts = 0;
  int points = 0;
  int misses = 0;  // sampled point with no containing node at its depth
};

struct SoundnessResult {
  int checked = 0;
  int failures = 0;
  double worst_violation = 0.0;
  std::vector<int> failed_nodes;
};

struct MergeResult {
  int layers = 0;
  int samples = 0;
  int mismatches = 0;
  bool skipped = false;
};

struct VerifyReport {
  bool instance_match = true;
  CompletenessResult completeness;
  SoundnessResult soundness;
  MergeResult merge;

  bool passed() const;
  std::string to_text() const;
};

// Uniform point in a polygon with positive area.
Vec3 sample_in_polygon(const PlanarPolygon& poly, std::mt19937_64& rng);

// Backward rollouts from the goal: each step samples the other foot inside
// (antecedent (+) current position) on a surface, area weighted, and checks
// that some node of the matching depth and effector contains it.
CompletenessResult completeness_rollouts(const FeasibilityTree& tree, const SpatialIndex& index,
                                         int rollouts, std::uint64_t seed);

// Feasibility footstep problem from every valid non-root node's Chebyshev
// center along its extracted plan.
SoundnessResult soundness_sweep(const FeasibilityTree& tree);

// Rebuilds the tree with the opposite merge setting and compares per-layer,
// per-surface region unions on sampled points.
MergeResult merge_neutrality(const FeasibilityTree& tree, int samples_per_layer,
                             std::uint64_t seed, std::size_t budget);

VerifyReport verify_tree(const FeasibilityTree& tree, const VerifyOptions& options,
                         const ProblemInstance* expected_instance = nullptr);

}  // namespace nas
