#include "verify.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace nas {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index drawn with probability proportional to weights (all >= 0, sum > 0).
std::size_t pick_weighted(const std::vector<double>& weights, std::mt19937_64& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double r = uniform01(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;
}

Vec3 sample_in_goal(const PlanarPolygon& goal, std::mt19937_64& rng) {
  if (goal.area() > kAreaEps) return sample_in_polygon(goal, rng);
  const auto& v = goal.vertices();
  if (v.size() == 1) return v[0];
  const double t = uniform01(rng);
  return (1.0 - t) * v.front() + t * v.back();
}

// Some node of depth k on the surface contains p.
bool layer_contains(const FeasibilityTree& tree, const SpatialIndex& index, std::size_t k,
                    int surface_id, const Vec3& p) {
  const auto& layer = tree.layers()[k];
  if (layer.empty()) return false;
  for (int id : index.find_nodes(tree, p, tree.node(layer.front()).effector)) {
    const Node& n = tree.node(id);
    if (static_cast<std::size_t>(n.depth) == k && n.surface_id == surface_id) return true;
  }
  return false;
}

}  // namespace

bool VerifyReport::passed() const {
  return instance_match && completeness.misses == 0 && soundness.failures == 0 &&
         merge.mismatches == 0;
}

std::string VerifyReport::to_text() const {
  std::ostringstream os;
  os << "instance: " << (instance_match ? "match" : "MISMATCH") << "\n";
  os << "completeness: " << completeness.rollouts << " rollouts, " << completeness.points
     << " points, " << completeness.misses << " misses\n";
  os << "soundness: " << soundness.checked << " nodes, " << soundness.failures
     << " failures, worst violation " << soundness.worst_violation << "\n";
  if (!soundness.failed_nodes.empty()) {
    os << "  failed nodes:";
    for (std::size_t i = 0; i < std::min<std::size_t>(soundness.failed_nodes.size(), 20); ++i)
      os << " " << soundness.failed_nodes[i];
    os << "\n";
  }
  if (merge.skipped)
    os << "merge neutrality: skipped\n";
  else
    os << "merge neutrality: " << merge.layers << " layers, " << merge.samples << " samples, "
       << merge.mismatches << " mismatches\n";
  os << (passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

Vec3 sample_in_polygon(const PlanarPolygon& poly, std::mt19937_64& rng) {
  const auto& v = poly.vertices();
  if (v.size() < 3) throw Error(ErrorCode::kDegenerateOperand, "cannot sample a zero-area region");
  std::vector<double> areas;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    areas.push_back(0.5 * (v[i] - v[0]).cross(v[i + 1] - v[0]).norm());
  const std::size_t t = pick_weighted(areas, rng) + 1;
  double a = uniform01(rng), b = uniform01(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return v[0] + a * (v[t] - v[0]) + b * (v[t + 1] - v[0]);
}

CompletenessResult completeness_rollouts(const FeasibilityTree& tree, const SpatialIndex& index,
                                         int rollouts, std::uint64_t seed) {
  CompletenessResult res;
  const ProblemInstance& inst = tree.instance();
  const int max_depth = static_cast<int>(tree.depth_count()) - 1;
  if (max_depth < 1) return res;
  std::vector<double> thetas = inst.yaw_angles_rad();
  if (thetas.empty()) thetas = {0.0};
  std::mt19937_64 rng(seed);

  for (int r = 0; r < rollouts; ++r) {
    ++res.rollouts;
    const int length = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_depth));
    Vec3 q = sample_in_goal(inst.goal_region, rng);
    Vec3 normal = inst.goal_normal();
    Effector e = inst.goal_effector;
    for (int d = 1; d <= length; ++d) {
      const double theta = thetas[rng() % thetas.size()];
      const Polytope reach = inst.kinematics.antecedent(e)
                                 .rotated(Rotation3::about_z(theta) * rotation_to_normal(normal))
                                 .translated(q);
      std::vector<PlanarPolygon> options;
      std::vector<double> weights;
      std::vector<const Surface*> surfaces;
      for (const auto& s : inst.scene.surfaces) {
        auto clipped = clip_polygon_by_polytope(s.polygon, reach);
        if (!clipped || clipped->area() <= kAreaEps) continue;
        weights.push_back(clipped->area());
        options.push_back(std::move(*clipped));
        surfaces.push_back(&s);
      }
      if (options.empty()) break;
      const std::size_t pick = pick_weighted(weights, rng);
      q = sample_in_polygon(options[pick], rng);
      normal = surfaces[pick]->normal();
      e = other(e);
      ++res.points;
      bool hit = false;
      for (int id : index.find_nodes(tree, q, e))
        if (tree.node(id).depth == d) hit = true;
      if (!hit) ++res.misses;
    }
  }
  return res;
}

SoundnessResult soundness_sweep(const FeasibilityTree& tree) {
  SoundnessResult res;
  for (const auto& n : tree.nodes()) {
    if (n.depth == 0 || !n.valid) continue;
    ++res.checked;
    FootstepPlan sol;
    try {
      const auto plan = extract_plan(tree, n.id);
      const Vec3 p0 = chebyshev_center(n.region).center;
      sol = solve(assemble_problem(plan, p0, plan.length(), Objective::kFeasibility,
                                   tree.instance().kinematics));
    } catch (const Error&) {
      sol.status = SolveStatus::kInfeasible;
      sol.max_violation = std::numeric_limits<double>::infinity();
    }
    res.worst_violation = std::max(res.worst_violation, sol.max_violation);
    if (sol.status != SolveStatus::kFeasible) {
      ++res.failures;
      res.failed_nodes.push_back(n.id);
    }
  }
  return res;
}

MergeResult merge_neutrality(const FeasibilityTree& tree, int samples_per_layer,
                             std::uint64_t seed, std::size_t budget) {
  MergeResult res;
  BuildOptions opt;
  opt.merge = !tree.stats().merged;
  opt.node_budget = budget;
  opt.truncate_on_budget = true;
  opt.max_steps = static_cast<int>(tree.depth_count()) - 1;
  const FeasibilityTree other_tree = build_tree(tree.instance_ptr(), opt);
  const std::size_t layers = std::min(tree.depth_count(), other_tree.depth_count());
  std::mt19937_64 rng(seed);

  const SpatialIndex mine_index(tree), their_index(other_tree);

  for (std::size_t k = 0; k < layers; ++k) {
    ++res.layers;
    // Half of the samples come from each tree's regions so that a region
    // missing on either side is caught.
    std::array<std::vector<double>, 2> weights;
    std::array<double, 2> totals{0.0, 0.0};
    for (int side = 0; side < 2; ++side) {
      const FeasibilityTree& src = side == 0 ? tree : other_tree;
      for (int id : src.layers()[k]) {
        weights[side].push_back(src.node(id).region.area());
        totals[side] += weights[side].back();
      }
    }
    for (int s = 0; s < samples_per_layer; ++s) {
      const int side = s % 2;
      const FeasibilityTree& src = side == 0 ? tree : other_tree;
      const auto& layer = src.layers()[k];
      const Node* n = nullptr;
      Vec3 p;
      if (totals[side] > 0.0) {
        n = &src.node(layer[pick_weighted(weights[side], rng)]);
        p = sample_in_polygon(n->region, rng);
      } else {
        n = &src.node(layer[rng() % layer.size()]);
        p = sample_in_goal(n->region, rng);
      }
      ++res.samples;
      const bool a = layer_contains(tree, mine_index, k, n->surface_id, p);
      const bool b = layer_contains(other_tree, their_index, k, n->surface_id, p);
      if (a != b) ++res.mismatches;
    }
  }
  return res;
}

VerifyReport verify_tree(const FeasibilityTree& tree, const VerifyOptions& options,
                         const ProblemInstance* expected_instance) {
  VerifyReport rep;
  if (expected_instance)
    rep.instance_match = instance_to_json(*expected_instance, -1) ==
                         instance_to_json(tree.instance(), -1);
  const SpatialIndex index(tree);
  rep.completeness = completeness_rollouts(tree, index, options.rollouts, options.seed);
  rep.soundness = soundness_sweep(tree);
  if (options.check_merge)
    rep.merge = merge_neutrality(tree, options.merge_samples_per_layer, options.seed + 1,
                                 options.merge_budget);
  else
    rep.merge.skipped = true;
  return rep;
}

}  // namespace nas
