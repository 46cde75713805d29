#include "scenarios.hpp"

#include <limits>

#include "error.hpp"

namespace nas {

namespace {

constexpr double kStone = 0.46;
constexpr double kSpacing = 0.50;
constexpr double kJitter = 0.02;
constexpr double kMaxHeight = 0.12;

Scene base_family(const std::string& family, int m, std::uint64_t seed) {
  if (family == "stepping_stones")
    return stepping_stones(m, seed, kStone, kSpacing, kJitter, kMaxHeight, 0.0);
  if (family == "tilted_stones")
    return stepping_stones(m, seed, kStone, kSpacing, kJitter, kMaxHeight, 8.0);
  if (family == "flat_grid") return flat_grid(m, kStone, kSpacing);
  throw Error(ErrorCode::kInvalidInput, "unknown scene family '" + family + "'");
}

}  // namespace

std::vector<std::string> scene_families() { return {"stepping_stones", "tilted_stones", "flat_grid"}; }

Scene family_scene(const std::string& family, int m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::kInvalidInput, "scene needs at least one surface");
  if (m == 43) {
    // Two copies of the 22-surface scene (5 columns), continuing the grid
    // along x.
    const Scene base = base_family(family, 22, seed);
    return duplicate(base, 2, Vec3(5 * kSpacing, 0.0, 0.0), 43);
  }
  return base_family(family, m, seed);
}

ProblemInstance instance_on_scene(const Scene& scene, int max_steps,
                                  std::vector<double> yaw_angles_deg,
                                  std::optional<int> goal_surface) {
  const auto kin = KinematicModel::synthetic_default();
  if (!goal_surface && !scene.surfaces.empty()) {
    Vec3 centroid = Vec3::Zero();
    for (const auto& s : scene.surfaces) centroid += chebyshev_center(s.polygon).center;
    centroid /= static_cast<double>(scene.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : scene.surfaces) {
      const double d = (chebyshev_center(s.polygon).center - centroid).head<2>().norm();
      if (d < best - 1e-9) best = d, goal_surface = s.id;
    }
  }
  const Surface* s = goal_surface ? scene.find(*goal_surface) : nullptr;
  if (!s) throw Error(ErrorCode::kInvalidInput, "goal surface not in scene");
  const double margin = std::max(kin.foot_half_extents()[0], kin.foot_half_extents()[1]);
  const auto inset = inset_polygon(s->polygon, margin);
  if (!inset) throw Error(ErrorCode::kValidation, "goal surface vanishes after inset");
  const Vec3 goal = chebyshev_center(*inset).center;
  InstanceOptions opt;
  opt.max_steps = max_steps;
  opt.yaw_angles_deg = std::move(yaw_angles_deg);
  return make_instance(scene, kin, {goal}, opt);
}

}  // namespace nas
