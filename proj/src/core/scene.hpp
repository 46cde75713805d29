#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace nas {

enum class Effector : std::uint8_t { kLeft = 0, kRight = 1 };

inline Effector other(Effector e) {
  return e == Effector::kLeft ? Effector::kRight : Effector::kLeft;
}
const char* to_string(Effector e);
Effector parse_effector(const std::string& name);

// One convex contact surface. `input_vertices` keeps the loop exactly as
// given so validation can report winding and planarity problems; `polygon`
// is the normalized convex polygon used for planning.
struct Surface {
  int id = 0;
  std::vector<Vec3> input_vertices;
  PlanarPolygon polygon;

  const Vec3& normal() const { return polygon.normal(); }

  // Normal from the vertex winding (Newell), vertices re-ordered CCW.
  static Surface from_vertices(int id, std::vector<Vec3> vertices);
};

struct Scene {
  std::vector<Surface> surfaces;

  size_t size() const { return surfaces.size(); }
  const Surface* find(int id) const;
};

// Reach polytopes of each foot with the other foot at the origin, and the
// antecedent sets derived from them.
class KinematicModel {
 public:
  KinematicModel() = default;
  KinematicModel(Polytope reach_left_given_right, Polytope reach_right_given_left,
                 std::array<double, 2> foot_half_extents);

  // Synthetic biped model (not measured data): a frustum-shaped reach volume
  // 0.12..0.40 m to the side, +/-0.35 m fore/aft at the bottom narrowing to
  // +/-0.25 m at the top, +/-0.2 m vertical.
  static KinematicModel synthetic_default();

  // Positions `stepping` can reach with the other foot at the origin.
  const Polytope& reach(Effector stepping) const;
  // Positions of the other foot from which `landing` can step to the origin.
  const Polytope& antecedent(Effector landing) const;
  const std::array<double, 2>& foot_half_extents() const { return foot_half_extents_; }

 private:
  Polytope reach_left_;
  Polytope reach_right_;
  Polytope antecedent_left_;
  Polytope antecedent_right_;
  std::array<double, 2> foot_half_extents_{0.0, 0.0};
};

struct ProblemInstance {
  // Surfaces as given; `scene` holds the (inset) planning surfaces.
  Scene source_scene;
  Scene scene;
  KinematicModel kinematics;
  std::vector<Vec3> goal_vertices;
  Polytope goal;
  PlanarPolygon goal_region;
  int goal_surface_id = -1;
  Effector goal_effector = Effector::kLeft;
  int max_steps = 0;
  std::vector<double> yaw_angles_deg;
  bool preinset = false;
  std::vector<std::string> warnings;

  const Vec3& goal_normal() const;
  std::vector<double> yaw_angles_rad() const;
};

struct InstanceOptions {
  int max_steps = 0;
  std::vector<double> yaw_angles_deg;
  bool preinset = false;
  Effector goal_effector = Effector::kLeft;
  // Defaults to max(foot_half_extents) when unset.
  std::optional<double> inset_margin;
};

ProblemInstance make_instance(Scene scene, KinematicModel kinematics,
                              std::vector<Vec3> goal_vertices, const InstanceOptions& options);

ProblemInstance parse_instance(const std::string& text);
ProblemInstance load_instance(const std::string& path);
std::string instance_to_json(const ProblemInstance& inst, int indent = 2);
void save_instance(const ProblemInstance& inst, const std::string& path);

struct ValidationReport {
  std::vector<std::pair<int, int>> overlaps;
  std::vector<int> degenerate;
  std::vector<int> non_convex;
  std::vector<int> normal_inconsistent;
  std::vector<int> duplicate_ids;

  bool empty() const {
    return overlaps.empty() && degenerate.empty() && non_convex.empty() &&
           normal_inconsistent.empty() && duplicate_ids.empty();
  }
  std::vector<std::string> messages() const;
};

ValidationReport validate_scene(const Scene& scene);

// --- procedural scenes -------------------------------------------------------

enum class SceneKind { kStaircase, kSteppingStones, kFlatGrid, kDuplicate };

struct SceneParams {
  // staircase
  int steps = 4;
  double rise = 0.1;
  double run = 0.3;
  double width = 0.6;
  // stepping_stones / flat_grid
  int count = 10;
  double stone_size = 0.45;
  double spacing = 0.55;
  double jitter = 0.02;
  double max_height = 0.12;
  double max_tilt_deg = 0.0;
  std::uint64_t seed = 1;
  // duplicate
  std::shared_ptr<const Scene> base;
  int copies = 2;
  Vec3 offset = Vec3(2.0, 0.0, 0.0);
  std::optional<int> limit;
};

Scene generate_scene(SceneKind kind, const SceneParams& params);
Scene staircase(int steps, double rise, double run, double width);
Scene stepping_stones(int count, std::uint64_t seed, double stone_size, double spacing,
                      double jitter, double max_height, double max_tilt_deg);
Scene flat_grid(int count, double tile_size, double spacing);
Scene duplicate(const Scene& base, int copies, const Vec3& offset,
                std::optional<int> limit = std::nullopt);

}  // namespace nas
