#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scene.hpp"

namespace nas {

// Scene families used by the benchmark harness. Surface counts are matched
// to the target m; geometry is generated, not measured.
//   stepping_stones  0.46 m stones on a 0.50 m grid, heights in [0, 0.12]
//   tilted_stones    as above with up to 8 degrees of tilt
//   flat_grid        level 0.46 m tiles on a 0.50 m grid
// m = 43 is built by duplicating the m = 22 scene and dropping the last tile.
Scene family_scene(const std::string& family, int m, std::uint64_t seed);
std::vector<std::string> scene_families();

// Synthetic kinematics, left-foot goal at the Chebyshev center of surface
// `goal_surface` after insetting; by default the surface closest to the
// scene centroid.
ProblemInstance instance_on_scene(const Scene& scene, int max_steps,
                                  std::vector<double> yaw_angles_deg = {},
                                  std::optional<int> goal_surface = std::nullopt);

}  // namespace nas
