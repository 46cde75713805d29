#pragma once

#include <string>

#include "footstep.hpp"

namespace nas {

struct SvgOptions {
  double pixels_per_meter = 200.0;
  // Node regions deeper than this are not drawn; negative draws all.
  int max_depth = -1;
  bool draw_nodes = true;
};

struct SvgFootsteps {
  Vec3 start = Vec3::Zero();
  Effector start_effector = Effector::kLeft;
  const FootstepPlan* plan = nullptr;
};

// Static top view (x right, y up): surfaces in grey, node regions colored by
// depth, the goal, and optionally a footstep sequence.
std::string svg_top_view(const ProblemInstance& instance, const FeasibilityTree* tree,
                         const SvgFootsteps* steps = nullptr, const SvgOptions& options = {});

}  // namespace nas
