#pragma once

#include <array>
#include <optional>
#include <vector>

#include "planner.hpp"

namespace nas {

// Per-effector kd-tree keyed by region Chebyshev centers. A range search with
// the largest region circumradius as radius cannot miss a containing region;
// candidates are then refined by exact containment.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  explicit SpatialIndex(const FeasibilityTree& tree);

  // Valid nodes of `effector` containing p, by ascending (depth, id).
  std::vector<int> find_nodes(const FeasibilityTree& tree, const Vec3& p, Effector effector) const;

  void mask(int node_id);
  bool masked(int node_id) const;
  std::size_t size(Effector e) const { return kd_[static_cast<std::size_t>(e)].entries.size(); }

 private:
  struct Entry {
    Vec3 key;
    int node = -1;
  };
  struct KdTree {
    std::vector<Entry> entries;
    double radius = 0.0;
    void build(std::size_t lo, std::size_t hi, int axis);
    template <class Visit>
    void range(std::size_t lo, std::size_t hi, int axis, const Vec3& c, double r2,
               Visit&& visit) const;
  };

  std::array<KdTree, 2> kd_;
  std::vector<char> masked_;
};

struct PlanEntry {
  int node_id = -1;
  int surface_id = kGoalSurface;
  Effector effector = Effector::kLeft;
  PlanarPolygon region;
  Vec3 normal = Vec3::UnitZ();
  std::optional<double> yaw;
};

// entries[0] is the start node (depth k), entries.back() the goal node.
struct SurfacePlan {
  std::vector<PlanEntry> entries;
  int length() const { return static_cast<int>(entries.size()) - 1; }
};

// Greedy chain: lowest-id valid parent at every level.
SurfacePlan extract_plan(const FeasibilityTree& tree, int node_id);

// Marks every node on the surface invalid (the root too when the goal lies on
// it) and masks them in the index. Returns how many nodes changed.
std::size_t invalidate_surface(FeasibilityTree& tree, SpatialIndex& index, int surface_id);

// First plan, in find_nodes order, whose whole chain is valid (depth-first
// search over valid parents).
std::optional<SurfacePlan> replan(const FeasibilityTree& tree, const SpatialIndex& index,
                                  const Vec3& p, Effector effector);

}  // namespace nas
