#include "query.hpp"

#include <algorithm>
#include <cmath>

namespace nas {

// --- kd-tree -------------------------------------------------------------------

void SpatialIndex::KdTree::build(std::size_t lo, std::size_t hi, int axis) {
  if (hi - lo <= 1) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(entries.begin() + static_cast<std::ptrdiff_t>(lo),
                   entries.begin() + static_cast<std::ptrdiff_t>(mid),
                   entries.begin() + static_cast<std::ptrdiff_t>(hi),
                   [axis](const Entry& a, const Entry& b) {
                     if (a.key[axis] != b.key[axis]) return a.key[axis] < b.key[axis];
                     return a.node < b.node;
                   });
  build(lo, mid, (axis + 1) % 3);
  build(mid + 1, hi, (axis + 1) % 3);
}

template <class Visit>
void SpatialIndex::KdTree::range(std::size_t lo, std::size_t hi, int axis, const Vec3& c,
                                 double r2, Visit&& visit) const {
  while (hi > lo) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const Entry& e = entries[mid];
    if ((e.key - c).squaredNorm() <= r2) visit(e.node);
    const double d = c[axis] - e.key[axis];
    const int next = (axis + 1) % 3;
    // Recurse into the far side only when the ball crosses the split.
    if (d < 0.0) {
      if (d * d <= r2) range(mid + 1, hi, next, c, r2, visit);
      hi = mid;
    } else {
      if (d * d <= r2) range(lo, mid, next, c, r2, visit);
      lo = mid + 1;
    }
    axis = next;
  }
}

SpatialIndex::SpatialIndex(const FeasibilityTree& tree) : masked_(tree.size(), 0) {
  for (const auto& n : tree.nodes()) {
    if (!n.valid) {
      masked_[static_cast<std::size_t>(n.id)] = 1;
      continue;
    }
    const Vec3 center = chebyshev_center(n.region).center;
    double radius = 0.0;
    for (const auto& v : n.region.vertices()) radius = std::max(radius, (v - center).norm());
    KdTree& kd = kd_[static_cast<std::size_t>(n.effector)];
    kd.entries.push_back({center, n.id});
    kd.radius = std::max(kd.radius, radius);
  }
  for (auto& kd : kd_) kd.build(0, kd.entries.size(), 0);
}

std::vector<int> SpatialIndex::find_nodes(const FeasibilityTree& tree, const Vec3& p,
                                          Effector effector) const {
  const KdTree& kd = kd_[static_cast<std::size_t>(effector)];
  std::vector<int> out;
  const double r = kd.radius + 2.0 * kGeomEps;
  kd.range(0, kd.entries.size(), 0, p, r * r, [&](int id) {
    if (masked_[static_cast<std::size_t>(id)]) return;
    const Node& n = tree.node(id);
    if (n.valid && n.region.contains(p)) out.push_back(id);
  });
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    const int da = tree.node(a).depth, db = tree.node(b).depth;
    return da != db ? da < db : a < b;
  });
  return out;
}

void SpatialIndex::mask(int node_id) { masked_.at(static_cast<std::size_t>(node_id)) = 1; }

bool SpatialIndex::masked(int node_id) const {
  return masked_.at(static_cast<std::size_t>(node_id)) != 0;
}

// --- plans ---------------------------------------------------------------------

namespace {

PlanEntry entry_for(const FeasibilityTree& tree, const Node& n) {
  return {n.id, n.surface_id, n.effector, n.region, tree.normal(n), n.yaw};
}

}  // namespace

SurfacePlan extract_plan(const FeasibilityTree& tree, int node_id) {
  if (node_id < 0 || static_cast<std::size_t>(node_id) >= tree.size())
    throw Error(ErrorCode::kInvalidInput, "unknown node id " + std::to_string(node_id));
  const Node* n = &tree.node(node_id);
  if (!n->valid) throw Error(ErrorCode::kNoSolution, "node " + std::to_string(node_id) + " is invalid");
  SurfacePlan plan;
  plan.entries.push_back(entry_for(tree, *n));
  while (n->depth > 0) {
    const Node* next = nullptr;
    for (int p : n->parents) {
      if (tree.node(p).valid) {
        next = &tree.node(p);
        break;
      }
    }
    if (!next)
      throw Error(ErrorCode::kNoSolution,
                  "no valid chain from node " + std::to_string(node_id) + " (blocked at node " +
                      std::to_string(n->id) + ")");
    n = next;
    plan.entries.push_back(entry_for(tree, *n));
  }
  return plan;
}

std::size_t invalidate_surface(FeasibilityTree& tree, SpatialIndex& index, int surface_id) {
  if (!tree.instance().scene.find(surface_id))
    throw Error(ErrorCode::kInvalidInput, "unknown surface id " + std::to_string(surface_id));
  std::size_t count = 0;
  for (const auto& n : tree.nodes()) {
    if (tree.support_surface(n) != surface_id) continue;
    if (n.valid) ++count;
    tree.set_valid(n.id, false);
    index.mask(n.id);
  }
  return count;
}

std::optional<SurfacePlan> replan(const FeasibilityTree& tree, const SpatialIndex& index,
                                  const Vec3& p, Effector effector) {
  // dead[id]: the node has no valid chain to the goal. Parents are visited in
  // ascending id order, so the first found chain equals extract_plan's when
  // nothing is blocked.
  std::vector<char> dead(tree.size(), 0);
  std::vector<int> chain;
  auto dfs = [&](auto&& self, int id) -> bool {
    const Node& n = tree.node(id);
    if (!n.valid || dead[static_cast<std::size_t>(id)]) return false;
    chain.push_back(id);
    if (n.depth == 0) return true;
    for (int parent : n.parents)
      if (self(self, parent)) return true;
    chain.pop_back();
    dead[static_cast<std::size_t>(id)] = 1;
    return false;
  };
  for (int start : index.find_nodes(tree, p, effector)) {
    chain.clear();
    if (!dfs(dfs, start)) continue;
    SurfacePlan plan;
    for (int id : chain) plan.entries.push_back(entry_for(tree, tree.node(id)));
    return plan;
  }
  return std::nullopt;
}

}  // namespace nas
