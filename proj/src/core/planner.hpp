#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "scene.hpp"

namespace nas {

// surface_id of the root node; its supporting surface is
// ProblemInstance::goal_surface_id.
inline constexpr int kGoalSurface = -1;

struct Node {
  int id = -1;
  Effector effector = Effector::kLeft;
  int surface_id = kGoalSurface;
  PlanarPolygon region;
  std::vector<int> parents;
  int depth = 0;
  // Accumulated yaw (radians) when the tree is built with yaw options.
  std::optional<double> yaw;
  bool valid = true;
};

struct LayerStats {
  std::size_t nodes = 0;
  // Children produced before merging.
  std::size_t candidates = 0;
  double expand_ms = 0.0;
};

struct TreeStats {
  std::vector<LayerStats> layers;
  double build_ms = 0.0;
  bool merged = true;
  // Expansion stopped because the node budget was reached.
  bool truncated = false;
  // Expansion stopped at the first layer containing the stop_at state.
  bool stopped_early = false;

  std::size_t total_nodes() const;
  std::vector<std::size_t> layer_counts() const;
  // Mean candidate children per expanded node.
  double mean_branching() const;
};

class FeasibilityTree {
 public:
  FeasibilityTree() = default;
  FeasibilityTree(std::shared_ptr<const ProblemInstance> instance, std::vector<Node> nodes,
                  TreeStats stats);

  const ProblemInstance& instance() const { return *instance_; }
  std::shared_ptr<const ProblemInstance> instance_ptr() const { return instance_; }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }
  std::size_t depth_count() const { return layers_.size(); }
  const std::vector<std::vector<int>>& layers() const { return layers_; }
  const TreeStats& stats() const { return stats_; }

  // Normal of the surface a node lies on (the goal's surface for the root).
  const Vec3& normal(const Node& n) const;
  int support_surface(const Node& n) const;

  // Only the query layer should toggle validity.
  void set_valid(int id, bool valid) { nodes_.at(static_cast<std::size_t>(id)).valid = valid; }

 private:
  std::shared_ptr<const ProblemInstance> instance_;
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> layers_;
  TreeStats stats_;
};

struct StopCondition {
  Vec3 point;
  Effector effector;
};

struct BuildOptions {
  bool merge = true;
  std::optional<StopCondition> stop_at;
  // Maximum number of nodes; NAS_NODE_BUDGET overrides the default.
  std::size_t node_budget = default_node_budget();
  // Return the partial tree instead of failing when the budget is reached.
  bool truncate_on_budget = false;
  // Worker threads for layer expansion; 0 = hardware concurrency.
  unsigned threads = 1;
  // Expand at most this many layers (defaults to instance.max_steps).
  std::optional<int> max_steps;

  static std::size_t default_node_budget();
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, TreeStats stats)
      : Error(ErrorCode::kNodeBudget, what), stats_(std::move(stats)) {}
  const TreeStats& stats() const { return stats_; }

 private:
  TreeStats stats_;
};

Node make_goal_node(const ProblemInstance& instance);

// Positions from which the node's region can be reached in one step by the
// node's effector, i.e. region (+) Rz(yaw) Q A.
Polytope reach_polytope(const Node& node, const ProblemInstance& instance, const Vec3& normal,
                        double yaw = 0.0);

// Children (ids unset, parent = node.id) of `node`, one per surface the reach
// polytope meets with positive area.
std::vector<Node> feasible_nodes(const Node& node, const ProblemInstance& instance,
                                 const Vec3& normal);
// As feasible_nodes, once per yaw option; children carry node.yaw + theta.
std::vector<Node> feasible_nodes_yaw(const Node& node, const ProblemInstance& instance,
                                     const Vec3& normal);

// Coalesces nodes with equal (effector, surface, yaw, region) into one node
// carrying the union of parents. Output is sorted by (surface, yaw, region).
std::vector<Node> merge_layer(std::vector<Node> layer);

FeasibilityTree build_tree(std::shared_ptr<const ProblemInstance> instance,
                           const BuildOptions& options = {});

// Line-delimited JSON: one header record then one record per node.
void save_tree(const FeasibilityTree& tree, const std::string& path);
std::string tree_to_jsonl(const FeasibilityTree& tree);
FeasibilityTree load_tree(const std::string& path);
FeasibilityTree parse_tree(const std::string& text);

}  // namespace nas
