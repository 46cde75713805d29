#include "planner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <thread>
#include <tuple>
#include <unordered_map>

namespace nas {

// --- stats / tree --------------------------------------------------------------

std::size_t TreeStats::total_nodes() const {
  std::size_t h = 0;
  for (const auto& l : layers) h += l.nodes;
  return h;
}

std::vector<std::size_t> TreeStats::layer_counts() const {
  std::vector<std::size_t> out;
  for (const auto& l : layers) out.push_back(l.nodes);
  return out;
}

double TreeStats::mean_branching() const {
  std::size_t parents = 0, children = 0;
  for (std::size_t k = 1; k < layers.size(); ++k) {
    parents += layers[k - 1].nodes;
    children += layers[k].candidates;
  }
  return parents ? static_cast<double>(children) / static_cast<double>(parents) : 0.0;
}

FeasibilityTree::FeasibilityTree(std::shared_ptr<const ProblemInstance> instance,
                                 std::vector<Node> nodes, TreeStats stats)
    : instance_(std::move(instance)), nodes_(std::move(nodes)), stats_(std::move(stats)) {
  if (!instance_) throw Error(ErrorCode::kInvalidInput, "tree without instance");
  if (nodes_.empty() || nodes_[0].depth != 0)
    throw Error(ErrorCode::kInvalidInput, "tree must start with the goal node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.id != static_cast<int>(i)) throw Error(ErrorCode::kInvalidInput, "node ids must be dense");
    if (n.depth > 0) {
      if (n.parents.empty()) throw Error(ErrorCode::kInvalidInput, "non-root node without parent");
      for (int p : n.parents) {
        if (p < 0 || p >= n.id || nodes_[static_cast<std::size_t>(p)].depth != n.depth - 1)
          throw Error(ErrorCode::kInvalidInput,
                      "node " + std::to_string(n.id) + " has a parent outside the previous layer");
      }
    } else if (i != 0) {
      throw Error(ErrorCode::kInvalidInput, "more than one root node");
    }
    if (static_cast<std::size_t>(n.depth) >= layers_.size()) layers_.resize(static_cast<std::size_t>(n.depth) + 1);
    layers_[static_cast<std::size_t>(n.depth)].push_back(n.id);
  }
}

int FeasibilityTree::support_surface(const Node& n) const {
  return n.surface_id == kGoalSurface ? instance_->goal_surface_id : n.surface_id;
}

const Vec3& FeasibilityTree::normal(const Node& n) const {
  if (n.surface_id == kGoalSurface) return instance_->goal_normal();
  const Surface* s = instance_->scene.find(n.surface_id);
  if (!s) throw Error(ErrorCode::kInvalidInput, "node on unknown surface");
  return s->normal();
}

std::size_t BuildOptions::default_node_budget() {
  if (const char* env = std::getenv("NAS_NODE_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 5'000'000;
}

// --- expansion -----------------------------------------------------------------

namespace {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi - 1e-12) r = 0.0;
  return r;
}

// Rotated antecedent polytopes, one per (supporting surface, effector, yaw
// option), computed once so layer workers only read shared state.
class Expander {
 public:
  explicit Expander(const ProblemInstance& inst) : inst_(inst) {
    thetas_ = inst.yaw_angles_rad();
    with_yaw_ = !thetas_.empty();
    if (!with_yaw_) thetas_ = {0.0};
    add_normal(kGoalSurface, inst.goal_normal());
    for (const auto& s : inst.scene.surfaces) add_normal(s.id, s.normal());
  }

  bool with_yaw() const { return with_yaw_; }

  void expand(const Node& node, std::vector<Node>& out) const {
    const auto& per_theta = cache_.at(node.surface_id)[static_cast<std::size_t>(node.effector)];
    for (std::size_t t = 0; t < thetas_.size(); ++t) {
      const Polytope reach = minkowski_sum(node.region, per_theta[t]);
      for (const auto& s : inst_.scene.surfaces) {
        auto clipped = clip_polygon_by_polytope(s.polygon, reach);
        if (!clipped) continue;
        Node child;
        child.effector = other(node.effector);
        child.surface_id = s.id;
        child.region = std::move(*clipped);
        child.parents = {node.id};
        child.depth = node.depth + 1;
        if (with_yaw_) child.yaw = wrap_angle(node.yaw.value_or(0.0) + thetas_[t]);
        out.push_back(std::move(child));
      }
    }
  }

 private:
  void add_normal(int id, const Vec3& n) {
    const Rotation3 q = rotation_to_normal(n);
    auto& slot = cache_[id];
    for (Effector e : {Effector::kLeft, Effector::kRight}) {
      auto& v = slot[static_cast<std::size_t>(e)];
      for (double theta : thetas_)
        v.push_back(inst_.kinematics.antecedent(e).rotated(Rotation3::about_z(theta) * q));
    }
  }

  const ProblemInstance& inst_;
  std::vector<double> thetas_;
  bool with_yaw_ = false;
  std::unordered_map<int, std::array<std::vector<Polytope>, 2>> cache_;
};

using MergeKey = std::tuple<int, long long, int, std::vector<std::array<long long, 3>>>;

MergeKey merge_key(const Node& n) {
  const long long yaw = n.yaw ? std::llround(wrap_angle(*n.yaw) * 1e9) : -1;
  return {n.surface_id, yaw, static_cast<int>(n.effector), canonical_key(n.region)};
}

}  // namespace

Node make_goal_node(const ProblemInstance& instance) {
  Node root;
  root.id = 0;
  root.effector = instance.goal_effector;
  root.surface_id = kGoalSurface;
  root.region = instance.goal_region;
  root.depth = 0;
  if (!instance.yaw_angles_deg.empty()) root.yaw = 0.0;
  return root;
}

Polytope reach_polytope(const Node& node, const ProblemInstance& instance, const Vec3& normal,
                        double yaw) {
  const Rotation3 q = Rotation3::about_z(yaw) * rotation_to_normal(normal);
  return minkowski_sum(node.region, instance.kinematics.antecedent(node.effector).rotated(q));
}

std::vector<Node> feasible_nodes(const Node& node, const ProblemInstance& instance,
                                 const Vec3& normal) {
  const Polytope reach = reach_polytope(node, instance, normal);
  std::vector<Node> out;
  for (const auto& s : instance.scene.surfaces) {
    auto clipped = clip_polygon_by_polytope(s.polygon, reach);
    if (!clipped) continue;
    Node child;
    child.effector = other(node.effector);
    child.surface_id = s.id;
    child.region = std::move(*clipped);
    child.parents = {node.id};
    child.depth = node.depth + 1;
    out.push_back(std::move(child));
  }
  return out;
}

std::vector<Node> feasible_nodes_yaw(const Node& node, const ProblemInstance& instance,
                                     const Vec3& normal) {
  const auto thetas = instance.yaw_angles_rad();
  if (thetas.empty()) throw Error(ErrorCode::kInvalidInput, "instance has no yaw options");
  std::vector<Node> out;
  for (double theta : thetas) {
    const Polytope reach = reach_polytope(node, instance, normal, theta);
    for (const auto& s : instance.scene.surfaces) {
      auto clipped = clip_polygon_by_polytope(s.polygon, reach);
      if (!clipped) continue;
      Node child;
      child.effector = other(node.effector);
      child.surface_id = s.id;
      child.region = std::move(*clipped);
      child.parents = {node.id};
      child.depth = node.depth + 1;
      child.yaw = wrap_angle(node.yaw.value_or(0.0) + theta);
      out.push_back(std::move(child));
    }
  }
  return out;
}

std::vector<Node> merge_layer(std::vector<Node> layer) {
  std::map<MergeKey, std::size_t> index;
  std::vector<Node> merged;
  for (auto& n : layer) {
    auto key = merge_key(n);
    const auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(std::move(key), merged.size());
      merged.push_back(std::move(n));
    } else {
      auto& into = merged[it->second].parents;
      into.insert(into.end(), n.parents.begin(), n.parents.end());
    }
  }
  std::vector<Node> out;
  out.reserve(merged.size());
  for (auto& [key, pos] : index) {
    Node& n = merged[pos];
    std::sort(n.parents.begin(), n.parents.end());
    n.parents.erase(std::unique(n.parents.begin(), n.parents.end()), n.parents.end());
    out.push_back(std::move(n));
  }
  return out;
}

// --- build -------------------------------------------------------------------

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

bool layer_contains(const std::vector<Node>& nodes, std::size_t begin, const StopCondition& stop) {
  for (std::size_t i = begin; i < nodes.size(); ++i)
    if (nodes[i].effector == stop.effector && nodes[i].region.contains(stop.point)) return true;
  return false;
}

}  // namespace

FeasibilityTree build_tree(std::shared_ptr<const ProblemInstance> instance,
                           const BuildOptions& options) {
  if (!instance) throw Error(ErrorCode::kInvalidInput, "build_tree without instance");
  const auto t_start = std::chrono::steady_clock::now();
  const int n_steps = options.max_steps.value_or(instance->max_steps);
  if (n_steps < 0) throw Error(ErrorCode::kInvalidInput, "number of steps must be >= 0");

  const Expander expander(*instance);
  std::vector<Node> nodes{make_goal_node(*instance)};
  TreeStats stats;
  stats.merged = options.merge;
  stats.layers.push_back({1, 1, 0.0});

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = options.threads == 0 ? hw : options.threads;

  auto finish = [&]() {
    stats.build_ms = ms_since(t_start);
    return FeasibilityTree(instance, std::move(nodes), stats);
  };

  if (options.stop_at && layer_contains(nodes, 0, *options.stop_at)) {
    stats.stopped_early = true;
    return finish();
  }

  std::size_t layer_begin = 0;
  for (int k = 1; k <= n_steps; ++k) {
    const auto t_layer = std::chrono::steady_clock::now();
    const std::size_t layer_end = nodes.size();
    const std::size_t n_parents = layer_end - layer_begin;

    std::vector<std::vector<Node>> per_parent(n_parents);
    std::atomic<std::size_t> produced{0};
    std::atomic<std::size_t> next{0};
    std::atomic<bool> over_budget{false};
    auto work = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_parents || over_budget.load()) return;
        expander.expand(nodes[layer_begin + i], per_parent[i]);
        const std::size_t total = produced.fetch_add(per_parent[i].size()) + per_parent[i].size();
        if (layer_end + total > options.node_budget) over_budget.store(true);
      }
    };
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n_parents / 8)));
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }

    std::vector<Node> layer;
    std::size_t candidates = 0;
    if (!over_budget) {
      layer.reserve(produced.load());
      for (auto& children : per_parent)
        for (auto& c : children) layer.push_back(std::move(c));
      candidates = layer.size();
      if (options.merge) layer = merge_layer(std::move(layer));
    }
    if (over_budget || layer_end + layer.size() > options.node_budget) {
      stats.truncated = true;
      if (!options.truncate_on_budget) {
        stats.build_ms = ms_since(t_start);
        throw BudgetExceeded("node budget of " + std::to_string(options.node_budget) +
                                 " exceeded while expanding layer " + std::to_string(k),
                             stats);
      }
      break;
    }
    if (layer.empty()) break;

    for (auto& c : layer) {
      c.id = static_cast<int>(nodes.size());
      nodes.push_back(std::move(c));
    }
    stats.layers.push_back({nodes.size() - layer_end, candidates, ms_since(t_layer)});
    layer_begin = layer_end;

    if (options.stop_at && layer_contains(nodes, layer_end, *options.stop_at)) {
      stats.stopped_early = true;
      break;
    }
  }
  return finish();
}

}  // namespace nas
