#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "planner.hpp"

using namespace nas;

namespace {

std::shared_ptr<const ProblemInstance> demo(int n) {
  auto inst = load_instance(std::string(NAS_DATA_DIR) + "/demo.json");
  inst.max_steps = n;
  return std::make_shared<const ProblemInstance>(std::move(inst));
}

Polytope box(const Vec3& lo, const Vec3& hi) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i)
    v.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  return convex_hull(v);
}

std::vector<Vec3> rect(double x0, double x1, double y0, double y1, double z = 0.0) {
  return {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
}

// Node lines only; the header carries wall-times.
std::string node_lines(const FeasibilityTree& t) {
  const auto text = tree_to_jsonl(t);
  return text.substr(text.find('\n') + 1);
}

std::shared_ptr<const ProblemInstance> three_surface(int n) {
  Scene s;
  s.surfaces.push_back(Surface::from_vertices(0, rect(0.0, 1.2, 0.0, 0.5)));
  s.surfaces.push_back(Surface::from_vertices(1, rect(0.0, 1.2, -0.9, -0.1, 0.05)));
  s.surfaces.push_back(Surface::from_vertices(2, rect(1.4, 2.0, -0.6, 0.4, 0.1)));
  return std::make_shared<const ProblemInstance>(make_instance(
      s, KinematicModel::synthetic_default(), {{0.3, 0.25, 0.0}}, {.max_steps = n, .preinset = true}));
}

}  // namespace

TEST_CASE("demo tree has layer counts 1,1,2") {
  const auto tree = build_tree(demo(2));
  CHECK(tree.stats().layer_counts() == std::vector<std::size_t>{1, 1, 2});
  const Node& f1 = tree.node(tree.layers()[1][0]);
  CHECK(f1.effector == Effector::kRight);
  CHECK(f1.surface_id == 1);
  std::set<int> surfaces;
  for (int id : tree.layers()[2]) {
    CHECK(tree.node(id).effector == Effector::kLeft);
    surfaces.insert(tree.node(id).surface_id);
  }
  CHECK(surfaces == std::set<int>{0, 1});
}

TEST_CASE("zero steps gives the goal node only") {
  const auto tree = build_tree(demo(0));
  CHECK(tree.size() == 1);
  CHECK(tree.root().surface_id == kGoalSurface);
  CHECK(tree.stats().layer_counts() == std::vector<std::size_t>{1});
}

TEST_CASE("reach polytope of a point goal is the translated antecedent") {
  const auto inst = demo(2);
  const Node root = make_goal_node(*inst);
  const Polytope r = reach_polytope(root, *inst, Vec3::UnitZ());
  const Polytope expected =
      translate(inst->kinematics.antecedent(Effector::kLeft), Vec3(0.8, 0.1, 0.0));
  CHECK(canonical_key(*PlanarPolygon::from_points(r.vertices(), Vec3::UnitZ())) ==
        canonical_key(*PlanarPolygon::from_points(expected.vertices(), Vec3::UnitZ())));
  std::vector<Vec3> a = r.vertices(), b = expected.vertices();
  auto lex = [](const Vec3& p, const Vec3& q) {
    return std::tie(p.x(), p.y(), p.z()) < std::tie(q.x(), q.y(), q.z());
  };
  std::sort(a.begin(), a.end(), lex);
  std::sort(b.begin(), b.end(), lex);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() < 1e-12);
}

TEST_CASE("reach polytope examples with a box antecedent") {
  const Polytope cube = box(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5));
  Scene s;
  s.surfaces.push_back(Surface::from_vertices(0, rect(-2, 2, -2, 2)));
  const auto inst = make_instance(s, KinematicModel(cube, cube, {0, 0}), {{0, 0, 0}},
                                  {.max_steps = 1, .preinset = true});
  const Node root = make_goal_node(inst);
  const Polytope r = reach_polytope(root, inst, Vec3::UnitZ());
  CHECK(r.vertices().size() == 8);
  for (const auto& v : r.vertices()) CHECK(v.cwiseAbs().isApprox(Vec3(0.5, 0.5, 0.5)));

  Node sq = root;
  sq.region = *PlanarPolygon::from_points(rect(0, 1, 0, 1), Vec3::UnitZ());
  const Polytope r2 = reach_polytope(sq, inst, Vec3::UnitZ());
  std::vector<Vec3> sums;
  for (const auto& a : sq.region.vertices())
    for (const auto& b : cube.vertices()) sums.push_back(a + b);
  const Polytope oracle = convex_hull(sums);
  CHECK(r2.vertices().size() == oracle.vertices().size());
  for (const auto& v : oracle.vertices()) CHECK(contains(r2, v));
  for (const auto& v : r2.vertices()) CHECK(contains(oracle, v));
}

TEST_CASE("feasible_nodes edge cases") {
  const Polytope cube = box(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5));
  Scene s;
  s.surfaces.push_back(Surface::from_vertices(0, rect(-0.2, 0.2, -0.2, 0.2)));
  s.surfaces.push_back(Surface::from_vertices(1, rect(3, 4, 3, 4, -5.0)));
  const auto inst = make_instance(s, KinematicModel(cube, cube, {0, 0}), {{0, 0, 0}},
                                  {.max_steps = 1, .preinset = true});
  const auto kids = feasible_nodes(make_goal_node(inst), inst, Vec3::UnitZ());
  REQUIRE(kids.size() == 1);
  CHECK(kids[0].surface_id == 0);
  CHECK(kids[0].effector == Effector::kRight);
  CHECK(kids[0].depth == 1);
  CHECK(kids[0].parents == std::vector<int>{0});
  // saturation: the whole surface, exactly
  CHECK(canonical_key(kids[0].region) == canonical_key(inst.scene.surfaces[0].polygon));

  Node low = make_goal_node(inst);
  low.region = *PlanarPolygon::from_points(std::vector<Vec3>{{0, 0, -3}}, Vec3::UnitZ());
  CHECK(feasible_nodes(low, inst, Vec3::UnitZ()).empty());
}

TEST_CASE("yaw expansion") {
  Scene s;
  s.surfaces.push_back(Surface::from_vertices(0, rect(-1.5, 1.5, -1.5, 1.5)));
  auto base = make_instance(s, KinematicModel::synthetic_default(), {{0.2, 0.1, 0}},
                            {.max_steps = 1, .preinset = true});
  const Node root = make_goal_node(base);
  const auto plain = feasible_nodes(root, base, Vec3::UnitZ());

  SUBCASE("single zero angle matches plain expansion") {
    auto inst = base;
    inst.yaw_angles_deg = {0.0};
    const auto kids = feasible_nodes_yaw(make_goal_node(inst), inst, Vec3::UnitZ());
    REQUIRE(kids.size() == plain.size());
    for (size_t i = 0; i < kids.size(); ++i)
      CHECK(canonical_key(kids[i].region) == canonical_key(plain[i].region));
  }
  SUBCASE("half turn on a symmetric antecedent gives identical regions") {
    const Polytope sym = box(Vec3(-0.3, -0.3, -0.2), Vec3(0.3, 0.3, 0.2));
    auto inst = make_instance(s, KinematicModel(sym, sym, {0, 0}), {{0.2, 0.1, 0}},
                              {.max_steps = 1, .yaw_angles_deg = {0.0, 180.0}, .preinset = true});
    const auto kids = feasible_nodes_yaw(make_goal_node(inst), inst, Vec3::UnitZ());
    REQUIRE(kids.size() == 2);
    CHECK(canonical_key(kids[0].region) == canonical_key(kids[1].region));
    CHECK(*kids[0].yaw == doctest::Approx(0.0));
    CHECK(*kids[1].yaw == doctest::Approx(std::numbers::pi));
  }
  SUBCASE("four angles, each region an independent rotated clip") {
    auto inst = base;
    inst.yaw_angles_deg = {0.0, 90.0, 180.0, 270.0};
    const Node r = make_goal_node(inst);
    const auto kids = feasible_nodes_yaw(r, inst, Vec3::UnitZ());
    CHECK(kids.size() <= 4);
    CHECK(kids.size() == 4);
    for (const auto& k : kids) {
      const Polytope rotated = rotate_z(inst.kinematics.antecedent(r.effector), *k.yaw);
      const Polytope reach = minkowski_sum(r.region, rotated);
      const auto expect = clip_polygon_by_polytope(inst.scene.surfaces[0].polygon, reach);
      REQUIRE(expect);
      CHECK(expect->area() == doctest::Approx(k.region.area()).epsilon(1e-9));
      for (const auto& v : k.region.vertices()) CHECK(expect->contains(v, 1e-9));
    }
  }
}

TEST_CASE("merge_layer") {
  const auto whole = *PlanarPolygon::from_points(rect(0, 1, 0, 1), Vec3::UnitZ());
  auto make = [&](int parent, const PlanarPolygon& region) {
    Node n;
    n.effector = Effector::kRight;
    n.surface_id = 3;
    n.region = region;
    n.parents = {parent};
    n.depth = 1;
    return n;
  };
  SUBCASE("same saturated region") {
    const auto out = merge_layer({make(4, whole), make(2, whole)});
    REQUIRE(out.size() == 1);
    CHECK(out[0].parents == std::vector<int>{2, 4});
  }
  SUBCASE("disjoint regions stay apart") {
    const auto other = *PlanarPolygon::from_points(rect(2, 3, 0, 1), Vec3::UnitZ());
    CHECK(merge_layer({make(0, whole), make(1, other)}).size() == 2);
  }
  SUBCASE("k identical nodes") {
    std::vector<Node> layer;
    for (int k = 0; k < 7; ++k) layer.push_back(make(k, whole));
    const auto out = merge_layer(layer);
    REQUIRE(out.size() == 1);
    CHECK(out[0].parents.size() == 7);
  }
  SUBCASE("different yaw is a different state") {
    auto a = make(0, whole), b = make(1, whole);
    a.yaw = 0.0;
    b.yaw = std::numbers::pi;
    CHECK(merge_layer({a, b}).size() == 2);
  }
}

TEST_CASE("saturated layers have exactly m nodes") {
  // Reach volume much larger than the scene: every region saturates.
  const Polytope big = box(Vec3(-5, -5, -1), Vec3(5, 5, 1));
  Scene s;
  for (int i = 0; i < 5; ++i)
    s.surfaces.push_back(Surface::from_vertices(i, rect(i * 0.6, i * 0.6 + 0.4, 0, 0.4, 0.02 * i)));
  auto inst = std::make_shared<const ProblemInstance>(make_instance(
      s, KinematicModel(big, big, {0, 0}), {{0.2, 0.2, 0}}, {.max_steps = 6, .preinset = true}));
  const auto tree = build_tree(inst);
  for (size_t k = 1; k < tree.depth_count(); ++k) CHECK(tree.layers()[k].size() == 5);

  auto yawed = std::make_shared<ProblemInstance>(*inst);
  yawed->yaw_angles_deg = {0, 90, 180, 270};
  const auto ty = build_tree(yawed);
  for (size_t k = 1; k < ty.depth_count(); ++k) CHECK(ty.layers()[k].size() <= 5 * 4);
  CHECK(ty.layers().back().size() == 20);
}

TEST_CASE("tree invariants on a three-surface scene") {
  const auto tree = build_tree(three_surface(6));
  CHECK(tree.layers()[0] == std::vector<int>{0});
  for (const auto& n : tree.nodes()) {
    if (n.depth == 0) continue;
    const Surface* s = tree.instance().scene.find(n.surface_id);
    REQUIRE(s);
    for (const auto& v : n.region.vertices()) CHECK(s->polygon.contains(v));
    CHECK(n.region.is_convex_ccw());
    for (int p : n.parents) {
      CHECK(tree.node(p).depth == n.depth - 1);
      CHECK(tree.node(p).effector == other(n.effector));
    }
  }
  // merging invariant
  for (const auto& layer : tree.layers()) {
    std::set<std::pair<int, std::vector<std::array<long long, 3>>>> seen;
    for (int id : layer)
      CHECK(seen.insert({tree.node(id).surface_id, canonical_key(tree.node(id).region)}).second);
  }
}

TEST_CASE("merging does not change the per-surface feasible sets") {
  const auto inst = three_surface(6);
  const auto merged = build_tree(inst);
  BuildOptions opt;
  opt.merge = false;
  const auto plain = build_tree(inst, opt);
  REQUIRE(merged.depth_count() == plain.depth_count());
  std::mt19937_64 rng(11);
  for (size_t k = 0; k < merged.depth_count(); ++k) {
    for (const auto& surf : inst->scene.surfaces) {
      const auto& v = surf.polygon.vertices();
      int checked = 0;
      for (int trial = 0; trial < 1000; ++trial) {
        // uniform in the surface's bounding rectangle, kept if inside
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const Vec2 a = surf.polygon.to_plane(v[0]);
        const Vec2 c = surf.polygon.to_plane(v[2]);
        const Vec3 p = surf.polygon.from_plane(a + (c - a).cwiseProduct(Vec2(u(rng), u(rng))));
        auto in = [&](const FeasibilityTree& t) {
          for (int id : t.layers()[k]) {
            const Node& n = t.node(id);
            if (n.surface_id == surf.id && n.region.contains(p)) return true;
          }
          return false;
        };
        CHECK(in(merged) == in(plain));
        ++checked;
      }
      CHECK(checked == 1000);
    }
  }
  CHECK(plain.size() > merged.size());
}

TEST_CASE("node budget") {
  const auto inst = three_surface(8);
  BuildOptions opt;
  opt.merge = false;
  opt.node_budget = 50;
  CHECK_THROWS_AS(build_tree(inst, opt), BudgetExceeded);
  try {
    build_tree(inst, opt);
  } catch (const BudgetExceeded& e) {
    CHECK(e.code() == ErrorCode::kNodeBudget);
    CHECK(e.stats().truncated);
    CHECK(!e.stats().layers.empty());
  }
  opt.truncate_on_budget = true;
  const auto partial = build_tree(inst, opt);
  CHECK(partial.stats().truncated);
  CHECK(partial.size() <= 50);
}

TEST_CASE("stop_at halts at the first layer containing the state") {
  const auto inst = demo(2);
  BuildOptions opt;
  opt.stop_at = StopCondition{Vec3(0.8, -0.2, 0.0), Effector::kRight};
  const auto tree = build_tree(inst, opt);
  CHECK(tree.stats().stopped_early);
  CHECK(tree.depth_count() == 2);
}

TEST_CASE("builds are deterministic across runs and thread counts") {
  const auto inst = three_surface(6);
  const auto a = build_tree(inst);
  const auto b = build_tree(inst);
  BuildOptions opt;
  opt.threads = 4;
  const auto c = build_tree(inst, opt);
  CHECK(node_lines(a) == node_lines(b));
  CHECK(node_lines(a) == node_lines(c));
}

TEST_CASE("tree dump round trip") {
  const auto tree = build_tree(three_surface(4));
  const auto path = (std::filesystem::temp_directory_path() / "nas_tree.jsonl").string();
  save_tree(tree, path);
  const auto back = load_tree(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == tree.size());
  CHECK(back.stats().layer_counts() == tree.stats().layer_counts());
  for (size_t i = 0; i < tree.size(); ++i) {
    const Node& a = tree.nodes()[i];
    const Node& b = back.nodes()[i];
    CHECK(a.parents == b.parents);
    CHECK(a.surface_id == b.surface_id);
    CHECK(a.effector == b.effector);
    CHECK(canonical_key(a.region) == canonical_key(b.region));
  }
  CHECK_THROWS_AS(parse_tree("{\"format\":\"other\"}\n"), Error);
}
