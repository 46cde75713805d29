#include <fstream>
#include <sstream>

#include <json.hpp>

#include "planner.hpp"

namespace nas {

using nlohmann::json;

namespace {

json stats_json(const TreeStats& s) {
  json layers = json::array();
  for (const auto& l : s.layers)
    layers.push_back({{"nodes", l.nodes}, {"candidates", l.candidates}, {"expand_ms", l.expand_ms}});
  return {{"layers", layers},
          {"build_ms", s.build_ms},
          {"merged", s.merged},
          {"truncated", s.truncated},
          {"stopped_early", s.stopped_early}};
}

TreeStats stats_from(const json& j) {
  TreeStats s;
  for (const auto& l : j.at("layers"))
    s.layers.push_back({l.at("nodes").get<std::size_t>(), l.at("candidates").get<std::size_t>(),
                        l.at("expand_ms").get<double>()});
  s.build_ms = j.at("build_ms").get<double>();
  s.merged = j.at("merged").get<bool>();
  s.truncated = j.at("truncated").get<bool>();
  s.stopped_early = j.at("stopped_early").get<bool>();
  return s;
}

}  // namespace

std::string tree_to_jsonl(const FeasibilityTree& tree) {
  std::ostringstream out;
  const json header = {{"format", "nas-tree"},
                       {"version", 1},
                       {"instance", json::parse(instance_to_json(tree.instance(), -1))},
                       {"stats", stats_json(tree.stats())}};
  out << header.dump() << '\n';
  for (const auto& n : tree.nodes()) {
    json region = json::array();
    for (const auto& v : n.region.vertices()) region.push_back({v.x(), v.y(), v.z()});
    const json rec = {{"id", n.id},
                      {"depth", n.depth},
                      {"effector", to_string(n.effector)},
                      {"surface_id", n.surface_id},
                      {"yaw", n.yaw ? json(*n.yaw) : json(nullptr)},
                      {"parents", n.parents},
                      {"region", region},
                      {"valid", n.valid}};
    out << rec.dump() << '\n';
  }
  return out.str();
}

void save_tree(const FeasibilityTree& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << tree_to_jsonl(tree);
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

FeasibilityTree parse_tree(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::shared_ptr<ProblemInstance> instance;
  TreeStats stats;
  std::vector<Node> nodes;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "tree line " + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      throw Error(ErrorCode::kParse, where + ": malformed JSON");
    }
    try {
      if (!instance) {
        if (rec.value("format", "") != "nas-tree")
          throw Error(ErrorCode::kParse, where + ": missing nas-tree header");
        instance = std::make_shared<ProblemInstance>(parse_instance(rec.at("instance").dump()));
        stats = stats_from(rec.at("stats"));
        continue;
      }
      Node n;
      n.id = rec.at("id").get<int>();
      n.depth = rec.at("depth").get<int>();
      n.effector = parse_effector(rec.at("effector").get<std::string>());
      n.surface_id = rec.at("surface_id").get<int>();
      if (!rec.at("yaw").is_null()) n.yaw = rec.at("yaw").get<double>();
      n.parents = rec.at("parents").get<std::vector<int>>();
      n.valid = rec.at("valid").get<bool>();
      std::vector<Vec3> verts;
      for (const auto& v : rec.at("region")) verts.emplace_back(v.at(0), v.at(1), v.at(2));
      Vec3 normal;
      if (n.surface_id == kGoalSurface) {
        normal = instance->goal_normal();
      } else {
        const Surface* s = instance->scene.find(n.surface_id);
        if (!s) throw Error(ErrorCode::kParse, where + ": unknown surface_id");
        normal = s->normal();
      }
      auto region = PlanarPolygon::from_points(verts, normal);
      if (!region) throw Error(ErrorCode::kParse, where + ": empty region");
      n.region = std::move(*region);
      nodes.push_back(std::move(n));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
  }
  if (!instance) throw Error(ErrorCode::kParse, "tree file is empty");
  return FeasibilityTree(instance, std::move(nodes), std::move(stats));
}

FeasibilityTree load_tree(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tree(ss.str());
}

}  // namespace nas
