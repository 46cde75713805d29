#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace nas {

using nlohmann::json;

const char* to_string(Effector e) { return e == Effector::kLeft ? "left" : "right"; }

Effector parse_effector(const std::string& name) {
  if (name == "left" || name == "LEFT" || name == "l") return Effector::kLeft;
  if (name == "right" || name == "RIGHT" || name == "r") return Effector::kRight;
  throw Error(ErrorCode::kInvalidInput, "unknown effector '" + name + "' (expected left/right)");
}

// --- Surface / Scene ---------------------------------------------------------

namespace {

Vec3 newell_normal(const std::vector<Vec3>& loop) {
  Vec3 n = Vec3::Zero();
  const size_t k = loop.size();
  for (size_t i = 0; i < k; ++i) {
    const Vec3& a = loop[i];
    const Vec3& b = loop[(i + 1) % k];
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return n;
}

}  // namespace

Surface Surface::from_vertices(int id, std::vector<Vec3> vertices) {
  if (vertices.empty())
    throw Error(ErrorCode::kValidation, "surface " + std::to_string(id) + " has no vertices");
  Surface s;
  s.id = id;
  s.input_vertices = std::move(vertices);
  Vec3 n = newell_normal(s.input_vertices);
  if (n.norm() < 1e-12) n = Vec3::UnitZ();
  s.polygon = *PlanarPolygon::from_points(s.input_vertices, n.normalized());
  return s;
}

const Surface* Scene::find(int id) const {
  for (const auto& s : surfaces)
    if (s.id == id) return &s;
  return nullptr;
}

// --- KinematicModel ----------------------------------------------------------

KinematicModel::KinematicModel(Polytope reach_left_given_right,
                               Polytope reach_right_given_left,
                               std::array<double, 2> foot_half_extents)
    : reach_left_(std::move(reach_left_given_right)),
      reach_right_(std::move(reach_right_given_left)),
      foot_half_extents_(foot_half_extents) {
  if (reach_left_.dimension() != 3)
    throw Error(ErrorCode::kValidation, "reach_left_given_right is not full-dimensional");
  if (reach_right_.dimension() != 3)
    throw Error(ErrorCode::kValidation, "reach_right_given_left is not full-dimensional");
  for (double e : foot_half_extents_)
    if (!std::isfinite(e) || e < 0.0)
      throw Error(ErrorCode::kValidation, "foot_half_extents must be finite and >= 0");
  antecedent_left_ = central_symmetry(reach_left_);
  antecedent_right_ = central_symmetry(reach_right_);
}

KinematicModel KinematicModel::synthetic_default() {
  auto frustum = [](double y0, double y1) {
    std::vector<Vec3> v;
    for (double y : {y0, y1}) {
      v.emplace_back(-0.35, y, -0.2);
      v.emplace_back(0.35, y, -0.2);
      v.emplace_back(-0.25, y, 0.2);
      v.emplace_back(0.25, y, 0.2);
    }
    return convex_hull(v);
  };
  return KinematicModel(frustum(0.12, 0.40), frustum(-0.40, -0.12), {0.1, 0.05});
}

const Polytope& KinematicModel::reach(Effector stepping) const {
  return stepping == Effector::kLeft ? reach_left_ : reach_right_;
}

const Polytope& KinematicModel::antecedent(Effector landing) const {
  return landing == Effector::kLeft ? antecedent_left_ : antecedent_right_;
}

// --- ProblemInstance ---------------------------------------------------------

const Vec3& ProblemInstance::goal_normal() const { return goal_region.normal(); }

std::vector<double> ProblemInstance::yaw_angles_rad() const {
  std::vector<double> out;
  out.reserve(yaw_angles_deg.size());
  for (double d : yaw_angles_deg) out.push_back(d * std::numbers::pi / 180.0);
  return out;
}

ProblemInstance make_instance(Scene scene, KinematicModel kinematics,
                              std::vector<Vec3> goal_vertices, const InstanceOptions& options) {
  ProblemInstance inst;
  if (options.max_steps < 0)
    throw Error(ErrorCode::kValidation, "max_steps must be >= 0");
  for (double a : options.yaw_angles_deg)
    if (!std::isfinite(a)) throw Error(ErrorCode::kValidation, "yaw angle is not finite");
  if (goal_vertices.empty()) throw Error(ErrorCode::kValidation, "goal has no vertices");
  for (const auto& v : goal_vertices)
    if (!is_finite(v)) throw Error(ErrorCode::kValidation, "goal vertex is not finite");

  for (const auto& s : scene.surfaces)
    if (s.id < 0) throw Error(ErrorCode::kValidation, "surface ids must be >= 0");
  const ValidationReport report = validate_scene(scene);
  if (!report.duplicate_ids.empty())
    throw Error(ErrorCode::kValidation,
                "surface ids must be unique (duplicate id " +
                    std::to_string(report.duplicate_ids.front()) + ")");
  if (!report.degenerate.empty())
    throw Error(ErrorCode::kValidation, "surface " + std::to_string(report.degenerate.front()) +
                                            " is degenerate (zero area)");
  if (!report.non_convex.empty())
    throw Error(ErrorCode::kValidation,
                "surface " + std::to_string(report.non_convex.front()) + " is not convex");
  for (const auto& msg : report.messages())
    if (msg.rfind("overlap", 0) == 0 || msg.rfind("normal", 0) == 0)
      inst.warnings.push_back(msg);

  inst.source_scene = scene;
  inst.kinematics = std::move(kinematics);
  inst.preinset = options.preinset;
  inst.max_steps = options.max_steps;
  inst.yaw_angles_deg = options.yaw_angles_deg;
  inst.goal_effector = options.goal_effector;

  const auto& ext = inst.kinematics.foot_half_extents();
  const double margin =
      options.preinset ? 0.0 : options.inset_margin.value_or(std::max(ext[0], ext[1]));
  for (auto& s : scene.surfaces) {
    // Contact surfaces face up; a reversed loop is re-oriented.
    if (s.polygon.normal().z() < 0.0)
      s.polygon = *PlanarPolygon::from_points(s.polygon.vertices(), -s.polygon.normal());
    auto inset = inset_polygon(s.polygon, margin);
    if (!inset)
      throw Error(ErrorCode::kValidation, "surface " + std::to_string(s.id) +
                                              " vanishes after inset by " +
                                              std::to_string(margin) + " m");
    s.polygon = std::move(*inset);
  }
  inst.scene = std::move(scene);

  inst.goal_vertices = goal_vertices;
  inst.goal = convex_hull(goal_vertices);
  for (const auto& s : inst.scene.surfaces) {
    const bool inside = std::all_of(goal_vertices.begin(), goal_vertices.end(),
                                    [&](const Vec3& v) { return s.polygon.contains(v); });
    if (inside) {
      inst.goal_surface_id = s.id;
      inst.goal_region = *PlanarPolygon::from_points(inst.goal.vertices(), s.normal());
      break;
    }
  }
  if (inst.goal_surface_id < 0)
    throw Error(ErrorCode::kValidation, "goal is not contained in any (inset) surface");
  return inst;
}

// --- JSON --------------------------------------------------------------------

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kParse, "field '" + path + "': " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  return v.get<double>();
}

Vec3 point_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) field_error(path, "expected [x, y, z]");
  Vec3 p(number_at(v[0], path + "[0]"), number_at(v[1], path + "[1]"),
         number_at(v[2], path + "[2]"));
  if (!is_finite(p)) field_error(path, "non-finite coordinate");
  return p;
}

std::vector<Vec3> points_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) field_error(path, "expected a non-empty list of points");
  std::vector<Vec3> out;
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(point_at(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Polytope polytope_at(const json& v, const std::string& path) {
  const auto pts = points_at(v, path);
  Polytope p = convex_hull(pts);
  if (p.dimension() != 3) throw Error(ErrorCode::kValidation, path + " is not full-dimensional");
  return p;
}

json points_json(const std::vector<Vec3>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x(), p.y(), p.z()});
  return out;
}

std::string line_col(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ProblemInstance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, "JSON syntax error at " + line_col(text, e.byte));
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "top level must be an object");

  Scene scene;
  const json& surfaces = require(doc, "surfaces", "");
  if (!surfaces.is_array()) field_error("surfaces", "expected a list");
  for (size_t i = 0; i < surfaces.size(); ++i) {
    const std::string path = "surfaces[" + std::to_string(i) + "]";
    const json& id = require(surfaces[i], "id", path);
    if (!id.is_number_integer()) field_error(path + ".id", "expected an integer");
    scene.surfaces.push_back(Surface::from_vertices(
        id.get<int>(), points_at(require(surfaces[i], "vertices", path), path + ".vertices")));
  }

  const json& kin = require(doc, "kinematics", "");
  const json& ext = require(kin, "foot_half_extents", "kinematics");
  if (!ext.is_array() || ext.size() != 2)
    field_error("kinematics.foot_half_extents", "expected [dx, dy]");
  KinematicModel model(
      polytope_at(require(kin, "reach_left_given_right", "kinematics"),
                  "kinematics.reach_left_given_right"),
      polytope_at(require(kin, "reach_right_given_left", "kinematics"),
                  "kinematics.reach_right_given_left"),
      {number_at(ext[0], "kinematics.foot_half_extents[0]"),
       number_at(ext[1], "kinematics.foot_half_extents[1]")});

  const auto goal = points_at(require(require(doc, "goal", ""), "vertices", "goal"),
                              "goal.vertices");

  InstanceOptions opt;
  const json& eff = require(doc, "goal_effector", "");
  if (!eff.is_string()) field_error("goal_effector", "expected \"left\" or \"right\"");
  try {
    opt.goal_effector = parse_effector(eff.get<std::string>());
  } catch (const Error& e) {
    field_error("goal_effector", e.what());
  }
  const json& steps = require(doc, "max_steps", "");
  if (!steps.is_number_integer()) field_error("max_steps", "expected an integer");
  opt.max_steps = steps.get<int>();
  if (const auto it = doc.find("yaw_angles_deg"); it != doc.end()) {
    if (!it->is_array()) field_error("yaw_angles_deg", "expected a list of numbers");
    for (size_t i = 0; i < it->size(); ++i)
      opt.yaw_angles_deg.push_back(
          number_at((*it)[i], "yaw_angles_deg[" + std::to_string(i) + "]"));
  }
  if (const auto it = doc.find("preinset"); it != doc.end()) {
    if (!it->is_boolean()) field_error("preinset", "expected true/false");
    opt.preinset = it->get<bool>();
  }
  return make_instance(std::move(scene), std::move(model), goal, opt);
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

std::string instance_to_json(const ProblemInstance& inst, int indent) {
  json doc;
  doc["surfaces"] = json::array();
  for (const auto& s : inst.source_scene.surfaces)
    doc["surfaces"].push_back({{"id", s.id}, {"vertices", points_json(s.input_vertices)}});
  const auto& k = inst.kinematics;
  doc["kinematics"] = {
      {"reach_left_given_right", points_json(k.reach(Effector::kLeft).vertices())},
      {"reach_right_given_left", points_json(k.reach(Effector::kRight).vertices())},
      {"foot_half_extents", {k.foot_half_extents()[0], k.foot_half_extents()[1]}}};
  doc["goal"] = {{"vertices", points_json(inst.goal_vertices)}};
  doc["goal_effector"] = to_string(inst.goal_effector);
  doc["max_steps"] = inst.max_steps;
  if (!inst.yaw_angles_deg.empty()) doc["yaw_angles_deg"] = inst.yaw_angles_deg;
  doc["preinset"] = inst.preinset;
  return doc.dump(indent);
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << instance_to_json(inst) << '\n';
}

// --- validation --------------------------------------------------------------

std::vector<std::string> ValidationReport::messages() const {
  std::vector<std::string> out;
  for (const auto& [a, b] : overlaps)
    out.push_back("overlap: surfaces " + std::to_string(a) + " and " + std::to_string(b));
  for (int id : degenerate) out.push_back("degenerate: surface " + std::to_string(id));
  for (int id : non_convex) out.push_back("non-convex: surface " + std::to_string(id));
  for (int id : normal_inconsistent)
    out.push_back("normal: surface " + std::to_string(id) +
                  " faces down or is not planar");
  for (int id : duplicate_ids) out.push_back("duplicate id: " + std::to_string(id));
  return out;
}

ValidationReport validate_scene(const Scene& scene) {
  ValidationReport r;
  std::set<int> seen;
  for (const auto& s : scene.surfaces) {
    if (!seen.insert(s.id).second) r.duplicate_ids.push_back(s.id);
    const auto& poly = s.polygon;
    if (poly.vertices().size() < 3 || poly.area() < kAreaEps) {
      r.degenerate.push_back(s.id);
      continue;
    }
    const Vec3& n = poly.normal();
    bool planar = true;
    for (const auto& v : s.input_vertices)
      if (std::abs(n.dot(v) - poly.plane_offset()) > kGeomEps) planar = false;
    if (!planar || n.z() <= kGeomEps) r.normal_inconsistent.push_back(s.id);

    // The given loop must already be convex: every turn agrees with the
    // winding normal.
    const auto& loop = s.input_vertices;
    const size_t k = loop.size();
    bool convex = true;
    for (size_t i = 0; i < k && convex; ++i) {
      const Vec3 e1 = loop[(i + 1) % k] - loop[i];
      const Vec3 e2 = loop[(i + 2) % k] - loop[(i + 1) % k];
      const double scale = std::max(1.0, e1.norm() * e2.norm());
      if (e1.cross(e2).dot(n) < -kGeomEps * scale) convex = false;
    }
    if (!convex) r.non_convex.push_back(s.id);
  }

  const auto& ss = scene.surfaces;
  for (size_t i = 0; i < ss.size(); ++i) {
    if (ss[i].polygon.area() < kAreaEps) continue;
    for (size_t j = i + 1; j < ss.size(); ++j) {
      if (ss[j].polygon.area() < kAreaEps) continue;
      if (!ss[i].polygon.bounds().intersects(ss[j].polygon.bounds())) continue;
      const auto inter = clip_polygon_by_polytope(ss[i].polygon, ss[j].polygon.as_polytope());
      if (inter && inter->area() > kAreaEps) r.overlaps.emplace_back(ss[i].id, ss[j].id);
    }
  }
  return r;
}

// --- generators --------------------------------------------------------------

namespace {

// Uniform double in [lo, hi) from the raw engine output; independent of the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 engine_;
};

void require_param(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidInput, "invalid scene parameter: " + what);
}

std::vector<Vec3> rectangle(double x0, double x1, double y0, double y1, double z) {
  return {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
}

}  // namespace

Scene staircase(int steps, double rise, double run, double width) {
  require_param(steps >= 1, "steps >= 1");
  require_param(std::isfinite(rise), "rise finite");
  require_param(run > 0.0 && std::isfinite(run), "run > 0");
  require_param(width > 0.0 && std::isfinite(width), "width > 0");
  Scene s;
  for (int i = 0; i < steps; ++i)
    s.surfaces.push_back(Surface::from_vertices(
        i, rectangle(i * run, (i + 1) * run, -0.5 * width, 0.5 * width, i * rise)));
  return s;
}

Scene stepping_stones(int count, std::uint64_t seed, double stone_size, double spacing,
                      double jitter, double max_height, double max_tilt_deg) {
  require_param(count >= 1, "count >= 1");
  require_param(stone_size > 0.0, "stone_size > 0");
  require_param(jitter >= 0.0, "jitter >= 0");
  require_param(spacing >= stone_size + 2.0 * jitter, "spacing >= stone_size + 2*jitter");
  require_param(max_height >= 0.0, "max_height >= 0");
  require_param(max_tilt_deg >= 0.0 && max_tilt_deg < 45.0, "0 <= max_tilt_deg < 45");

  Rng rng(seed);
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const double half = 0.5 * stone_size;
  Scene s;
  for (int i = 0; i < count; ++i) {
    const int row = i / cols, col = i % cols;
    const Vec3 center(col * spacing + rng.uniform(-jitter, jitter),
                      row * spacing + rng.uniform(-jitter, jitter),
                      rng.uniform(0.0, max_height));
    const double tilt = rng.uniform(0.0, max_tilt_deg) * std::numbers::pi / 180.0;
    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Eigen::AngleAxisd rot(tilt, Vec3(std::cos(heading), std::sin(heading), 0.0));
    std::vector<Vec3> v;
    for (const auto& c : rectangle(-half, half, -half, half, 0.0))
      v.push_back(center + rot * c);
    s.surfaces.push_back(Surface::from_vertices(i, std::move(v)));
  }
  return s;
}

Scene flat_grid(int count, double tile_size, double spacing) {
  require_param(count >= 1, "count >= 1");
  require_param(tile_size > 0.0, "tile_size > 0");
  require_param(spacing >= tile_size, "spacing >= tile_size");
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  Scene s;
  for (int i = 0; i < count; ++i) {
    const double x = (i % cols) * spacing, y = (i / cols) * spacing;
    s.surfaces.push_back(Surface::from_vertices(i, rectangle(x, x + tile_size, y, y + tile_size, 0.0)));
  }
  return s;
}

Scene duplicate(const Scene& base, int copies, const Vec3& offset, std::optional<int> limit) {
  require_param(copies >= 1, "copies >= 1");
  require_param(is_finite(offset), "offset finite");
  require_param(!limit || *limit >= 1, "limit >= 1");
  Scene s;
  int next = 0;
  for (int c = 0; c < copies; ++c) {
    for (const auto& surf : base.surfaces) {
      if (limit && next >= *limit) return s;
      std::vector<Vec3> v;
      for (const auto& p : surf.input_vertices) v.push_back(p + c * offset);
      s.surfaces.push_back(Surface::from_vertices(next++, std::move(v)));
    }
  }
  return s;
}

Scene generate_scene(SceneKind kind, const SceneParams& p) {
  switch (kind) {
    case SceneKind::kStaircase:
      return staircase(p.steps, p.rise, p.run, p.width);
    case SceneKind::kSteppingStones:
      return stepping_stones(p.count, p.seed, p.stone_size, p.spacing, p.jitter, p.max_height,
                             p.max_tilt_deg);
    case SceneKind::kFlatGrid:
      return flat_grid(p.count, p.stone_size, p.spacing);
    case SceneKind::kDuplicate:
      require_param(p.base != nullptr, "duplicate needs a base scene");
      return duplicate(*p.base, p.copies, p.offset, p.limit);
  }
  throw Error(ErrorCode::kInvalidInput, "unknown scene kind");
}

}  // namespace nas
