#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace nas {

namespace {

struct Frame {
  double x0, y1, scale, margin;
  double px(const Vec3& p) const { return margin + (p.x() - x0) * scale; }
  double py(const Vec3& p) const { return margin + (y1 - p.y()) * scale; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string points(const Frame& f, const std::vector<Vec3>& vs) {
  std::string s;
  for (const auto& v : vs) {
    if (!s.empty()) s += ' ';
    s += num(f.px(v)) + ',' + num(f.py(v));
  }
  return s;
}

// Blue (shallow) to red (deep).
std::string depth_color(int depth, int max_depth) {
  const double t = max_depth > 0 ? static_cast<double>(depth) / max_depth : 0.0;
  const int hue = static_cast<int>(240.0 * (1.0 - t));
  return "hsl(" + std::to_string(hue) + ",80%,50%)";
}

void draw_region(std::ostringstream& os, const Frame& f, const PlanarPolygon& r,
                 const std::string& attrs) {
  const auto& v = r.vertices();
  if (v.size() >= 3)
    os << "<polygon points=\"" << points(f, v) << "\" " << attrs << "/>\n";
  else if (v.size() == 2)
    os << "<line x1=\"" << num(f.px(v[0])) << "\" y1=\"" << num(f.py(v[0])) << "\" x2=\""
       << num(f.px(v[1])) << "\" y2=\"" << num(f.py(v[1])) << "\" " << attrs << "/>\n";
  else if (v.size() == 1)
    os << "<circle cx=\"" << num(f.px(v[0])) << "\" cy=\"" << num(f.py(v[0])) << "\" r=\"4\" "
       << attrs << "/>\n";
}

}  // namespace

std::string svg_top_view(const ProblemInstance& inst, const FeasibilityTree* tree,
                         const SvgFootsteps* steps, const SvgOptions& opt) {
  Box3 box;
  for (const auto& s : inst.source_scene.surfaces) box.extend(s.polygon.bounds());
  box.extend(inst.goal_region.bounds());
  if (steps && steps->plan) {
    box.extend(steps->start);
    for (const auto& p : steps->plan->positions) box.extend(p);
  }
  const Frame f{box.min().x(), box.max().y(), opt.pixels_per_meter, 20.0};
  const double w = (box.max().x() - box.min().x()) * f.scale + 2 * f.margin;
  const double h = (box.max().y() - box.min().y()) * f.scale + 2 * f.margin;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\""
     << num(h) << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g id=\"surfaces\">\n";
  for (const auto& s : inst.source_scene.surfaces)
    draw_region(os, f, s.polygon,
                "fill=\"#d9d9d9\" stroke=\"#555\" stroke-width=\"1\" data-surface=\"" +
                    std::to_string(s.id) + "\"");
  os << "</g>\n";

  if (tree && opt.draw_nodes) {
    const int deepest = static_cast<int>(tree->depth_count()) - 1;
    const int limit = opt.max_depth < 0 ? deepest : std::min(opt.max_depth, deepest);
    os << "<g id=\"nodes\" fill-opacity=\"0.25\">\n";
    // Deep layers first so that shallow regions stay visible on top.
    for (int d = limit; d >= 0; --d)
      for (int id : tree->layers()[static_cast<std::size_t>(d)]) {
        const Node& n = tree->node(id);
        if (!n.valid) continue;
        const auto color = depth_color(d, limit);
        draw_region(os, f, n.region,
                    "fill=\"" + color + "\" stroke=\"" + color + "\" stroke-width=\"0.5\"");
      }
    os << "</g>\n";
  }

  draw_region(os, f, inst.goal_region, "fill=\"#2a2\" stroke=\"#060\" stroke-width=\"2\"");

  if (steps && steps->plan) {
    os << "<g id=\"footsteps\">\n";
    std::vector<Vec3> path{steps->start};
    path.insert(path.end(), steps->plan->positions.begin(), steps->plan->positions.end());
    os << "<polyline points=\"" << points(f, path)
       << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
      const Effector e =
          i == 0 ? steps->start_effector : steps->plan->effectors[i - 1];
      os << "<circle cx=\"" << num(f.px(path[i])) << "\" cy=\"" << num(f.py(path[i]))
         << "\" r=\"5\" fill=\"" << (e == Effector::kLeft ? "#c00" : "#00c")
         << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << num(f.px(path[i]) + 6) << "\" y=\"" << num(f.py(path[i]) - 6)
         << "\" font-size=\"10\">" << i << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace nas
