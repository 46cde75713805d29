// Incremental 3D convex hull with dimension detection.
//
// Visibility uses an absolute tolerance of kGeomEps: a point within kGeomEps
// of every face plane is treated as inside. Vertices that survive the
// incremental pass but are not corners of any merged facet (points on hull
// edges or inside hull faces) are filtered out afterwards.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "error.hpp"
#include "geometry.hpp"

namespace nas {

namespace {

struct Face {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;
  bool alive = true;
};

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

class IncrementalHull {
 public:
  explicit IncrementalHull(const std::vector<Vec3>& pts) : pts_(pts) {}

  void seed(int a, int b, int c, int d) {
    const Vec3 centroid = (pts_[a] + pts_[b] + pts_[c] + pts_[d]) / 4.0;
    const std::array<std::array<int, 3>, 4> tris = {{{a, b, c}, {a, b, d}, {a, c, d}, {b, c, d}}};
    for (auto t : tris) {
      Vec3 n = (pts_[t[1]] - pts_[t[0]]).cross(pts_[t[2]] - pts_[t[0]]);
      if (n.dot(centroid - pts_[t[0]]) > 0) std::swap(t[1], t[2]);
      add_face(t[0], t[1], t[2]);
    }
  }

  void insert(int p) {
    const Vec3& q = pts_[p];
    int start = -1;
    double best = kGeomEps;
    for (size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive) continue;
      const double d = faces_[f].normal.dot(q) - faces_[f].offset;
      if (d > best) {
        best = d;
        start = static_cast<int>(f);
      }
    }
    if (start < 0) return;

    // Connected visible region around the most visible face.
    std::vector<int> visible;
    std::vector<char> mark(faces_.size(), 0);
    std::deque<int> queue{start};
    mark[static_cast<size_t>(start)] = 1;
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      visible.push_back(f);
      const auto& v = faces_[static_cast<size_t>(f)].v;
      for (int e = 0; e < 3; ++e) {
        const auto it = edges_.find(edge_key(v[(e + 1) % 3], v[e]));
        if (it == edges_.end()) continue;
        const int g = it->second;
        if (mark[static_cast<size_t>(g)]) continue;
        const Face& fg = faces_[static_cast<size_t>(g)];
        if (fg.normal.dot(q) - fg.offset > kGeomEps) {
          mark[static_cast<size_t>(g)] = 1;
          queue.push_back(g);
        }
      }
    }

    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const auto& v = faces_[static_cast<size_t>(f)].v;
      for (int e = 0; e < 3; ++e) {
        const int a = v[e], b = v[(e + 1) % 3];
        const auto it = edges_.find(edge_key(b, a));
        if (it == edges_.end() || !mark[static_cast<size_t>(it->second)])
          horizon.emplace_back(a, b);
      }
    }
    for (int f : visible) remove_face(f);
    for (const auto& [a, b] : horizon) add_face(a, b, p);
  }

  std::vector<const Face*> faces() const {
    std::vector<const Face*> out;
    for (const auto& f : faces_)
      if (f.alive) out.push_back(&f);
    return out;
  }

 private:
  void add_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    Vec3 n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = n.norm();
    f.normal = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    f.offset = f.normal.dot(pts_[a]);
    const int id = static_cast<int>(faces_.size());
    faces_.push_back(f);
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
  }

  void remove_face(int id) {
    Face& f = faces_[static_cast<size_t>(id)];
    f.alive = false;
    for (int e = 0; e < 3; ++e) {
      const auto it = edges_.find(edge_key(f.v[e], f.v[(e + 1) % 3]));
      if (it != edges_.end() && it->second == id) edges_.erase(it);
    }
  }

  const std::vector<Vec3>& pts_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, int> edges_;
};

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

Box3 box_of(const std::vector<Vec3>& pts) {
  Box3 box;
  for (const auto& p : pts) box.extend(p);
  return box;
}

Vec3 any_orthogonal(const Vec3& d) {
  const Vec3 trial = std::abs(d.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return d.cross(trial).normalized();
}

}  // namespace

Polytope convex_hull(std::span<const Vec3> input) {
  if (input.empty()) throw Error(ErrorCode::kInvalidInput, "convex_hull of no points");
  for (const auto& p : input)
    if (!is_finite(p)) throw Error(ErrorCode::kInvalidInput, "convex_hull: non-finite point");

  std::vector<Vec3> pts(input.begin(), input.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  Polytope out;
  const int n = static_cast<int>(pts.size());

  // Affine dimension from a greedy simplex.
  const int i0 = 0;
  int i1 = -1;
  double far = kGeomEps;
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > far) far = d, i1 = i;
  }
  if (i1 < 0) {
    out.vertices_ = {pts[i0]};
    out.dimension_ = 0;
    for (int k = 0; k < 3; ++k) {
      const Vec3 axis = Vec3::Unit(k);
      out.equalities_.push_back({axis, axis.dot(pts[i0])});
    }
    out.bounds_ = box_of(out.vertices_);
    return out;
  }
  const Vec3 dir = (pts[i1] - pts[i0]).normalized();
  int i2 = -1;
  far = kGeomEps;
  for (int i = 0; i < n; ++i) {
    const Vec3 r = pts[i] - pts[i0];
    const double d = (r - r.dot(dir) * dir).norm();
    if (d > far) far = d, i2 = i;
  }
  if (i2 < 0) {
    int lo = 0, hi = 0;
    for (int i = 0; i < n; ++i) {
      const double t = (pts[i] - pts[i0]).dot(dir);
      if (t < (pts[lo] - pts[i0]).dot(dir)) lo = i;
      if (t > (pts[hi] - pts[i0]).dot(dir)) hi = i;
    }
    out.vertices_ = {pts[lo], pts[hi]};
    out.dimension_ = 1;
    const Vec3 w1 = any_orthogonal(dir);
    const Vec3 w2 = dir.cross(w1);
    out.equalities_.push_back({w1, w1.dot(pts[lo])});
    out.equalities_.push_back({w2, w2.dot(pts[lo])});
    out.facets_.push_back({-dir, -dir.dot(pts[lo])});
    out.facets_.push_back({dir, dir.dot(pts[hi])});
    out.bounds_ = box_of(out.vertices_);
    return out;
  }
  const Vec3 normal = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = -1;
  far = kGeomEps;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs((pts[i] - pts[i0]).dot(normal));
    if (d > far) far = d, i3 = i;
  }
  if (i3 < 0) {
    // Planar: 2D hull in the plane's frame.
    const auto poly = PlanarPolygon::from_points(pts, normal);
    out.vertices_ = poly->vertices();
    out.dimension_ = 2;
    out.equalities_.push_back({poly->normal(), poly->plane_offset()});
    out.facets_ = poly->edge_halfspaces();
    out.bounds_ = box_of(out.vertices_);
    return out;
  }

  IncrementalHull hull(pts);
  hull.seed(i0, i1, i2, i3);
  // Farthest-first insertion keeps most interior points from ever becoming
  // provisional vertices.
  const Vec3 centroid = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  std::vector<int> order;
  order.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    if (i != i0 && i != i1 && i != i2 && i != i3) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return (pts[a] - centroid).squaredNorm() > (pts[b] - centroid).squaredNorm();
  });
  for (int i : order) hull.insert(i);

  // Cluster triangles into facets by normal.
  const auto faces = hull.faces();
  struct Group {
    Vec3 normal;
    double weight;
    std::vector<int> verts;
  };
  std::vector<Group> groups;
  for (const Face* f : faces) {
    const double area =
        (pts[f->v[1]] - pts[f->v[0]]).cross(pts[f->v[2]] - pts[f->v[0]]).norm();
    if (area == 0.0) continue;
    Group* match = nullptr;
    for (auto& g : groups) {
      if ((g.normal - f->normal).norm() < kFacetAngleEps) {
        match = &g;
        break;
      }
    }
    if (!match) {
      groups.push_back({f->normal, area, {}});
      match = &groups.back();
    } else if (area > match->weight) {
      match->normal = f->normal;
      match->weight = area;
    }
    for (int v : f->v) match->verts.push_back(v);
  }

  std::vector<char> extreme(static_cast<size_t>(n), 0);
  std::vector<int> used;
  for (auto& g : groups) {
    std::sort(g.verts.begin(), g.verts.end());
    g.verts.erase(std::unique(g.verts.begin(), g.verts.end()), g.verts.end());
    const Rotation3 frame = rotation_to_normal(g.normal);
    const Vec3 u = frame.matrix().col(0), v = frame.matrix().col(1);
    std::vector<Vec2> flat;
    for (int i : g.verts) flat.emplace_back(pts[i].dot(u), pts[i].dot(v));
    for (int k : convex_hull_2d(flat)) extreme[static_cast<size_t>(g.verts[static_cast<size_t>(k)])] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (extreme[static_cast<size_t>(i)]) out.vertices_.push_back(pts[i]);

  for (const auto& g : groups) {
    double offset = -std::numeric_limits<double>::infinity();
    for (const auto& v : out.vertices_) offset = std::max(offset, g.normal.dot(v));
    out.facets_.push_back({g.normal, offset});
  }
  out.dimension_ = 3;
  out.bounds_ = box_of(out.vertices_);
  return out;
}

}  // namespace nas
