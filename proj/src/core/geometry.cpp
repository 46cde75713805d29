#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace nas {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Box3 bounds_of(std::span<const Vec3> pts) {
  Box3 box;
  for (const auto& p : pts) box.extend(p);
  return box;
}

// Drops near-duplicate neighbours and vertices lying on the segment joining
// their neighbours. `normal` orients the turn test.
std::vector<Vec3> clean_loop(std::vector<Vec3> loop, const Vec3& normal) {
  bool changed = true;
  while (changed && loop.size() >= 2) {
    changed = false;
    for (size_t i = 0; i < loop.size() && loop.size() >= 2; ++i) {
      const Vec3& a = loop[i];
      const Vec3& b = loop[(i + 1) % loop.size()];
      if ((a - b).norm() <= kGeomEps) {
        loop.erase(loop.begin() + static_cast<long>((i + 1) % loop.size()));
        changed = true;
        break;
      }
    }
    if (changed || loop.size() < 3) continue;
    for (size_t i = 0; i < loop.size(); ++i) {
      const Vec3& a = loop[(i + loop.size() - 1) % loop.size()];
      const Vec3& b = loop[i];
      const Vec3& c = loop[(i + 1) % loop.size()];
      const Vec3 ac = c - a;
      const double len = ac.norm();
      const double turn = (b - a).cross(ac).dot(normal);
      // b within kGeomEps of the chord a-c (either side) is redundant.
      if (len > 0.0 && std::abs(turn) / len <= kGeomEps) {
        loop.erase(loop.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  if (loop.size() == 2 && (loop[0] - loop[1]).norm() <= kGeomEps) loop.pop_back();
  return loop;
}

std::vector<Vec3> clip_loop(const std::vector<Vec3>& in, const HalfSpace& h) {
  std::vector<Vec3> out;
  const size_t n = in.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  std::vector<double> s(n);
  bool all_inside = true;
  for (size_t i = 0; i < n; ++i) {
    s[i] = h.signed_distance(in[i]);
    all_inside = all_inside && s[i] <= kGeomEps;
  }
  if (all_inside) return in;
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    const bool in_i = s[i] <= kGeomEps;
    const bool in_j = s[j] <= kGeomEps;
    if (in_i && in_j) {
      out.push_back(in[j]);
    } else if (in_i != in_j) {
      const double denom = s[i] - s[j];
      double t = denom != 0.0 ? s[i] / denom : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      out.push_back(in[i] + t * (in[j] - in[i]));
      if (in_j) out.push_back(in[j]);
    }
  }
  return out;
}

}  // namespace

bool is_finite(const Vec3& p) { return p.allFinite(); }

Rotation3::Rotation3(const Mat3& m) : m_(m) {
  if (!m.allFinite() || (m * m.transpose() - Mat3::Identity()).norm() > kGeomEps ||
      std::abs(m.determinant() - 1.0) > kGeomEps) {
    throw Error(ErrorCode::kInvalidInput, "matrix is not a proper rotation");
  }
}

Rotation3 Rotation3::about_z(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return Rotation3(m, 0);
}

Rotation3 rotation_to_normal(const Vec3& n) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > kGeomEps) {
    throw Error(ErrorCode::kInvalidInput, "rotation_to_normal expects a unit vector");
  }
  const Vec3 z = Vec3::UnitZ();
  const double c = z.dot(n);
  if (c < -1.0 + 1e-12) {
    Mat3 m = Mat3::Identity();
    m(1, 1) = -1.0;
    m(2, 2) = -1.0;
    return Rotation3(m);
  }
  const Vec3 v = z.cross(n);
  Mat3 vx;
  vx << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  Mat3 m = Mat3::Identity() + vx + vx * vx / (1.0 + c);
  // Re-orthonormalize against accumulated rounding.
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  m = svd.matrixU() * svd.matrixV().transpose();
  return Rotation3(m);
}

// --- Polytope ---------------------------------------------------------------

Polytope Polytope::translated(const Vec3& t) const {
  Polytope out = *this;
  for (auto& v : out.vertices_) v += t;
  for (auto& h : out.facets_) h.offset += h.normal.dot(t);
  for (auto& h : out.equalities_) h.offset += h.normal.dot(t);
  out.bounds_ = bounds_of(out.vertices_);
  return out;
}

Polytope Polytope::rotated(const Rotation3& r) const {
  Polytope out = *this;
  for (auto& v : out.vertices_) v = r * v;
  for (auto& h : out.facets_) h.normal = r * h.normal;
  for (auto& h : out.equalities_) h.normal = r * h.normal;
  out.bounds_ = bounds_of(out.vertices_);
  return out;
}

Polytope Polytope::negated() const {
  Polytope out = *this;
  for (auto& v : out.vertices_) v = -v;
  for (auto& h : out.facets_) h.normal = -h.normal;
  for (auto& h : out.equalities_) h.normal = -h.normal;
  out.bounds_ = bounds_of(out.vertices_);
  return out;
}

Polytope translate(const Polytope& poly, const Vec3& t) { return poly.translated(t); }
Polytope central_symmetry(const Polytope& poly) { return poly.negated(); }
Polytope rotate_z(const Polytope& poly, double theta) {
  return poly.rotated(Rotation3::about_z(theta));
}

Polytope minkowski_sum(const Polytope& a, const Polytope& b) {
  std::vector<Vec3> sums;
  sums.reserve(a.vertices().size() * b.vertices().size());
  for (const auto& va : a.vertices())
    for (const auto& vb : b.vertices()) sums.push_back(va + vb);
  return convex_hull(sums);
}

Polytope minkowski_sum(const PlanarPolygon& a, const Polytope& b) {
  std::vector<Vec3> sums;
  sums.reserve(a.vertices().size() * b.vertices().size());
  for (const auto& va : a.vertices())
    for (const auto& vb : b.vertices()) sums.push_back(va + vb);
  return convex_hull(sums);
}

bool contains(const Polytope& poly, const Vec3& p, double eps) {
  if (poly.empty()) return false;
  for (const auto& h : poly.equalities())
    if (std::abs(h.signed_distance(p)) > eps) return false;
  for (const auto& h : poly.facets())
    if (h.signed_distance(p) > eps) return false;
  return true;
}

// --- PlanarPolygon ------------------------------------------------------------

std::optional<PlanarPolygon> PlanarPolygon::from_points(std::span<const Vec3> points,
                                                        const Vec3& normal) {
  if (points.empty()) return std::nullopt;
  for (const auto& p : points)
    if (!is_finite(p)) throw Error(ErrorCode::kInvalidInput, "non-finite polygon vertex");
  if (!normal.allFinite() || normal.norm() < 1e-12)
    throw Error(ErrorCode::kInvalidInput, "polygon normal is degenerate");

  PlanarPolygon poly;
  poly.normal_ = normal.normalized();
  double offset = 0.0;
  for (const auto& p : points) offset += poly.normal_.dot(p);
  poly.offset_ = offset / static_cast<double>(points.size());
  const Rotation3 frame = rotation_to_normal(poly.normal_);
  poly.axis_u_ = frame.matrix().col(0);
  poly.axis_v_ = frame.matrix().col(1);
  const Vec3& p0 = points.front();
  poly.origin_ = p0 - (poly.normal_.dot(p0) - poly.offset_) * poly.normal_;

  std::vector<Vec2> flat;
  flat.reserve(points.size());
  for (const auto& p : points) flat.push_back(poly.to_plane(p));
  const auto hull = convex_hull_2d(flat);
  std::vector<Vec3> loop;
  loop.reserve(hull.size());
  for (int i : hull) {
    const Vec3& p = points[static_cast<size_t>(i)];
    // Keep on-plane input coordinates verbatim; snap the rest.
    if (std::abs(poly.normal_.dot(p) - poly.offset_) <= kGeomEps)
      loop.push_back(p);
    else
      loop.push_back(poly.from_plane(flat[static_cast<size_t>(i)]));
  }
  poly.vertices_ = clean_loop(std::move(loop), poly.normal_);
  poly.refresh_bounds();
  return poly;
}

Vec2 PlanarPolygon::to_plane(const Vec3& p) const {
  const Vec3 d = p - origin_;
  return {d.dot(axis_u_), d.dot(axis_v_)};
}

Vec3 PlanarPolygon::from_plane(const Vec2& q) const {
  return origin_ + q.x() * axis_u_ + q.y() * axis_v_;
}

double PlanarPolygon::area() const {
  if (vertices_.size() < 3) return 0.0;
  double twice = 0.0;
  const Vec3& a = vertices_[0];
  for (size_t i = 1; i + 1 < vertices_.size(); ++i)
    twice += (vertices_[i] - a).cross(vertices_[i + 1] - a).dot(normal_);
  return 0.5 * twice;
}

std::vector<HalfSpace> PlanarPolygon::edge_halfspaces() const {
  std::vector<HalfSpace> hs;
  const size_t n = vertices_.size();
  if (n >= 3) {
    hs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      const Vec3& a = vertices_[i];
      const Vec3& b = vertices_[(i + 1) % n];
      const Vec3 m = (b - a).cross(normal_).normalized();
      hs.push_back({m, m.dot(a)});
    }
  } else if (n == 2) {
    const Vec3 d = (vertices_[1] - vertices_[0]).normalized();
    const Vec3 w = normal_.cross(d);
    hs.push_back({-d, -d.dot(vertices_[0])});
    hs.push_back({d, d.dot(vertices_[1])});
    hs.push_back({w, w.dot(vertices_[0])});
    hs.push_back({-w, -w.dot(vertices_[0])});
  } else if (n == 1) {
    for (const Vec3& d : {axis_u_, axis_v_}) {
      hs.push_back({d, d.dot(vertices_[0])});
      hs.push_back({-d, -d.dot(vertices_[0])});
    }
  }
  return hs;
}

bool PlanarPolygon::contains(const Vec3& p, double eps) const {
  if (vertices_.empty()) return false;
  if (std::abs(normal_.dot(p) - offset_) > eps) return false;
  const size_t n = vertices_.size();
  if (n == 1) return (p - vertices_[0]).norm() <= eps;
  if (n == 2) {
    const Vec3 ab = vertices_[1] - vertices_[0];
    const double t = std::clamp((p - vertices_[0]).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (vertices_[0] + t * ab - p).norm() <= eps;
  }
  for (size_t i = 0; i < n; ++i) {
    const Vec3& a = vertices_[i];
    const Vec3& b = vertices_[(i + 1) % n];
    const Vec3 ab = b - a;
    if (ab.cross(p - a).dot(normal_) < -eps * ab.norm()) return false;
  }
  return true;
}

Polytope PlanarPolygon::as_polytope() const { return convex_hull(vertices_); }

bool PlanarPolygon::is_convex_ccw() const {
  const size_t n = vertices_.size();
  for (const auto& v : vertices_)
    if (std::abs(normal_.dot(v) - offset_) > kGeomEps) return false;
  if (n < 3) return true;
  for (size_t i = 0; i < n; ++i) {
    const Vec3& a = vertices_[i];
    const Vec3& b = vertices_[(i + 1) % n];
    const Vec3& c = vertices_[(i + 2) % n];
    const double len = (c - a).norm();
    if ((b - a).cross(c - b).dot(normal_) < -kGeomEps * std::max(len, 1.0)) return false;
  }
  return area() > 0.0;
}

PlanarPolygon PlanarPolygon::with_vertices(std::vector<Vec3> vertices) const {
  PlanarPolygon out = *this;
  out.vertices_ = std::move(vertices);
  out.refresh_bounds();
  return out;
}

void PlanarPolygon::refresh_bounds() { bounds_ = bounds_of(vertices_); }

// --- clipping ---------------------------------------------------------------

std::optional<PlanarPolygon> clip_polygon_by_polytope(const PlanarPolygon& region,
                                                      const Polytope& poly) {
  if (poly.empty() || region.vertices().size() < 3) return std::nullopt;
  Box3 grown = poly.bounds();
  grown.min().array() -= kGeomEps;
  grown.max().array() += kGeomEps;
  if (!grown.intersects(region.bounds())) return std::nullopt;

  // A lower-dimensional operand meets the region's plane in a set of zero
  // area unless its affine hull contains the region.
  for (const auto& eq : poly.equalities())
    for (const auto& v : region.vertices())
      if (std::abs(eq.signed_distance(v)) > kGeomEps) return std::nullopt;

  std::vector<Vec3> loop = region.vertices();
  for (const auto& h : poly.facets()) {
    loop = clip_loop(loop, h);
    if (loop.size() < 3) return std::nullopt;
  }
  loop = clean_loop(std::move(loop), region.normal());
  if (loop.size() < 3) return std::nullopt;
  PlanarPolygon out = region.with_vertices(std::move(loop));
  if (out.area() < kAreaEps) return std::nullopt;
  return out;
}

std::optional<PlanarPolygon> inset_polygon(const PlanarPolygon& region, double margin) {
  if (!(margin >= 0.0) || !std::isfinite(margin))
    throw Error(ErrorCode::kInvalidInput, "inset margin must be a finite value >= 0");
  if (margin == 0.0) return region;
  if (region.vertices().size() < 3) return std::nullopt;
  std::vector<Vec3> loop = region.vertices();
  for (auto h : region.edge_halfspaces()) {
    h.offset -= margin;
    loop = clip_loop(loop, h);
    if (loop.size() < 3) return std::nullopt;
  }
  loop = clean_loop(std::move(loop), region.normal());
  if (loop.size() < 3) return std::nullopt;
  PlanarPolygon out = region.with_vertices(std::move(loop));
  if (out.area() < kAreaEps) return std::nullopt;
  return out;
}

// --- Chebyshev center -------------------------------------------------------

ChebyshevResult chebyshev_center(const PlanarPolygon& region) {
  const auto& vs = region.vertices();
  if (vs.empty()) throw Error(ErrorCode::kInvalidInput, "chebyshev_center of empty region");
  if (vs.size() == 1) return {vs[0], 0.0};
  if (vs.size() == 2) return {0.5 * (vs[0] + vs[1]), 0.0};

  // max r  s.t.  a_i . c + r <= b_i, solved by enumerating the vertices of
  // the 3-variable LP (each defined by three tight constraints).
  const size_t n = vs.size();
  std::vector<Vec2> a(n);
  std::vector<double> b(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2 p = region.to_plane(vs[i]);
    const Vec2 q = region.to_plane(vs[(i + 1) % n]);
    const Vec2 e = q - p;
    a[i] = Vec2(e.y(), -e.x()).normalized();
    b[i] = a[i].dot(p);
  }
  double best = -1.0;
  std::vector<Vec2> optimal;
  const double tol = 1e-12;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      for (size_t k = j + 1; k < n; ++k) {
        Eigen::Matrix3d m;
        m << a[i].x(), a[i].y(), 1.0, a[j].x(), a[j].y(), 1.0, a[k].x(), a[k].y(), 1.0;
        if (std::abs(m.determinant()) < 1e-14) continue;
        const Eigen::Vector3d sol = m.partialPivLu().solve(Eigen::Vector3d(b[i], b[j], b[k]));
        const Vec2 c = sol.head<2>();
        const double r = sol.z();
        if (r < -tol) continue;
        bool feasible = true;
        for (size_t l = 0; l < n && feasible; ++l)
          feasible = a[l].dot(c) + r <= b[l] + tol;
        if (!feasible) continue;
        if (r > best + tol) {
          best = r;
          optimal.assign(1, c);
        } else if (r >= best - tol) {
          optimal.push_back(c);
        }
      }
    }
  }
  if (optimal.empty()) {
    // Sliver below numerical resolution: fall back to the vertex centroid.
    Vec3 c = Vec3::Zero();
    for (const auto& v : vs) c += v;
    return {c / static_cast<double>(n), 0.0};
  }
  Vec2 c = Vec2::Zero();
  for (const auto& p : optimal) c += p;
  c /= static_cast<double>(optimal.size());
  return {region.from_plane(c), std::max(best, 0.0)};
}

std::vector<std::array<long long, 3>> canonical_key(const PlanarPolygon& region) {
  std::vector<std::array<long long, 3>> key;
  key.reserve(region.vertices().size());
  for (const auto& v : region.vertices())
    key.push_back({std::llround(v.x() * 1e9), std::llround(v.y() * 1e9),
                   std::llround(v.z() * 1e9)});
  std::sort(key.begin(), key.end());
  return key;
}

std::vector<int> convex_hull_2d(std::span<const Vec2> pts, double eps) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    const Vec2& p = pts[static_cast<size_t>(i)];
    const Vec2& q = pts[static_cast<size_t>(j)];
    return p.x() < q.x() || (p.x() == q.x() && (p.y() < q.y() || (p.y() == q.y() && i < j)));
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](int i, int j) {
                          return pts[static_cast<size_t>(i)] == pts[static_cast<size_t>(j)];
                        }),
            idx.end());
  if (idx.size() <= 1) return idx;

  // a is kept only when it lies strictly left of o->b by more than eps.
  auto keeps = [&](int o, int a, int b) {
    const Vec2& po = pts[static_cast<size_t>(o)];
    const Vec2 ob = pts[static_cast<size_t>(b)] - po;
    const double len = ob.norm();
    if (len == 0.0) return false;
    return cross2(pts[static_cast<size_t>(a)] - po, ob) / len > eps;
  };
  std::vector<int> hull;
  hull.reserve(idx.size() * 2);
  for (int i : idx) {
    while (hull.size() >= 2 && !keeps(hull[hull.size() - 2], hull.back(), i)) hull.pop_back();
    hull.push_back(i);
  }
  const size_t lower = hull.size() + 1;
  for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
    while (hull.size() >= lower && !keeps(hull[hull.size() - 2], hull.back(), *it))
      hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();
  // Collapse near-coincident neighbours.
  std::vector<int> out;
  for (int i : hull) {
    if (!out.empty() &&
        (pts[static_cast<size_t>(i)] - pts[static_cast<size_t>(out.back())]).norm() <= eps)
      continue;
    out.push_back(i);
  }
  while (out.size() > 1 &&
         (pts[static_cast<size_t>(out.front())] - pts[static_cast<size_t>(out.back())]).norm() <=
             eps)
    out.pop_back();
  return out;
}

}  // namespace nas
