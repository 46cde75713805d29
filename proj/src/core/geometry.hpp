#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace nas {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Box3 = Eigen::AlignedBox3d;

// Coplanarity / containment tolerance (meters).
inline constexpr double kGeomEps = 1e-9;
// Clipped polygons with less area than this are empty (square meters).
inline constexpr double kAreaEps = 1e-12;
// Normal clustering tolerance when merging hull triangles into facets.
inline constexpr double kFacetAngleEps = 1e-8;

// normal . x <= offset, with |normal| = 1.
struct HalfSpace {
  Vec3 normal;
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

bool is_finite(const Vec3& p);

// Proper rotation matrix (orthonormal, det = +1).
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& m);

  static Rotation3 about_z(double theta);

  const Mat3& matrix() const { return m_; }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation3 operator*(const Rotation3& o) const { return Rotation3(m_ * o.m_, 0); }

 private:
  Rotation3(const Mat3& m, int /*unchecked*/) : m_(m) {}
  Mat3 m_;
};

// Minimal-angle rotation taking +z onto n. The antipodal case n = -z uses a
// half turn about x.
Rotation3 rotation_to_normal(const Vec3& n);

// Convex polytope in V-rep with an eagerly derived H-rep.
//
// Lower-dimensional polytopes (point, segment, planar polygon) carry their
// affine hull as equality planes and the bounding constraints inside that
// hull as inequalities, so containment and clipping treat every dimension
// uniformly.
class Polytope {
 public:
  Polytope() = default;

  const std::vector<Vec3>& vertices() const { return vertices_; }
  // Affine dimension, 0..3.
  int dimension() const { return dimension_; }
  // Inequalities (facets for dimension 3).
  const std::vector<HalfSpace>& facets() const { return facets_; }
  // Planes that contain the whole polytope (3 - dimension of them).
  const std::vector<HalfSpace>& equalities() const { return equalities_; }
  const Box3& bounds() const { return bounds_; }
  bool empty() const { return vertices_.empty(); }

  Polytope translated(const Vec3& t) const;
  Polytope rotated(const Rotation3& r) const;
  Polytope negated() const;

 private:
  friend Polytope convex_hull(std::span<const Vec3> points);

  std::vector<Vec3> vertices_;
  std::vector<HalfSpace> facets_;
  std::vector<HalfSpace> equalities_;
  Box3 bounds_;
  int dimension_ = -1;
};

// Convex, counter-clockwise (w.r.t. its normal) polygon lying in a plane in
// 3D. A single point or a segment is representable (area zero).
class PlanarPolygon {
 public:
  PlanarPolygon() = default;

  // Convex hull of `points` projected onto the plane (normal, normal . first
  // point). Returns nullopt for empty input.
  static std::optional<PlanarPolygon> from_points(std::span<const Vec3> points,
                                                  const Vec3& normal);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Vec3& normal() const { return normal_; }
  double plane_offset() const { return offset_; }
  const Vec3& origin() const { return origin_; }
  const Vec3& axis_u() const { return axis_u_; }
  const Vec3& axis_v() const { return axis_v_; }
  const Box3& bounds() const { return bounds_; }

  Vec2 to_plane(const Vec3& p) const;
  Vec3 from_plane(const Vec2& q) const;

  double area() const;
  // In-plane outward edge constraints (normals orthogonal to the plane
  // normal). Empty for points; two end caps for segments.
  std::vector<HalfSpace> edge_halfspaces() const;
  bool contains(const Vec3& p, double eps = kGeomEps) const;
  Polytope as_polytope() const;
  bool is_convex_ccw() const;

  // Same plane and frame, new vertex loop (assumed convex, CCW, on plane).
  PlanarPolygon with_vertices(std::vector<Vec3> vertices) const;

 private:
  void refresh_bounds();

  std::vector<Vec3> vertices_;
  Vec3 normal_ = Vec3::UnitZ();
  double offset_ = 0.0;
  Vec3 origin_ = Vec3::Zero();
  Vec3 axis_u_ = Vec3::UnitX();
  Vec3 axis_v_ = Vec3::UnitY();
  Box3 bounds_;
};

Polytope convex_hull(std::span<const Vec3> points);
Polytope translate(const Polytope& poly, const Vec3& t);
Polytope central_symmetry(const Polytope& poly);
Polytope rotate_z(const Polytope& poly, double theta);
Polytope minkowski_sum(const Polytope& a, const Polytope& b);
Polytope minkowski_sum(const PlanarPolygon& a, const Polytope& b);

bool contains(const Polytope& poly, const Vec3& p, double eps = kGeomEps);

std::optional<PlanarPolygon> clip_polygon_by_polytope(const PlanarPolygon& region,
                                                      const Polytope& poly);
std::optional<PlanarPolygon> inset_polygon(const PlanarPolygon& region, double margin);

struct ChebyshevResult {
  Vec3 center;
  double radius = 0.0;
};
ChebyshevResult chebyshev_center(const PlanarPolygon& region);

// Vertices rounded to 1e-9 and sorted lexicographically; two regions are the
// same set iff their canonical keys compare equal.
std::vector<std::array<long long, 3>> canonical_key(const PlanarPolygon& region);

// 2D convex hull (CCW, collinear points removed), indices into `pts`.
std::vector<int> convex_hull_2d(std::span<const Vec2> pts, double eps = kGeomEps);

}  // namespace nas
