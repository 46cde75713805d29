#pragma once

// Test-only reference routines. Nothing here calls into the hull, clipping
// or planner code paths they are used to check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace nas::testing {

// Lawson-Hanson non-negative least squares: argmin ||M x - y||, x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                            int max_iter = 500) {
  const int n = static_cast<int>(M.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<size_t>(n), false);
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd w = M.transpose() * (y - M * x);
    int best = -1;
    double wmax = 1e-12;
    for (int j = 0; j < n; ++j)
      if (!passive[static_cast<size_t>(j)] && w(j) > wmax) wmax = w(j), best = j;
    if (best < 0) break;
    passive[static_cast<size_t>(best)] = true;
    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<int> p;
      for (int j = 0; j < n; ++j)
        if (passive[static_cast<size_t>(j)]) p.push_back(j);
      Eigen::MatrixXd Mp(M.rows(), static_cast<int>(p.size()));
      for (size_t k = 0; k < p.size(); ++k) Mp.col(static_cast<int>(k)) = M.col(p[k]);
      const Eigen::VectorXd zp = Mp.colPivHouseholderQr().solve(y);
      bool ok = true;
      for (int k = 0; k < zp.size(); ++k) ok = ok && zp(k) > 0;
      if (ok) {
        x.setZero();
        for (size_t k = 0; k < p.size(); ++k) x(p[k]) = zp(static_cast<int>(k));
        break;
      }
      double alpha = 1.0;
      for (size_t k = 0; k < p.size(); ++k) {
        const double zk = zp(static_cast<int>(k));
        if (zk <= 0) alpha = std::min(alpha, x(p[k]) / (x(p[k]) - zk));
      }
      for (size_t k = 0; k < p.size(); ++k)
        x(p[k]) += alpha * (zp(static_cast<int>(k)) - x(p[k]));
      for (size_t k = 0; k < p.size(); ++k)
        if (x(p[k]) <= 1e-14) {
          x(p[k]) = 0;
          passive[static_cast<size_t>(p[k])] = false;
        }
    }
  }
  return x;
}

// Residual of the best convex-combination fit of `z` by `pts`.
inline double hull_membership_residual(const std::vector<Eigen::Vector3d>& pts,
                                       const Eigen::Vector3d& z) {
  const double w = 1e3;
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd M(4, n);
  for (int i = 0; i < n; ++i) {
    M.block<3, 1>(0, i) = pts[static_cast<size_t>(i)];
    M(3, i) = w;
  }
  Eigen::VectorXd y(4);
  y << z, w;
  const Eigen::VectorXd x = nnls(M, y);
  return (M * x - y).norm();
}

// z = A l1 + B l2 with l1, l2 in their simplices.
inline double minkowski_membership_residual(const std::vector<Eigen::Vector3d>& a,
                                            const std::vector<Eigen::Vector3d>& b,
                                            const Eigen::Vector3d& z) {
  const double w = 1e3;
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, na + nb);
  for (int i = 0; i < na; ++i) {
    M.block<3, 1>(0, i) = a[static_cast<size_t>(i)];
    M(3, i) = w;
  }
  for (int i = 0; i < nb; ++i) {
    M.block<3, 1>(0, na + i) = b[static_cast<size_t>(i)];
    M(4, na + i) = w;
  }
  Eigen::VectorXd y(5);
  y << z, w, w;
  const Eigen::VectorXd x = nnls(M, y);
  return (M * x - y).norm();
}

inline Eigen::Vector3d random_in_ball(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    Eigen::Vector3d p(u(rng), u(rng), u(rng));
    if (p.squaredNorm() <= 1.0) return p;
  }
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector3d p(g(rng), g(rng), g(rng));
  return p.normalized();
}

// Random convex combination of the given vertices.
inline Eigen::Vector3d random_combination(const std::vector<Eigen::Vector3d>& vs,
                                          std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  double total = 0.0;
  for (const auto& v : vs) {
    const double w = e(rng);
    p += w * v;
    total += w;
  }
  return p / total;
}

}  // namespace nas::testing
