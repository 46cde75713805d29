#include "qp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

#include "error.hpp"

namespace nas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Constraint violation below this counts as satisfied.
constexpr double kViolationTol = 1e-12;

// Active-set factorization: J = L^-T Q and the upper-triangular R with
// L^-1 N = Q [R; 0] for the active normals N.
class ActiveSet {
 public:
  explicit ActiveSet(const Eigen::MatrixXd& j_init)
      : n_(static_cast<int>(j_init.rows())), J_(j_init), R_(Eigen::MatrixXd::Zero(n_, n_)) {}

  int size() const { return static_cast<int>(rows_.size()); }
  int row(int k) const { return rows_[static_cast<std::size_t>(k)]; }

  // d = J' np, z = J2 d2 (primal direction), r = R^-1 d1 (dual direction).
  void directions(const Eigen::VectorXd& np, Eigen::VectorXd& d, Eigen::VectorXd& z,
                  Eigen::VectorXd& r) const {
    const int q = size();
    d.noalias() = J_.transpose() * np;
    z.noalias() = J_.rightCols(n_ - q) * d.tail(n_ - q);
    r.resize(q);
    if (q > 0) r = R_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));
  }

  // Appends a constraint whose d = J' np was computed by directions().
  bool add(int row, Eigen::VectorXd d) {
    const int q = size();
    for (int j = n_ - 1; j >= q + 1; --j) {
      double cc = d[j - 1], ss = d[j];
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d[j] = 0.0;
      cc /= h;
      ss /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d[j - 1] = -h;
      } else {
        d[j - 1] = h;
      }
      reflect_columns(J_, j - 1, cc, ss);
    }
    if (std::abs(d[q]) <= std::numeric_limits<double>::epsilon() * r_norm_) return false;
    R_.col(q).head(q + 1) = d.head(q + 1);
    r_norm_ = std::max(r_norm_, std::abs(d[q]));
    rows_.push_back(row);
    return true;
  }

  // Removes the k-th active constraint and restores R to triangular form.
  void drop(int k) {
    const int q = size();
    rows_.erase(rows_.begin() + k);
    for (int i = k; i < q - 1; ++i) R_.col(i) = R_.col(i + 1);
    R_.col(q - 1).setZero();
    for (int j = k; j < q - 1; ++j) {
      double cc = R_(j, j), ss = R_(j + 1, j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      R_(j + 1, j) = 0.0;
      if (cc < 0.0) {
        R_(j, j) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R_(j, j) = h;
      }
      for (int c = j + 1; c < q - 1; ++c) {
        const double t1 = R_(j, c), t2 = R_(j + 1, c);
        R_(j, c) = cc * t1 + ss * t2;
        R_(j + 1, c) = ss * t1 - cc * t2;
      }
      reflect_columns(J_, j, cc, ss);
    }
  }

 private:
  // Columns (c, c+1) <- (c, c+1) [[cc, ss], [ss, -cc]].
  static void reflect_columns(Eigen::MatrixXd& m, int c, double cc, double ss) {
    for (int k = 0; k < m.rows(); ++k) {
      const double t1 = m(k, c), t2 = m(k, c + 1);
      m(k, c) = cc * t1 + ss * t2;
      m(k, c + 1) = ss * t1 - cc * t2;
    }
  }

  int n_;
  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  std::vector<int> rows_;
  double r_norm_ = 1.0;
};

}  // namespace

QpResult solve_qp(const QpProblem& p, int max_iterations) {
  const int n = static_cast<int>(p.H.rows());
  const int m = static_cast<int>(p.rows.size());
  if (p.H.cols() != n || p.g.size() != n)
    throw Error(ErrorCode::kInvalidInput, "QP dimensions do not match");
  for (const auto& row : p.rows)
    for (const auto& [i, c] : row.coeffs)
      if (i < 0 || i >= n || !std::isfinite(c))
        throw Error(ErrorCode::kInvalidInput, "QP row references an invalid variable");

  QpResult res;
  auto slack = [&](int j, const Eigen::VectorXd& x) {
    const auto& row = p.rows[static_cast<std::size_t>(j)];
    return row.rhs - row.dot(x);
  };

  if (n == 0) {
    res.x.resize(0);
    res.status = QpStatus::kOptimal;
    for (int j = 0; j < m; ++j)
      if (slack(j, res.x) < -kViolationTol) res.status = QpStatus::kInfeasible;
    return res;
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(p.H);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kInvalidInput, "QP Hessian is not positive definite");
  const Eigen::MatrixXd l_inv =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
  ActiveSet active(l_inv.transpose());

  Eigen::VectorXd x = -llt.solve(p.g);
  std::vector<double> u;
  std::vector<char> in_set(static_cast<std::size_t>(m), 0);
  std::vector<char> excluded(static_cast<std::size_t>(m), 0);
  Eigen::VectorXd d(n), z(n), r, np(n);
  const int cap = max_iterations > 0 ? max_iterations : 50 * (n + m) + 100;

  auto finish = [&](QpStatus status) {
    res.status = status;
    res.objective = 0.5 * x.dot(p.H * x) + p.g.dot(x);
    res.x = x;
    return res;
  };

  for (;;) {
    // Most violated inactive constraint.
    int ip = -1;
    double s_ip = -kViolationTol;
    for (int j = 0; j < m; ++j) {
      if (in_set[static_cast<std::size_t>(j)] || excluded[static_cast<std::size_t>(j)]) continue;
      const double s = slack(j, x);
      if (s < s_ip) {
        s_ip = s;
        ip = j;
      }
    }
    if (ip < 0) return finish(QpStatus::kOptimal);

    // Constraint in ">= 0" form: np . x + rhs >= 0 with np = -a.
    np.setZero();
    for (const auto& [i, c] : p.rows[static_cast<std::size_t>(ip)].coeffs) np[i] -= c;
    u.push_back(0.0);

    for (;;) {
      if (++res.iterations > cap) return finish(QpStatus::kIterationLimit);
      const int q = active.size();
      active.directions(np, d, z, r);

      double t1 = kInf;
      int drop_k = -1;
      for (int k = 0; k < q; ++k) {
        if (r[k] > 0.0) {
          const double ratio = u[static_cast<std::size_t>(k)] / r[k];
          if (ratio < t1) {
            t1 = ratio;
            drop_k = k;
          }
        }
      }
      double t2 = kInf;
      const double zn = z.dot(np);
      if (z.squaredNorm() > std::numeric_limits<double>::epsilon() && zn > 0.0) t2 = -s_ip / zn;
      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) return finish(QpStatus::kInfeasible);

      for (int k = 0; k < q; ++k) u[static_cast<std::size_t>(k)] -= t * r[k];
      u.back() += t;

      if (std::isfinite(t2)) {
        x += t * z;
        if (t == t2) {
          if (active.add(ip, d)) {
            in_set[static_cast<std::size_t>(ip)] = 1;
            std::fill(excluded.begin(), excluded.end(), 0);
          } else {
            // Numerically dependent on the active set: skip this row for now.
            excluded[static_cast<std::size_t>(ip)] = 1;
            u.pop_back();
          }
          break;
        }
      }
      // Partial step: drop the blocking constraint and retry.
      in_set[static_cast<std::size_t>(active.row(drop_k))] = 0;
      active.drop(drop_k);
      u.erase(u.begin() + drop_k);
      s_ip = slack(ip, x);
      if (s_ip >= -kViolationTol) {
        // Already satisfied after the partial step.
        u.pop_back();
        break;
      }
    }
  }
}

}  // namespace nas
