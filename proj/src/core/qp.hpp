#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace nas {

// a . x <= rhs, with a stored sparsely.
struct SparseRow {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;

  double dot(const Eigen::VectorXd& x) const {
    double s = 0.0;
    for (const auto& [i, c] : coeffs) s += c * x[i];
    return s;
  }
};

// min 1/2 x'Hx + g'x  s.t.  rows.  H must be positive definite.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  std::vector<SparseRow> rows;
};

enum class QpStatus { kOptimal, kInfeasible, kIterationLimit };

struct QpResult {
  QpStatus status = QpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

// Dual active-set method of Goldfarb and Idnani: starts from the
// unconstrained minimum and adds the most violated constraint at each major
// iteration. Deterministic: ties go to the lowest row index.
QpResult solve_qp(const QpProblem& problem, int max_iterations = 0);

}  // namespace nas
