#include "footstep.hpp"

#include <algorithm>
#include <cmath>

namespace nas {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kMarginal:
      return "marginal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "unknown";
}

const char* to_string(Objective o) {
  return o == Objective::kFeasibility ? "feasibility" : "min_sum_sq";
}

Objective parse_objective(const std::string& name) {
  if (name == "feasibility" || name == "feas") return Objective::kFeasibility;
  if (name == "min_sum_sq" || name == "quadratic" || name == "qp")
    return Objective::kMinSumSquaredSteps;
  throw Error(ErrorCode::kInvalidInput,
              "unknown objective '" + name + "' (expected feasibility or min_sum_sq)");
}

Vec3 FootstepProblem::position(int step, const Eigen::VectorXd& y) const {
  const auto s = static_cast<std::size_t>(step);
  const auto& b = basis[s];
  if (b.cols() == 0) return origin[s];
  return origin[s] + b * y.segment(offset[s], b.cols());
}

// --- assembly ------------------------------------------------------------------

namespace {

// Adds c . (B y_step) to a sparse row.
void add_terms(SparseRow& row, const FootstepProblem& fp, int step, const Vec3& c, double sign) {
  const auto s = static_cast<std::size_t>(step);
  const auto& b = fp.basis[s];
  for (int k = 0; k < b.cols(); ++k) {
    const double v = sign * c.dot(b.col(k));
    if (v != 0.0) row.coeffs.emplace_back(fp.offset[s] + k, v);
  }
}

}  // namespace

FootstepProblem assemble_problem(const SurfacePlan& plan, const Vec3& p0, int horizon,
                                 Objective objective, const KinematicModel& kinematics) {
  const int k = plan.length();
  if (k < 1) throw Error(ErrorCode::kInvalidInput, "plan has no steps");
  if (horizon < 1 || horizon > k)
    throw Error(ErrorCode::kInvalidInput, "horizon must be in [1, " + std::to_string(k) + "]");
  if (!is_finite(p0)) throw Error(ErrorCode::kInvalidInput, "start position is not finite");
  if (!plan.entries.front().region.contains(p0, 1e-7))
    throw Error(ErrorCode::kInvalidInput, "start position is outside the plan's first region");

  FootstepProblem fp;
  fp.start = p0;
  fp.start_effector = plan.entries.front().effector;
  fp.horizon = horizon;
  fp.objective = objective;

  for (int i = 1; i <= horizon; ++i) {
    const PlanEntry& child = plan.entries[static_cast<std::size_t>(i - 1)];
    const PlanEntry& e = plan.entries[static_cast<std::size_t>(i)];
    const double theta = child.yaw.value_or(0.0) - e.yaw.value_or(0.0);
    const Rotation3 rot = Rotation3::about_z(theta) * rotation_to_normal(e.normal);
    fp.steps.push_back({e.effector, e.node_id, e.surface_id, e.region,
                        kinematics.reach(e.effector).rotated(rot)});

    const auto& vs = e.region.vertices();
    Eigen::Matrix<double, 3, Eigen::Dynamic> b;
    Vec3 o;
    if (vs.size() >= 3) {
      o = e.region.origin();
      b.resize(3, 2);
      b.col(0) = e.region.axis_u();
      b.col(1) = e.region.axis_v();
    } else if (vs.size() == 2) {
      o = vs[0];
      b.resize(3, 1);
      b.col(0) = (vs[1] - vs[0]).normalized();
    } else {
      o = vs.at(0);
      b.resize(3, 0);
    }
    fp.origin.push_back(o);
    fp.offset.push_back(fp.num_vars);
    fp.num_vars += static_cast<int>(b.cols());
    fp.basis.push_back(std::move(b));
  }

  for (int i = 0; i < horizon; ++i) {
    const auto& st = fp.steps[static_cast<std::size_t>(i)];
    const Vec3& o = fp.origin[static_cast<std::size_t>(i)];
    // region membership, inside the plane
    const auto& vs = st.region.vertices();
    if (vs.size() >= 3) {
      for (const auto& h : st.region.edge_halfspaces()) {
        SparseRow row;
        add_terms(row, fp, i, h.normal, 1.0);
        row.rhs = h.offset - h.normal.dot(o);
        fp.rows.push_back(std::move(row));
      }
    } else if (vs.size() == 2) {
      const double len = (vs[1] - vs[0]).norm();
      fp.rows.push_back({{{fp.offset[static_cast<std::size_t>(i)], -1.0}}, 0.0});
      fp.rows.push_back({{{fp.offset[static_cast<std::size_t>(i)], 1.0}}, len});
    }
    // reachability: n . (p_i - p_{i-1}) <= d
    const Vec3 prev_origin = i == 0 ? fp.start : fp.origin[static_cast<std::size_t>(i - 1)];
    for (const auto& h : st.reach.facets()) {
      SparseRow row;
      add_terms(row, fp, i, h.normal, 1.0);
      if (i > 0) add_terms(row, fp, i - 1, h.normal, -1.0);
      row.rhs = h.offset - h.normal.dot(o - prev_origin);
      fp.rows.push_back(std::move(row));
    }
  }
  return fp;
}

// --- residuals -----------------------------------------------------------------

namespace {

double region_violation(const PlanarPolygon& region, const Vec3& p) {
  const auto& vs = region.vertices();
  double v = std::abs(region.normal().dot(p) - region.plane_offset());
  if (vs.size() >= 3) {
    for (const auto& h : region.edge_halfspaces()) v = std::max(v, h.signed_distance(p));
  } else if (vs.size() == 2) {
    const Vec3 ab = vs[1] - vs[0];
    const double t = std::clamp((p - vs[0]).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    v = std::max(v, (vs[0] + t * ab - p).norm());
  } else {
    v = std::max(v, (p - vs[0]).norm());
  }
  return v;
}

}  // namespace

double max_violation(const FootstepProblem& fp, std::span<const Vec3> positions) {
  if (positions.size() != fp.steps.size())
    throw Error(ErrorCode::kInvalidInput, "position count does not match the horizon");
  double worst = 0.0;
  Vec3 prev = fp.start;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto& st = fp.steps[i];
    const Vec3& p = positions[i];
    worst = std::max(worst, region_violation(st.region, p));
    for (const auto& h : st.reach.facets()) worst = std::max(worst, h.signed_distance(p - prev));
    prev = p;
  }
  return worst;
}

// --- solve ---------------------------------------------------------------------

namespace {

// Slack floor for the phase-1 problem: the solver may push the constraints
// up to this far inside before the regularization takes over.
constexpr double kPhaseOneMargin = 0.01;

Eigen::VectorXd params_of(const FootstepProblem& fp, const std::vector<Vec3>& pts) {
  Eigen::VectorXd y(fp.num_vars);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& b = fp.basis[i];
    if (b.cols() > 0) y.segment(fp.offset[i], b.cols()) = b.transpose() * (pts[i] - fp.origin[i]);
  }
  return y;
}

// Forward chain of Chebyshev centers of (p_{i-1} + reach) inside each region.
std::vector<Vec3> greedy_chain(const FootstepProblem& fp) {
  std::vector<Vec3> out;
  Vec3 prev = fp.start;
  for (const auto& st : fp.steps) {
    Vec3 pick;
    if (st.region.vertices().size() >= 3) {
      const auto reachable = clip_polygon_by_polytope(st.region, translate(st.reach, prev));
      pick = chebyshev_center(reachable ? *reachable : st.region).center;
    } else {
      pick = chebyshev_center(st.region).center;
    }
    out.push_back(pick);
    prev = pick;
  }
  return out;
}

std::vector<Vec3> positions_of(const FootstepProblem& fp, const Eigen::VectorXd& y) {
  std::vector<Vec3> out;
  for (int i = 0; i < fp.horizon; ++i) out.push_back(fp.position(i, y));
  return out;
}

struct PhaseOne {
  Eigen::VectorXd y;
  int iterations = 0;
  bool limit = false;
};

// min t + 1/2 (|y - y_ref|^2 + t^2)  s.t.  a.y - t <= b,  t >= -margin,
// repeated with y_ref moved to the last solution while t keeps dropping.
PhaseOne phase_one(const FootstepProblem& fp) {
  const int n = fp.num_vars;
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Identity(n + 1, n + 1);
  qp.rows = fp.rows;
  for (auto& row : qp.rows) row.coeffs.emplace_back(n, -1.0);
  qp.rows.push_back({{{n, -1.0}}, kPhaseOneMargin});

  PhaseOne out;
  out.y = params_of(fp, greedy_chain(fp));
  double last_t = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 50; ++round) {
    qp.g.resize(n + 1);
    qp.g.head(n) = -out.y;
    qp.g[n] = 1.0;
    const QpResult r = solve_qp(qp);
    out.iterations += r.iterations;
    if (r.status != QpStatus::kOptimal) {
      out.limit = r.status == QpStatus::kIterationLimit;
      break;
    }
    out.y = r.x.head(n);
    const double t = r.x[n];
    if (t <= 0.0 || last_t - t < 1e-13) break;
    last_t = t;
  }
  return out;
}

SolveStatus classify(double violation) {
  if (violation <= kQpFeasibleTol) return SolveStatus::kFeasible;
  if (violation > kQpInfeasibleTol) return SolveStatus::kInfeasible;
  return SolveStatus::kMarginal;
}

double sum_squared_steps(const FootstepProblem& fp, const std::vector<Vec3>& pts) {
  double s = 0.0;
  Vec3 prev = fp.start;
  for (const auto& p : pts) {
    s += (p - prev).squaredNorm();
    prev = p;
  }
  return s;
}

}  // namespace

FootstepPlan solve(const FootstepProblem& fp) {
  FootstepPlan plan;
  for (const auto& st : fp.steps) {
    plan.effectors.push_back(st.effector);
    plan.surfaces.push_back(st.surface_id);
  }

  auto finalize = [&](const Eigen::VectorXd& y, bool hit_limit) {
    plan.positions = positions_of(fp, y);
    plan.max_violation = max_violation(fp, plan.positions);
    plan.status = classify(plan.max_violation);
    if (hit_limit && plan.status != SolveStatus::kFeasible)
      plan.status = SolveStatus::kIterationLimit;
    plan.objective = fp.objective == Objective::kFeasibility ? 0.0
                                                             : sum_squared_steps(fp, plan.positions);
    return plan;
  };

  if (fp.objective == Objective::kFeasibility) {
    const PhaseOne p1 = phase_one(fp);
    plan.iterations = p1.iterations;
    return finalize(p1.y, p1.limit);
  }

  // sum_i |M_i y + c_i|^2 with M_i y = B_i y_i - B_{i-1} y_{i-1}.
  const int n = fp.num_vars;
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Zero(n, n);
  qp.g = Eigen::VectorXd::Zero(n);
  qp.rows = fp.rows;
  for (int i = 0; i < fp.horizon; ++i) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, n);
    const auto si = static_cast<std::size_t>(i);
    if (fp.basis[si].cols() > 0) m.middleCols(fp.offset[si], fp.basis[si].cols()) = fp.basis[si];
    Vec3 c = fp.origin[si];
    if (i > 0) {
      const auto sp = si - 1;
      if (fp.basis[sp].cols() > 0)
        m.middleCols(fp.offset[sp], fp.basis[sp].cols()) -= fp.basis[sp];
      c -= fp.origin[sp];
    } else {
      c -= fp.start;
    }
    qp.H.noalias() += 2.0 * m.transpose() * m;
    qp.g.noalias() += 2.0 * m.transpose() * c;
  }
  const QpResult r = solve_qp(qp);
  plan.iterations = r.iterations;
  if (r.status == QpStatus::kInfeasible) {
    // Report the phase-1 point as the violation certificate.
    const PhaseOne p1 = phase_one(fp);
    plan.iterations += p1.iterations;
    finalize(p1.y, p1.limit);
    if (plan.status == SolveStatus::kFeasible) plan.status = SolveStatus::kMarginal;
    return plan;
  }
  return finalize(r.x, r.status == QpStatus::kIterationLimit);
}

}  // namespace nas
