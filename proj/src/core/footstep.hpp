#pragma once

#include <span>
#include <vector>

#include "qp.hpp"
#include "query.hpp"

namespace nas {

inline constexpr double kQpFeasibleTol = 1e-8;
inline constexpr double kQpInfeasibleTol = 1e-6;

enum class Objective { kFeasibility, kMinSumSquaredSteps };
enum class SolveStatus { kFeasible, kMarginal, kInfeasible, kIterationLimit };

const char* to_string(SolveStatus s);
const char* to_string(Objective o);
Objective parse_objective(const std::string& name);

// Step i moves `effector` from p_{i-1} onto `region`; the displacement
// p_i - p_{i-1} must lie in `reach` (the effector's reach polytope rotated to
// the landing surface).
struct StepConstraint {
  Effector effector = Effector::kLeft;
  int node_id = -1;
  int surface_id = kGoalSurface;
  PlanarPolygon region;
  Polytope reach;
};

// Each p_i is written as origin_i + basis_i y_i with y_i in the region's own
// plane (2 parameters, 1 for a segment, 0 for a point), so planarity holds
// by construction and only inequalities remain.
struct FootstepProblem {
  Vec3 start = Vec3::Zero();
  Effector start_effector = Effector::kLeft;
  int horizon = 0;
  Objective objective = Objective::kFeasibility;
  std::vector<StepConstraint> steps;

  std::vector<Vec3> origin;
  std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> basis;
  std::vector<int> offset;
  int num_vars = 0;
  std::vector<SparseRow> rows;

  Vec3 position(int step, const Eigen::VectorXd& y) const;
};

struct FootstepPlan {
  std::vector<Vec3> positions;
  std::vector<Effector> effectors;
  std::vector<int> surfaces;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  double max_violation = 0.0;
  int iterations = 0;
};

FootstepProblem assemble_problem(const SurfacePlan& plan, const Vec3& p0, int horizon,
                                 Objective objective, const KinematicModel& kinematics);

FootstepPlan solve(const FootstepProblem& problem);

// Largest violation of plane, region and reach constraints, evaluated on the
// 3D positions directly (independent of the solver's parametrization).
double max_violation(const FootstepProblem& problem, std::span<const Vec3> positions);

}  // namespace nas
