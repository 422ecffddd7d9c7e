#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sfd {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

// min c^T x  s.t.  a_eq x = b_eq,  a_ub x <= b_ub,  x >= 0.
// Empty matrices (0 rows) are allowed for either constraint block.
struct LpProblem {
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::VectorXd c;
};

struct LpOptions {
  double feasibility_tol = 1e-8;
  double pivot_tol = 1e-10;
  double optimality_tol = 1e-9;
  int max_iterations = 200000;
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;  // structural variables only
  double objective = 0.0;
  // Basic columns at termination: indices < n are structural variables,
  // n + i is the slack of inequality row i.
  std::vector<int> basis;
  // Sensitivities of the optimal value: d obj / d b_eq and
  // -d obj / d b_ub (the latter are nonnegative prices).
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd price_ub;
  int iterations = 0;
};

// Dense two-phase primal simplex with Bland's rule (lowest-index entering
// column, lowest-index leaving basic variable among ratio ties). Redundant
// equality rows are detected after phase 1 and dropped. On kOptimal the
// returned x is a basic solution. Throws Error(kNumericalFailure) when the
// final basis does not reproduce the constraints to 1e-6 (relative).
LpResult lp_solve(const LpProblem& problem, const LpOptions& options = {});

}  // namespace sfd
