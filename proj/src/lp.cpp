#include "sfd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sfd/error.hpp"

namespace sfd {
namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Simplex {
 public:
  Simplex(Tableau tableau, std::vector<int> basis, int num_columns, const LpOptions& options)
      : t_(std::move(tableau)), basis_(std::move(basis)), num_columns_(num_columns), opt_(options) {}

  // Loads a cost vector over the first num_columns_ columns and prices out
  // the basic columns.
  void set_costs(const Eigen::VectorXd& costs) {
    z_ = Eigen::RowVectorXd::Zero(t_.cols());
    z_.head(costs.size()) = costs.transpose();
    for (int r = 0; r < rows(); ++r) {
      const double cb = z_(basis_[r]);
      if (cb != 0.0) z_ -= cb * t_.row(r);
    }
  }

  enum class Outcome { kOptimal, kUnbounded };

  Outcome run(int& iterations) {
    const int rhs = static_cast<int>(t_.cols()) - 1;
    while (true) {
      if (++iterations > opt_.max_iterations) {
        throw Error(ErrorCode::kNumericalFailure, "simplex iteration limit reached");
      }
      int entering = -1;
      for (int j = 0; j < num_columns_; ++j) {
        if (z_(j) < -opt_.optimality_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return Outcome::kOptimal;

      int leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows(); ++r) {
        const double a = t_(r, entering);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = std::max(t_(r, rhs), 0.0) / a;
        const double tie = 1e-12 * std::max(1.0, best_ratio);
        if (leaving < 0 || ratio < best_ratio - tie) {
          best_ratio = ratio;
          leaving = r;
        } else if (ratio <= best_ratio + tie && leaving >= 0 && basis_[r] < basis_[leaving]) {
          leaving = r;
        }
      }
      if (leaving < 0) return Outcome::kUnbounded;
      pivot(leaving, entering);
    }
  }

  void pivot(int r, int col) {
    const double p = t_(r, col);
    t_.row(r) /= p;
    for (int i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    const double f = z_(col);
    if (f != 0.0) z_ -= f * t_.row(r);
    basis_[r] = col;
    const int rhs = static_cast<int>(t_.cols()) - 1;
    for (int i = 0; i < rows(); ++i) {
      if (std::abs(t_(i, rhs)) < 1e-14) t_(i, rhs) = 0.0;
    }
  }

  int rows() const { return static_cast<int>(t_.rows()); }
  double objective() const { return -z_(z_.size() - 1); }
  Tableau& tableau() { return t_; }
  std::vector<int>& basis() { return basis_; }
  void set_num_columns(int n) { num_columns_ = n; }

 private:
  Tableau t_;
  Eigen::RowVectorXd z_;
  std::vector<int> basis_;
  int num_columns_;
  LpOptions opt_;
};

void check_shapes(const LpProblem& p) {
  const auto n = p.c.size();
  auto bad = [&](const std::string& what) {
    throw Error(ErrorCode::kDimensionMismatch, "lp_solve: " + what);
  };
  if (p.a_eq.rows() > 0 && p.a_eq.cols() != n) bad("a_eq column count differs from c");
  if (p.a_eq.rows() != p.b_eq.size()) bad("a_eq rows differ from b_eq size");
  if (p.a_ub.rows() > 0 && p.a_ub.cols() != n) bad("a_ub column count differs from c");
  if (p.a_ub.rows() != p.b_ub.size()) bad("a_ub rows differ from b_ub size");
  if (!p.c.allFinite() || !p.b_eq.allFinite() || !p.b_ub.allFinite() ||
      (p.a_eq.size() > 0 && !p.a_eq.allFinite()) || (p.a_ub.size() > 0 && !p.a_ub.allFinite())) {
    bad("non-finite input");
  }
}

}  // namespace

LpResult lp_solve(const LpProblem& problem, const LpOptions& options) {
  check_shapes(problem);
  const int n = static_cast<int>(problem.c.size());
  const int m_eq = static_cast<int>(problem.a_eq.rows());
  const int m_ub = static_cast<int>(problem.a_ub.rows());
  const int m = m_eq + m_ub;

  double scale = 1.0;
  if (m_eq > 0) scale = std::max(scale, problem.b_eq.cwiseAbs().maxCoeff());
  if (m_ub > 0) scale = std::max(scale, problem.b_ub.cwiseAbs().maxCoeff());

  LpResult result;
  if (m == 0) {
    // Only x >= 0: optimal at 0 unless some cost is negative.
    result.x = Eigen::VectorXd::Zero(n);
    result.status = (problem.c.array() < 0.0).any() ? LpStatus::kUnbounded : LpStatus::kOptimal;
    return result;
  }

  // Rows needing an artificial: all equality rows and inequality rows with
  // negative right-hand side.
  std::vector<int> artificial_row;
  for (int i = 0; i < m_eq; ++i) artificial_row.push_back(i);
  for (int i = 0; i < m_ub; ++i) {
    if (problem.b_ub(i) < 0.0) artificial_row.push_back(m_eq + i);
  }
  const int n_art = static_cast<int>(artificial_row.size());
  const int n_real = n + m_ub;
  const int rhs = n_real + n_art;

  Tableau t = Tableau::Zero(m, rhs + 1);
  std::vector<int> basis(m, -1);
  for (int i = 0; i < m_eq; ++i) {
    const double sign = problem.b_eq(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * problem.a_eq.row(i);
    t(i, rhs) = sign * problem.b_eq(i);
  }
  for (int i = 0; i < m_ub; ++i) {
    const int r = m_eq + i;
    const double sign = problem.b_ub(i) < 0.0 ? -1.0 : 1.0;
    t.row(r).head(n) = sign * problem.a_ub.row(i);
    t(r, n + i) = sign;
    t(r, rhs) = sign * problem.b_ub(i);
    if (sign > 0.0) basis[r] = n + i;
  }
  for (int a = 0; a < n_art; ++a) {
    t(artificial_row[a], n_real + a) = 1.0;
    basis[artificial_row[a]] = n_real + a;
  }

  int iterations = 0;
  std::vector<int> rows_kept(m);
  for (int r = 0; r < m; ++r) rows_kept[r] = r;
  Simplex simplex(std::move(t), std::move(basis), rhs, options);
  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(rhs);
    phase1.tail(n_art).setOnes();
    simplex.set_costs(phase1);
    simplex.run(iterations);
    if (simplex.objective() > options.feasibility_tol * scale) {
      result.status = LpStatus::kInfeasible;
      result.iterations = iterations;
      return result;
    }
    // Drive remaining artificials out of the basis; rows where that is
    // impossible are linearly dependent and get dropped.
    std::vector<int> keep;
    for (int r = 0; r < simplex.rows(); ++r) {
      if (simplex.basis()[r] < n_real) {
        keep.push_back(r);
        continue;
      }
      int best = -1;
      double best_abs = options.pivot_tol;
      for (int j = 0; j < n_real; ++j) {
        const double a = std::abs(simplex.tableau()(r, j));
        if (a > best_abs) {
          best_abs = a;
          best = j;
        }
      }
      if (best >= 0) {
        simplex.pivot(r, best);
        keep.push_back(r);
      }
    }
    Tableau reduced(static_cast<int>(keep.size()), n_real + 1);
    std::vector<int> reduced_basis;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      reduced.row(static_cast<int>(i)).head(n_real) = simplex.tableau().row(keep[i]).head(n_real);
      reduced(static_cast<int>(i), n_real) = simplex.tableau()(keep[i], rhs);
      reduced_basis.push_back(simplex.basis()[keep[i]]);
    }
    rows_kept = keep;
    simplex = Simplex(std::move(reduced), std::move(reduced_basis), n_real, options);
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n_real);
  phase2.head(n) = problem.c;
  simplex.set_num_columns(n_real);
  simplex.set_costs(phase2);
  const auto outcome = simplex.run(iterations);
  result.iterations = iterations;
  if (outcome == Simplex::Outcome::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }

  // Re-solve the final basis against the original data to shed pivoting
  // round-off, then verify.
  const auto& final_basis = simplex.basis();
  const int k = static_cast<int>(final_basis.size());
  {
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(m, n_real);
    if (m_eq > 0) full.topLeftCorner(m_eq, n) = problem.a_eq;
    if (m_ub > 0) {
      full.bottomLeftCorner(m_ub, n) = problem.a_ub;
      full.bottomRightCorner(m_ub, m_ub).setIdentity();
    }
    Eigen::MatrixXd picked(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) picked(i, j) = full(rows_kept[i], final_basis[j]);
    }
    Eigen::VectorXd rhs_full(m);
    if (m_eq > 0) rhs_full.head(m_eq) = problem.b_eq;
    if (m_ub > 0) rhs_full.tail(m_ub) = problem.b_ub;
    Eigen::VectorXd rhs_kept(k);
    for (int i = 0; i < k; ++i) rhs_kept(i) = rhs_full(rows_kept[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(picked);
    Eigen::VectorXd xb = lu.solve(rhs_kept);

    Eigen::VectorXd all = Eigen::VectorXd::Zero(n_real);
    for (int j = 0; j < k; ++j) all(final_basis[j]) = std::max(0.0, xb(j));
    result.x = all.head(n);

    Eigen::VectorXd cb(k);
    for (int j = 0; j < k; ++j) cb(j) = phase2(final_basis[j]);
    Eigen::VectorXd y = lu.transpose().solve(cb);
    Eigen::VectorXd y_full = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < k; ++i) y_full(rows_kept[i]) = y(i);
    result.dual_eq = y_full.head(m_eq);
    result.price_ub = -y_full.tail(m_ub);

    // Residual check on every original row.
    const double tol = 1e-6 * scale;
    double worst = 0.0;
    if (m_eq > 0) worst = std::max(worst, (problem.a_eq * result.x - problem.b_eq).cwiseAbs().maxCoeff());
    if (m_ub > 0) {
      worst = std::max(worst, (problem.a_ub * result.x - problem.b_ub).maxCoeff());
    }
    if (!result.x.allFinite() || worst > tol) {
      std::ostringstream msg;
      msg << "lp_solve: refined basic solution violates constraints by " << worst
          << " (rows " << m << ", columns " << n << ", condition estimate "
          << (lu.rcond() > 0 ? 1.0 / lu.rcond() : std::numeric_limits<double>::infinity()) << ")";
      throw Error(ErrorCode::kNumericalFailure, msg.str());
    }
  }
  result.basis = final_basis;
  result.objective = problem.c.dot(result.x);
  result.status = LpStatus::kOptimal;
  return result;
}

}  // namespace sfd
