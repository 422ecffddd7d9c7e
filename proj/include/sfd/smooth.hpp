#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfd/measures.hpp"
#include "sfd/point_set.hpp"

namespace sfd {

enum class SmoothFamily { kQuadratic, kQuarticDoubleWell, kCustom };

std::string family_name(SmoothFamily f);
SmoothFamily parse_family(const std::string& name);

// f(x) = 1/2 x^T Q x + q^T x              (quadratic)
// f(x) = sum_j x_j^4 - x_j^2               (double well)
// f(x) = sum_j sum_d coeffs[d] x_j^d       (custom, separable polynomial)
class SmoothFunction {
 public:
  static SmoothFunction quadratic(Eigen::MatrixXd q_mat, Eigen::VectorXd q_vec);
  static SmoothFunction quartic_double_well(int n);
  static SmoothFunction custom(int n, std::vector<double> coeffs);

  SmoothFamily family() const { return family_; }
  int dim() const { return n_; }
  bool separable() const { return family_ != SmoothFamily::kQuadratic; }
  const Eigen::MatrixXd& q_matrix() const { return q_mat_; }
  const Eigen::VectorXd& q_vector() const { return q_vec_; }
  // Per-coordinate polynomial coefficients (separable families).
  const std::vector<double>& coeffs() const { return coeffs_; }

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
  // Univariate polynomial value / derivatives for separable families.
  double poly(double t, int derivative = 0) const;

 private:
  SmoothFamily family_ = SmoothFamily::kQuadratic;
  int n_ = 0;
  Eigen::MatrixXd q_mat_;
  Eigen::VectorXd q_vec_;
  std::vector<double> coeffs_;
};

// A block {x in box : |supp x| <= s} with smooth cost f.
struct SmoothBlock {
  SmoothFunction f;
  double lipschitz = 1.0;  // L
  int sparsity = 1;        // s
  Eigen::VectorXd lower, upper;

  int dim() const { return f.dim(); }
  // Shape, sparsity and box checks; the box must contain the origin.
  void validate() const;
};

// sup over the box of the Hessian spectral norm: exact for quadratics,
// otherwise a dense per-coordinate grid doubled as a safety margin.
double estimate_smoothness(const SmoothFunction& f, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

// Hessian-norm probes at seeded random box points; throws
// SmoothnessViolated when one exceeds L.
void check_smoothness(const SmoothBlock& b, std::uint64_t seed, int probes = 200);

struct ProjectionFactorReport {
  double value = 0.0;            // min_S lambda_min(V_S V_S^T)
  double geometric_value = 0.0;  // sqrt(value)
  std::vector<int> argmin_subset;
  std::size_t subsets = 0;
};

// V = [1^T; B]; minimum over all s-column subsets, each evaluated through
// the singular values of V_S. Throws InvalidSparsity
// when s < m+1 unless allow_degenerate, CapExceeded beyond `cap` subsets.
ProjectionFactorReport projection_factor(const Eigen::MatrixXd& b, int s, bool allow_degenerate = false,
                                         std::size_t cap = 1'000'000);
nlohmann::json to_json(const ProjectionFactorReport& r);

struct HiddenBall {
  Point center;  // (x, t) layout
  double radius = 0.0;
};

// Ball of radius 1/L inside the epigraph of f touching (x, f(x)), centre
// (x - r a g, f(x) + r a) with a = 1/sqrt(|g|^2 + 1). With verify set,
// `samples` points of the ball are checked against t >= f(y) - 1e-9.
HiddenBall inscribed_ball(const SmoothBlock& b, const Point& x, bool verify = true, std::uint64_t seed = 0,
                          int samples = 500);

struct ProjectedEllipsoid {
  Point center;                // image of the ball centre under (x, t) -> (t, B x)
  Eigen::MatrixXd shape;       // Q Q^T / L^2 with Q = [1^T; B_S]
  double inscribed_radius = 0.0;  // sqrt(lambda_min(Q Q^T)) / L
  double factor_radius = 0.0;     // geometric projection factor of B at sparsity |S|, over L
  GaugeBody body() const { return GaugeBody::ellipsoid(shape); }
};

// Throws RankDeficient when lambda_min(Q Q^T) < 1e-12.
ProjectedEllipsoid projected_hidden_ellipsoid(const SmoothBlock& b, const Eigen::MatrixXd& coupling,
                                              const std::vector<int>& support, const Point& x);

struct HiddenBallBound {
  double r_star = 0.0;
  double bound = 0.0;       // sqrt(r*^2 + n beta^2 / 2) - r*
  bool has_uniform = false;  // all r_i >= r_min > 0
  double uniform_bound = 0.0;
};

// r* = sum of the radii after dropping the n largest.
HiddenBallBound hidden_ball_bound(std::vector<double> radii, int n, double beta);

// Boundary sample of {|x|^p + |y|^p <= radius^p} at equal angular steps
// theta_j = 2 pi (j + phase) / points, phase drawn from the seed.
PointSet sampled_p_ball(double p, double radius, int points, std::uint64_t seed);

// Solid p-ball membership test (for use as a ZeroRegion).
bool in_p_ball(const Eigen::VectorXd& v, double p, double radius, const Eigen::VectorXd& center);

}  // namespace sfd
