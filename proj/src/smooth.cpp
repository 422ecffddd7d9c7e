#include "sfd/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "sfd/error.hpp"
#include "sfd/rng.hpp"

namespace sfd {

std::string family_name(SmoothFamily f) {
  switch (f) {
    case SmoothFamily::kQuadratic: return "QUADRATIC";
    case SmoothFamily::kQuarticDoubleWell: return "QUARTIC_DOUBLE_WELL";
    case SmoothFamily::kCustom: return "CUSTOM";
  }
  return "?";
}

SmoothFamily parse_family(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c != '_' && c != '-') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s == "quadratic") return SmoothFamily::kQuadratic;
  if (s == "quartic" || s == "quarticdoublewell") return SmoothFamily::kQuarticDoubleWell;
  if (s == "custom") return SmoothFamily::kCustom;
  throw Error(ErrorCode::kInvalidArgument, "unknown smooth family '" + name + "'");
}

SmoothFunction SmoothFunction::quadratic(Eigen::MatrixXd q_mat, Eigen::VectorXd q_vec) {
  if (q_mat.rows() != q_mat.cols() || q_mat.rows() != q_vec.size() || q_vec.size() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "quadratic: Q must be n x n and q length n");
  }
  if ((q_mat - q_mat.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q_mat.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: Q must be symmetric");
  }
  SmoothFunction f;
  f.family_ = SmoothFamily::kQuadratic;
  f.n_ = static_cast<int>(q_vec.size());
  f.q_mat_ = std::move(q_mat);
  f.q_vec_ = std::move(q_vec);
  return f;
}

SmoothFunction SmoothFunction::quartic_double_well(int n) {
  SmoothFunction f = custom(n, {0.0, 0.0, -1.0, 0.0, 1.0});
  f.family_ = SmoothFamily::kQuarticDoubleWell;
  return f;
}

SmoothFunction SmoothFunction::custom(int n, std::vector<double> coeffs) {
  if (n <= 0) throw Error(ErrorCode::kInvalidArgument, "custom: dimension must be positive");
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() < 3) throw Error(ErrorCode::kInvalidArgument, "custom: polynomial degree must be at least 2");
  SmoothFunction f;
  f.family_ = SmoothFamily::kCustom;
  f.n_ = n;
  f.coeffs_ = std::move(coeffs);
  return f;
}

double SmoothFunction::poly(double t, int derivative) const {
  double v = 0.0;
  for (int d = static_cast<int>(coeffs_.size()) - 1; d >= derivative; --d) {
    double c = coeffs_[d];
    for (int j = 0; j < derivative; ++j) c *= (d - j);
    v = v * t + c;
  }
  return v;
}

double SmoothFunction::value(const Eigen::VectorXd& x) const {
  if (family_ == SmoothFamily::kQuadratic) return 0.5 * x.dot(q_mat_ * x) + q_vec_.dot(x);
  double v = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) v += poly(x(j));
  return v;
}

Eigen::VectorXd SmoothFunction::gradient(const Eigen::VectorXd& x) const {
  if (family_ == SmoothFamily::kQuadratic) return q_mat_ * x + q_vec_;
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) g(j) = poly(x(j), 1);
  return g;
}

Eigen::MatrixXd SmoothFunction::hessian(const Eigen::VectorXd& x) const {
  if (family_ == SmoothFamily::kQuadratic) return q_mat_;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) h(j, j) = poly(x(j), 2);
  return h;
}

void SmoothBlock::validate() const {
  const int n = dim();
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw Error(ErrorCode::kInvalidArgument, "smooth block: L must be positive");
  }
  if (sparsity < 1 || sparsity > n) {
    throw Error(ErrorCode::kInvalidSparsity, "smooth block: sparsity must lie in [1, n]");
  }
  if (lower.size() != n || upper.size() != n) throw Error(ErrorCode::kDimensionMismatch, "smooth block: box size");
  if ((lower.array() > 0.0).any() || (upper.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "smooth block: box must contain the origin");
  }
}

double estimate_smoothness(const SmoothFunction& f, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (f.family() == SmoothFamily::kQuadratic) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.q_matrix());
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Diagonal Hessian: its norm is the largest |p''| over the coordinates.
  constexpr int kGrid = 2001;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    for (int g = 0; g < kGrid; ++g) {
      const double t = lower(j) + (upper(j) - lower(j)) * g / (kGrid - 1);
      worst = std::max(worst, std::abs(f.poly(t, 2)));
    }
  }
  return 2.0 * worst;
}

void check_smoothness(const SmoothBlock& b, std::uint64_t seed, int probes) {
  Rng rng(seed);
  for (int k = 0; k < probes; ++k) {
    Eigen::VectorXd x(b.dim());
    for (int j = 0; j < b.dim(); ++j) x(j) = rng.uniform(b.lower(j), b.upper(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.f.hessian(x));
    const double h = es.eigenvalues().cwiseAbs().maxCoeff();
    if (h > b.lipschitz * (1.0 + 1e-12)) {
      throw Error(ErrorCode::kSmoothnessViolated,
                  "Hessian norm " + std::to_string(h) + " exceeds L = " + std::to_string(b.lipschitz));
    }
  }
}

ProjectionFactorReport projection_factor(const Eigen::MatrixXd& b, int s, bool allow_degenerate, std::size_t cap) {
  const int m = static_cast<int>(b.rows());
  const int n = static_cast<int>(b.cols());
  if (s < 1 || s > n) throw Error(ErrorCode::kInvalidSparsity, "projection_factor: s must lie in [1, n]");
  ProjectionFactorReport rep;
  if (s < m + 1 && !allow_degenerate) {
    throw Error(ErrorCode::kInvalidSparsity, "projection_factor: s = " + std::to_string(s) + " < m + 1 = " +
                                                 std::to_string(m + 1));
  }
  // C(n, s) with overflow guard.
  double count = 1.0;
  for (int i = 0; i < s; ++i) count = count * (n - i) / (i + 1);
  if (count > static_cast<double>(cap)) {
    throw Error(ErrorCode::kCapExceeded, "projection_factor: C(n, s) exceeds the subset cap");
  }
  Eigen::MatrixXd v(m + 1, n);
  v.row(0).setOnes();
  v.bottomRows(m) = b;

  rep.value = std::numeric_limits<double>::infinity();
  std::vector<int> pick(s);
  for (int i = 0; i < s; ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd vs(m + 1, s);
    for (int j = 0; j < s; ++j) vs.col(j) = v.col(pick[j]);
    // lambda_min(V_S V_S^T) as the squared (m+1)-th singular value of V_S,
    // which keeps tiny factors above roundoff.
    double lam = 0.0;
    if (s >= m + 1) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(vs);
      lam = svd.singularValues()(m) * svd.singularValues()(m);
    }
    ++rep.subsets;
    if (lam < rep.value) {
      rep.value = lam;
      rep.argmin_subset = pick;
    }
    int i = s - 1;
    while (i >= 0 && pick[i] == n - s + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < s; ++j) pick[j] = pick[j - 1] + 1;
  }
  rep.geometric_value = std::sqrt(rep.value);
  return rep;
}

nlohmann::json to_json(const ProjectionFactorReport& r) {
  return {{"value", r.value},
          {"geometricValue", r.geometric_value},
          {"argminSubset", r.argmin_subset},
          {"subsets", r.subsets}};
}

HiddenBall inscribed_ball(const SmoothBlock& b, const Point& x, bool verify, std::uint64_t seed, int samples) {
  b.validate();
  const int n = b.dim();
  if (x.size() != n) throw Error(ErrorCode::kDimensionMismatch, "inscribed_ball: point dimension");
  if ((x.array() < b.lower.array() - 1e-12).any() || (x.array() > b.upper.array() + 1e-12).any()) {
    throw Error(ErrorCode::kInvalidArgument, "inscribed_ball: point outside the box");
  }
  const Eigen::VectorXd g = b.f.gradient(x);
  const double r = 1.0 / b.lipschitz;
  const double alpha = 1.0 / std::sqrt(g.squaredNorm() + 1.0);
  HiddenBall ball;
  ball.radius = r;
  ball.center.resize(n + 1);
  ball.center.head(n) = x - r * alpha * g;
  ball.center(n) = b.f.value(x) + r * alpha;
  if (!verify) return ball;

  Rng rng(seed);
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd u(n + 1);
    for (int j = 0; j <= n; ++j) u(j) = rng.normal();
    u.normalize();
    // Half on the sphere (the binding part), half spread through the ball.
    const double rho = (k % 2 == 0) ? 1.0 : std::pow(rng.uniform(), 1.0 / (n + 1));
    const Eigen::VectorXd p = ball.center + r * rho * u;
    const double fy = b.f.value(p.head(n));
    if (p(n) < fy - 1e-9) {
      throw Error(ErrorCode::kSmoothnessViolated, "inscribed ball leaves the epigraph by " +
                                                      std::to_string(fy - p(n)) + "; L is too small for the box");
    }
  }
  return ball;
}

ProjectedEllipsoid projected_hidden_ellipsoid(const SmoothBlock& b, const Eigen::MatrixXd& coupling,
                                              const std::vector<int>& support, const Point& x) {
  b.validate();
  const int n = b.dim();
  const int m = static_cast<int>(coupling.rows());
  const int s = static_cast<int>(support.size());
  if (coupling.cols() != n || x.size() != n) throw Error(ErrorCode::kDimensionMismatch, "projected ellipsoid");
  if (s != b.sparsity) throw Error(ErrorCode::kInvalidSparsity, "projected ellipsoid: |support| must equal s");
  std::vector<char> in(n, 0);
  for (int j : support) {
    if (j < 0 || j >= n || in[j]) throw Error(ErrorCode::kInvalidArgument, "projected ellipsoid: bad support");
    in[j] = 1;
  }
  for (int j = 0; j < n; ++j) {
    if (!in[j] && x(j) != 0.0) throw Error(ErrorCode::kInvalidArgument, "x is not supported on the support set");
  }
  Eigen::MatrixXd q(m + 1, s);
  q.row(0).setOnes();
  for (int j = 0; j < s; ++j) q.bottomRows(m).col(j) = coupling.col(support[j]);
  const Eigen::MatrixXd gram = q * q.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double lam = es.eigenvalues()(0);
  if (lam < 1e-12) throw Error(ErrorCode::kRankDeficient, "projected ellipsoid: Q Q^T is singular");
  const double inv_l = 1.0 / b.lipschitz;

  // Ball of the restriction of f to the support coordinates.
  const Eigen::VectorXd g = b.f.gradient(x);
  Eigen::VectorXd gs(s), zs(s);
  for (int j = 0; j < s; ++j) {
    gs(j) = g(support[j]);
    zs(j) = x(support[j]);
  }
  const double alpha = 1.0 / std::sqrt(gs.squaredNorm() + 1.0);
  const Eigen::VectorXd zc = zs - inv_l * alpha * gs;
  const double tc = b.f.value(x) + inv_l * alpha;

  ProjectedEllipsoid out;
  out.center.resize(m + 1);
  out.center(0) = tc;
  out.center.tail(m) = q.bottomRows(m) * zc;
  out.shape = gram * (inv_l * inv_l);
  out.inscribed_radius = std::sqrt(lam) * inv_l;
  out.factor_radius = projection_factor(coupling, s, true).geometric_value * inv_l;
  if (out.inscribed_radius < out.factor_radius - 1e-12) {
    throw Error(ErrorCode::kNumericalFailure, "projected ellipsoid radius below the projection factor bound");
  }
  return out;
}

HiddenBallBound hidden_ball_bound(std::vector<double> radii, int n, double beta) {
  if (beta < 0.0) throw Error(ErrorCode::kInvalidArgument, "hidden_ball_bound: beta must be nonnegative");
  if (n < 0 || static_cast<std::size_t>(n) > radii.size()) {
    throw Error(ErrorCode::kInvalidArgument, "hidden_ball_bound: need at least n radii");
  }
  for (double r : radii) {
    if (r < 0.0) throw Error(ErrorCode::kInvalidArgument, "hidden_ball_bound: radii must be nonnegative");
  }
  std::sort(radii.begin(), radii.end(), std::greater<>());
  HiddenBallBound out;
  for (std::size_t i = static_cast<std::size_t>(n); i < radii.size(); ++i) out.r_star += radii[i];
  const double half = 0.5 * n * beta * beta;
  // sqrt(r^2 + h) - r written without cancellation.
  auto excess = [half](double r) { return half == 0.0 ? 0.0 : half / (std::sqrt(r * r + half) + r); };
  out.bound = excess(out.r_star);
  const double r_min = radii.empty() ? 0.0 : radii.back();
  if (r_min > 0.0) {
    out.has_uniform = true;
    out.uniform_bound = excess(static_cast<double>(radii.size() - n) * r_min);
  }
  return out;
}

PointSet sampled_p_ball(double p, double radius, int points, std::uint64_t seed) {
  if (!(p >= 1.0) || !(radius > 0.0) || points < 4) {
    throw Error(ErrorCode::kInvalidArgument, "sampled_p_ball: need p >= 1, radius > 0, points >= 4");
  }
  Rng rng(seed);
  const double phase = rng.uniform();
  std::vector<Point> pts;
  pts.reserve(points);
  for (int j = 0; j < points; ++j) {
    const double th = 2.0 * std::numbers::pi * (j + phase) / points;
    const double c = std::cos(th), s = std::sin(th);
    const double r = radius / std::pow(std::pow(std::abs(c), p) + std::pow(std::abs(s), p), 1.0 / p);
    pts.push_back(Eigen::Vector2d(r * c, r * s));
  }
  return PointSet(2, std::move(pts));
}

bool in_p_ball(const Eigen::VectorXd& v, double p, double radius, const Eigen::VectorXd& center) {
  const Eigen::VectorXd d = v - center;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) acc += std::pow(std::abs(d(i)), p);
  return std::pow(acc, 1.0 / p) <= radius;
}

}  // namespace sfd
