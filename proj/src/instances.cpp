#include <algorithm>
#include <cmath>

#include "sfd/error.hpp"
#include "sfd/lagrangian.hpp"
#include "sfd/rng.hpp"

namespace sfd {

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = rng.normal();
  return a;
}

Eigen::VectorXd gaussian_vector(int n, Rng& rng) { return gaussian_matrix(n, 1, rng).col(0); }

SmoothFunction random_function(SmoothFamily family, int n, Rng& rng) {
  switch (family) {
    case SmoothFamily::kQuadratic: {
      const Eigen::MatrixXd m = gaussian_matrix(n, n, rng);
      const Eigen::MatrixXd q = 0.5 * Eigen::MatrixXd::Identity(n, n) + 0.5 * m.transpose() * m / n;
      return SmoothFunction::quadratic(0.5 * (q + q.transpose()), 0.5 * gaussian_vector(n, rng));
    }
    case SmoothFamily::kQuarticDoubleWell:
      return SmoothFunction::quartic_double_well(n);
    case SmoothFamily::kCustom: {
      // Positive leading quartic term keeps f 1-coercive.
      return SmoothFunction::custom(n, {0.0, 0.0, rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5)});
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown family");
}

}  // namespace

GeneratedInstance generate_sparse_smooth_instance(int k, int n, int m, int s, SmoothFamily family, std::uint64_t seed,
                                                  const GeneratorOptions& opts) {
  if (k <= 0 || n <= 0 || m <= 0) throw Error(ErrorCode::kInvalidArgument, "generator: k, n, m must be positive");
  if (s < m + 1 || s > n) {
    throw Error(ErrorCode::kInvalidSparsity, "generator: need m + 1 <= s <= n, got s = " + std::to_string(s));
  }
  if (!(opts.half_width > 0.0)) throw Error(ErrorCode::kInvalidArgument, "generator: box half-width must be positive");
  GeneratedInstance out;
  BlockProblem& p = out.problem;
  p.k = k;
  p.n = n;
  p.m = m;
  out.omega = std::numeric_limits<double>::infinity();
  Eigen::VectorXd usage = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < k; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    Eigen::MatrixXd b;
    double geometric = 0.0;
    for (int attempt = 1;; ++attempt) {
      if (attempt > opts.max_attempts) {
        throw Error(ErrorCode::kResampleLimit, "generator: block " + std::to_string(i) + " kept a degenerate B");
      }
      ++out.attempts;
      b = gaussian_matrix(m, n, rng);
      const auto rep = projection_factor(b, s);
      if (rep.value > opts.min_factor && rep.geometric_value >= opts.omega_floor) {
        geometric = rep.geometric_value;
        break;
      }
    }
    out.omega = std::min(out.omega, geometric);

    SmoothBlock blk{random_function(family, n, rng), 1.0, s, Eigen::VectorXd::Constant(n, -opts.half_width),
                    Eigen::VectorXd::Constant(n, opts.half_width)};
    blk.lipschitz = estimate_smoothness(blk.f, blk.lower, blk.upper);
    out.lipschitz = std::max(out.lipschitz, blk.lipschitz);

    const Eigen::VectorXd c = 0.5 * gaussian_vector(n, rng) - opts.pull * b.transpose() * Eigen::VectorXd::Ones(m);

    // Random feasible sparse point for the right-hand side.
    std::vector<int> idx(n);
    for (int j = 0; j < n; ++j) idx[j] = j;
    for (int j = n - 1; j > 0; --j) std::swap(idx[j], idx[rng.below(static_cast<std::uint64_t>(j + 1))]);
    Eigen::VectorXd xbar = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < s; ++a) xbar(idx[a]) = rng.uniform(-opts.half_width, opts.half_width);
    usage += b * xbar;

    std::vector<Point> image;
    for (const auto& x : smooth_candidates(blk, opts.grid)) {
      Point y(m + 1);
      y << blk.f.value(x) + c.dot(x), b * x;
      image.push_back(std::move(y));
    }
    out.beta = std::max(out.beta, min_enclosing_ball(image).radius);

    p.c.push_back(c);
    p.B.push_back(b);
    p.blocks.push_back({std::move(blk)});
  }
  p.b = usage + opts.tightness * usage.cwiseAbs();
  p.validate();
  return out;
}

BlockProblem generate_finite_instance(int k, int n, int m, int size, std::uint64_t seed, double tightness) {
  if (k <= 0 || n <= 0 || m <= 0 || size <= 0) throw Error(ErrorCode::kInvalidArgument, "finite generator: sizes");
  BlockProblem p;
  p.k = k;
  p.n = n;
  p.m = m;
  Eigen::VectorXd usage = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < k; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    std::vector<Point> pts;
    for (int j = 0; j < size; ++j) {
      Point x(n);
      for (int d = 0; d < n; ++d) x(d) = rng.uniform();
      pts.push_back(std::move(x));
    }
    const Eigen::MatrixXd b = gaussian_matrix(m, n, rng);
    p.c.push_back(gaussian_vector(n, rng) - b.transpose() * Eigen::VectorXd::Ones(m));
    usage += b * pts[rng.below(static_cast<std::uint64_t>(size))];
    p.B.push_back(b);
    p.blocks.push_back({PointSet(n, std::move(pts))});
  }
  p.b = usage + tightness * usage.cwiseAbs();
  p.validate();
  return p;
}

}  // namespace sfd
