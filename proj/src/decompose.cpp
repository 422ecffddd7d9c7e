#include "sfd/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sfd/error.hpp"
#include "sfd/lp.hpp"
#include "sfd/measures.hpp"
#include "sfd/parallel.hpp"

namespace sfd {
namespace {

constexpr double kSupportFloor = 1e-12;

double xi_squared(const std::vector<Point>& pts) {
  if (pts.size() <= 1) return 0.0;
  const double v = xi(PointSet(static_cast<int>(pts.front().size()), pts)).value;
  return v * v;
}

// Capped depth-first search for one point per set summing to target
// exactly (within 1e-9), pruned by the bounding box of the remaining sets.
bool exact_sum_choice(const Point& target, const std::vector<PointSet>& sets, std::vector<int>& choice) {
  const int k = static_cast<int>(sets.size());
  const int n = static_cast<int>(target.size());
  std::vector<Point> lo(k + 1, Point::Zero(n)), hi(k + 1, Point::Zero(n));
  for (int i = k - 1; i >= 0; --i) {
    Point a = sets[i][0], b = sets[i][0];
    for (const auto& p : sets[i]) {
      a = a.cwiseMin(p);
      b = b.cwiseMax(p);
    }
    lo[i] = lo[i + 1] + a;
    hi[i] = hi[i + 1] + b;
  }
  constexpr double eps = 1e-9;
  long budget = 20000;
  choice.assign(k, -1);
  std::function<bool(int, const Point&)> dfs = [&](int i, const Point& rest) {
    if (--budget < 0) return false;
    if (i == k) return rest.cwiseAbs().maxCoeff() <= eps;
    if (((rest - lo[i]).array() < -eps).any() || ((rest - hi[i]).array() > eps).any()) return false;
    for (int j = 0; j < static_cast<int>(sets[i].size()); ++j) {
      choice[i] = j;
      if (dfs(i + 1, rest - sets[i][j])) return true;
    }
    return false;
  };
  return dfs(0, target);
}

}  // namespace

double Decomposition::reconstruction_error() const {
  Point sum = Point::Zero(target.size());
  for (const auto& b : blocks) sum += b.reconstruct();
  return (sum - target).norm();
}

int Decomposition::face_dim_sum() const {
  int s = 0;
  for (int d : face_dims) s += d;
  return s;
}

Decomposition sf_decompose(const Point& target, const std::vector<PointSet>& sets) {
  if (sets.empty()) throw Error(ErrorCode::kInvalidArgument, "sf_decompose needs at least one set");
  const int n = static_cast<int>(target.size());
  const int k = static_cast<int>(sets.size());
  int total = 0;
  for (const auto& s : sets) {
    if (s.dim() != n) throw Error(ErrorCode::kDimensionMismatch, "sf_decompose: set dimension");
    total += static_cast<int>(s.size());
  }
  LpProblem lp;
  lp.a_eq = Eigen::MatrixXd::Zero(n + k, total);
  lp.b_eq.resize(n + k);
  lp.b_eq << target, Eigen::VectorXd::Ones(k);
  std::vector<int> first(k + 1, 0);
  for (int i = 0; i < k; ++i) {
    first[i + 1] = first[i] + static_cast<int>(sets[i].size());
    for (int j = 0; j < static_cast<int>(sets[i].size()); ++j) {
      lp.a_eq.col(first[i] + j).head(n) = sets[i][j];
      lp.a_eq(n + i, first[i] + j) = 1.0;
    }
  }
  lp.a_ub.resize(0, total);
  lp.b_ub.resize(0);
  lp.c = Eigen::VectorXd::Zero(total);
  const auto res = lp_solve(lp);
  if (res.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kNotInHullSum, "target is not in the hull of the Minkowski sum");
  }

  Decomposition d;
  d.target = target;
  for (int i = 0; i < k; ++i) {
    ConvexCombination c;
    double mass = 0.0;
    for (int j = 0; j < static_cast<int>(sets[i].size()); ++j) {
      const double w = res.x(first[i] + j);
      if (w > kSupportFloor) {
        c.points.push_back(sets[i][j]);
        c.weights.push_back(w);
        c.indices.push_back(j);
        mass += w;
      }
    }
    if (c.points.empty()) throw Error(ErrorCode::kNumericalFailure, "sf_decompose: empty block support");
    for (double& w : c.weights) w /= mass;
    c.target = Point::Zero(n);
    c.target = c.reconstruct();
    if (c.size() >= 2) d.fractional.push_back(i);
    d.face_dims.push_back(affine_dim(c.points));
    d.blocks.push_back(std::move(c));
  }
  if (!d.fractional.empty()) {
    // A basic solution can be fractional even when the target is itself a
    // sum of set points; prefer the integral representation when one exists.
    std::vector<int> choice;
    if (exact_sum_choice(target, sets, choice)) {
      Decomposition integral;
      integral.target = target;
      for (int i = 0; i < k; ++i) {
        ConvexCombination c;
        c.points = {sets[i][choice[i]]};
        c.weights = {1.0};
        c.indices = {choice[i]};
        c.target = c.points.front();
        integral.blocks.push_back(std::move(c));
        integral.face_dims.push_back(0);
      }
      d = std::move(integral);
    }
  }
  if (d.reconstruction_error() > 1e-8) {
    throw Error(ErrorCode::kNumericalFailure,
                "sf_decompose: reconstruction error " + std::to_string(d.reconstruction_error()));
  }
  return d;
}

Point sample_on_face(const ConvexCombination& c, Rng& rng) {
  if (c.size() == 1) return c.points.front();
  double u = rng.uniform();
  for (std::size_t j = 0; j + 1 < c.size(); ++j) {
    if (u < c.weights[j]) return c.points[j];
    u -= c.weights[j];
  }
  return c.points.back();
}

Point sample_on_face(const ConvexCombination& c, std::uint64_t seed) {
  Rng rng(seed);
  return sample_on_face(c, rng);
}

ConvexCombination min_radius_representation(const Point& x, const PointSet& s) {
  const int n = s.dim();
  const int m = static_cast<int>(s.size());
  struct Candidate {
    std::vector<int> idx;
    double r;
  };
  std::vector<Candidate> cands;
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (!pick.empty()) {
      std::vector<Point> pts;
      for (int i : pick) pts.push_back(s[i]);
      cands.push_back({pick, min_enclosing_ball(pts).radius});
    }
    if (static_cast<int>(pick.size()) == n + 1) return;
    for (int i = start; i < m; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.r < b.r; });
  for (const auto& cand : cands) {
    std::vector<Point> pts;
    for (int i : cand.idx) pts.push_back(s[i]);
    // Reject quickly when x is outside the candidate's ball.
    const auto ball = min_enclosing_ball(pts);
    if ((x - ball.center).norm() > ball.radius + 1e-9) continue;
    const PointSet sub(n, pts);
    const auto m2 = hull_membership(x, sub);
    if (!m2.inside) continue;
    ConvexCombination c = *m2.witness;
    for (auto& idx : c.indices) idx = cand.idx[idx];
    return c;
  }
  throw Error(ErrorCode::kNotInHull, "min_radius_representation: point outside the hull");
}

RoundingResult randomized_round(const Decomposition& d, const std::vector<PointSet>& sets,
                                const RoundingOptions& opts) {
  if (sets.size() != d.blocks.size()) throw Error(ErrorCode::kDimensionMismatch, "randomized_round: block count");
  std::vector<ConvexCombination> blocks = d.blocks;
  if (opts.support == RoundingSupport::kMinRadiusSimplex) {
    for (int i : d.fractional) {
      auto c = min_radius_representation(d.blocks[i].target, sets[i]);
      c.target = d.blocks[i].target;
      blocks[i] = std::move(c);
    }
  }
  const std::size_t trials = std::max<std::size_t>(1, opts.trials);
  const int k = static_cast<int>(blocks.size());
  std::vector<double> sq_err(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = Rng::stream(opts.seed, t);
    Point p = Point::Zero(d.target.size());
    for (int i = 0; i < k; ++i) p += sample_on_face(blocks[i], rng);
    sq_err[t] = (p - d.target).squaredNorm();
  });
  std::size_t best = 0;
  double mse = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    mse += sq_err[t];
    if (sq_err[t] < sq_err[best]) best = t;
  }
  RoundingResult r;
  r.trials = trials;
  r.empirical_mse = mse / static_cast<double>(trials);
  // Replay the best trial to recover its choices.
  Rng rng = Rng::stream(opts.seed, best);
  r.point = Point::Zero(d.target.size());
  for (int i = 0; i < k; ++i) {
    const Point q = sample_on_face(blocks[i], rng);
    r.point += q;
    r.choice.push_back(sets[i].find(q));
  }
  r.error_l2 = (r.point - d.target).norm();
  for (int i : d.fractional) r.bound += xi_squared(blocks[i].points);
  return r;
}

RoundingResult deterministic_round(const Decomposition& d, const std::vector<PointSet>& sets) {
  RoundingResult r;
  r.trials = 0;
  r.point = Point::Zero(d.target.size());
  for (std::size_t i = 0; i < d.blocks.size(); ++i) {
    const auto& c = d.blocks[i];
    std::size_t pick = 0;
    for (std::size_t j = 1; j < c.size(); ++j) {
      if ((c.points[j] - c.target).norm() < (c.points[pick] - c.target).norm()) pick = j;
    }
    r.point += c.points[pick];
    r.choice.push_back(sets[i].find(c.points[pick]));
  }
  r.error_l2 = (r.point - d.target).norm();
  r.empirical_mse = r.error_l2 * r.error_l2;
  for (int i : d.fractional) r.bound += xi_squared(d.blocks[i].points);
  return r;
}

PointSet face_points(const PointSet& s, const Point& x) {
  const auto hull = VPolytope::hull_of(s);
  const auto face = minimal_face(hull, x);
  std::vector<Point> verts;
  for (int i : face.vertex_indices) verts.push_back(hull.vertices()[i]);
  const PointSet fv(s.dim(), verts);
  std::vector<Point> out;
  for (const auto& p : s) {
    if (hull_membership(p, fv).inside) out.push_back(p);
  }
  return PointSet(s.dim(), std::move(out));
}

double refined_rounding_bound(const Decomposition& d, const std::vector<PointSet>& sets) {
  double sum = 0.0;
  for (int i : d.fractional) {
    const auto f = face_points(sets[i], d.blocks[i].target);
    const double v = f.size() <= 1 ? 0.0 : xi(f).value;
    sum += v * v;
  }
  return std::sqrt(sum);
}

RoundingBoundReport rounding_bound_check(const std::vector<PointSet>& sets, std::size_t samples, std::uint64_t seed,
                                      std::size_t trials, double tol) {
  if (sets.empty()) throw Error(ErrorCode::kInvalidArgument, "rounding_bound_check needs sets");
  const int n = sets.front().dim();
  RoundingBoundReport rep;
  rep.samples = samples;
  for (const auto& s : sets) {
    if (s.dim() != n) throw Error(ErrorCode::kDimensionMismatch, "rounding_bound_check: dimension");
    rep.beta = std::max(rep.beta, xi(s).value);
    rep.gamma = std::max(rep.gamma, radius(s));
  }
  rep.bound_beta = std::sqrt(static_cast<double>(n)) * rep.beta;
  rep.bound_gamma = std::sqrt(static_cast<double>(n)) * rep.gamma;
  rep.errors.resize(samples);
  rep.refined_bounds.resize(samples);
  parallel_for(samples, [&](std::size_t t) {
    Rng rng = Rng::stream(seed, t);
    // Random hull point: independent Dirichlet weights per set.
    Point x = Point::Zero(n);
    for (const auto& s : sets) {
      std::vector<double> w(s.size());
      double total = 0.0;
      for (auto& v : w) total += (v = rng.exponential());
      for (std::size_t j = 0; j < s.size(); ++j) x += (w[j] / total) * s[j];
    }
    const auto d = sf_decompose(x, sets);
    RoundingOptions ro;
    ro.trials = trials;
    ro.seed = Rng::splitmix(seed + 0x9e37 * (t + 1));
    ro.support = RoundingSupport::kMinRadiusSimplex;
    const auto r = randomized_round(d, sets, ro);
    rep.errors[t] = r.error_l2;
    rep.refined_bounds[t] = refined_rounding_bound(d, sets);
  });
  for (std::size_t t = 0; t < samples; ++t) {
    rep.max_error = std::max(rep.max_error, rep.errors[t]);
    rep.max_refined_bound = std::max(rep.max_refined_bound, rep.refined_bounds[t]);
    if (rep.errors[t] > rep.bound_beta + tol) ++rep.violations;
  }
  return rep;
}

nlohmann::json to_json(const ConvexCombination& c) {
  nlohmann::json support = nlohmann::json::array();
  for (std::size_t j = 0; j < c.size(); ++j) {
    support.push_back({{"index", c.indices.empty() ? -1 : c.indices[j]},
                       {"point", std::vector<double>(c.points[j].data(), c.points[j].data() + c.points[j].size())},
                       {"weight", c.weights[j]}});
  }
  return {{"target", std::vector<double>(c.target.data(), c.target.data() + c.target.size())}, {"support", support}};
}

nlohmann::json to_json(const Decomposition& d) {
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t i = 0; i < d.blocks.size(); ++i) {
    auto b = to_json(d.blocks[i]);
    b["blockId"] = i;
    blocks.push_back(b);
  }
  return {{"target", std::vector<double>(d.target.data(), d.target.data() + d.target.size())},
          {"blocks", blocks},
          {"fractional", d.fractional},
          {"faceDims", d.face_dims},
          {"reconstructionError", d.reconstruction_error()}};
}

nlohmann::json to_json(const RoundingResult& r) {
  return {{"point", std::vector<double>(r.point.data(), r.point.data() + r.point.size())},
          {"choice", r.choice},
          {"errorL2", r.error_l2},
          {"trials", r.trials},
          {"empiricalMSE", r.empirical_mse},
          {"bound", r.bound}};
}

}  // namespace sfd
