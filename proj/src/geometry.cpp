#include "sfd/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "sfd/error.hpp"
#include "sfd/lp.hpp"
#include "sfd/planar.hpp"

namespace sfd {
namespace {

constexpr double kWeightFloor = 1e-12;

// Equality system [P; 1^T] lambda = [x; 1].
LpProblem membership_lp(const Point& x, const std::vector<Point>& pts) {
  const int n = static_cast<int>(x.size());
  const int k = static_cast<int>(pts.size());
  LpProblem lp;
  lp.a_eq.resize(n + 1, k);
  for (int j = 0; j < k; ++j) {
    lp.a_eq.col(j).head(n) = pts[j];
    lp.a_eq(n, j) = 1.0;
  }
  lp.b_eq.resize(n + 1);
  lp.b_eq.head(n) = x;
  lp.b_eq(n) = 1.0;
  lp.a_ub.resize(0, k);
  lp.b_ub.resize(0);
  lp.c = Eigen::VectorXd::Zero(k);
  return lp;
}

ConvexCombination combination_from_weights(const Point& target, const std::vector<Point>& pts,
                                           const Eigen::VectorXd& w) {
  ConvexCombination c;
  c.target = target;
  double total = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) > kWeightFloor) total += w(j);
  }
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) > kWeightFloor) {
      c.points.push_back(pts[j]);
      c.weights.push_back(w(j) / total);
      c.indices.push_back(static_cast<int>(j));
    }
  }
  return c;
}

bool in_hull_of_others(const std::vector<Point>& pts, std::size_t skip) {
  std::vector<Point> rest;
  rest.reserve(pts.size() - 1);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j != skip) rest.push_back(pts[j]);
  }
  if (rest.empty()) return false;
  return lp_solve(membership_lp(pts[skip], rest)).status == LpStatus::kOptimal;
}

}  // namespace

Point ConvexCombination::reconstruct() const {
  Point r = Point::Zero(target.size());
  for (std::size_t j = 0; j < points.size(); ++j) r += weights[j] * points[j];
  return r;
}

double ConvexCombination::reconstruction_error() const {
  if (points.empty()) return std::numeric_limits<double>::infinity();
  return (reconstruct() - target).cwiseAbs().maxCoeff();
}

bool ConvexCombination::valid() const {
  if (points.empty() || points.size() != weights.size()) return false;
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || w > 1.0 + 1e-12) return false;
    sum += w;
  }
  return std::abs(sum - 1.0) <= 1e-10 && reconstruction_error() <= 1e-8;
}

Membership hull_membership(const Point& x, const PointSet& s) {
  if (x.size() != s.dim()) throw Error(ErrorCode::kDimensionMismatch, "hull_membership");
  const int at = s.find(x);
  if (at >= 0) {
    ConvexCombination c;
    c.target = x;
    c.points = {s[at]};
    c.weights = {1.0};
    c.indices = {at};
    return {true, c};
  }
  const auto res = lp_solve(membership_lp(x, s.points()));
  if (res.status != LpStatus::kOptimal) return {false, std::nullopt};
  return {true, combination_from_weights(x, s.points(), res.x)};
}

ConvexCombination caratheodory_reduce(const ConvexCombination& input) {
  ConvexCombination c = input;
  const int n = static_cast<int>(c.target.size());
  if (c.indices.size() != c.points.size()) c.indices.assign(c.points.size(), -1);
  while (static_cast<int>(c.points.size()) > n + 1) {
    const int k = static_cast<int>(c.points.size());
    Eigen::MatrixXd m(n + 1, k);
    for (int j = 0; j < k; ++j) {
      m.col(j).head(n) = c.points[j];
      m(n, j) = 1.0;
    }
    // Affine dependency: right singular vector of the smallest singular value.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    Eigen::VectorXd v = svd.matrixV().col(k - 1);
    if (v.maxCoeff() <= 0.0) v = -v;
    double step = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (int j = 0; j < k; ++j) {
      if (v(j) > 1e-14) {
        const double t = c.weights[j] / v(j);
        if (t < step) {
          step = t;
          leave = j;
        }
      }
    }
    ConvexCombination next;
    next.target = c.target;
    for (int j = 0; j < k; ++j) {
      const double w = (j == leave) ? 0.0 : c.weights[j] - step * v(j);
      if (w > kWeightFloor) {
        next.points.push_back(c.points[j]);
        next.weights.push_back(w);
        next.indices.push_back(c.indices[j]);
      }
    }
    c = std::move(next);
  }
  double total = 0.0;
  for (double w : c.weights) total += w;
  for (double& w : c.weights) w /= total;
  return c;
}

int affine_dim(const std::vector<Point>& points) {
  if (points.size() <= 1) return 0;
  const int n = static_cast<int>(points.front().size());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(points.size()) - 1);
  for (std::size_t j = 1; j < points.size(); ++j) {
    m.col(static_cast<Eigen::Index>(j) - 1) = points[j] - points[0];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * sv(0)) ++rank;
  }
  return rank;
}

int affine_dim(const PointSet& s) { return affine_dim(s.points()); }

VPolytope::VPolytope(PointSet vertices) : vertices_(std::move(vertices)) {
  for (std::size_t j = 0; j < vertices_.size(); ++j) {
    if (in_hull_of_others(vertices_.points(), j)) {
      throw Error(ErrorCode::kInvalidArgument, "VPolytope vertex " + std::to_string(j) + " is not extreme");
    }
  }
}

VPolytope VPolytope::hull_of(const PointSet& s) {
  std::vector<Point> kept;
  if (s.dim() == 2) {
    std::vector<planar::Vec2> pts;
    for (const auto& p : s) pts.emplace_back(p(0), p(1));
    for (int i : planar::convex_hull(pts)) kept.push_back(s[i]);
  } else if (s.dim() == 1) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t j = 1; j < s.size(); ++j) {
      if (s[j](0) < s[lo](0)) lo = j;
      if (s[j](0) > s[hi](0)) hi = j;
    }
    kept.push_back(s[lo]);
    if (hi != lo) kept.push_back(s[hi]);
  } else {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!in_hull_of_others(s.points(), j)) kept.push_back(s[j]);
    }
  }
  return VPolytope(PointSet(s.dim(), std::move(kept)), Trusted{});
}

FaceDescriptor minimal_face(const VPolytope& p, const Point& x) {
  const auto& verts = p.vertices();
  if (x.size() != verts.dim()) throw Error(ErrorCode::kDimensionMismatch, "minimal_face");
  LpProblem lp = membership_lp(x, verts.points());
  const auto feasible = lp_solve(lp);
  if (feasible.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kNotInHull, "minimal_face: point outside the polytope");
  }
  const int k = static_cast<int>(verts.size());
  std::vector<char> in_face(k, 0);
  auto absorb = [&](const Eigen::VectorXd& w) {
    for (int j = 0; j < k; ++j) {
      if (w(j) >= kFaceWeightEpsilon) in_face[j] = 1;
    }
  };
  absorb(feasible.x);
  for (int v = 0; v < k; ++v) {
    if (in_face[v]) continue;
    lp.c = Eigen::VectorXd::Zero(k);
    lp.c(v) = -1.0;
    const auto res = lp_solve(lp);
    if (res.status == LpStatus::kOptimal && res.x(v) >= kFaceWeightEpsilon) absorb(res.x);
  }
  FaceDescriptor face;
  std::vector<Point> face_points;
  for (int j = 0; j < k; ++j) {
    if (in_face[j]) {
      face.vertex_indices.push_back(j);
      face_points.push_back(verts[j]);
    }
  }
  face.dim = affine_dim(face_points);
  return face;
}

PointSet minkowski_sum(const PointSet& a, const PointSet& b, std::size_t cap) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "minkowski_sum");
  if (a.size() > cap / std::max<std::size_t>(1, b.size())) {
    throw Error(ErrorCode::kCapExceeded, "minkowski_sum: " + std::to_string(a.size()) + " x " +
                                             std::to_string(b.size()) + " exceeds cap " + std::to_string(cap));
  }
  std::vector<Point> pts;
  pts.reserve(a.size() * b.size());
  for (const auto& p : a) {
    for (const auto& q : b) pts.push_back(p + q);
  }
  return PointSet(a.dim(), std::move(pts));
}

PointSet minkowski_sum(const std::vector<PointSet>& sets, std::size_t cap) {
  if (sets.empty()) throw Error(ErrorCode::kInvalidArgument, "minkowski_sum of no sets");
  PointSet acc = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) acc = minkowski_sum(acc, sets[i], cap);
  return acc;
}

}  // namespace sfd
