#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "sfd/error.hpp"
#include "sfd/lp.hpp"
#include "sfd/measures.hpp"
#include "sfd/planar.hpp"

namespace sfd {
namespace {

// The sup over x is attained on a relatively open, hence full-dimensional,
// uncovered region. So: take the simplices of s in increasing radius order
// and remove each from what is still uncovered; the radius at which nothing
// of positive volume remains is the answer.

struct Simplex {
  std::vector<int> idx;
  double radius;
};

std::vector<Simplex> sorted_simplices(const std::vector<Point>& orig, const std::vector<Eigen::VectorXd>& y,
                                      int d, double min_measure) {
  const int n = static_cast<int>(y.size());
  std::vector<Simplex> out;
  std::vector<int> pick(d + 1);
  // Enumerate (d+1)-subsets in lexicographic order.
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == d + 1) {
      Eigen::MatrixXd m(d, d);
      for (int j = 0; j < d; ++j) m.col(j) = y[pick[j + 1]] - y[pick[0]];
      if (std::abs(m.determinant()) <= min_measure) return;
      std::vector<Point> pts;
      for (int i : pick) pts.push_back(orig[i]);
      out.push_back({pick, min_enclosing_ball(pts).radius});
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  std::stable_sort(out.begin(), out.end(), [](const Simplex& a, const Simplex& b) { return a.radius < b.radius; });
  return out;
}

double xi_planar(const std::vector<Point>& orig, const std::vector<Eigen::VectorXd>& y) {
  using planar::Vec2;
  std::vector<Vec2> pts;
  for (const auto& p : y) pts.emplace_back(p(0), p(1));
  planar::Polygon hull = planar::hull_polygon(pts);
  double diam = 0.0;
  for (const auto& a : pts) {
    for (const auto& b : pts) diam = std::max(diam, (a - b).norm());
  }
  const double area_floor = 1e-12 * diam * diam;
  const auto simplices = sorted_simplices(orig, y, 2, area_floor);

  std::vector<planar::Polygon> pieces{hull};
  for (const auto& sx : simplices) {
    Vec2 a = pts[sx.idx[0]], b = pts[sx.idx[1]], c = pts[sx.idx[2]];
    if (planar::cross(a, b, c) < 0) std::swap(b, c);
    const Vec2 tri[3] = {a, b, c};
    Eigen::AlignedBox2d tbox;
    for (const auto& v : tri) tbox.extend(v);
    std::vector<planar::Polygon> next;
    for (auto& piece : pieces) {
      Eigen::AlignedBox2d pbox;
      for (const auto& v : piece.v) pbox.extend(v);
      if (!pbox.intersects(tbox)) {
        next.push_back(std::move(piece));
        continue;
      }
      planar::Polygon rest = std::move(piece);
      for (int e = 0; e < 3 && !rest.v.empty(); ++e) {
        const Vec2 p = tri[e];
        const Vec2 q = tri[(e + 1) % 3];
        const Vec2 normal(q.y() - p.y(), p.x() - q.x());
        const double off = normal.dot(p);
        planar::Polygon outside = rest.clipped(-normal, -off);
        if (outside.v.size() >= 3 && outside.area() > area_floor) next.push_back(std::move(outside));
        rest = rest.clipped(normal, off);
        if (rest.v.size() < 3 || rest.area() <= area_floor) rest.v.clear();
      }
    }
    pieces = std::move(next);
    if (pieces.empty()) return sx.radius;
  }
  return simplices.empty() ? 0.0 : simplices.back().radius;
}

struct HalfSpace {
  Eigen::Vector3d n;
  double c;
};

// Radius of the largest ball inside {x : n.x <= c for all}; <= 0 if empty.
double chebyshev_radius(const std::vector<HalfSpace>& hs) {
  // Variables: x+ (3), x- (3), rho.
  LpProblem lp;
  const int m = static_cast<int>(hs.size());
  lp.a_ub.resize(m, 7);
  lp.b_ub.resize(m);
  for (int i = 0; i < m; ++i) {
    lp.a_ub.row(i) << hs[i].n.transpose(), -hs[i].n.transpose(), hs[i].n.norm();
    lp.b_ub(i) = hs[i].c;
  }
  lp.a_eq.resize(0, 7);
  lp.b_eq.resize(0);
  lp.c = Eigen::VectorXd::Zero(7);
  lp.c(6) = -1.0;
  const auto r = lp_solve(lp);
  if (r.status == LpStatus::kInfeasible) return -1.0;
  if (r.status == LpStatus::kUnbounded) return std::numeric_limits<double>::infinity();
  return r.x(6);
}

double xi_spatial(const std::vector<Point>& orig, const std::vector<Eigen::VectorXd>& y) {
  const int n = static_cast<int>(y.size());
  std::vector<Eigen::Vector3d> pts;
  for (const auto& p : y) pts.emplace_back(p(0), p(1), p(2));
  double diam = 0.0;
  for (const auto& a : pts) {
    for (const auto& b : pts) diam = std::max(diam, (a - b).norm());
  }
  // Hull facets by brute force over point triples.
  std::vector<HalfSpace> hull;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        Eigen::Vector3d nrm = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        if (nrm.norm() <= 1e-12 * diam * diam) continue;
        nrm.normalize();
        const double c = nrm.dot(pts[i]);
        double mx = -1e300, mn = 1e300;
        for (const auto& p : pts) {
          mx = std::max(mx, nrm.dot(p) - c);
          mn = std::min(mn, nrm.dot(p) - c);
        }
        const double eps = 1e-10 * diam;
        if (mx <= eps) hull.push_back({nrm, c});
        else if (mn >= -eps) hull.push_back({-nrm, -c});
      }
    }
  }
  const double vol_floor = 1e-12 * diam * diam * diam;
  const double cheb_floor = 1e-9 * diam;
  const auto simplices = sorted_simplices(orig, y, 3, vol_floor);
  std::vector<std::vector<HalfSpace>> pieces{hull};
  for (const auto& sx : simplices) {
    std::vector<HalfSpace> facets;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i : sx.idx) centroid += pts[i] / 4.0;
    for (int skip = 0; skip < 4; ++skip) {
      std::vector<Eigen::Vector3d> f;
      for (int t = 0; t < 4; ++t) {
        if (t != skip) f.push_back(pts[sx.idx[t]]);
      }
      Eigen::Vector3d nrm = (f[1] - f[0]).cross(f[2] - f[0]).normalized();
      double c = nrm.dot(f[0]);
      if (nrm.dot(centroid) > c) {
        nrm = -nrm;
        c = -c;
      }
      facets.push_back({nrm, c});
    }
    std::vector<std::vector<HalfSpace>> next;
    for (auto& piece : pieces) {
      std::vector<HalfSpace> rest = piece;
      for (const auto& f : facets) {
        auto outside = rest;
        outside.push_back({-f.n, -f.c});
        if (chebyshev_radius(outside) > cheb_floor) next.push_back(std::move(outside));
        rest.push_back(f);
        if (chebyshev_radius(rest) <= cheb_floor) break;
      }
    }
    pieces = std::move(next);
    if (pieces.empty()) return sx.radius;
  }
  return simplices.empty() ? 0.0 : simplices.back().radius;
}

}  // namespace

MeasureValue xi(const PointSet& s, const MeasureOptions& opts) {
  MeasureValue out;
  out.method = MeasureMethod::kSubsetEnum;
  out.tol = 1e-9;
  const std::size_t n = s.size();
  if (n == 1) return out;
  if (n > opts.subset_cap) {
    throw Error(ErrorCode::kCapExceeded,
                "xi subset enumeration: " + std::to_string(n) + " points exceeds cap " + std::to_string(opts.subset_cap));
  }
  Point mean = Point::Zero(s.dim());
  for (const auto& p : s) mean += p;
  mean /= static_cast<double>(n);
  Eigen::MatrixXd centered(s.dim(), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) centered.col(static_cast<Eigen::Index>(j)) = s[j] - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int d = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * sv(0)) ++d;
  }
  if (d > 3) {
    throw Error(ErrorCode::kCapExceeded, "xi subset enumeration supports affine dimension <= 3, got " + std::to_string(d));
  }
  const Eigen::MatrixXd basis = svd.matrixU().leftCols(d);
  std::vector<Eigen::VectorXd> y;
  for (const auto& p : s) y.push_back(basis.transpose() * (p - mean));

  double value = 0.0;
  if (d == 1) {
    std::vector<double> xs;
    for (const auto& v : y) xs.push_back(v(0));
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) value = std::max(value, 0.5 * (xs[i] - xs[i - 1]));
  } else if (d == 2) {
    value = xi_planar(s.points(), y);
  } else if (d == 3) {
    value = xi_spatial(s.points(), y);
  }
  out.value = out.lower = out.upper = value;
  return out;
}

}  // namespace sfd
