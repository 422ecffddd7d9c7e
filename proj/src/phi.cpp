#include <boost/polygon/voronoi.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "sfd/error.hpp"
#include "sfd/kdtree.hpp"
#include "sfd/lp.hpp"
#include "sfd/measures.hpp"
#include "sfd/planar.hpp"
#include "sfd/rng.hpp"

namespace sfd {
namespace {

using planar::Vec2;

// Small sets enumerate every triple and pair; larger ones take the
// circumcentres from a Voronoi diagram.
constexpr std::size_t kBruteForceLimit = 60;

double max_gap_half(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double g = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) g = std::max(g, xs[i] - xs[i - 1]);
  return 0.5 * g;
}

// Interior Voronoi vertices of the sites, as circumcentres of their
// generating sites in the original (unquantized) coordinates.
std::vector<Vec2> voronoi_vertices(const std::vector<Vec2>& pts) {
  namespace bp = boost::polygon;
  double lo_x = pts[0].x(), hi_x = lo_x, lo_y = pts[0].y(), hi_y = lo_y;
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p.x());
    hi_x = std::max(hi_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_y = std::max(hi_y, p.y());
  }
  const double half = 0.5 * std::max(hi_x - lo_x, hi_y - lo_y);
  const double mx = 0.5 * (lo_x + hi_x), my = 0.5 * (lo_y + hi_y);
  const double scale = half > 0 ? static_cast<double>(1 << 29) / half : 1.0;

  std::vector<bp::point_data<int>> sites;
  std::vector<int> source;
  std::map<std::pair<int, int>, int> seen;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const int qx = static_cast<int>(std::lround((pts[i].x() - mx) * scale));
    const int qy = static_cast<int>(std::lround((pts[i].y() - my) * scale));
    if (seen.emplace(std::make_pair(qx, qy), i).second) {
      sites.emplace_back(qx, qy);
      source.push_back(i);
    }
  }
  bp::voronoi_diagram<double> vd;
  bp::construct_voronoi(sites.begin(), sites.end(), &vd);

  std::vector<Vec2> out;
  out.reserve(vd.vertices().size());
  for (const auto& v : vd.vertices()) {
    std::vector<int> gen;
    const auto* start = v.incident_edge();
    const auto* e = start;
    do {
      gen.push_back(source[e->cell()->source_index()]);
      e = e->rot_next();
    } while (e != start && gen.size() < 8);
    Vec2 c;
    bool found = false;
    for (std::size_t a = 0; a + 2 < gen.size() && !found; ++a) {
      found = planar::circumcenter(pts[gen[a]], pts[gen[a + 1]], pts[gen[a + 2]], c);
    }
    if (!found) c = Vec2(v.x() / scale + mx, v.y() / scale + my);
    out.push_back(c);
  }
  return out;
}

// Breakpoints of min_p |u + t e - p|^2 over t in (0, len): the lower
// envelope of the lines t -> -2 a_p t + b_p.
std::vector<double> edge_breakpoints(const Vec2& u, const Vec2& e, double len, const std::vector<Vec2>& pts) {
  struct Line {
    double slope, icept;
  };
  std::vector<Line> lines;
  const double reach = 0.5 * len * (1.0 + 1e-9) + 1e-12;
  for (const auto& p : pts) {
    const Vec2 d = p - u;
    const double a = d.dot(e);
    // Distance from p to the segment; sites beyond len/2 never win because
    // both endpoints are sites.
    const double t = std::clamp(a, 0.0, len);
    if ((u + t * e - p).norm() > reach) continue;
    lines.push_back({-2.0 * a, d.squaredNorm()});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
    if (x.slope != y.slope) return x.slope > y.slope;
    return x.icept < y.icept;
  });
  std::vector<Line> env;
  auto bad = [](const Line& l1, const Line& l2, const Line& l3) {
    // l2 never strictly below both neighbours.
    return (l3.icept - l1.icept) * (l1.slope - l2.slope) <= (l2.icept - l1.icept) * (l1.slope - l3.slope);
  };
  for (const auto& l : lines) {
    if (!env.empty() && env.back().slope == l.slope) continue;
    while (env.size() >= 2 && bad(env[env.size() - 2], env.back(), l)) env.pop_back();
    env.push_back(l);
  }
  std::vector<double> ts;
  for (std::size_t i = 0; i + 1 < env.size(); ++i) {
    const double t = (env[i + 1].icept - env[i].icept) / (env[i].slope - env[i + 1].slope);
    if (t > 0.0 && t < len) ts.push_back(t);
  }
  return ts;
}

MeasureValue phi_exact_2d(const PointSet& s, const ZeroRegion& zero) {
  MeasureValue out;
  out.method = MeasureMethod::kExact2D;
  out.tol = 1e-9;
  const std::size_t n = s.size();
  if (n == 1) return out;
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (const auto& p : s) pts.emplace_back(p(0), p(1));

  const auto hull_idx = planar::convex_hull(pts);
  if (hull_idx.size() <= 2) {
    const Vec2 a = pts[hull_idx.front()];
    const Vec2 dir = (pts[hull_idx.back()] - a).normalized();
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back((p - a).dot(dir));
    out.value = out.lower = out.upper = max_gap_half(std::move(xs));
    return out;
  }
  planar::Polygon hull;
  for (int i : hull_idx) hull.v.push_back(pts[i]);
  double diam = 0.0;
  for (const auto& p : hull.v) diam = std::max(diam, (p - hull.v[0]).norm());
  const double inside_tol = 1e-12 * std::max(1.0, diam);

  const KdTree tree(s.matrix());
  double best = 0.0;
  std::size_t evaluated = 0;
  auto consider = [&](const Vec2& c, bool on_hull) {
    if (!on_hull && !hull.contains(c, inside_tol)) return;
    const Point q = Eigen::Vector2d(c);
    if (zero && zero(q)) return;
    ++evaluated;
    best = std::max(best, tree.nearest(q).distance);
  };

  if (n <= kBruteForceLimit) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        consider(0.5 * (pts[i] + pts[j]), false);
        for (std::size_t k = j + 1; k < n; ++k) {
          Vec2 c;
          if (planar::circumcenter(pts[i], pts[j], pts[k], c)) consider(c, false);
        }
      }
    }
  } else {
    for (const auto& c : voronoi_vertices(pts)) consider(c, false);
  }

  for (std::size_t i = 0; i < hull.v.size(); ++i) {
    const Vec2 u = hull.v[i];
    const Vec2 w = hull.v[(i + 1) % hull.v.size()];
    const double len = (w - u).norm();
    const Vec2 e = (w - u) / len;
    for (double t : edge_breakpoints(u, e, len, pts)) consider(u + t * e, true);
  }
  out.value = out.lower = out.upper = best;
  out.sample_count = evaluated;
  return out;
}

// conv(sum of summands) through its weight variables.
class FactoredHull {
 public:
  explicit FactoredHull(const std::vector<PointSet>& summands) {
    dim_ = summands.front().dim();
    for (const auto& s : summands) {
      if (s.dim() != dim_) throw Error(ErrorCode::kDimensionMismatch, "summand dimensions differ");
      total_ += static_cast<int>(s.size());
    }
    k_ = static_cast<int>(summands.size());
    gen_ = Eigen::MatrixXd(dim_, total_);
    conv_ = Eigen::MatrixXd::Zero(k_, total_);
    centroid_ = Point::Zero(dim_);
    int col = 0;
    for (int i = 0; i < k_; ++i) {
      const auto& s = summands[i];
      Point mean = Point::Zero(dim_);
      for (const auto& p : s) {
        gen_.col(col) = p;
        conv_(i, col) = 1.0;
        mean += p;
        ++col;
      }
      centroid_ += mean / static_cast<double>(s.size());
    }
  }

  const Point& centroid() const { return centroid_; }

  bool contains(const Point& x) const {
    LpProblem lp;
    lp.a_eq.resize(dim_ + k_, total_);
    lp.a_eq << gen_, conv_;
    lp.b_eq.resize(dim_ + k_);
    lp.b_eq << x, Eigen::VectorXd::Ones(k_);
    lp.a_ub.resize(0, total_);
    lp.b_ub.resize(0);
    lp.c = Eigen::VectorXd::Zero(total_);
    return lp_solve(lp).status == LpStatus::kOptimal;
  }

  bool meets_box(const Point& lo, const Point& hi) const {
    LpProblem lp;
    lp.a_eq = conv_;
    lp.b_eq = Eigen::VectorXd::Ones(k_);
    lp.a_ub.resize(2 * dim_, total_);
    lp.a_ub << gen_, -gen_;
    lp.b_ub.resize(2 * dim_);
    lp.b_ub << hi, -lo;
    lp.c = Eigen::VectorXd::Zero(total_);
    return lp_solve(lp).status == LpStatus::kOptimal;
  }

  // Largest t >= 0 with x + t u in the hull (x assumed inside).
  double reach(const Point& x, const Point& u) const {
    LpProblem lp;
    lp.a_eq.resize(dim_ + k_, total_ + 1);
    lp.a_eq << gen_, -u, conv_, Eigen::VectorXd::Zero(k_);
    lp.b_eq.resize(dim_ + k_);
    lp.b_eq << x, Eigen::VectorXd::Ones(k_);
    lp.a_ub.resize(0, total_ + 1);
    lp.b_ub.resize(0);
    lp.c = Eigen::VectorXd::Zero(total_ + 1);
    lp.c(total_) = -1.0;
    const auto r = lp_solve(lp);
    if (r.status != LpStatus::kOptimal) return 0.0;
    return r.x(total_);
  }

 private:
  int dim_ = 0, k_ = 0, total_ = 0;
  Eigen::MatrixXd gen_, conv_;
  Point centroid_;
};

}  // namespace

MeasureValue phi_sampled(const PointSet& s, const std::vector<PointSet>& summands, const MeasureOptions& opts) {
  MeasureValue out;
  out.method = MeasureMethod::kSampled;
  if (s.size() == 1) return out;
  const int d = s.dim();
  const FactoredHull hull(summands);
  const KdTree tree(s.matrix());
  auto dist = [&](const Point& q) {
    if (opts.zero_region && opts.zero_region(q)) return 0.0;
    return tree.nearest(q).distance;
  };

  Point lo = s[0], hi = s[0];
  for (const auto& p : s) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diam = (hi - lo).norm();

  // Hit-and-run from the centroid of the summand centroids.
  double lower = 0.0;
  Rng rng(opts.seed);
  Point x = hull.centroid();
  lower = std::max(lower, dist(x));
  for (std::size_t step = 0; step < opts.samples; ++step) {
    Point u(d);
    for (int i = 0; i < d; ++i) u(i) = rng.normal();
    if (u.norm() == 0.0) continue;
    u.normalize();
    const double fwd = hull.reach(x, u);
    const double back = hull.reach(x, -u);
    x = x + rng.uniform(-back, fwd) * u;
    lower = std::max(lower, dist(x));
  }

  // Branch and bound over boxes: dist is 1-Lipschitz, so dist(centre) plus
  // the half-diagonal bounds it on the box.
  struct Box {
    Point lo, hi;
    double bound;
    bool operator<(const Box& o) const { return bound < o.bound; }
  };
  auto make_box = [&](Point a, Point b) {
    // Distance to the sample points only: the zero region never raises it,
    // so the bound stays valid when one is given.
    const Point c = 0.5 * (a + b);
    const double bound = tree.nearest(c).distance + 0.5 * (b - a).norm();
    return Box{std::move(a), std::move(b), bound};
  };
  std::priority_queue<Box> queue;
  queue.push(make_box(lo, hi));
  std::size_t boxes = 0;
  const double target = opts.gap_tol * std::max(diam, 1e-300);
  double upper = lower;
  while (!queue.empty()) {
    Box box = queue.top();
    if (box.bound <= lower + target) {
      upper = std::max(lower, box.bound);
      break;
    }
    if (boxes >= opts.max_boxes) {
      upper = box.bound;
      break;
    }
    queue.pop();
    ++boxes;
    if (!hull.meets_box(box.lo, box.hi)) continue;
    const Point c = 0.5 * (box.lo + box.hi);
    if (hull.contains(c)) lower = std::max(lower, dist(c));
    int axis = 0;
    (box.hi - box.lo).maxCoeff(&axis);
    Point mid_hi = box.hi, mid_lo = box.lo;
    mid_hi(axis) = c(axis);
    mid_lo(axis) = c(axis);
    queue.push(make_box(box.lo, mid_hi));
    queue.push(make_box(mid_lo, box.hi));
  }
  if (queue.empty()) upper = lower;
  out.lower = lower;
  out.upper = std::max(upper, lower);
  out.value = out.upper;
  out.tol = out.upper - out.lower;
  out.sample_count = opts.samples + boxes;
  return out;
}

MeasureValue phi(const PointSet& s, const MeasureOptions& opts) {
  if (s.dim() == 1) {
    std::vector<double> xs;
    for (const auto& p : s) xs.push_back(p(0));
    MeasureValue out;
    out.method = opts.method;
    out.value = out.lower = out.upper = max_gap_half(std::move(xs));
    out.tol = 1e-12;
    return out;
  }
  switch (opts.method) {
    case MeasureMethod::kExact2D:
      if (s.dim() != 2) {
        throw Error(ErrorCode::kUnsupportedDim, "exact2d phi needs dimension 2, got " + std::to_string(s.dim()));
      }
      return phi_exact_2d(s, opts.zero_region);
    case MeasureMethod::kSubsetEnum:
      if (s.dim() == 2) {
        auto v = phi_exact_2d(s, opts.zero_region);
        v.method = MeasureMethod::kSubsetEnum;
        return v;
      }
      [[fallthrough]];
    case MeasureMethod::kSampled:
      break;
  }
  auto v = phi_sampled(s, {s}, opts);
  v.method = opts.method;
  return v;
}

}  // namespace sfd
