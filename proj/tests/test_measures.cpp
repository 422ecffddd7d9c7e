#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "sfd/error.hpp"
#include "sfd/geometry.hpp"
#include "sfd/measures.hpp"
#include "sfd/planar.hpp"
#include "sfd/rng.hpp"

using namespace sfd;

namespace {

PointSet random_planar(Rng& rng, int n) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n; ++i) rows.push_back({rng.uniform(), rng.uniform()});
  return PointSet::from_rows(rows);
}

// Smallest ball through a pair or a triple that holds every point.
double brute_radius(const PointSet& s) {
  if (s.size() == 1) return 0.0;
  double best = 1e300;
  auto holds = [&](const Eigen::Vector2d& c, double r) {
    for (const auto& p : s) {
      if ((p - Point(c)).norm() > r + 1e-12) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const Eigen::Vector2d c = 0.5 * (s[i] + s[j]);
      const double r = 0.5 * (s[i] - s[j]).norm();
      if (holds(c, r)) best = std::min(best, r);
      for (std::size_t k = j + 1; k < s.size(); ++k) {
        Eigen::Vector2d cc;
        if (!planar::circumcenter(s[i], s[j], s[k], cc)) continue;
        const double rr = (Point(cc) - s[i]).norm();
        if (holds(cc, rr)) best = std::min(best, rr);
      }
    }
  }
  return best;
}

// max over grid points of conv(s) of the distance to s.
double grid_phi(const PointSet& s, double mesh) {
  std::vector<planar::Vec2> pts;
  for (const auto& p : s) pts.emplace_back(p(0), p(1));
  const auto hull = planar::hull_polygon(pts);
  Eigen::AlignedBox2d box;
  for (const auto& p : pts) box.extend(p);
  double best = 0.0;
  for (double x = box.min().x(); x <= box.max().x() + 1e-12; x += mesh) {
    for (double y = box.min().y(); y <= box.max().y() + 1e-12; y += mesh) {
      const planar::Vec2 q(x, y);
      if (!hull.contains(q, 1e-12)) continue;
      double d = 1e300;
      for (const auto& p : pts) d = std::min(d, (p - q).squaredNorm());
      best = std::max(best, std::sqrt(d));
    }
  }
  return best;
}

bool in_triangle(const planar::Vec2& a, const planar::Vec2& b, const planar::Vec2& c, const planar::Vec2& q) {
  const double d1 = planar::cross(a, b, q), d2 = planar::cross(b, c, q), d3 = planar::cross(c, a, q);
  const bool neg = d1 < -1e-12 || d2 < -1e-12 || d3 < -1e-12;
  const bool pos = d1 > 1e-12 || d2 > 1e-12 || d3 > 1e-12;
  return !(neg && pos);
}

// Grid estimate of xi: per grid point, the smallest radius among triangles
// of s containing it.
double grid_xi(const PointSet& s, double mesh) {
  std::vector<planar::Vec2> pts;
  for (const auto& p : s) pts.emplace_back(p(0), p(1));
  struct Tri {
    int a, b, c;
    double r;
  };
  std::vector<Tri> tris;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    for (int j = i + 1; j < static_cast<int>(pts.size()); ++j) {
      for (int k = j + 1; k < static_cast<int>(pts.size()); ++k) {
        if (std::abs(planar::cross(pts[i], pts[j], pts[k])) < 1e-12) continue;
        tris.push_back({i, j, k, brute_radius(PointSet(2, {s[i], s[j], s[k]}))});
      }
    }
  }
  std::sort(tris.begin(), tris.end(), [](const Tri& x, const Tri& y) { return x.r < y.r; });
  const auto hull = planar::hull_polygon(pts);
  Eigen::AlignedBox2d box;
  for (const auto& p : pts) box.extend(p);
  double best = 0.0;
  for (double x = box.min().x(); x <= box.max().x(); x += mesh) {
    for (double y = box.min().y(); y <= box.max().y(); y += mesh) {
      const planar::Vec2 q(x, y);
      if (!hull.contains(q, -1e-9)) continue;
      for (const auto& t : tris) {
        if (in_triangle(pts[t.a], pts[t.b], pts[t.c], q)) {
          best = std::max(best, t.r);
          break;
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("enclosing ball radius") {
  CHECK(radius(PointSet::from_rows({{1, 2}})) == 0.0);
  CHECK(radius(PointSet::from_rows({{0, 0}, {0, 1}})) == doctest::Approx(0.5));
  CHECK(radius(PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}})) == doctest::Approx(std::sqrt(0.5)));
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_planar(rng, 2 + static_cast<int>(rng.below(15)));
    CHECK(radius(s) == doctest::Approx(brute_radius(s)).epsilon(1e-9));
  }
  // Higher dimension: every point inside, and at least two on the sphere.
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 30; ++i) {
      Point p(4);
      for (int d = 0; d < 4; ++d) p(d) = rng.normal();
      pts.push_back(p);
    }
    const auto b = min_enclosing_ball(pts);
    int on = 0;
    for (const auto& p : pts) {
      CHECK((p - b.center).norm() <= b.radius + 1e-9);
      if ((p - b.center).norm() >= b.radius - 1e-9) ++on;
    }
    CHECK(on >= 2);
  }
}

TEST_CASE("phi on small worked examples") {
  CHECK(phi(PointSet::from_rows({{0}, {1}})).value == doctest::Approx(0.5));
  const auto sq = PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  CHECK(phi(sq).value == doctest::Approx(std::sqrt(0.5)));
  CHECK(phi(PointSet::from_rows({{0, 0}, {2, 2}, {1, 1}})).value == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(phi(PointSet::from_rows({{0, 0, 0}, {1, 1, 1}})), Error);

  // Dense sample of a convex polygon: phi is at most the sampling mesh.
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= 50; ++i) {
    for (int j = 0; j <= 50 - i; ++j) rows.push_back({i / 50.0, j / 50.0});
  }
  CHECK(phi(PointSet::from_rows(rows)).value <= 1.0 / 50.0);
}

TEST_CASE("exact planar phi matches a grid oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_planar(rng, 4 + static_cast<int>(rng.below(12)));
    const double exact = phi(s).value;
    const double grid = grid_phi(s, 4e-3);
    CHECK(grid <= exact + 1e-9);
    CHECK(exact - grid <= 4e-3);
  }
}

TEST_CASE("voronoi route agrees with the enumeration route") {
  Rng rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_planar(rng, 61 + static_cast<int>(rng.below(20)));
    const double fast = phi(s).value;
    // Enumeration oracle: every triple circumcentre and pair midpoint inside
    // the hull, plus pairwise bisector / hull edge intersections.
    std::vector<planar::Vec2> pts;
    for (const auto& p : s) pts.emplace_back(p(0), p(1));
    const auto hull = planar::hull_polygon(pts);
    auto nearest = [&](const planar::Vec2& q) {
      double d = 1e300;
      for (const auto& p : pts) d = std::min(d, (p - q).norm());
      return d;
    };
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        for (std::size_t k = j + 1; k < pts.size(); ++k) {
          planar::Vec2 c;
          if (planar::circumcenter(pts[i], pts[j], pts[k], c) && hull.contains(c, 1e-12)) {
            best = std::max(best, nearest(c));
          }
        }
        const planar::Vec2 mid = 0.5 * (pts[i] + pts[j]);
        const planar::Vec2 dir = pts[j] - pts[i];
        for (std::size_t e = 0; e < hull.v.size(); ++e) {
          const planar::Vec2 a = hull.v[e], b = hull.v[(e + 1) % hull.v.size()];
          const double den = dir.dot(b - a);
          if (std::abs(den) < 1e-15) continue;
          const double t = dir.dot(mid - a) / den;
          if (t >= 0 && t <= 1) best = std::max(best, nearest(a + t * (b - a)));
        }
      }
    }
    CHECK(fast == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("xi values") {
  CHECK(xi(PointSet::from_rows({{3, 3}})).value == 0.0);
  CHECK(xi(PointSet::from_rows({{0}, {1}})).value == doctest::Approx(0.5));
  CHECK(xi(PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}})).value == doctest::Approx(std::sqrt(0.5)));
  // Collinear points in the plane reduce to gaps.
  CHECK(xi(PointSet::from_rows({{0, 0}, {1, 1}, {3, 3}})).value == doctest::Approx(std::sqrt(2.0)));
  // A tetrahedron's vertex set in 3-D: the whole set is needed near the centroid.
  const auto tet = PointSet::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(xi(tet).value == doctest::Approx(radius(tet)));
  std::vector<std::vector<double>> many;
  for (int i = 0; i < 41; ++i) many.push_back({static_cast<double>(i), 0.0});
  CHECK_THROWS_AS(xi(PointSet::from_rows(many)), Error);
}

TEST_CASE("xi matches a grid oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const auto s = random_planar(rng, 4 + static_cast<int>(rng.below(5)));
    const double exact = xi(s).value;
    const double grid = grid_xi(s, 5e-3);
    CHECK(grid <= exact + 1e-9);
    // The grid can miss thin regions; the gap is a radius jump, not a mesh
    // distance, so only require agreement where a grid point landed.
    CHECK(exact - grid <= 0.05);
  }
}

TEST_CASE("xi in three dimensions is bracketed by phi and the radius") {
  Rng rng(37);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 7; ++i) rows.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    const auto s = PointSet::from_rows(rows);
    MeasureOptions opts;
    opts.method = MeasureMethod::kSampled;
    opts.samples = 300;
    opts.seed = static_cast<std::uint64_t>(trial);
    const auto p = phi(s, opts);
    const double x = xi(s).value;
    CHECK(p.lower <= x + 1e-9);
    CHECK(x <= radius(s) + 1e-9);
  }
}

TEST_CASE("sampled phi brackets the exact planar value") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_planar(rng, 6 + static_cast<int>(rng.below(6)));
    MeasureOptions opts;
    opts.method = MeasureMethod::kSampled;
    opts.seed = 9;
    opts.samples = 500;
    const auto sv = phi(s, opts);
    const double exact = phi(s).value;
    CHECK(sv.lower <= exact + 1e-9);
    CHECK(sv.upper >= exact - 1e-9);
    CHECK(sv.upper - sv.lower <= 2e-3 * std::sqrt(2.0));
  }
}

TEST_CASE("gauge distances") {
  const auto a = PointSet::from_rows({{2, 0}});
  const auto d = PointSet::from_rows({{0, 0}});
  CHECK(directed_gauge_distance(a, d, GaugeBody::ball(2.0)) == doctest::Approx(1.0));
  Eigen::Matrix2d m;
  m << 1, 0, 0, 4;
  CHECK(directed_gauge_distance(PointSet::from_rows({{1, 1}}), d, GaugeBody::ellipsoid(m)) ==
        doctest::Approx(std::sqrt(1.25)));
  CHECK(directed_gauge_distance(d, PointSet::from_rows({{0, 0}, {5, 5}}), GaugeBody::ball(1)) == 0.0);
  CHECK(GaugeBody::ball(2.0).smoothness() == doctest::Approx(0.25));
  CHECK(GaugeBody::ellipsoid(m).smoothness() == doctest::Approx(1.0));
  Eigen::Matrix2d bad;
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(GaugeBody::ellipsoid(bad), Error);
}

TEST_CASE("measure relations and Claim-style properties") {
  CHECK(measure_relations_check(PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}})).ok);
  CHECK(measure_relations_check(PointSet::from_rows({{4, 4}})).ok);
  Rng rng(20);
  CHECK(measure_relations_check(random_planar(rng, 20)).ok);

  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_planar(rng, 3 + static_cast<int>(rng.below(4)));
    const auto b = random_planar(rng, 3 + static_cast<int>(rng.below(4)));
    CHECK(phi(minkowski_sum(a, b)).value <= phi(a).value + phi(b).value + 1e-9);
  }

  // xi of the points on any hull edge never exceeds xi of the whole set.
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 8; ++i) rows.push_back({std::floor(rng.uniform(0, 4)), std::floor(rng.uniform(0, 4))});
    const auto s = PointSet::from_rows(rows);
    const double whole = xi(s).value;
    const auto hull = VPolytope::hull_of(s);
    const auto& v = hull.vertices();
    for (std::size_t e = 0; e < v.size(); ++e) {
      const Point a = v[e], b = v[(e + 1) % v.size()];
      std::vector<Point> on;
      for (const auto& p : s) {
        const Eigen::Vector2d ab = b - a, ap = p - a;
        if (std::abs(ab.x() * ap.y() - ab.y() * ap.x()) < 1e-12) on.push_back(p);
      }
      CHECK(xi(PointSet(2, on)).value <= whole + 1e-9);
    }
  }
}

TEST_CASE("measure report") {
  const auto r = measure(PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
  CHECK(r.has_xi);
  CHECK(r.phi <= r.xi + r.tol);
  CHECK(r.xi <= r.rd + r.tol);
  const auto j = to_json(r);
  CHECK(j["method"] == "EXACT_2D");
  CHECK(parse_method("subset") == MeasureMethod::kSubsetEnum);
}
