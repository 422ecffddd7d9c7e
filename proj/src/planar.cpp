#include "sfd/planar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sfd::planar {

std::vector<int> convex_hull(const std::vector<Vec2>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    return pts[a].y() < pts[b].y();
  });
  if (n <= 1) return idx;
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  // Relative collinearity threshold; keeps sampled smooth curves intact.
  const double eps = 1e-14 * std::max(1.0, scale * scale);

  std::vector<int> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx[i]]) <= eps) --k;
    hull[k++] = idx[i];
  }
  for (int i = n - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx[i]]) <= eps) --k;
    hull[k++] = idx[i];
  }
  hull.resize(std::max(1, k - 1));
  if (hull.size() == 2 && hull[0] == hull[1]) hull.resize(1);
  return hull;
}

Polygon hull_polygon(const std::vector<Vec2>& pts) {
  Polygon poly;
  for (int i : convex_hull(pts)) poly.v.push_back(pts[i]);
  return poly;
}

double Polygon::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * a;
}

bool Polygon::contains(const Vec2& p, double tol) const {
  if (v.empty()) return false;
  if (v.size() == 1) return (p - v[0]).norm() <= tol;
  if (v.size() == 2) {
    const Vec2 d = v[1] - v[0];
    const double t = std::clamp((p - v[0]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (v[0] + t * d - p).norm() <= tol;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    const Vec2 e = b - a;
    // Signed distance to the edge line, negative outside.
    if (cross(a, b, p) / e.norm() < -tol) return false;
  }
  return true;
}

Polygon Polygon::clipped(const Vec2& n, double c) const {
  Polygon out;
  const std::size_t m = v.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % m];
    const double fp = n.dot(p) - c;
    const double fq = n.dot(q) - c;
    if (fp <= 0) out.v.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      const double t = fp / (fp - fq);
      out.v.push_back(p + t * (q - p));
    }
  }
  return out;
}

bool circumcenter(const Vec2& a, const Vec2& b, const Vec2& c, Vec2& out) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  const double scale = std::max(ab.squaredNorm(), ac.squaredNorm());
  if (std::abs(d) <= 1e-14 * std::max(scale, 1e-300)) return false;
  const double b2 = ab.squaredNorm();
  const double c2 = ac.squaredNorm();
  out = a + Vec2((ac.y() * b2 - ab.y() * c2) / d, (ab.x() * c2 - ac.x() * b2) / d);
  return true;
}

}  // namespace sfd::planar
