#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sfd::planar {

using Vec2 = Eigen::Vector2d;

inline double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain. Indices of the hull vertices in counterclockwise
// order, collinear boundary points dropped. Fewer than 3 indices means the
// input is a point or a segment (then the two extreme points are returned).
std::vector<int> convex_hull(const std::vector<Vec2>& pts);

// Counterclockwise convex polygon (possibly degenerate: 1 or 2 vertices).
struct Polygon {
  std::vector<Vec2> v;

  double area() const;
  // Inside or within `tol` of the boundary.
  bool contains(const Vec2& p, double tol) const;
  // Keeps the part with n.x <= c.
  Polygon clipped(const Vec2& n, double c) const;
};

Polygon hull_polygon(const std::vector<Vec2>& pts);

// Center of the circle through a, b, c; false when (nearly) collinear.
bool circumcenter(const Vec2& a, const Vec2& b, const Vec2& c, Vec2& out);

}  // namespace sfd::planar
