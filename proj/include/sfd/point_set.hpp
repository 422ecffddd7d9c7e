#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace sfd {

using Point = Eigen::VectorXd;

// Points closer than this (max-abs) are merged when a PointSet is built.
inline constexpr double kDedupTolerance = 1e-12;

// A finite, nonempty list of points of uniform dimension. Construction
// validates finiteness and removes duplicates, keeping first occurrences in
// input order.
class PointSet {
 public:
  PointSet(int dim, std::vector<Point> points);

  // Convenience for literals: one inner vector per point.
  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  // dim x size, one column per point.
  Eigen::MatrixXd matrix() const;

  PointSet scaled(double factor) const;
  PointSet translated(const Point& offset) const;
  // Image under the linear map x -> map * x.
  PointSet mapped(const Eigen::MatrixXd& map) const;

  // Index of the point equal to `p` (within kDedupTolerance), or -1.
  int find(const Point& p) const;

 private:
  int dim_;
  std::vector<Point> points_;
};

// Removes near-duplicates (max-abs <= tol) keeping the first occurrence.
std::vector<Point> deduplicate(std::vector<Point> points, double tol = kDedupTolerance);

// {"dim": n, "points": [[...], ...]}
nlohmann::json to_json(const PointSet& s);
PointSet point_set_from_json(const nlohmann::json& j);

// One point per row, comma separated, 17 significant digits.
void write_csv(std::ostream& out, const PointSet& s);
PointSet read_point_set_csv(std::istream& in);

// Shortest-round-trip formatting is not required here: 17 significant
// digits always reproduces the same double.
std::string format_double(double v);

}  // namespace sfd
