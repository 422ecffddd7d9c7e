#include "sfd/point_set.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sfd/error.hpp"

namespace sfd {

std::vector<Point> deduplicate(std::vector<Point> points, double tol) {
  const std::size_t n = points.size();
  if (n < 2) return points;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a](0) != points[b](0)) return points[a](0) < points[b](0);
    return a < b;
  });
  // Sweep on the first coordinate; anything within tol of a kept point is a
  // duplicate of the earliest such point.
  std::vector<char> drop(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = order[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t b = order[j];
      if (points[b](0) - points[a](0) > tol) break;
      if (drop[b] || drop[a]) continue;
      if ((points[a] - points[b]).cwiseAbs().maxCoeff() <= tol) {
        drop[std::max(a, b)] = 1;
      }
    }
  }
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!drop[i]) out.push_back(std::move(points[i]));
  }
  return out;
}

PointSet::PointSet(int dim, std::vector<Point> points) : dim_(dim) {
  if (dim <= 0) throw Error(ErrorCode::kInvalidArgument, "point set dimension must be positive");
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "point set must be nonempty");
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "point has wrong dimension");
    if (!p.allFinite()) throw Error(ErrorCode::kInvalidArgument, "point has non-finite coordinate");
  }
  points_ = deduplicate(std::move(points));
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "point set must be nonempty");
  std::vector<Point> pts;
  pts.reserve(rows.size());
  for (const auto& r : rows) {
    pts.push_back(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
  }
  return PointSet(static_cast<int>(rows.front().size()), std::move(pts));
}

Eigen::MatrixXd PointSet::matrix() const {
  Eigen::MatrixXd m(dim_, static_cast<Eigen::Index>(points_.size()));
  for (std::size_t j = 0; j < points_.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = points_[j];
  return m;
}

PointSet PointSet::scaled(double factor) const {
  std::vector<Point> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back(factor * p);
  return PointSet(dim_, std::move(pts));
}

PointSet PointSet::translated(const Point& offset) const {
  if (offset.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "offset dimension");
  std::vector<Point> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back(p + offset);
  return PointSet(dim_, std::move(pts));
}

PointSet PointSet::mapped(const Eigen::MatrixXd& map) const {
  if (map.cols() != dim_) throw Error(ErrorCode::kDimensionMismatch, "map column count");
  std::vector<Point> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back(map * p);
  return PointSet(static_cast<int>(map.rows()), std::move(pts));
}

int PointSet::find(const Point& p) const {
  if (p.size() != dim_) return -1;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if ((points_[i] - p).cwiseAbs().maxCoeff() <= kDedupTolerance) return static_cast<int>(i);
  }
  return -1;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json to_json(const PointSet& s) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : s) {
    pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  }
  return {{"dim", s.dim()}, {"points", pts}};
}

PointSet point_set_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    std::vector<Point> pts;
    for (const auto& row : j.at("points")) {
      auto v = row.get<std::vector<double>>();
      pts.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return PointSet(dim, std::move(pts));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, std::string("malformed point set JSON: ") + e.what());
  }
}

void write_csv(std::ostream& out, const PointSet& s) {
  for (const auto& p : s) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (i) out << ',';
      out << format_double(p(i));
    }
    out << '\n';
  }
}

PointSet read_point_set_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kIoError, "bad CSV number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kIoError, "ragged CSV row");
    }
    rows.push_back(std::move(row));
  }
  return PointSet::from_rows(rows);
}

}  // namespace sfd
