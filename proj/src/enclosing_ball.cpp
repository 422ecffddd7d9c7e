#include <algorithm>
#include <cmath>
#include <list>

#include "sfd/error.hpp"
#include "sfd/measures.hpp"

namespace sfd {
namespace {

class WelzlMtf {
 public:
  explicit WelzlMtf(const std::vector<Point>& pts) : pts_(pts), dim_(static_cast<int>(pts.front().size())) {
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) order_.push_back(i);
  }

  Ball solve() { return mtf(order_.end()); }

 private:
  bool contains(const Ball& b, int i) const {
    if (b.radius < 0) return false;
    return (pts_[i] - b.center).norm() <= b.radius + 1e-12 * (1.0 + b.radius);
  }

  // Smallest ball with all boundary points on its sphere, centred in their
  // affine hull.
  Ball from_boundary() const {
    Ball b;
    if (boundary_.empty()) {
      b.center = Point::Zero(dim_);
      b.radius = -1.0;
      return b;
    }
    const Point& p0 = pts_[boundary_[0]];
    const int k = static_cast<int>(boundary_.size()) - 1;
    if (k == 0) {
      b.center = p0;
      return b;
    }
    Eigen::MatrixXd v(dim_, k);
    for (int j = 0; j < k; ++j) v.col(j) = pts_[boundary_[j + 1]] - p0;
    const Eigen::MatrixXd gram = 2.0 * v.transpose() * v;
    const Eigen::VectorXd rhs = v.colwise().squaredNorm().transpose();
    const Eigen::VectorXd alpha = gram.completeOrthogonalDecomposition().solve(rhs);
    b.center = p0 + v * alpha;
    b.radius = 0.0;
    for (int i : boundary_) b.radius = std::max(b.radius, (pts_[i] - b.center).norm());
    return b;
  }

  Ball mtf(std::list<int>::iterator end) {
    Ball ball = from_boundary();
    if (static_cast<int>(boundary_.size()) == dim_ + 1) return ball;
    for (auto it = order_.begin(); it != end;) {
      auto next = std::next(it);
      const int p = *it;
      if (!contains(ball, p)) {
        boundary_.push_back(p);
        ball = mtf(it);
        boundary_.pop_back();
        order_.splice(order_.begin(), order_, it);
      }
      it = next;
    }
    return ball;
  }

  const std::vector<Point>& pts_;
  int dim_;
  std::list<int> order_;
  std::vector<int> boundary_;
};

}  // namespace

Ball min_enclosing_ball(const std::vector<Point>& points) {
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "min_enclosing_ball of empty set");
  Ball b = WelzlMtf(points).solve();
  b.radius = 0.0;
  for (const auto& p : points) b.radius = std::max(b.radius, (p - b.center).norm());
  return b;
}

double radius(const PointSet& s) { return min_enclosing_ball(s.points()).radius; }

}  // namespace sfd
