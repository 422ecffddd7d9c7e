#include "sfd/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sfd {

namespace {
constexpr int kLeafSize = 8;
}

KdTree::KdTree(Eigen::MatrixXd points) : pts_(std::move(points)) {
  order_.resize(pts_.cols());
  std::iota(order_.begin(), order_.end(), 0);
  if (!order_.empty()) build(0, static_cast<int>(order_.size()), 0);
}

int KdTree::build(int lo, int hi, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({lo, hi});
  if (hi - lo <= kLeafSize) return id;
  // Split on the widest axis at the median.
  const int dim = static_cast<int>(pts_.rows());
  int axis = depth % dim;
  double widest = -1.0;
  for (int a = 0; a < dim; ++a) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (int i = lo; i < hi; ++i) {
      mn = std::min(mn, pts_(a, order_[i]));
      mx = std::max(mx, pts_(a, order_[i]));
    }
    if (mx - mn > widest) {
      widest = mx - mn;
      axis = a;
    }
  }
  const int mid = (lo + hi) / 2;
  std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                   [&](int a, int b) { return pts_(axis, a) < pts_(axis, b); });
  nodes_[id].axis = axis;
  nodes_[id].split = pts_(axis, order_[mid]);
  const int left = build(lo, mid, depth + 1);
  const int right = build(mid, hi, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

KdTree::Hit KdTree::nearest(const Eigen::VectorXd& q) const {
  Hit best;
  double best_sq = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) search(0, q, best, best_sq);
  best.distance = std::sqrt(best_sq);
  return best;
}

void KdTree::search(int node, const Eigen::VectorXd& q, Hit& best, double& best_sq) const {
  const Node& nd = nodes_[node];
  if (nd.axis < 0) {
    for (int i = nd.lo; i < nd.hi; ++i) {
      const double d = (pts_.col(order_[i]) - q).squaredNorm();
      if (d < best_sq || (d == best_sq && order_[i] < best.index)) {
        best_sq = d;
        best.index = order_[i];
      }
    }
    return;
  }
  const double diff = q(nd.axis) - nd.split;
  const int first = diff < 0 ? nd.left : nd.right;
  const int second = diff < 0 ? nd.right : nd.left;
  search(first, q, best, best_sq);
  if (diff * diff <= best_sq) search(second, q, best, best_sq);
}

}  // namespace sfd
