#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sfd {

// Static kd-tree over the columns of a dim x N matrix, Euclidean nearest
// neighbour queries only.
class KdTree {
 public:
  explicit KdTree(Eigen::MatrixXd points);

  struct Hit {
    int index = -1;
    double distance = 0.0;
  };
  Hit nearest(const Eigen::VectorXd& q) const;

  const Eigen::MatrixXd& points() const { return pts_; }

 private:
  struct Node {
    int lo, hi;  // range into order_
    int axis = -1;
    double split = 0.0;
    int left = -1, right = -1;
  };
  int build(int lo, int hi, int depth);
  void search(int node, const Eigen::VectorXd& q, Hit& best, double& best_sq) const;

  Eigen::MatrixXd pts_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace sfd
