#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sfd/point_set.hpp"

namespace sfd {

// target = sum_j weights[j] * points[j], weights positive and summing to 1.
// `indices` optionally records where each support point came from in a
// parent PointSet (-1 when unknown).
struct ConvexCombination {
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<int> indices;
  Point target;

  std::size_t size() const { return points.size(); }
  Point reconstruct() const;
  // Max-abs deviation of the reconstruction from `target`.
  double reconstruction_error() const;
  // Weight-sum and reconstruction checks (1e-10, 1e-8).
  bool valid() const;
};

struct Membership {
  bool inside = false;
  std::optional<ConvexCombination> witness;
};

// LP feasibility of x in conv(s), tolerance 1e-8. The witness is a basic
// solution, so it uses at most dim+1 points.
Membership hull_membership(const Point& x, const PointSet& s);

// Reduces the support to at most dim+1 points keeping the target, by
// stepping along affine dependencies until a weight vanishes.
ConvexCombination caratheodory_reduce(const ConvexCombination& c);

// Rank of the centered point matrix, singular values below
// 1e-9 * (largest singular value) treated as zero.
int affine_dim(const std::vector<Point>& points);
int affine_dim(const PointSet& s);

// Polytope given by its extreme points. The constructor rejects inputs with
// a non-extreme point; hull_of() filters them out instead.
class VPolytope {
 public:
  explicit VPolytope(PointSet vertices);
  static VPolytope hull_of(const PointSet& s);

  const PointSet& vertices() const { return vertices_; }
  int dim() const { return vertices_.dim(); }

 private:
  struct Trusted {};
  VPolytope(PointSet vertices, Trusted) : vertices_(std::move(vertices)) {}
  PointSet vertices_;
};

struct FaceDescriptor {
  std::vector<int> vertex_indices;  // sorted
  int dim = 0;
};

inline constexpr double kFaceWeightEpsilon = 1e-9;

// Smallest face of p containing x: vertex v belongs to it iff some convex
// representation of x puts weight >= 1e-9 on v.
FaceDescriptor minimal_face(const VPolytope& p, const Point& x);

inline constexpr std::size_t kDefaultMinkowskiCap = 2'000'000;

// {a_i + b_j}, deduplicated. Throws CapExceeded when |a|*|b| > cap.
PointSet minkowski_sum(const PointSet& a, const PointSet& b, std::size_t cap = kDefaultMinkowskiCap);
PointSet minkowski_sum(const std::vector<PointSet>& sets, std::size_t cap = kDefaultMinkowskiCap);

}  // namespace sfd
