#pragma once

#include <cstdint>
#include <vector>

#include "sfd/geometry.hpp"
#include "sfd/rng.hpp"

namespace sfd {

// One convex combination per block; their targets sum to `target`.
struct Decomposition {
  Point target;
  std::vector<ConvexCombination> blocks;  // indices refer to the block's PointSet
  std::vector<int> fractional;            // blocks with support size >= 2
  std::vector<int> face_dims;             // affine_dim of each block's support

  double reconstruction_error() const;  // Euclidean
  int face_dim_sum() const;
};

// Basic solution of the aggregated system
//   sum_i sum_j lambda_ij a_ij = target,  sum_j lambda_ij = 1,  lambda >= 0.
// Throws NotInHullSum when infeasible.
Decomposition sf_decompose(const Point& target, const std::vector<PointSet>& sets);

// Draws one support point with probability equal to its weight.
Point sample_on_face(const ConvexCombination& c, Rng& rng);
Point sample_on_face(const ConvexCombination& c, std::uint64_t seed);

// Smallest-radius subset T of s (|T| <= dim+1) with x in conv(T), with the
// weights representing x. Throws NotInHull.
ConvexCombination min_radius_representation(const Point& x, const PointSet& s);

enum class RoundingSupport {
  kDecomposition,     // sample from the LP support of each fractional block
  kMinRadiusSimplex,  // resample each fractional block target over its smallest enclosing witness subset
};

struct RoundingOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  RoundingSupport support = RoundingSupport::kDecomposition;
};

struct RoundingResult {
  Point point;
  std::vector<int> choice;  // chosen point index per block
  double error_l2 = 0.0;
  std::size_t trials = 0;
  double empirical_mse = 0.0;
  // sum over fractional blocks of xi(support)^2
  double bound = 0.0;
};

RoundingResult randomized_round(const Decomposition& d, const std::vector<PointSet>& sets,
                                const RoundingOptions& opts = {});

// Fractional blocks take the support point nearest their block target.
RoundingResult deterministic_round(const Decomposition& d, const std::vector<PointSet>& sets);

// Points of s lying in the minimal face of conv(s) that contains x.
PointSet face_points(const PointSet& s, const Point& x);

// sqrt(sum over fractional blocks of xi(A_i on its minimal face)^2).
double refined_rounding_bound(const Decomposition& d, const std::vector<PointSet>& sets);

struct RoundingBoundReport {
  double beta = 0.0;   // max xi(A_i)
  double gamma = 0.0;  // max radius(A_i)
  double bound_beta = 0.0;   // sqrt(n) beta
  double bound_gamma = 0.0;  // sqrt(n) gamma
  double max_error = 0.0;
  double max_refined_bound = 0.0;
  std::size_t samples = 0;
  int violations = 0;
  std::vector<double> errors;
  std::vector<double> refined_bounds;
};

// Random targets in conv(sum A_i), each decomposed and rounded; every
// achieved error must stay below sqrt(n) beta.
RoundingBoundReport rounding_bound_check(const std::vector<PointSet>& sets, std::size_t samples, std::uint64_t seed,
                                      std::size_t trials = 200, double tol = 1e-9);

nlohmann::json to_json(const ConvexCombination& c);
nlohmann::json to_json(const Decomposition& d);
nlohmann::json to_json(const RoundingResult& r);

}  // namespace sfd
