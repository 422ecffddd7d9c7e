#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sfd/point_set.hpp"

namespace sfd {

struct Ball {
  Point center;
  double radius = 0.0;
};

// Minimum enclosing Euclidean ball (Welzl, move-to-front variant).
Ball min_enclosing_ball(const std::vector<Point>& points);
double radius(const PointSet& s);

enum class MeasureMethod { kExact2D, kSubsetEnum, kSampled };

std::string method_name(MeasureMethod m);
MeasureMethod parse_method(const std::string& name);

// Points where the distance to the set is known to be zero although they
// are not sample points (e.g. the interior of a sampled solid body).
using ZeroRegion = std::function<bool(const Point&)>;

struct MeasureOptions {
  MeasureMethod method = MeasureMethod::kExact2D;
  std::uint64_t seed = 0;
  // SAMPLED: hit-and-run steps and the branch-and-bound budget.
  std::size_t samples = 2000;
  std::size_t max_boxes = 20000;
  // SAMPLED: stop refining once upper - lower <= gap_tol * diameter.
  double gap_tol = 1e-3;
  // SUBSET_ENUM cap on |s|.
  std::size_t subset_cap = 40;
  ZeroRegion zero_region;
};

struct MeasureValue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  MeasureMethod method = MeasureMethod::kExact2D;
  double tol = 0.0;
  std::size_t sample_count = 0;
};

// sup_{x in conv s} dist(x, s).
MeasureValue phi(const PointSet& s, const MeasureOptions& opts = {});
// SAMPLED route with the hull given as a Minkowski sum of summands; `s` must
// be the expanded sum (used for distances only).
MeasureValue phi_sampled(const PointSet& s, const std::vector<PointSet>& summands,
                         const MeasureOptions& opts);

// sup_{x in conv s} min{radius(T) : T subset of s, x in conv T}. Exact for
// affine dimension <= 3 and |s| <= opts.subset_cap.
MeasureValue xi(const PointSet& s, const MeasureOptions& opts = {});

struct MeasureReport {
  double phi = 0.0;
  double phi_lower = 0.0;
  double phi_upper = 0.0;
  bool has_xi = false;
  double xi = 0.0;
  double rd = 0.0;
  MeasureMethod method = MeasureMethod::kExact2D;
  double tol = 0.0;
  std::size_t sample_count = 0;
};

// phi by opts.method, xi by subset enumeration when within caps, radius.
MeasureReport measure(const PointSet& s, const MeasureOptions& opts = {});
nlohmann::json to_json(const MeasureReport& r);

// Origin-centred convex body defining a gauge.
class GaugeBody {
 public:
  enum class Kind { kBall, kEllipsoid };

  static GaugeBody ball(double radius);
  // {v : v^T shape^{-1} v <= 1}, shape symmetric positive definite.
  static GaugeBody ellipsoid(const Eigen::MatrixXd& shape);

  Kind kind() const { return kind_; }
  double norm(const Eigen::VectorXd& v) const;
  // Smoothness modulus of the squared gauge.
  double smoothness() const;

 private:
  Kind kind_ = Kind::kBall;
  double radius_ = 1.0;
  Eigen::MatrixXd shape_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
};

// max_{x in a} min_{y in d} |x - y|_K
double directed_gauge_distance(const PointSet& a, const PointSet& d, const GaugeBody& k);

struct RelationsCheck {
  bool ok = false;
  double phi = 0.0, xi = 0.0, rd = 0.0;
  double phi_half = 0.0, phi_double = 0.0;
  std::string detail;
};

// phi <= xi <= rd and phi(kappa s) = kappa phi(s) for kappa in {0.5, 2}.
RelationsCheck measure_relations_check(const PointSet& s, double tol = 1e-6);

}  // namespace sfd
