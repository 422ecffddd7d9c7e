#include "sfd/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sfd/error.hpp"

namespace sfd {

std::string method_name(MeasureMethod m) {
  switch (m) {
    case MeasureMethod::kExact2D: return "EXACT_2D";
    case MeasureMethod::kSubsetEnum: return "SUBSET_ENUM";
    case MeasureMethod::kSampled: return "SAMPLED";
  }
  return "?";
}

MeasureMethod parse_method(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c != '_' && c != '-') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s == "exact2d") return MeasureMethod::kExact2D;
  if (s == "subset" || s == "subsetenum") return MeasureMethod::kSubsetEnum;
  if (s == "sampled") return MeasureMethod::kSampled;
  throw Error(ErrorCode::kInvalidArgument, "unknown measure method '" + name + "'");
}

MeasureReport measure(const PointSet& s, const MeasureOptions& opts) {
  MeasureReport r;
  const auto p = phi(s, opts);
  r.phi = p.value;
  r.phi_lower = p.lower;
  r.phi_upper = p.upper;
  r.method = opts.method;
  r.tol = p.tol;
  r.sample_count = p.sample_count;
  r.rd = radius(s);
  if (s.size() <= opts.subset_cap && s.dim() <= 3) {
    const auto x = xi(s, opts);
    r.has_xi = true;
    r.xi = x.value;
    r.tol = std::max(r.tol, x.tol);
  }
  return r;
}

nlohmann::json to_json(const MeasureReport& r) {
  nlohmann::json j = {{"phi", r.phi},
                      {"phiLower", r.phi_lower},
                      {"phiUpper", r.phi_upper},
                      {"rd", r.rd},
                      {"method", method_name(r.method)},
                      {"tol", r.tol},
                      {"sampleCount", r.sample_count}};
  j["xi"] = r.has_xi ? nlohmann::json(r.xi) : nlohmann::json(nullptr);
  return j;
}

GaugeBody GaugeBody::ball(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kInvalidArgument, "gauge ball radius must be positive");
  }
  GaugeBody g;
  g.kind_ = Kind::kBall;
  g.radius_ = radius;
  return g;
}

GaugeBody GaugeBody::ellipsoid(const Eigen::MatrixXd& shape) {
  if (shape.rows() != shape.cols() || shape.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "ellipsoid shape must be square");
  }
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, shape.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kInvalidArgument, "ellipsoid shape must be symmetric");
  }
  GaugeBody g;
  g.kind_ = Kind::kEllipsoid;
  g.shape_ = shape;
  g.chol_.compute(shape);
  if (g.chol_.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "ellipsoid shape must be positive definite");
  }
  return g;
}

double GaugeBody::norm(const Eigen::VectorXd& v) const {
  if (kind_ == Kind::kBall) return v.norm() / radius_;
  if (v.size() != shape_.rows()) throw Error(ErrorCode::kDimensionMismatch, "gauge dimension");
  // v^T M^{-1} v = |L^{-1} v|^2 with M = L L^T
  return chol_.matrixL().solve(v).norm();
}

double GaugeBody::smoothness() const {
  if (kind_ == Kind::kBall) return 1.0 / (radius_ * radius_);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape_);
  return 1.0 / es.eigenvalues().minCoeff();
}

double directed_gauge_distance(const PointSet& a, const PointSet& d, const GaugeBody& k) {
  if (a.dim() != d.dim()) throw Error(ErrorCode::kDimensionMismatch, "directed_gauge_distance");
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : d) best = std::min(best, k.norm(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

RelationsCheck measure_relations_check(const PointSet& s, double tol) {
  RelationsCheck r;
  MeasureOptions opts;
  opts.method = s.dim() <= 2 ? MeasureMethod::kExact2D : MeasureMethod::kSampled;
  const auto p = phi(s, opts);
  r.phi = p.value;
  r.xi = xi(s, opts).value;
  r.rd = radius(s);
  r.phi_half = phi(s.scaled(0.5), opts).value;
  r.phi_double = phi(s.scaled(2.0), opts).value;
  const double slack = tol + p.tol;
  std::ostringstream why;
  if (r.phi > r.xi + slack) why << "phi " << r.phi << " > xi " << r.xi << "; ";
  if (r.xi > r.rd + tol) why << "xi " << r.xi << " > rd " << r.rd << "; ";
  if (std::abs(r.phi_half - 0.5 * r.phi) > slack) why << "phi(0.5 s) " << r.phi_half << " != " << 0.5 * r.phi << "; ";
  if (std::abs(r.phi_double - 2.0 * r.phi) > 2 * slack) {
    why << "phi(2 s) " << r.phi_double << " != " << 2.0 * r.phi << "; ";
  }
  r.detail = why.str();
  r.ok = r.detail.empty();
  return r;
}

}  // namespace sfd
