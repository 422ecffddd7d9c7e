#include "sfd/experiments.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sfd/decompose.hpp"
#include "sfd/error.hpp"
#include "sfd/lagrangian.hpp"
#include "sfd/measures.hpp"
#include "sfd/parallel.hpp"
#include "sfd/rng.hpp"
#include "sfd/smooth.hpp"

namespace sfd {

namespace {

constexpr const char* kVersion = "1.0.0";

// Experiment parameters resolved against a table of defaults.
class Params {
 public:
  Params(const ExperimentConfig& cfg, std::map<std::string, std::string> defaults) : values_(std::move(defaults)) {
    for (const auto& [k, v] : cfg.params) {
      auto it = values_.find(k);
      if (it == values_.end()) {
        throw Error(ErrorCode::kInvalidArgument, "experiment '" + cfg.name + "' has no parameter '" + k + "'");
      }
      it->second = v;
    }
  }

  const std::string& text(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(text(key), &used);
      if (used == text(key).size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kInvalidArgument, "parameter '" + key + "' must be a number, got '" + text(key) + "'");
  }

  int integer(const std::string& key) const {
    const double v = real(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw Error(ErrorCode::kInvalidArgument, "parameter '" + key + "' must be an integer");
    }
    return static_cast<int>(v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidArgument, "parameter '" + key + "' must be a comma-separated list of numbers");
      }
    }
    if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "parameter '" + key + "' is empty");
    return out;
  }

  nlohmann::json echo() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

std::uint64_t unit_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Rng::splitmix(seed ^ Rng::splitmix(a * 0x100000001b3ULL + b + 1));
}

ExperimentReport start_report(const ExperimentConfig& cfg, const Params& params) {
  ExperimentReport r;
  r.name = cfg.name;
  r.meta = {{"config", {{"experiment", cfg.name}, {"seed", cfg.seed}, {"params", params.echo()}}},
            {"configHash", config_hash(cfg)},
            {"versions",
             {{"sfduality", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"compiler", __VERSION__}}},
            {"threads", thread_count()}};
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

nlohmann::json num_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

// Euclidean distance from (k, 1/2) to the boundary of the radius-k p-ball.
double notch_depth(double p, double k) {
  if (p == 1.0) return 0.5 / std::sqrt(2.0);
  if (p == 2.0) return std::sqrt(k * k + 0.25) - k;
  auto dist = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    const double r = k / std::pow(std::pow(std::abs(c), p) + std::pow(std::abs(s), p), 1.0 / p);
    return std::hypot(k - r * c, 0.5 - r * s);
  };
  constexpr int kGrid = 20000;
  double best_th = 0.0, best = dist(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double th = 0.5 * std::numbers::pi * i / kGrid;
    if (const double d = dist(th); d < best) best = d, best_th = th;
  }
  double lo = std::max(0.0, best_th - 0.5 * std::numbers::pi / kGrid);
  double hi = best_th + 0.5 * std::numbers::pi / kGrid;
  for (int it = 0; it < 100; ++it) {
    const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    (dist(a) < dist(b) ? hi : lo) = (dist(a) < dist(b) ? b : a);
  }
  return std::min(best, dist(0.5 * (lo + hi)));
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"pball_convexification", "sf_bounds_random", "duality_gap_scaling", "projection_factor_sweep"};
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.name == "pball_convexification") return run_pball_convexification(cfg);
  if (cfg.name == "sf_bounds_random") return run_sf_bounds_random(cfg);
  if (cfg.name == "duality_gap_scaling") return run_duality_gap_scaling(cfg);
  if (cfg.name == "projection_factor_sweep") return run_projection_factor_sweep(cfg);
  throw Error(ErrorCode::kInvalidArgument, "unknown experiment '" + cfg.name + "'");
}

ExperimentReport run_pball_convexification(const ExperimentConfig& cfg) {
  const Params prm(cfg, {{"p", "2"}, {"kMax", "6"}, {"samplePoints", "8192"}});
  const double p = prm.real("p");
  const int k_max = prm.integer("kMax");
  const int samples = prm.integer("samplePoints");
  require(p == 1.0 || p == 1.5 || p == 2.0, "p must be 1, 1.5 or 2");
  require(k_max >= 0 && k_max <= 8, "kMax must lie in [0, 8]");
  require(samples >= 64, "samplePoints must be at least 64");

  ExperimentReport r = start_report(cfg, prm);
  r.columns = {{"k", ""},
               {"p", ""},
               {"samples", ""},
               {"mesh", ""},
               {"measured_phi", ""},
               {"notch_depth", ""},
               {"relative_error", ""},
               {"bound_hidden_ball", "hidden-ball bound sqrt(r*^2 + n beta^2 / 2) - r*, radii (0, 1, ..., 1), n = 2, beta = 1/2"},
               {"status", ""}};
  r.plots = {{"phi", "Phi(A0 + k B_p), p = " + prm.text("p"), "k", {"measured_phi", "notch_depth"}, false}};

  std::vector<std::vector<nlohmann::json>> rows(static_cast<std::size_t>(k_max));
  std::vector<double> times(static_cast<std::size_t>(k_max));
  parallel_for(static_cast<std::size_t>(k_max), [&](std::size_t idx) {
    const auto t0 = std::chrono::steady_clock::now();
    const double k = static_cast<double>(idx + 1);
    // A0 + sum of k unit balls = two translated radius-k balls.
    const PointSet ball = sampled_p_ball(p, k, samples, unit_seed(cfg.seed, idx));
    const Eigen::Vector2d up(0.0, 1.0);
    std::vector<Point> pts = ball.points();
    for (const auto& v : ball) pts.push_back(v + up);
    const PointSet set(2, std::move(pts));
    double mesh = 0.0;
    for (std::size_t j = 0; j < ball.size(); ++j) mesh = std::max(mesh, (ball[(j + 1) % ball.size()] - ball[j]).norm());

    MeasureOptions mo;
    mo.method = MeasureMethod::kExact2D;
    mo.zero_region = [&](const Point& x) {
      return in_p_ball(x, p, k, Eigen::Vector2d::Zero()) || in_p_ball(x, p, k, up);
    };
    const double measured = phi(set, mo).value;
    const double notch = notch_depth(p, k);
    std::vector<double> radii(idx + 2, 1.0);
    radii[0] = 0.0;
    const double bound = p == 2.0 ? hidden_ball_bound(radii, 2, 0.5).bound : std::nan("");
    // Nearest-sample distances overshoot the continuous ones by at most mesh / 2.
    const bool violation = std::isfinite(bound) && measured > bound + 0.5 * mesh;
    rows[idx] = {static_cast<int>(idx + 1), p,          samples,  mesh, measured, notch, std::abs(measured - notch) / notch,
                 num_or_null(bound),         violation ? "VIOLATION" : "ok"};
    times[idx] = seconds_since(t0);
  });
  r.rows = std::move(rows);
  r.runtimes = std::move(times);
  return r;
}

ExperimentReport run_sf_bounds_random(const ExperimentConfig& cfg) {
  const Params prm(cfg, {{"k", "8"},
                         {"n", "2"},
                         {"setSize", "6"},
                         {"instances", "10"},
                         {"targets", "50"},
                         {"trials", "10000"}});
  const int k = prm.integer("k"), n = prm.integer("n"), size = prm.integer("setSize");
  const int instances = prm.integer("instances"), targets = prm.integer("targets");
  const int trials = prm.integer("trials");
  require(k >= 1 && n >= 1 && n <= 3 && size >= 1 && instances >= 0 && targets >= 1 && trials >= 1,
          "sf_bounds_random: need k, setSize, targets, trials >= 1 and 1 <= n <= 3");

  ExperimentReport r = start_report(cfg, prm);
  r.columns = {{"instance", ""},
               {"k", ""},
               {"n", ""},
               {"setSize", ""},
               {"beta", ""},
               {"bound_sqrt_n_beta", "uniform rounding bound sqrt(n) beta with beta = max inner radius"},
               {"max_error", ""},
               {"max_refined_bound", "face-refined rounding bound sqrt(sum of squared inner radii of the face pieces)"},
               {"refined_within_global", ""},
               {"mse", ""},
               {"mse_limit", "face-refined variance bound times (1 + 3 / sqrt(trials))"},
               {"status", ""}};
  r.plots = {{"errors", "Rounding error against bounds", "instance", {"max_error", "max_refined_bound", "bound_sqrt_n_beta"}, false}};

  std::vector<std::vector<nlohmann::json>> rows(static_cast<std::size_t>(instances));
  std::vector<double> times(rows.size());
  parallel_for(rows.size(), [&](std::size_t inst) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(unit_seed(cfg.seed, inst));
    std::vector<PointSet> sets;
    for (int i = 0; i < k; ++i) {
      std::vector<Point> pts;
      for (int j = 0; j < size; ++j) {
        Point x(n);
        for (int d = 0; d < n; ++d) x(d) = rng.uniform();
        pts.push_back(std::move(x));
      }
      sets.emplace_back(n, std::move(pts));
    }
    const auto rep = rounding_bound_check(sets, static_cast<std::size_t>(targets), unit_seed(cfg.seed, inst, 1));

    // Variance audit on one Dirichlet target.
    Point x = Point::Zero(n);
    for (const auto& s : sets) {
      std::vector<double> w(s.size());
      double total = 0.0;
      for (auto& v : w) total += (v = rng.exponential());
      for (std::size_t j = 0; j < s.size(); ++j) x += (w[j] / total) * s[j];
    }
    const auto dec = sf_decompose(x, sets);
    RoundingOptions ro;
    ro.trials = static_cast<std::size_t>(trials);
    ro.seed = unit_seed(cfg.seed, inst, 2);
    ro.support = RoundingSupport::kMinRadiusSimplex;
    const auto rr = randomized_round(dec, sets, ro);
    const double refined = refined_rounding_bound(dec, sets);
    const double mse_limit = refined * refined * (1.0 + 3.0 / std::sqrt(static_cast<double>(trials)));

    const double tol = 1e-9;
    const bool refined_ok = rep.max_refined_bound <= rep.bound_beta + tol;
    const bool bad = rep.violations > 0 || !refined_ok || rr.empirical_mse > mse_limit + tol;
    rows[inst] = {static_cast<int>(inst), k,         n,          size,          rep.beta, rep.bound_beta, rep.max_error,
                  rep.max_refined_bound,  refined_ok, rr.empirical_mse, mse_limit, bad ? "VIOLATION" : "ok"};
    times[inst] = seconds_since(t0);
  });
  r.rows = std::move(rows);
  r.runtimes = std::move(times);
  return r;
}

ExperimentReport run_duality_gap_scaling(const ExperimentConfig& cfg) {
  const Params prm(cfg, {{"kList", "4,8,16,32"},
                         {"n", "3"},
                         {"m", "1"},
                         {"s", "2"},
                         {"family", "quadratic"},
                         {"seeds", "10"},
                         {"halfWidth", "0.02"},
                         {"omegaFloor", "0.3"},
                         {"grid", "7"}});
  std::vector<int> ks;
  for (double v : prm.list("kList")) {
    require(v >= 1 && v == std::floor(v), "kList entries must be positive integers");
    ks.push_back(static_cast<int>(v));
  }
  std::sort(ks.begin(), ks.end());
  const int n = prm.integer("n"), m = prm.integer("m"), s = prm.integer("s");
  const int seeds = prm.integer("seeds"), grid = prm.integer("grid");
  const SmoothFamily family = parse_family(prm.text("family"));
  GeneratorOptions go;
  go.half_width = prm.real("halfWidth");
  go.omega_floor = prm.real("omegaFloor");
  go.grid = grid;
  require(seeds >= 1 && grid >= 2, "duality_gap_scaling: seeds >= 1 and grid >= 2");

  ExperimentReport r = start_report(cfg, prm);
  r.columns = {{"k", ""},
               {"seeds", ""},
               {"solved", ""},
               {"cap_exceeded", ""},
               {"median_relative_gap", ""},
               {"min_relative_gap", ""},
               {"max_relative_gap", ""},
               {"omega", ""},
               {"beta", ""},
               {"lipschitz", ""},
               {"r_star", ""},
               {"bound_hidden_ball", "hidden-ball bound sqrt(r*^2 + (m+1) beta^2 / 2) - r* with r* = (k-m-1) omega / L"},
               {"bound_squared_radius_form", "sqrt(r*^2 + (m+1) beta^2 / 2) - r*^2, the squared-radius variant of the hidden-ball bound"},
               {"weak_duality_violations", ""},
               {"status", ""}};
  r.plots = {{"gap", "Relative duality gap and bound", "k", {"median_relative_gap", "bound_hidden_ball"}, true}};

  struct Unit {
    int k = 0;
    bool capped = false;
    double rel_gap = 0.0;
    bool weak_violation = false;
    double omega = 0.0, beta = 0.0, lipschitz = 0.0, seconds = 0.0;
  };
  std::vector<Unit> units(ks.size() * static_cast<std::size_t>(seeds));
  parallel_for(units.size(), [&](std::size_t u) {
    const auto t0 = std::chrono::steady_clock::now();
    Unit& out = units[u];
    const std::size_t ki = u / static_cast<std::size_t>(seeds);
    out.k = ks[ki];
    const auto gen = generate_sparse_smooth_instance(out.k, n, m, s, family, unit_seed(cfg.seed, static_cast<std::uint64_t>(out.k), u % seeds), go);
    out.omega = gen.omega;
    out.beta = gen.beta;
    out.lipschitz = gen.lipschitz;
    try {
      const BlockProblem d = discretize(gen.problem, grid);
      const double dual = primal_characterization_lp(d);
      const double opt = primal_bruteforce(d, d.b);
      out.weak_violation = dual > opt + 1e-6 * (1.0 + std::abs(opt));
      out.rel_gap = (opt - dual) / (1.0 + std::abs(opt));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kCapExceeded) throw;
      out.capped = true;
    }
    out.seconds = seconds_since(t0);
  });

  // One omega, beta and L for the whole sweep so the bound depends on k alone.
  double omega = std::numeric_limits<double>::infinity(), beta = 0.0, lip = 0.0;
  for (const auto& u : units) {
    omega = std::min(omega, u.omega);
    beta = std::max(beta, u.beta);
    lip = std::max(lip, u.lipschitz);
  }
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    std::vector<double> gaps;
    int capped = 0, weak = 0;
    double secs = 0.0;
    for (int j = 0; j < seeds; ++j) {
      const Unit& u = units[ki * static_cast<std::size_t>(seeds) + static_cast<std::size_t>(j)];
      secs += u.seconds;
      if (u.capped) {
        ++capped;
        continue;
      }
      gaps.push_back(u.rel_gap);
      weak += u.weak_violation;
    }
    const int k = ks[ki];
    const double r_star = std::max(0, k - m - 1) * omega / lip;
    const std::vector<double> radii(static_cast<std::size_t>(k), omega / lip);
    const double bound = hidden_ball_bound(radii, std::min(k, m + 1), beta).bound;
    const double half = 0.5 * (m + 1) * beta * beta;
    const double sq = r_star * r_star;
    const double literal = std::sqrt(sq + half) - sq;
    const auto [mn, mx] = gaps.empty() ? std::pair{std::nan(""), std::nan("")}
                                       : std::pair{*std::min_element(gaps.begin(), gaps.end()),
                                                   *std::max_element(gaps.begin(), gaps.end())};
    r.rows.push_back({k, seeds, static_cast<int>(gaps.size()), capped, num_or_null(median(gaps)), num_or_null(mn),
                      num_or_null(mx), omega, beta, lip, r_star, bound, literal, weak, weak > 0 ? "VIOLATION" : "ok"});
    r.runtimes.push_back(secs);
  }
  return r;
}

ExperimentReport run_projection_factor_sweep(const ExperimentConfig& cfg) {
  const Params prm(cfg, {{"m", "1"}, {"n", "6"}, {"sMin", "1"}, {"sMax", "4"}, {"seeds", "200"}, {"perturbations", "1e-6,1e-3"}});
  const int m = prm.integer("m"), n = prm.integer("n");
  const int s_min = prm.integer("sMin"), s_max = prm.integer("sMax"), seeds = prm.integer("seeds");
  const std::vector<double> eps = prm.list("perturbations");
  require(m >= 1 && n >= 1 && s_min >= 1 && s_min <= s_max && s_max <= n && seeds >= 1,
          "projection_factor_sweep: need 1 <= sMin <= sMax <= n and m, seeds >= 1");

  ExperimentReport r = start_report(cfg, prm);
  r.columns = {{"s", ""}, {"m", ""}, {"n", ""}, {"seeds", ""}, {"positive_gaussian", ""}, {"min_factor_gaussian", ""},
               {"median_geometric_gaussian", ""}, {"positive_degenerate", ""}};
  {
    std::stringstream names(prm.text("perturbations"));
    std::string item;
    while (std::getline(names, item, ',')) {
      item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }), item.end());
      r.columns.push_back({"positive_perturbed_" + item, ""});
    }
  }
  r.columns.push_back({"status", ""});
  r.plots = {{"positive", "Share of B with a positive projection factor", "s", {"positive_gaussian", "positive_degenerate"}, false}};

  // Positive means the smallest singular value clears roundoff.
  auto positive = [](const ProjectionFactorReport& rep, const Eigen::MatrixXd& b) {
    return rep.geometric_value > 1e-12 * (1.0 + b.norm());
  };
  for (int s = s_min; s <= s_max; ++s) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t cols = 3 + eps.size();
    std::vector<std::vector<double>> per(static_cast<std::size_t>(seeds), std::vector<double>(cols + 1));
    parallel_for(per.size(), [&](std::size_t j) {
      Rng rng(unit_seed(cfg.seed, static_cast<std::uint64_t>(s), j));
      Eigen::MatrixXd b(m, n);
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < n; ++c) b(a, c) = rng.normal();
      const auto g = projection_factor(b, s, true);
      // Rank-deficient B: every column equal.
      Eigen::MatrixXd deg(m, n);
      for (int c = 0; c < n; ++c) deg.col(c) = b.col(0);
      const auto dg = projection_factor(deg, s, true);
      per[j][0] = positive(g, b);
      per[j][1] = g.value;
      per[j][2] = g.geometric_value;
      per[j][3] = positive(dg, deg);
      for (std::size_t e = 0; e < eps.size(); ++e) {
        Eigen::MatrixXd pert = deg;
        for (int a = 0; a < m; ++a)
          for (int c = 0; c < n; ++c) pert(a, c) += eps[e] * rng.normal();
        per[j][4 + e] = positive(projection_factor(pert, s, true), pert);
      }
    });
    auto share = [&](std::size_t c) {
      double sum = 0.0;
      for (const auto& v : per) sum += v[c];
      return sum / seeds;
    };
    double min_value = std::numeric_limits<double>::infinity();
    std::vector<double> geo;
    for (const auto& v : per) {
      min_value = std::min(min_value, v[1]);
      geo.push_back(v[2]);
    }
    const double pos = share(0);
    // s < m+1 forces a zero factor; a positive one contradicts the rank count.
    const bool bad = s < m + 1 && pos > 0.0;
    std::vector<nlohmann::json> row = {s, m, n, seeds, pos, min_value, median(geo), share(3)};
    for (std::size_t e = 0; e < eps.size(); ++e) row.push_back(share(4 + e));
    row.push_back(bad ? "VIOLATION" : "ok");
    r.rows.push_back(std::move(row));
    r.runtimes.push_back(seconds_since(t0));
  }
  return r;
}

}  // namespace sfd
