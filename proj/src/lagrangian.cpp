#include "sfd/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "sfd/error.hpp"
#include "sfd/geometry.hpp"
#include "sfd/lp.hpp"
#include "sfd/parallel.hpp"

namespace sfd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicographic s-subsets of [0, n).
void for_each_subset(int n, int s, const std::function<void(const std::vector<int>&)>& body) {
  std::vector<int> pick(s);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    body(pick);
    int i = s - 1;
    while (i >= 0 && pick[i] == n - s + i) --i;
    if (i < 0) return;
    ++pick[i];
    for (int j = i + 1; j < s; ++j) pick[j] = pick[j - 1] + 1;
  }
}

double binomial(int n, int s) {
  double v = 1.0;
  for (int i = 0; i < s; ++i) v = v * (n - i) / (i + 1);
  return v;
}

// Real critical points of poly(t) + price * t.
std::vector<double> critical_points(const SmoothFunction& f, double price) {
  const auto& a = f.coeffs();
  std::vector<double> d;
  for (std::size_t k = 1; k < a.size(); ++k) d.push_back(static_cast<double>(k) * a[k]);
  if (d.empty()) d.push_back(0.0);
  d[0] += price;
  while (d.size() > 1 && d.back() == 0.0) d.pop_back();
  const int deg = static_cast<int>(d.size()) - 1;
  std::vector<double> roots;
  if (deg == 1) {
    roots.push_back(-d[0] / d[1]);
  } else if (deg > 1) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -d[i] / d[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) {
      const std::complex<double> z = es.eigenvalues()(i);
      if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
      double t = z.real();
      for (int it = 0; it < 4; ++it) {
        const double g = f.poly(t, 1) + price;
        const double h = f.poly(t, 2);
        if (h == 0.0) break;
        t -= g / h;
      }
      roots.push_back(t);
    }
  }
  return roots;
}

// min over [lo, hi] of poly(t) + price * t.
double minimize_1d(const SmoothFunction& f, double price, double lo, double hi) {
  double best_t = lo;
  double best = f.poly(lo) + price * lo;
  auto consider = [&](double t) {
    t = std::clamp(t, lo, hi);
    const double v = f.poly(t) + price * t;
    if (v < best) {
      best = v;
      best_t = t;
    }
  };
  consider(hi);
  consider(0.0);
  for (double t : critical_points(f, price)) consider(t);
  return best_t;
}

// min 1/2 z^T Q z + g^T z over the box, by enumerating which coordinates
// sit at a bound. Exact whenever the minimizer's free block is nonsingular,
// which covers positive definite Q.
Eigen::VectorXd minimize_box_quadratic(const Eigen::MatrixXd& q, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                                       const Eigen::VectorXd& hi) {
  const int s = static_cast<int>(g.size());
  auto objective = [&](const Eigen::VectorXd& z) { return 0.5 * z.dot(q * z) + g.dot(z); };
  Eigen::VectorXd best_z = lo;
  double best = objective(lo);
  std::vector<int> state(s, 0);  // 0 lower, 1 upper, 2 free
  long total = 1;
  for (int i = 0; i < s; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> free_idx;
    Eigen::VectorXd z(s);
    for (int i = 0; i < s; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 2) {
        free_idx.push_back(i);
        z(i) = 0.0;
      } else {
        z(i) = state[i] == 0 ? lo(i) : hi(i);
      }
    }
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      Eigen::MatrixXd qff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (int a = 0; a < nf; ++a) {
        rhs(a) = -g(free_idx[a]);
        for (int j = 0; j < s; ++j) {
          if (state[j] != 2) rhs(a) -= q(free_idx[a], j) * z(j);
        }
        for (int b = 0; b < nf; ++b) qff(a, b) = q(free_idx[a], free_idx[b]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(qff);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd zf = lu.solve(rhs);
      bool inside = true;
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[a];
        const double slack = 1e-12 * (1.0 + hi(i) - lo(i));
        if (zf(a) < lo(i) - slack || zf(a) > hi(i) + slack) {
          inside = false;
          break;
        }
        z(i) = std::clamp(zf(a), lo(i), hi(i));
      }
      if (!inside) continue;
    }
    const double v = objective(z);
    if (v < best) {
      best = v;
      best_z = z;
    }
  }
  return best_z;
}

OracleResult smooth_oracle(const SmoothBlock& blk, const Eigen::VectorXd& price) {
  const int n = blk.dim();
  const int s = blk.sparsity;
  const SmoothFunction& f = blk.f;
  if (binomial(n, s) * (f.separable() ? 1.0 : std::pow(3.0, s)) > 1e8) {
    throw Error(ErrorCode::kCapExceeded, "smooth oracle: support enumeration too large");
  }
  OracleResult best;
  best.value = kInf;
  for_each_subset(n, s, [&](const std::vector<int>& sup) {
    Point x = Point::Zero(n);
    if (f.separable()) {
      for (int j : sup) x(j) = minimize_1d(f, price(j), blk.lower(j), blk.upper(j));
    } else {
      Eigen::MatrixXd qs(s, s);
      Eigen::VectorXd gs(s), lo(s), hi(s);
      for (int a = 0; a < s; ++a) {
        gs(a) = f.q_vector()(sup[a]) + price(sup[a]);
        lo(a) = blk.lower(sup[a]);
        hi(a) = blk.upper(sup[a]);
        for (int b = 0; b < s; ++b) qs(a, b) = f.q_matrix()(sup[a], sup[b]);
      }
      const Eigen::VectorXd z = minimize_box_quadratic(qs, gs, lo, hi);
      for (int a = 0; a < s; ++a) x(sup[a]) = z(a);
    }
    const double v = f.value(x) + price.dot(x);
    if (!std::isfinite(v)) throw Error(ErrorCode::kOracleFailure, "smooth oracle produced a non-finite value");
    if (v < best.value - 1e-13 * (1.0 + std::abs(v))) {
      best.value = v;
      best.point = x;
    }
  });
  return best;
}

// Per-block candidate (cost, coupling usage) lists for exact enumeration.
struct Candidate {
  double cost = 0.0;
  Eigen::VectorXd w;
  Point x;
};

std::vector<std::vector<Candidate>> candidate_lists(const BlockProblem& p, int grid) {
  std::vector<std::vector<Candidate>> out(p.k);
  for (int i = 0; i < p.k; ++i) {
    const BlockSet& blk = p.blocks[i];
    std::vector<Point> xs;
    if (blk.finite()) {
      xs = blk.points().points();
    } else {
      xs = smooth_candidates(blk.smooth(), grid);
    }
    for (auto& x : xs) {
      Candidate c;
      c.cost = p.c[i].dot(x) + (blk.finite() ? 0.0 : blk.smooth().f.value(x));
      c.w = p.B[i] * x;
      c.x = std::move(x);
      out[i].push_back(std::move(c));
    }
  }
  return out;
}

// Hull LP over candidate lists: min sum w_ij cost_ij, sum_j w_ij = 1,
// sum w_ij usage_ij <= b.
CharacterizationResult hull_lp(const std::vector<std::vector<Candidate>>& cands, const Eigen::VectorXd& b) {
  const int k = static_cast<int>(cands.size());
  const int m = static_cast<int>(b.size());
  int vars = 0;
  for (const auto& c : cands) vars += static_cast<int>(c.size());
  LpProblem lp;
  lp.a_eq = Eigen::MatrixXd::Zero(k, vars);
  lp.b_eq = Eigen::VectorXd::Ones(k);
  lp.a_ub = Eigen::MatrixXd::Zero(m, vars);
  lp.b_ub = b;
  lp.c = Eigen::VectorXd::Zero(vars);
  int col = 0;
  for (int i = 0; i < k; ++i) {
    for (const auto& c : cands[i]) {
      lp.a_eq(i, col) = 1.0;
      lp.a_ub.col(col) = c.w;
      lp.c(col) = c.cost;
      ++col;
    }
  }
  const LpResult r = lp_solve(lp);
  if (r.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kInfeasible, "hull relaxation is infeasible for this right-hand side");
  }
  return {r.objective, r.price_ub.cwiseMax(0.0)};
}

}  // namespace

int BlockSet::dim() const { return finite() ? points().dim() : smooth().dim(); }

void BlockProblem::validate() const {
  if (k <= 0 || n <= 0 || m < 0) throw Error(ErrorCode::kInvalidArgument, "block problem: k, n must be positive");
  if (static_cast<int>(c.size()) != k || static_cast<int>(B.size()) != k || static_cast<int>(blocks.size()) != k) {
    throw Error(ErrorCode::kDimensionMismatch, "block problem: need k objective vectors, matrices and blocks");
  }
  if (b.size() != m) throw Error(ErrorCode::kDimensionMismatch, "block problem: b must have m entries");
  for (int i = 0; i < k; ++i) {
    if (c[i].size() != n || B[i].rows() != m || B[i].cols() != n || blocks[i].dim() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "block problem: shapes of block " + std::to_string(i));
    }
    if (!blocks[i].finite()) blocks[i].smooth().validate();
  }
}

bool BlockProblem::all_finite() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const BlockSet& s) { return s.finite(); });
}

OracleResult block_oracle(const BlockSet& block, const Eigen::VectorXd& price) {
  if (!price.allFinite()) throw Error(ErrorCode::kInvalidArgument, "block_oracle: price must be finite");
  if (price.size() != block.dim()) throw Error(ErrorCode::kDimensionMismatch, "block_oracle: price dimension");
  if (!block.finite()) return smooth_oracle(block.smooth(), price);
  const PointSet& s = block.points();
  OracleResult best{s[0], price.dot(s[0])};
  for (std::size_t j = 1; j < s.size(); ++j) {
    const double v = price.dot(s[j]);
    if (v < best.value) best = {s[j], v};
  }
  return best;
}

DualEvaluation dual_value(const BlockProblem& p, const Eigen::VectorXd& lambda) {
  if (lambda.size() != p.m) throw Error(ErrorCode::kDimensionMismatch, "dual_value: lambda has wrong length");
  if ((lambda.array() < 0.0).any()) throw Error(ErrorCode::kInvalidArgument, "dual_value: lambda must be >= 0");
  std::vector<OracleResult> res(p.k);
  parallel_for(static_cast<std::size_t>(p.k), [&](std::size_t i) {
    res[i] = block_oracle(p.blocks[i], p.c[i] + p.B[i].transpose() * lambda);
  });
  DualEvaluation ev;
  ev.value = -lambda.dot(p.b);
  ev.subgradient = -p.b;
  for (int i = 0; i < p.k; ++i) {
    ev.value += res[i].value;
    ev.subgradient += p.B[i] * res[i].point;
    ev.minimizers.push_back(std::move(res[i].point));
  }
  return ev;
}

std::string schedule_name(StepSchedule s) {
  switch (s) {
    case StepSchedule::kConstant: return "constant";
    case StepSchedule::kDiminishing: return "diminishing";
    case StepSchedule::kPolyak: return "polyak";
  }
  return "?";
}

StepSchedule parse_schedule(const std::string& name) {
  if (name == "constant") return StepSchedule::kConstant;
  if (name == "diminishing") return StepSchedule::kDiminishing;
  if (name == "polyak") return StepSchedule::kPolyak;
  throw Error(ErrorCode::kInvalidArgument, "unknown schedule '" + name + "'");
}

DualState solve_dual(const BlockProblem& p, const DualOptions& opts) {
  p.validate();
  if (opts.max_iter <= 0 || opts.window <= 0) throw Error(ErrorCode::kInvalidArgument, "solve_dual: bad iteration limits");
  DualState st;
  st.lambda = Eigen::VectorXd::Zero(p.m);
  st.best_lambda = st.lambda;
  const bool adaptive = opts.schedule == StepSchedule::kPolyak && std::isnan(opts.polyak_target);
  // Adaptive level: aim delta above the best value, widening delta after
  // a step reaches the level and narrowing it otherwise.
  double delta = 0.0, level = 0.0;

  for (int t = 1; t <= opts.max_iter; ++t) {
    DualEvaluation ev = dual_value(p, st.lambda);
    st.iterate = t;
    st.value = ev.value;
    st.subgradient = ev.subgradient;
    if (ev.value > st.best_value) {
      st.best_value = ev.value;
      st.best_lambda = st.lambda;
    }
    st.trace.push_back(st.best_value);
    if (t > opts.window) {
      st.window_improvement = st.trace[t - 1] - st.trace[t - 1 - opts.window];
      const bool level_settled = !adaptive || delta <= opts.stop_tol * (1.0 + std::abs(st.best_value));
      if (st.window_improvement < opts.stop_tol && level_settled) {
        st.converged = true;
        break;
      }
    } else {
      st.window_improvement = st.best_value - st.trace.front();
    }

    // Projected ascent direction; zero means lambda is a maximizer.
    Eigen::VectorXd d = ev.subgradient;
    for (int j = 0; j < p.m; ++j) {
      if (st.lambda(j) <= 0.0 && d(j) < 0.0) d(j) = 0.0;
    }
    const double dn2 = d.squaredNorm();
    if (dn2 == 0.0) {
      st.converged = true;
      break;
    }

    double eta = 0.0;
    switch (opts.schedule) {
      case StepSchedule::kConstant: eta = opts.eta; break;
      case StepSchedule::kDiminishing: eta = opts.eta / std::sqrt(static_cast<double>(t)); break;
      case StepSchedule::kPolyak: {
        if (!adaptive) {
          eta = std::max(0.0, opts.polyak_target - ev.value) / dn2;
          break;
        }
        if (t == 1) {
          delta = opts.eta * std::sqrt(dn2);
        } else if (ev.value >= level) {
          delta *= 1.5;
        } else {
          delta = std::max(0.995 * delta, 1e-12 * (1.0 + std::abs(st.best_value)));
        }
        level = st.best_value + delta;
        eta = (level - ev.value) / dn2;
        break;
      }
    }
    st.lambda = (st.lambda + eta * ev.subgradient).cwiseMax(0.0);
  }
  return st;
}

nlohmann::json to_json(const DualState& s, bool with_trace) {
  nlohmann::json j = {{"lambda", std::vector<double>(s.best_lambda.data(), s.best_lambda.data() + s.best_lambda.size())},
                      {"bestValue", s.best_value},
                      {"lastValue", s.value},
                      {"iterations", s.iterate},
                      {"windowImprovement", s.window_improvement},
                      {"converged", s.converged}};
  if (with_trace) j["trace"] = s.trace;
  return j;
}

std::vector<Point> smooth_candidates(const SmoothBlock& block, int grid) {
  if (grid < 2) throw Error(ErrorCode::kInvalidArgument, "smooth_candidates: grid must be >= 2");
  const int n = block.dim();
  // Per-coordinate nonzero values: the grid over the box, minus zero.
  std::vector<std::vector<double>> vals(n);
  for (int j = 0; j < n; ++j) {
    for (int g = 0; g < grid; ++g) {
      const double v = block.lower(j) + (block.upper(j) - block.lower(j)) * g / (grid - 1);
      if (std::abs(v) > 1e-12 * (1.0 + block.upper(j) - block.lower(j))) vals[j].push_back(v);
    }
  }
  std::vector<Point> out{Point::Zero(n)};
  for (int size = 1; size <= block.sparsity; ++size) {
    for_each_subset(n, size, [&](const std::vector<int>& sup) {
      std::vector<std::size_t> idx(size, 0);
      while (true) {
        Point x = Point::Zero(n);
        for (int a = 0; a < size; ++a) x(sup[a]) = vals[sup[a]][idx[a]];
        out.push_back(std::move(x));
        int a = size - 1;
        while (a >= 0 && idx[a] + 1 == vals[sup[a]].size()) idx[a--] = 0;
        if (a < 0) break;
        ++idx[a];
      }
    });
  }
  return out;
}

double primal_bruteforce(const BlockProblem& p, const Eigen::VectorXd& b_shift, const BruteforceOptions& opts) {
  p.validate();
  if (b_shift.size() != p.m) throw Error(ErrorCode::kDimensionMismatch, "primal_bruteforce: b has wrong length");
  auto cands = candidate_lists(p, opts.smooth_grid);
  const double feas = 1e-9 * (1.0 + b_shift.cwiseAbs().maxCoeff());

  // Drop candidates no better in cost and usage than another one.
  for (auto& list : cands) {
    std::vector<char> keep(list.size(), 0);
    for (std::size_t a = 0; a < list.size(); ++a) {
      bool dominated = false;
      for (std::size_t o = 0; o < list.size() && !dominated; ++o) {
        if (o == a) continue;
        const bool weakly = list[o].cost <= list[a].cost && (list[o].w.array() <= list[a].w.array()).all();
        if (!weakly) continue;
        const bool same = list[o].cost == list[a].cost && list[o].w == list[a].w;
        dominated = !same || o < a;
      }
      keep[a] = !dominated;
    }
    std::vector<Candidate> kept;
    for (std::size_t a = 0; a < list.size(); ++a) {
      if (keep[a]) kept.push_back(std::move(list[a]));
    }
    list = std::move(kept);
  }

  Eigen::VectorXd lambda;
  try {
    lambda = hull_lp(cands, b_shift).lambda;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInfeasible) return kInf;
    throw;
  }

  const int k = p.k;
  std::vector<std::vector<double>> reduced(k);
  std::vector<double> suffix_rc(k + 1, 0.0);
  std::vector<Eigen::VectorXd> suffix_w(k + 1, Eigen::VectorXd::Zero(p.m));
  for (int i = k - 1; i >= 0; --i) {
    auto& list = cands[i];
    std::stable_sort(list.begin(), list.end(), [&](const Candidate& a, const Candidate& b) {
      return a.cost + lambda.dot(a.w) < b.cost + lambda.dot(b.w);
    });
    Eigen::VectorXd wmin = list[0].w;
    for (const auto& c : list) {
      reduced[i].push_back(c.cost + lambda.dot(c.w));
      wmin = wmin.cwiseMin(c.w);
    }
    suffix_rc[i] = suffix_rc[i + 1] + reduced[i][0];
    suffix_w[i] = suffix_w[i + 1] + wmin;
  }

  double best = kInf;
  std::size_t nodes = 0;
  const double lb_b = lambda.dot(b_shift);
  std::function<void(int, double, double, const Eigen::VectorXd&)> dfs = [&](int i, double cost, double rc,
                                                                             const Eigen::VectorXd& w) {
    if (i == k) {
      if ((w.array() <= b_shift.array() + feas).all() && cost < best) best = cost;
      return;
    }
    if (((w + suffix_w[i]).array() > b_shift.array() + feas).any()) return;
    for (std::size_t j = 0; j < cands[i].size(); ++j) {
      // Lagrangian bound: cost >= reduced cost sum - lambda . b for feasible completions.
      if (rc + reduced[i][j] + suffix_rc[i + 1] - lb_b >= best - 1e-12 * (1.0 + std::abs(best))) break;
      if (++nodes > opts.node_cap) throw Error(ErrorCode::kCapExceeded, "primal_bruteforce: node cap exceeded");
      dfs(i + 1, cost + cands[i][j].cost, rc + reduced[i][j], w + cands[i][j].w);
    }
  };
  dfs(0, 0.0, 0.0, Eigen::VectorXd::Zero(p.m));
  return best;
}

CharacterizationResult primal_characterization(const BlockProblem& p) {
  p.validate();
  if (!p.all_finite()) throw Error(ErrorCode::kInvalidArgument, "primal_characterization: finite blocks only");
  return hull_lp(candidate_lists(p, 2), p.b);
}

std::vector<PointSet> image_sets(const BlockProblem& p) {
  p.validate();
  if (!p.all_finite()) throw Error(ErrorCode::kInvalidArgument, "image_sets: finite blocks only");
  std::vector<PointSet> out;
  for (int i = 0; i < p.k; ++i) {
    Eigen::MatrixXd map(p.m + 1, p.n);
    map.row(0) = p.c[i].transpose();
    map.bottomRows(p.m) = p.B[i];
    out.push_back(p.blocks[i].points().mapped(map));
  }
  return out;
}

GapCertificate gap_certificate(const BlockProblem& p, const CertificateOptions& opts) {
  const auto images = image_sets(p);
  const PointSet sum = minkowski_sum(images);
  GapCertificate g;
  g.tol = opts.tol;
  MeasureOptions mo;
  mo.seed = opts.seed;
  if (sum.dim() <= 2 && opts.phi_method != MeasureMethod::kSampled) {
    mo.method = MeasureMethod::kExact2D;
    g.e = phi(sum, mo).value;
    g.e_method = method_name(MeasureMethod::kExact2D);
  } else {
    mo.method = MeasureMethod::kSampled;
    mo.gap_tol = 1e-2;
    g.e = phi_sampled(sum, images, mo).upper;
    g.e_method = "SAMPLED_UPPER";
  }
  g.opt_b = primal_bruteforce(p, p.b);
  g.opt_b_shift = primal_bruteforce(p, (p.b.array() + g.e).matrix());
  g.dual = primal_characterization(p).value;
  if (opts.run_subgradient) g.dual_subgradient = solve_dual(p, opts.dual).best_value;
  g.delta = g.opt_b - g.dual;
  g.lower_ok = g.opt_b_shift - g.e <= g.dual + g.tol;
  g.upper_ok = g.dual <= g.opt_b + g.tol;
  g.delta_ok = g.delta <= g.e + g.opt_b - g.opt_b_shift + g.tol;
  return g;
}

nlohmann::json to_json(const GapCertificate& g) {
  return {{"E", g.e},
          {"EMethod", g.e_method},
          {"optB", g.opt_b},
          {"optBshift", g.opt_b_shift},
          {"dual", g.dual},
          {"dualSubgradient", g.dual_subgradient},
          {"delta", g.delta},
          {"tol", g.tol},
          {"lowerOk", g.lower_ok},
          {"upperOk", g.upper_ok},
          {"deltaOk", g.delta_ok},
          {"ok", g.ok()}};
}

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json mat_json(const Eigen::MatrixXd& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) rows.push_back(vec_json(a.row(r).transpose()));
  return rows;
}

Eigen::VectorXd json_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd json_mat(const nlohmann::json& j, Eigen::Index cols) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = json_vec(j[r]);
    if (row.size() != cols) throw Error(ErrorCode::kDimensionMismatch, "matrix row has wrong length");
    a.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return a;
}

}  // namespace

nlohmann::json to_json(const BlockProblem& p) {
  nlohmann::json j;
  j["k"] = p.k;
  j["n"] = p.n;
  j["m"] = p.m;
  j["b"] = vec_json(p.b);
  j["c"] = nlohmann::json::array();
  j["B"] = nlohmann::json::array();
  j["blocks"] = nlohmann::json::array();
  for (int i = 0; i < p.k; ++i) {
    j["c"].push_back(vec_json(p.c[i]));
    j["B"].push_back(mat_json(p.B[i]));
    const BlockSet& blk = p.blocks[i];
    if (blk.finite()) {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& x : blk.points()) pts.push_back(vec_json(x));
      j["blocks"].push_back({{"kind", "FINITE"}, {"points", pts}});
      continue;
    }
    const SmoothBlock& s = blk.smooth();
    nlohmann::json b = {{"kind", "SMOOTH_SPARSE"},
                        {"family", family_name(s.f.family())},
                        {"L", s.lipschitz},
                        {"s", s.sparsity},
                        {"lower", vec_json(s.lower)},
                        {"upper", vec_json(s.upper)}};
    if (s.f.family() == SmoothFamily::kQuadratic) {
      b["Q"] = mat_json(s.f.q_matrix());
      b["q"] = vec_json(s.f.q_vector());
    } else if (s.f.family() == SmoothFamily::kCustom) {
      b["coeffs"] = s.f.coeffs();
    }
    j["blocks"].push_back(b);
  }
  return j;
}

BlockProblem block_problem_from_json(const nlohmann::json& j) {
  try {
    BlockProblem p;
    p.k = j.at("k").get<int>();
    p.n = j.at("n").get<int>();
    p.m = j.at("m").get<int>();
    p.b = json_vec(j.at("b"));
    for (const auto& c : j.at("c")) p.c.push_back(json_vec(c));
    for (const auto& b : j.at("B")) p.B.push_back(json_mat(b, p.n));
    for (const auto& blk : j.at("blocks")) {
      const std::string kind = blk.at("kind").get<std::string>();
      if (kind == "FINITE") {
        std::vector<Point> pts;
        for (const auto& x : blk.at("points")) pts.push_back(json_vec(x));
        p.blocks.push_back({PointSet(p.n, std::move(pts))});
      } else if (kind == "SMOOTH_SPARSE") {
        const SmoothFamily fam = parse_family(blk.at("family").get<std::string>());
        SmoothFunction f = fam == SmoothFamily::kQuadratic ? SmoothFunction::quadratic(json_mat(blk.at("Q"), p.n), json_vec(blk.at("q")))
                           : fam == SmoothFamily::kQuarticDoubleWell
                               ? SmoothFunction::quartic_double_well(p.n)
                               : SmoothFunction::custom(p.n, blk.at("coeffs").get<std::vector<double>>());
        SmoothBlock s{std::move(f), blk.at("L").get<double>(), blk.at("s").get<int>(), json_vec(blk.at("lower")),
                      json_vec(blk.at("upper"))};
        p.blocks.push_back({std::move(s)});
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown block kind '" + kind + "'");
      }
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, std::string("malformed problem JSON: ") + e.what());
  }
}

BlockProblem discretize(const BlockProblem& p, int grid) {
  p.validate();
  if (p.all_finite()) return p;
  BlockProblem q;
  q.k = p.k;
  q.n = p.n + 1;
  q.m = p.m;
  q.b = p.b;
  for (int i = 0; i < p.k; ++i) {
    Eigen::VectorXd c(q.n);
    c << 1.0, p.c[i];
    q.c.push_back(c);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p.m, q.n);
    b.rightCols(p.n) = p.B[i];
    q.B.push_back(b);
    const BlockSet& blk = p.blocks[i];
    const std::vector<Point> xs = blk.finite() ? blk.points().points() : smooth_candidates(blk.smooth(), grid);
    std::vector<Point> lifted;
    for (const auto& x : xs) {
      Point y(q.n);
      y << (blk.finite() ? 0.0 : blk.smooth().f.value(x)), x;
      lifted.push_back(std::move(y));
    }
    q.blocks.push_back({PointSet(q.n, std::move(lifted))});
  }
  return q;
}

}  // namespace sfd
