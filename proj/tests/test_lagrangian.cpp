#include "doctest.h"

#include <cmath>
#include <functional>

#include "sfd/error.hpp"
#include "sfd/geometry.hpp"
#include "sfd/lagrangian.hpp"
#include "sfd/rng.hpp"

using namespace sfd;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::MatrixXd mat1(double x) { return Eigen::MatrixXd::Constant(1, 1, x); }

// k copies of {0, 1} in R^1 with scalar cost and weight.
BlockProblem binary_problem(int k, double cost, double weight, double rhs) {
  BlockProblem p;
  p.k = k;
  p.n = 1;
  p.m = 1;
  p.b = vec({rhs});
  for (int i = 0; i < k; ++i) {
    p.c.push_back(vec({cost}));
    p.B.push_back(mat1(weight));
    p.blocks.push_back({PointSet::from_rows({{0}, {1}})});
  }
  return p;
}

// Plain product enumeration.
double enumerate_opt(const BlockProblem& p, const Eigen::VectorXd& b) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, double, Eigen::VectorXd)> rec = [&](int i, double cost, Eigen::VectorXd w) {
    if (i == p.k) {
      if ((w.array() <= b.array() + 1e-9).all()) best = std::min(best, cost);
      return;
    }
    for (const auto& x : p.blocks[i].points()) rec(i + 1, cost + p.c[i].dot(x), w + p.B[i] * x);
  };
  rec(0, 0.0, Eigen::VectorXd::Zero(p.m));
  return best;
}

SmoothBlock square_block() {
  SmoothBlock b{SmoothFunction::quadratic(mat1(2.0), vec({0.0})), 2.0, 1, vec({-2.0}), vec({2.0})};
  return b;
}

}  // namespace

TEST_CASE("finite block oracle") {
  const BlockSet seg{PointSet::from_rows({{0}, {1}})};
  auto r = block_oracle(seg, vec({1.0}));
  CHECK(r.point(0) == 0.0);
  CHECK(r.value == 0.0);
  const BlockSet sq{PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}})};
  r = block_oracle(sq, vec({-1.0, -1.0}));
  CHECK(r.point.isApprox(vec({1.0, 1.0})));
  CHECK(r.value == doctest::Approx(-2.0));
  // Ties go to the lowest index.
  r = block_oracle(sq, vec({0.0, 0.0}));
  CHECK(r.point.isZero());
}

TEST_CASE("smooth block oracle on x^2 - x") {
  const auto r = block_oracle({square_block()}, vec({-1.0}));
  CHECK(r.point(0) == doctest::Approx(0.5));
  CHECK(r.value == doctest::Approx(-0.25));
}

TEST_CASE("smooth block oracle matches a dense grid search") {
  Rng rng(4);
  const int n = 3;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
  const Eigen::MatrixXd q = m.transpose() * m + 0.2 * Eigen::MatrixXd::Identity(n, n);
  std::vector<SmoothBlock> blocks;
  blocks.push_back({SmoothFunction::quadratic(q, vec({0.3, -0.2, 0.1})), 1.0, 2, Eigen::VectorXd::Constant(n, -1.0),
                    Eigen::VectorXd::Constant(n, 1.0)});
  blocks.push_back({SmoothFunction::quartic_double_well(n), 25.0, 2, Eigen::VectorXd::Constant(n, -1.5),
                    Eigen::VectorXd::Constant(n, 1.5)});
  blocks.push_back({SmoothFunction::custom(n, {0.0, 0.1, -0.8, 0.3, 1.0}), 25.0, 1, Eigen::VectorXd::Constant(n, -1.5),
                    Eigen::VectorXd::Constant(n, 1.5)});
  for (const auto& blk : blocks) {
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd price = 2.0 * Eigen::VectorXd::NullaryExpr(n, [&] { return rng.normal(); });
      const auto r = block_oracle({blk}, price);
      CHECK(r.value == doctest::Approx(blk.f.value(r.point) + price.dot(r.point)));
      int nonzero = 0;
      for (int j = 0; j < n; ++j) nonzero += r.point(j) != 0.0;
      CHECK(nonzero <= blk.sparsity);
      double grid_best = std::numeric_limits<double>::infinity();
      for (const auto& x : smooth_candidates(blk, 121)) grid_best = std::min(grid_best, blk.f.value(x) + price.dot(x));
      CHECK(r.value <= grid_best + 1e-12);
      CHECK(r.value >= grid_best - 5e-3);
    }
  }
}

TEST_CASE("dual value examples") {
  auto p = binary_problem(1, 1.0, 1.0, 0.5);
  auto ev = dual_value(p, vec({1.0}));
  CHECK(ev.value == doctest::Approx(-0.5));
  CHECK(ev.subgradient(0) == doctest::Approx(-0.5));
  p = binary_problem(3, -1.0, 1.0, 1.5);
  ev = dual_value(p, vec({0.0}));
  CHECK(ev.value == doctest::Approx(-3.0));
  CHECK_THROWS_AS(dual_value(p, vec({-1.0})), Error);
}

TEST_CASE("weak duality against enumeration") {
  Rng rng(9);
  for (int seed = 0; seed < 10; ++seed) {
    const auto p = generate_finite_instance(3, 2, 2, 5, static_cast<std::uint64_t>(seed));
    const double opt = primal_bruteforce(p, p.b);
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd lam = Eigen::VectorXd::NullaryExpr(2, [&] { return 3.0 * rng.uniform(); });
      CHECK(dual_value(p, lam).value <= opt + 1e-9);
    }
  }
}

TEST_CASE("primal bruteforce examples and enumeration oracle") {
  CHECK(primal_bruteforce(binary_problem(1, 1.0, 1.0, 1.0), vec({1.0})) == 0.0);
  CHECK(primal_bruteforce(binary_problem(2, -1.0, 1.0, 1.0), vec({1.0})) == doctest::Approx(-1.0));
  CHECK(std::isinf(primal_bruteforce(binary_problem(2, -1.0, 1.0, 1.0), vec({-0.5}))));
  for (int seed = 0; seed < 40; ++seed) {
    const int m = 1 + seed % 2;
    const auto p = generate_finite_instance(4, 2, m, 6, static_cast<std::uint64_t>(seed));
    for (double shift : {0.0, 0.3, -0.4}) {
      const Eigen::VectorXd b = (p.b.array() + shift).matrix();
      const double want = enumerate_opt(p, b);
      const double got = primal_bruteforce(p, b);
      if (std::isinf(want)) {
        CHECK(std::isinf(got));
      } else {
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("primal characterization LP") {
  CHECK(primal_characterization_lp(binary_problem(3, -1.0, 1.0, 1.5)) == doctest::Approx(-1.5));
  auto seg = binary_problem(1, 2.0, 1.0, 5.0);
  CHECK(primal_characterization_lp(seg) == doctest::Approx(0.0));
  CHECK_THROWS_AS(primal_characterization_lp(binary_problem(2, 1.0, 1.0, -1.0)), Error);
}

TEST_CASE("solve_dual examples") {
  // Convex image: one segment block, objective collinear with the coupling.
  auto p = binary_problem(1, -1.0, 1.0, 0.5);
  p.blocks[0] = {PointSet::from_rows({{0}, {0.25}, {0.5}, {0.75}, {1}})};
  DualOptions o;
  o.schedule = StepSchedule::kPolyak;
  auto st = solve_dual(p, o);
  CHECK(st.best_value == doctest::Approx(primal_bruteforce(p, p.b)).epsilon(1e-4));

  auto loose = binary_problem(3, 1.0, 1.0, 100.0);
  st = solve_dual(loose, {});
  CHECK(st.iterate == 1);
  CHECK(st.best_value == doctest::Approx(dual_value(loose, vec({0.0})).value));

  auto knap = binary_problem(2, -1.0, 1.0, 1.0);
  knap.c[1] = vec({-2.0});
  knap.B[1] = mat1(1.5);
  knap.b = vec({2.0});
  for (auto sched : {StepSchedule::kPolyak, StepSchedule::kDiminishing}) {
    o.schedule = sched;
    o.eta = 0.5;
    st = solve_dual(knap, o);
    CHECK(std::abs(st.best_value - primal_characterization_lp(knap)) <= 1e-4);
    for (std::size_t t = 1; t < st.trace.size(); ++t) CHECK(st.trace[t] >= st.trace[t - 1]);
    CHECK((st.best_lambda.array() >= 0.0).all());
  }
}

TEST_CASE("subgradient dual reaches the hull LP value") {
  DualOptions o;
  o.schedule = StepSchedule::kPolyak;
  for (int seed = 0; seed < 20; ++seed) {
    const auto p = generate_finite_instance(2 + seed % 4, 1 + seed % 3, 1 + seed % 2, 2 + seed % 7, static_cast<std::uint64_t>(seed));
    CHECK(std::abs(solve_dual(p, o).best_value - primal_characterization_lp(p)) <= 1e-3);
  }
}

TEST_CASE("image sets commute with hulls") {
  Rng rng(2);
  const auto p = generate_finite_instance(3, 3, 1, 6, 5);
  const auto images = image_sets(p);
  for (int i = 0; i < p.k; ++i) {
    const auto& pts = p.blocks[i].points();
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd w(static_cast<Eigen::Index>(pts.size()));
      for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = rng.exponential();
      w /= w.sum();
      Point x = Point::Zero(p.n);
      for (std::size_t j = 0; j < pts.size(); ++j) x += w(static_cast<Eigen::Index>(j)) * pts[j];
      Point y(2);
      y << p.c[i].dot(x), (p.B[i] * x)(0);
      CHECK(hull_membership(y, images[i]).inside);
    }
  }
}

TEST_CASE("gap certificate") {
  // Convex image: zero nonconvexity and no gap.
  auto conv = binary_problem(1, -1.0, 1.0, 0.5);
  conv.blocks[0] = {PointSet::from_rows({{0}, {1}})};
  conv.c[0] = vec({0.0});
  auto g = gap_certificate(conv);
  CHECK(g.ok());

  auto two = binary_problem(2, -1.0, 1.0, 1.0);
  g = gap_certificate(two);
  CHECK(g.ok());
  CHECK(g.opt_b == doctest::Approx(-1.0));
  CHECK(g.dual == doctest::Approx(-1.0));

  auto frac = binary_problem(2, -1.0, 1.0, 1.5);
  g = gap_certificate(frac);
  CHECK(g.ok());
  CHECK(g.delta == doctest::Approx(0.5));
  CHECK(g.e > 0.0);

  for (int seed = 0; seed < 10; ++seed) {
    const auto p = generate_finite_instance(3, 2, 1, 5, static_cast<std::uint64_t>(100 + seed));
    g = gap_certificate(p);
    CHECK(g.delta <= g.e + g.opt_b - g.opt_b_shift + 1e-6);
    CHECK(g.ok());
  }
}

TEST_CASE("problem JSON round trip") {
  auto p = generate_sparse_smooth_instance(2, 3, 1, 2, SmoothFamily::kQuadratic, 7).problem;
  p.blocks.push_back({PointSet::from_rows({{0, 0, 0}, {1, 0, 0}})});
  p.c.push_back(vec({1, 2, 3}));
  p.B.push_back(Eigen::MatrixXd::Ones(1, 3));
  p.k = 3;
  const auto q = block_problem_from_json(nlohmann::json::parse(to_json(p).dump()));
  CHECK(to_json(q) == to_json(p));
  CHECK_THROWS_AS(block_problem_from_json(nlohmann::json::parse(R"({"k": 1})")), Error);
}

TEST_CASE("sparse smooth instance generator") {
  const auto one = generate_sparse_smooth_instance(1, 2, 1, 2, SmoothFamily::kQuadratic, 1);
  CHECK_NOTHROW(one.problem.validate());
  CHECK_NOTHROW(dual_value(one.problem, vec({0.5})));
  const auto four = generate_sparse_smooth_instance(4, 3, 1, 2, SmoothFamily::kQuarticDoubleWell, 2);
  CHECK(four.omega > 0.0);
  CHECK(four.beta > 0.0);
  CHECK_THROWS_AS(generate_sparse_smooth_instance(2, 3, 2, 2, SmoothFamily::kQuadratic, 3), Error);
  // Same seed, same instance.
  CHECK(to_json(generate_sparse_smooth_instance(3, 3, 1, 2, SmoothFamily::kCustom, 5).problem) ==
        to_json(generate_sparse_smooth_instance(3, 3, 1, 2, SmoothFamily::kCustom, 5).problem));
  // The right-hand side is met by some grid point selection.
  CHECK(std::isfinite(primal_bruteforce(four.problem, four.problem.b)));
}

TEST_CASE("discretized epigraph problem") {
  const auto gen = generate_sparse_smooth_instance(3, 3, 1, 2, SmoothFamily::kQuadratic, 11);
  const auto d = discretize(gen.problem, 5);
  CHECK(d.all_finite());
  CHECK(d.n == 4);
  CHECK(d.blocks[0].points().size() == smooth_candidates(gen.problem.blocks[0].smooth(), 5).size());
  BruteforceOptions bo;
  bo.smooth_grid = 5;
  CHECK(primal_bruteforce(d, d.b) == doctest::Approx(primal_bruteforce(gen.problem, gen.problem.b, bo)));
  CHECK(primal_characterization_lp(d) <= primal_bruteforce(d, d.b) + 1e-9);
  // 1 + 3 * 4 + 3 * 16 grid points with at most two nonzeros.
  CHECK(smooth_candidates(gen.problem.blocks[0].smooth(), 5).size() == 61);
}
