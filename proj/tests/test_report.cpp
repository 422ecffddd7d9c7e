#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sfd/error.hpp"
#include "sfd/experiments.hpp"
#include "sfd/report.hpp"

using namespace sfd;
namespace fs = std::filesystem;

namespace {

ExperimentConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string csv_of(const ExperimentReport& r) {
  std::ostringstream out;
  write_report_csv(out, r);
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sfd_report_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int count_of(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  unsetenv("SFD_SEED");
  const auto cfg = config_from("# comment\nexperiment = pball_convexification\nseed = 42\n  p = 1.5 # trailing\nkMax=3\n");
  CHECK(cfg.name == "pball_convexification");
  CHECK(cfg.seed == 42);
  CHECK(cfg.params.at("p") == "1.5");
  CHECK(cfg.params.at("kMax") == "3");
  CHECK(cfg.output_dir == ".");

  CHECK_THROWS_AS(config_from("experiment = x\n"), Error);
  CHECK_THROWS_AS(config_from("seed = 1\n"), Error);
  CHECK_THROWS_AS(config_from("experiment = x\nseed = 1\nno equals sign\n"), Error);
  CHECK_THROWS_AS(config_from("experiment = x\nseed = 1\np = 1\np = 2\n"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), Error);

  SUBCASE("SFD_SEED overrides the file") {
    setenv("SFD_SEED", "9", 1);
    CHECK(config_from("experiment = x\nseed = 1\n").seed == 9);
    CHECK(config_from("experiment = x\n").seed == 9);
    unsetenv("SFD_SEED");
  }
}

TEST_CASE("config hash is order independent and seed sensitive") {
  unsetenv("SFD_SEED");
  const auto a = config_from("experiment = e\nseed = 1\na = 1\nb = 2\n");
  const auto b = config_from("b = 2\nseed = 1\na = 1\nexperiment = e\n");
  const auto c = config_from("experiment = e\nseed = 2\na = 1\nb = 2\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 40);
  CHECK(canonical_config(a) == "experiment=e\nseed=1\na=1\nb=2\n");
  // sha1sum of the canonical text above.
  CHECK(config_hash(a) == "26a315cfc3f486760360ffb241b8a27abb1cbfb3");
}

TEST_CASE("experiment parameters are validated") {
  unsetenv("SFD_SEED");
  CHECK_THROWS_AS(run_experiment(config_from("experiment = no_such\nseed = 1\n")), Error);
  CHECK_THROWS_AS(run_experiment(config_from("experiment = pball_convexification\nseed = 1\nbogus = 1\n")), Error);
  CHECK_THROWS_AS(run_experiment(config_from("experiment = pball_convexification\nseed = 1\np = 3\n")), Error);
  CHECK_THROWS_AS(run_experiment(config_from("experiment = pball_convexification\nseed = 1\nkMax = 9\n")), Error);
  CHECK_THROWS_AS(run_experiment(config_from("experiment = projection_factor_sweep\nseed = 1\nsMax = x\n")), Error);
}

TEST_CASE("CSV quoting and line ends") {
  ExperimentReport r;
  r.name = "t";
  r.columns = {{"a", ""}, {"b", ""}, {"c", ""}};
  r.rows = {{1, "x,y", nullptr}, {0.5, "say \"hi\"", true}};
  CHECK(csv_of(r) == "a,b,c\r\n1,\"x,y\",\r\n0.5,\"say \"\"hi\"\"\",true\r\n");
}

TEST_CASE("empty sweep gives a header-only CSV and no SVG") {
  unsetenv("SFD_SEED");
  auto cfg = config_from("experiment = sf_bounds_random\nseed = 3\ninstances = 0\n");
  cfg.output_dir = scratch_dir("empty").string();
  const auto report = run_experiment(cfg);
  CHECK(report.rows.empty());
  const auto files = emit_report(report, cfg);
  CHECK(files.svgs.empty());
  const std::string csv = slurp(files.csv);
  CHECK(count_of(csv, "\r\n") == 1);
  CHECK(csv.rfind("instance,", 0) == 0);
  CHECK(fs::exists(files.json));
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("p-ball report: values, plot and byte-identical rerun") {
  unsetenv("SFD_SEED");
  auto cfg = config_from("experiment = pball_convexification\nseed = 5\np = 2\nkMax = 4\nsamplePoints = 2048\n");
  cfg.output_dir = scratch_dir("pball").string();
  const auto first = run_experiment(cfg);
  REQUIRE(first.rows.size() == 4);
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double analytic = std::sqrt(k * k + 0.25) - k;
    CHECK(first.at(i, "notch_depth").get<double>() == doctest::Approx(analytic).epsilon(1e-12));
    CHECK(std::abs(first.at(i, "measured_phi").get<double>() - analytic) <= first.at(i, "mesh").get<double>());
    CHECK(first.at(i, "bound_hidden_ball").is_number());
    if (i > 0) CHECK(first.at(i, "measured_phi").get<double>() < first.at(i - 1, "measured_phi").get<double>());
  }
  CHECK(first.violations() == 0);
  CHECK(first.columns[static_cast<std::size_t>(first.column("bound_hidden_ball"))].cites.find("hidden-ball") !=
        std::string::npos);

  const auto files = emit_report(first, cfg);
  REQUIRE(files.svgs.size() == 1);
  const std::string svg = slurp(files.svgs[0]);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count_of(svg, "<polyline") == 2);
  CHECK(svg.find("measured_phi") != std::string::npos);
  CHECK(svg.find("notch_depth") != std::string::npos);
  CHECK(files.csv.find(config_hash(cfg).substr(0, 12)) != std::string::npos);

  const std::string bytes = slurp(files.csv);
  const auto again = emit_report(run_experiment(cfg), cfg);
  CHECK(again.csv == files.csv);
  CHECK(slurp(again.csv) == bytes);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("p = 1 notch stays near 0.5 / sqrt 2") {
  unsetenv("SFD_SEED");
  const auto r = run_experiment(config_from("experiment = pball_convexification\nseed = 8\np = 1\nkMax = 3\n"));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double v = r.at(i, "measured_phi").get<double>();
    CHECK(v >= 0.34);
    CHECK(v <= 0.37);
    CHECK(r.at(i, "bound_hidden_ball").is_null());
  }
}

TEST_CASE("p = 1.5 notch depth is a true distance") {
  unsetenv("SFD_SEED");
  const auto r = run_experiment(config_from("experiment = pball_convexification\nseed = 8\np = 1.5\nkMax = 2\nsamplePoints = 4096\n"));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double k = static_cast<double>(i + 1), d = r.at(i, "notch_depth").get<double>();
    // Lies between the circle and diamond depths, and some boundary point sits at distance d.
    CHECK(d > std::sqrt(k * k + 0.25) - k);
    CHECK(d < 0.5 / std::sqrt(2.0));
    double best = 1e9;
    for (int j = 0; j <= 200000; ++j) {
      const double th = 1.5707963267948966 * j / 200000;
      const double c = std::cos(th), s = std::sin(th);
      const double rad = k / std::pow(std::pow(c, 1.5) + std::pow(s, 1.5), 1.0 / 1.5);
      best = std::min(best, std::hypot(k - rad * c, 0.5 - rad * s));
    }
    CHECK(d == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("singleton sets round with zero error") {
  unsetenv("SFD_SEED");
  const auto r = run_experiment(config_from("experiment = sf_bounds_random\nseed = 1\nsetSize = 1\ninstances = 2\ntargets = 3\ntrials = 50\n"));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.at(i, "max_error").get<double>() <= 1e-9);
    CHECK(r.at(i, "status") == "ok");
  }
}

TEST_CASE("random sets respect both rounding bounds") {
  unsetenv("SFD_SEED");
  const auto r = run_experiment(config_from("experiment = sf_bounds_random\nseed = 4\ninstances = 3\ntargets = 10\ntrials = 2000\n"));
  REQUIRE(r.rows.size() == 3);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.at(i, "max_error").get<double>() <= r.at(i, "bound_sqrt_n_beta").get<double>() + 1e-9);
    CHECK(r.at(i, "max_refined_bound").get<double>() <= r.at(i, "bound_sqrt_n_beta").get<double>() + 1e-9);
    CHECK(r.at(i, "mse").get<double>() <= r.at(i, "mse_limit").get<double>());
  }
  CHECK(r.violations() == 0);
}

TEST_CASE("projection factor sweep") {
  unsetenv("SFD_SEED");
  const auto r = run_experiment(config_from("experiment = projection_factor_sweep\nseed = 2\nn = 5\nsMax = 3\nseeds = 30\n"));
  REQUIRE(r.rows.size() == 3);
  CHECK(r.at(0, "positive_gaussian").get<double>() == 0.0);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(r.at(i, "positive_gaussian").get<double>() == 1.0);
    CHECK(r.at(i, "positive_degenerate").get<double>() == 0.0);
    CHECK(r.at(i, "positive_perturbed_1e-6").get<double>() == 1.0);
  }
}

TEST_CASE("duality gap sweep, small") {
  unsetenv("SFD_SEED");
  const auto r = run_experiment(config_from("experiment = duality_gap_scaling\nseed = 3\nkList = 8,4\nseeds = 3\n"));
  REQUIRE(r.rows.size() == 2);
  // Rows follow the sweep variable.
  CHECK(r.at(0, "k").get<int>() == 4);
  CHECK(r.at(1, "k").get<int>() == 8);
  CHECK(r.at(1, "bound_hidden_ball").get<double>() < r.at(0, "bound_hidden_ball").get<double>());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r.at(i, "weak_duality_violations").get<int>() == 0);
    CHECK(r.at(i, "min_relative_gap").get<double>() >= -1e-6);
    const double omega = r.at(i, "omega").get<double>(), lip = r.at(i, "lipschitz").get<double>();
    const double beta = r.at(i, "beta").get<double>();
    const double k = r.at(i, "k").get<double>();
    const double rs = (k - 2) * omega / lip;
    CHECK(r.at(i, "r_star").get<double>() == doctest::Approx(rs));
    CHECK(r.at(i, "bound_hidden_ball").get<double>() == doctest::Approx(std::sqrt(rs * rs + beta * beta) - rs));
  }
}
