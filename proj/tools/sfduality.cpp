// sfduality: command-line front end for the sfd library.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sfd/decompose.hpp"
#include "sfd/error.hpp"
#include "sfd/experiments.hpp"
#include "sfd/geometry.hpp"
#include "sfd/lagrangian.hpp"
#include "sfd/measures.hpp"
#include "sfd/point_set.hpp"
#include "sfd/report.hpp"
#include "sfd/smooth.hpp"

namespace {

using nlohmann::json;
using sfd::Error;
using sfd::ErrorCode;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIoError, "'" + path + "' is not valid JSON: " + e.what());
  }
}

// "-" or empty writes to stdout.
void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write to '" + path + "' failed");
}

sfd::PointSet read_set(const std::string& path) {
  try {
    return sfd::point_set_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIoError, "'" + path + "' is not a point set: " + e.what());
  }
}

// Either a bare array of point sets or {"sets": [...]}.
std::vector<sfd::PointSet> read_sets(const std::string& path) {
  const json j = read_json(path);
  const json& arr = j.is_object() && j.contains("sets") ? j.at("sets") : j;
  if (!arr.is_array() || arr.empty()) throw Error(ErrorCode::kIoError, "'" + path + "' holds no point sets");
  std::vector<sfd::PointSet> sets;
  try {
    for (const auto& s : arr) sets.push_back(sfd::point_set_from_json(s));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIoError, "'" + path + "': " + e.what());
  }
  return sets;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::string t = text;
  for (char& ch : t)
    if (ch == ',' || ch == '[' || ch == ']' || ch == ';') ch = ' ';
  std::istringstream ss(t);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "'" + tok + "' is not a number");
    }
  }
  return out;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_numbers(line));
    if (rows.back().size() != rows.front().size()) throw Error(ErrorCode::kIoError, "ragged rows in '" + path + "'");
  }
  if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::kIoError, "'" + path + "' is empty");
  Eigen::MatrixXd b(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return b;
}

sfd::BlockProblem read_problem(const std::string& path) { return sfd::block_problem_from_json(read_json(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley-Folkman measures, decompositions and Lagrangian duality gaps"};
  app.require_subcommand(1);

  // measure
  auto* measure = app.add_subcommand("measure", "Phi, Xi and the enclosing radius of a point set");
  std::string m_in, m_out, m_method = "exact2d";
  std::uint64_t m_seed = 0;
  measure->add_option("--in", m_in, "point set JSON")->required();
  measure->add_option("--method", m_method, "exact2d | subset | sampled");
  measure->add_option("--seed", m_seed);
  measure->add_option("--out", m_out, "report JSON (default stdout)");

  // minksum
  auto* minksum = app.add_subcommand("minksum", "Minkowski sum of point sets");
  std::vector<std::string> ms_in;
  std::string ms_sets, ms_out;
  std::size_t ms_cap = sfd::kDefaultMinkowskiCap;
  minksum->add_option("--in", ms_in, "point set JSON, repeatable");
  minksum->add_option("--sets", ms_sets, "JSON array of point sets");
  minksum->add_option("--cap", ms_cap, "maximum pairwise product");
  minksum->add_option("--out", ms_out);

  // decompose
  auto* decompose = app.add_subcommand("decompose", "Decompose a target of conv(sum A_i) and round it");
  std::string d_sets, d_target, d_out;
  std::size_t d_trials = 10000;
  std::uint64_t d_seed = 0;
  decompose->add_option("--sets", d_sets)->required();
  decompose->add_option("--target", d_target, "comma or space separated coordinates")->required();
  decompose->add_option("--trials", d_trials);
  decompose->add_option("--seed", d_seed)->required();
  decompose->add_option("--out", d_out);

  // dual-solve
  auto* dual = app.add_subcommand("dual-solve", "Projected subgradient ascent on the Lagrangian dual");
  std::string ds_problem, ds_out, ds_schedule = "diminishing";
  sfd::DualOptions ds_opts;
  bool ds_trace = false;
  dual->add_option("--problem", ds_problem)->required();
  dual->add_option("--schedule", ds_schedule, "constant | diminishing | polyak");
  dual->add_option("--eta0", ds_opts.eta);
  dual->add_option("--max-iter", ds_opts.max_iter);
  dual->add_option("--polyak-target", ds_opts.polyak_target);
  dual->add_flag("--trace", ds_trace, "include the per-iteration trace");
  dual->add_option("--out", ds_out);

  // certify
  auto* certify = app.add_subcommand("certify", "Duality-gap certificate for a block problem");
  std::string c_problem, c_out, c_method = "exact2d";
  std::uint64_t c_seed = 0;
  int c_grid = 7;
  certify->add_option("--problem", c_problem)->required();
  certify->add_option("--phi-method", c_method, "exact2d | sampled");
  certify->add_option("--seed", c_seed);
  certify->add_option("--grid", c_grid, "grid per coordinate when smooth blocks are discretized");
  certify->add_option("--out", c_out);

  // genexp
  auto* genexp = app.add_subcommand("genexp", "Generate a seeded block problem");
  std::string g_kind = "smooth", g_family = "quadratic", g_out;
  int g_k = 8, g_n = 3, g_m = 1, g_s = 2, g_size = 6;
  std::uint64_t g_seed = 0;
  sfd::GeneratorOptions g_opts;
  genexp->add_option("--kind", g_kind, "smooth | finite");
  genexp->add_option("--k", g_k);
  genexp->add_option("--n", g_n);
  genexp->add_option("--m", g_m);
  genexp->add_option("--s", g_s);
  genexp->add_option("--size", g_size, "points per block (finite)");
  genexp->add_option("--family", g_family, "quadratic | quartic | custom");
  genexp->add_option("--half-width", g_opts.half_width);
  genexp->add_option("--omega-floor", g_opts.omega_floor);
  genexp->add_option("--seed", g_seed);
  genexp->add_option("--out", g_out);

  // projfactor
  auto* projfactor = app.add_subcommand("projfactor", "Projection factor of a coupling matrix");
  std::string p_b, p_out;
  int p_s = 1;
  bool p_degenerate = false;
  projfactor->add_option("--B", p_b, "m x n matrix CSV")->required();
  projfactor->add_option("--s", p_s)->required();
  projfactor->add_flag("--allow-degenerate", p_degenerate, "report 0 instead of failing on rank deficiency");
  projfactor->add_option("--out", p_out);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment and emit CSV, JSON and SVG");
  std::string e_config, e_outdir;
  experiment->add_option("--config", e_config)->required();
  experiment->add_option("--output-dir", e_outdir, "overrides outputDir in the config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*measure) {
      sfd::MeasureOptions opts;
      opts.method = sfd::parse_method(m_method);
      opts.seed = m_seed;
      write_json(m_out, sfd::to_json(sfd::measure(read_set(m_in), opts)));
    } else if (*minksum) {
      std::vector<sfd::PointSet> sets;
      if (!ms_sets.empty()) sets = read_sets(ms_sets);
      for (const auto& path : ms_in) sets.push_back(read_set(path));
      if (sets.empty()) throw Error(ErrorCode::kInvalidArgument, "minksum needs --in or --sets");
      write_json(ms_out, sfd::to_json(sfd::minkowski_sum(sets, ms_cap)));
    } else if (*decompose) {
      const auto sets = read_sets(d_sets);
      const auto coords = parse_numbers(d_target);
      const sfd::Point target = Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size()));
      const auto dec = sfd::sf_decompose(target, sets);
      sfd::RoundingOptions ro;
      ro.trials = d_trials;
      ro.seed = d_seed;
      const auto rounded = sfd::randomized_round(dec, sets, ro);
      write_json(d_out, {{"decomposition", sfd::to_json(dec)}, {"rounding", sfd::to_json(rounded)}});
    } else if (*dual) {
      ds_opts.schedule = sfd::parse_schedule(ds_schedule);
      ds_opts.record_trace = ds_trace;
      write_json(ds_out, sfd::to_json(sfd::solve_dual(read_problem(ds_problem), ds_opts), ds_trace));
    } else if (*certify) {
      sfd::BlockProblem p = read_problem(c_problem);
      const bool discretized = !p.all_finite();
      if (discretized) p = sfd::discretize(p, c_grid);
      sfd::CertificateOptions opts;
      opts.phi_method = sfd::parse_method(c_method);
      opts.seed = c_seed;
      const auto cert = sfd::gap_certificate(p, opts);
      json j = sfd::to_json(cert);
      if (discretized) j["discretizationGrid"] = c_grid;
      write_json(c_out, j);
      if (!cert.ok()) return 3;
    } else if (*genexp) {
      if (g_kind == "finite") {
        write_json(g_out, sfd::to_json(sfd::generate_finite_instance(g_k, g_n, g_m, g_size, g_seed)));
      } else if (g_kind == "smooth") {
        const auto gen = sfd::generate_sparse_smooth_instance(g_k, g_n, g_m, g_s, sfd::parse_family(g_family), g_seed, g_opts);
        json j = sfd::to_json(gen.problem);
        j["generator"] = {{"omega", gen.omega}, {"beta", gen.beta}, {"lipschitz", gen.lipschitz}, {"attempts", gen.attempts}};
        write_json(g_out, j);
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown kind '" + g_kind + "'");
      }
    } else if (*projfactor) {
      write_json(p_out, sfd::to_json(sfd::projection_factor(read_matrix_csv(p_b), p_s, p_degenerate)));
    } else if (*experiment) {
      sfd::ExperimentConfig cfg = sfd::load_config(e_config);
      if (!e_outdir.empty()) cfg.output_dir = e_outdir;
      const auto report = sfd::run_experiment(cfg);
      const auto files = sfd::emit_report(report, cfg);
      std::cout << files.csv << '\n' << files.json << '\n';
      for (const auto& svg : files.svgs) std::cout << svg << '\n';
      if (report.violations() > 0) {
        std::cerr << report.violations() << " row(s) flagged VIOLATION\n";
        return 3;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kIoError ? 2 : 1;
  }
  return 0;
}
