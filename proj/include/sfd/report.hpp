#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace sfd {

// `key = value` lines; '#' starts a comment. `experiment` and `seed` are
// required, `outputDir` is optional, every other key is an experiment
// parameter. SFD_SEED, when set, replaces the seed.
struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;
  std::string output_dir = ".";
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
// Canonical text (sorted keys, seed and name included) and its SHA-1.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct ReportColumn {
  std::string name;
  std::string cites;  // for bound columns: the result the value comes from
};

struct PlotSpec {
  std::string suffix;  // file name suffix
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;
  bool log_y = false;
};

// Cells are JSON numbers, strings or null.
struct ExperimentReport {
  std::string name;
  std::vector<ReportColumn> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  std::vector<double> runtimes;  // seconds per row; JSON output only
  nlohmann::json meta;
  std::vector<PlotSpec> plots;

  int column(const std::string& name) const;  // -1 when absent
  const nlohmann::json& at(std::size_t row, const std::string& col) const;
  // Rows whose status column reads VIOLATION.
  int violations() const;
};

// RFC 4180, CRLF line ends, doubles at 17 significant digits.
void write_report_csv(std::ostream& out, const ExperimentReport& r);
nlohmann::json to_json(const ExperimentReport& r);
// Line plot of the y columns against the x column; non-numeric cells skipped.
std::string render_svg(const ExperimentReport& r, const PlotSpec& plot);

struct EmittedFiles {
  std::string csv, json;
  std::vector<std::string> svgs;
};

// <outputDir>/<name>-<hash prefix>.{csv,json} plus one SVG per plot when
// the report has rows. Throws IoError.
EmittedFiles emit_report(const ExperimentReport& r, const ExperimentConfig& cfg);

}  // namespace sfd
