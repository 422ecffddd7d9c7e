#include "sfd/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sfd/error.hpp"
#include "sfd/point_set.hpp"

namespace sfd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "seed must be a nonnegative integer, got '" + text + "'");
  }
}

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  bool have_seed = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::kInvalidArgument, "config line " + std::to_string(lineno) + ": empty key");
    if (key == "experiment") {
      cfg.name = value;
    } else if (key == "seed") {
      cfg.seed = parse_seed(value);
      have_seed = true;
    } else if (key == "outputDir") {
      cfg.output_dir = value;
    } else if (!cfg.params.emplace(key, value).second) {
      throw Error(ErrorCode::kInvalidArgument, "config: duplicate key '" + key + "'");
    }
  }
  if (const char* env = std::getenv("SFD_SEED"); env != nullptr && *env != '\0') {
    cfg.seed = parse_seed(env);
    have_seed = true;
  }
  if (cfg.name.empty()) throw Error(ErrorCode::kInvalidArgument, "config: 'experiment' is required");
  if (!have_seed) throw Error(ErrorCode::kInvalidArgument, "config: 'seed' is required");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config '" + path + "'");
  return parse_config(in);
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::string out = "experiment=" + cfg.name + "\nseed=" + std::to_string(cfg.seed) + "\n";
  for (const auto& [k, v] : cfg.params) out += k + "=" + v + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_config(cfg);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw Error(ErrorCode::kNumericalFailure, "SHA-1 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

int ExperimentReport::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const nlohmann::json& ExperimentReport::at(std::size_t row, const std::string& col) const {
  const int c = column(col);
  if (c < 0) throw Error(ErrorCode::kInvalidArgument, "report has no column '" + col + "'");
  return rows.at(row).at(static_cast<std::size_t>(c));
}

int ExperimentReport::violations() const {
  const int c = column("status");
  if (c < 0) return 0;
  int n = 0;
  for (const auto& row : rows) n += row[static_cast<std::size_t>(c)] == "VIOLATION";
  return n;
}

void write_report_csv(std::ostream& out, const ExperimentReport& r) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << csv_cell(r.columns[i].name);
  out << "\r\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << "\r\n";
  }
}

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["experiment"] = r.name;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : r.columns) {
    nlohmann::json col = {{"name", c.name}};
    if (!c.cites.empty()) col["cites"] = c.cites;
    j["columns"].push_back(col);
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[r.columns[i].name] = row[i];
    j["rows"].push_back(o);
  }
  j["runtimes"] = r.runtimes;
  j["violations"] = r.violations();
  j["meta"] = r.meta;
  return j;
}

std::string render_svg(const ExperimentReport& r, const PlotSpec& plot) {
  constexpr double kW = 640, kH = 400, kL = 70, kR = 160, kT = 40, kB = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  const int xc = r.column(plot.x_column);
  if (xc < 0) throw Error(ErrorCode::kInvalidArgument, "plot: unknown x column '" + plot.x_column + "'");
  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& name : plot.y_columns) {
    const int yc = r.column(name);
    if (yc < 0) throw Error(ErrorCode::kInvalidArgument, "plot: unknown y column '" + name + "'");
    Series s{name, {}};
    for (const auto& row : r.rows) {
      const auto& xv = row[static_cast<std::size_t>(xc)];
      const auto& yv = row[static_cast<std::size_t>(yc)];
      if (!xv.is_number() || !yv.is_number()) continue;
      double y = yv.get<double>();
      if (plot.log_y) {
        if (!(y > 0.0)) continue;
        y = std::log10(y);
      }
      const double x = xv.get<double>();
      s.pts.emplace_back(x, y);
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    series.push_back(std::move(s));
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
  auto py = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW
    << " " << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(plot.title)
    << "</text>\n";
  o << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\"" << kH - kB
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    o << "<text x=\"" << fmt("%.1f", px(xv)) << "\" y=\"" << kH - kB + 18 << "\" text-anchor=\"middle\">"
      << fmt("%.3g", xv) << "</text>\n";
    o << "<text x=\"" << kL - 6 << "\" y=\"" << fmt("%.1f", py(yv) + 4) << "\" text-anchor=\"end\">"
      << (plot.log_y ? "1e" + fmt("%.2g", yv) : fmt("%.3g", yv)) << "</text>\n";
  }
  o << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">"
    << xml_escape(plot.x_column) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % 5];
    std::string pts;
    for (const auto& [x, y] : series[i].pts) pts += fmt("%.2f", px(x)) + "," + fmt("%.2f", py(y)) + " ";
    if (!pts.empty()) pts.pop_back();
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    for (const auto& [x, y] : series[i].pts) {
      o << "<circle cx=\"" << fmt("%.2f", px(x)) << "\" cy=\"" << fmt("%.2f", py(y)) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    }
    const double ly = kT + 16 + 18 * static_cast<double>(i);
    o << "<line x1=\"" << kW - kR + 12 << "\" y1=\"" << ly << "\" x2=\"" << kW - kR + 32 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kW - kR + 38 << "\" y=\"" << ly + 4 << "\">" << xml_escape(series[i].name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

EmittedFiles emit_report(const ExperimentReport& r, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create '" + cfg.output_dir + "': " + ec.message());
  const std::string stem = (fs::path(cfg.output_dir) / (r.name + "-" + config_hash(cfg).substr(0, 12))).string();
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  };
  EmittedFiles files;
  files.csv = stem + ".csv";
  files.json = stem + ".json";
  std::ostringstream csv;
  write_report_csv(csv, r);
  write(files.csv, csv.str());
  write(files.json, to_json(r).dump(2) + "\n");
  if (!r.rows.empty()) {
    for (const auto& plot : r.plots) {
      const std::string path = stem + "-" + plot.suffix + ".svg";
      write(path, render_svg(r, plot));
      files.svgs.push_back(path);
    }
  }
  return files;
}

}  // namespace sfd
