#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ulyap/config.hpp"
#include "ulyap/lyapunov.hpp"

namespace ulyap {

/// One output row of a sweep.
struct SweepRow {
  double lambda = 0.0;
  double gamma_mean = 0.0;
  double gamma_stderr = 0.0;
  std::uint64_t n = 0;
  std::uint64_t realizations = 0;
  std::string classification = "unclassified";
};

inline constexpr const char* sweep_columns = "lambda,gamma_mean,gamma_stderr,n,R,classification";

/// Shortest text with 17 significant digits, independent of the locale.
inline std::string format_number(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("malformed number '" + std::string(s) + "'");
  return v;
}

using Progress = std::function<void(std::size_t done, std::size_t total)>;

/// Point i of the grid uses seed derive_seed(config.seed, i). With
/// classification on, the statistics come from the top rung of the ladder
/// {n/100, n/10, n}, which reads the same chains as a plain estimate.
inline std::vector<SweepRow> run_sweep(const RunConfig& config, const Progress& progress = {}) {
  config.validate();
  const PhaseMeasure mu = config.measure.build();
  const DisorderParam d(config.t.value);
  const std::vector<TorusAngle> grid = config.lambda.build();
  EngineOptions eo;
  eo.model = config.model;
  eo.workers = config.workers;

  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::uint64_t seed = derive_seed(config.seed, i);
    SweepRow row;
    if (config.classify) {
      ClassificationBudget budget;
      budget.ladder = {config.n / 100, config.n / 10, config.n};
      budget.realizations = config.realizations;
      budget.seed = seed;
      budget.engine = eo;
      const AnomalyReport rep = classify_quasi_energy(grid[i], mu, d, AnomalyThresholds{}, budget);
      row = {grid[i].value(), rep.gamma_hat.mean, rep.gamma_hat.stderr, rep.gamma_hat.n,
             rep.gamma_hat.realizations, std::string(to_string(rep.classification))};
    } else {
      const LyapunovEstimate e = estimate_lyapunov(grid[i], mu, d, config.n, config.realizations, seed, eo);
      row = {e.lambda.value(), e.mean, e.stderr, e.n, e.realizations, "unclassified"};
    }
    rows.push_back(std::move(row));
    if (progress) progress(i + 1, grid.size());
  }
  return rows;
}

/// CSV with '#' lines echoing the resolved config and seed, then a header row.
inline void write_csv(std::ostream& out, const RunConfig& config, const std::vector<SweepRow>& rows) {
  out << "# ulyap sweep\n";
  out << "# config: " << config_to_json(config).dump() << "\n";
  out << "# seed: " << config.seed << "\n";
  out << sweep_columns << "\n";
  for (const auto& r : rows) {
    out << format_number(r.lambda) << ',' << format_number(r.gamma_mean) << ',' << format_number(r.gamma_stderr)
        << ',' << r.n << ',' << r.realizations << ',' << r.classification << "\n";
  }
}

inline nlohmann::json rows_to_json(const RunConfig& config, const std::vector<SweepRow>& rows) {
  nlohmann::json j;
  j["config"] = config_to_json(config);
  j["seed"] = config.seed;
  j["columns"] = nlohmann::json::array({"lambda", "gamma_mean", "gamma_stderr", "n", "R", "classification"});
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"lambda", r.lambda},
                         {"gamma_mean", r.gamma_mean},
                         {"gamma_stderr", r.gamma_stderr},
                         {"n", r.n},
                         {"R", r.realizations},
                         {"classification", r.classification}});
  }
  return j;
}

inline void write_json(std::ostream& out, const RunConfig& config, const std::vector<SweepRow>& rows) {
  out << rows_to_json(config, rows).dump(2) << "\n";
}

/// Data rows of a CSV written by write_csv.
inline std::vector<SweepRow> read_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != sweep_columns) throw ConfigError("unexpected CSV header '" + line + "'");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw ConfigError("CSV row needs 6 fields: '" + line + "'");
    rows.push_back({parse_number(f[0]), parse_number(f[1]), parse_number(f[2]), std::stoull(f[3]),
                    std::stoull(f[4]), f[5]});
  }
  return rows;
}

inline std::vector<SweepRow> read_json(const nlohmann::json& j) {
  std::vector<SweepRow> rows;
  for (const auto& r : j.at("rows")) {
    rows.push_back({r.at("lambda").get<double>(), r.at("gamma_mean").get<double>(),
                    r.at("gamma_stderr").get<double>(), r.at("n").get<std::uint64_t>(),
                    r.at("R").get<std::uint64_t>(), r.at("classification").get<std::string>()});
  }
  return rows;
}

}  // namespace ulyap
