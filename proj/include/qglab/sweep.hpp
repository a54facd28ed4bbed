#pragma once

#include "qglab/constants.hpp"
#include "qglab/graphlike_mesh.hpp"
#include "qglab/identification.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qg {

struct SweepConfig {
  MetricGraph graph;
  TemplateMap templates;  // by vertex index
  std::vector<double> eps{0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05};
  double h_cap = 0.02;
  int k = 8;
  Variant variant = Variant::Abstract;
  double tau = 0.25;
  std::uint64_t seed = 1;
  std::string out_dir;
  int workers = 1;
  double reference_h = 1e-3;  // metric-graph grid of the limit spectrum

  double mesh_size(double e) const { return std::min(e / 4.0, h_cap); }
  /// Throws InvalidSpec unless eps is strictly decreasing in (0, 1] and k >= 2.
  void validate() const;
};

/// Paths inside the config are resolved relative to base_dir.
SweepConfig sweep_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
SweepConfig load_sweep_config(const std::string& path);

struct EigenRow {
  int index = 0;  // 1-based position in the full ascending spectrum
  double mg_value = 0.0;
  double tube_value = 0.0;
  double abs_err = 0.0;  // mean over the multiplicity cluster of the index
  int cluster = 0;
};

struct SweepRow {
  double eps = 0.0;
  double h = 0.0;
  std::vector<EigenRow> eigen;
  DefectReport defects;
  double delta_bound = 0.0;  // delta_eps, plus delta'_eps for the embedded variant
  double max_residual = 0.0;
  bool residuals_ok = true;
  bool pass = false;
  std::optional<EmbeddedDefects> embedded;
  std::string failure;  // empty when the row succeeded
  double seconds = 0.0;
  int dofs = 0;

  bool ok() const { return failure.empty(); }
  nlohmann::json to_json() const;
};

struct SlopeFit {
  double slope = 0.0;
  int points = 0;
  bool fitted = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // eps descending
  ConstantsReport constants;
  std::map<int, SlopeFit> eigen_slopes;  // by eigenvalue index
  SlopeFit d3_slope;
  std::map<int, bool> eigen_monotone;  // error decreases along the sweep
  std::vector<double> excluded_eps;    // rows left out of the fits
  int bound_violations = 0;

  nlohmann::json to_json() const;
  /// Deterministic CSV, one line per (eps, eigenvalue index).
  void write_csv(std::ostream& out) const;
};

SweepResult run_sweep(const SweepConfig& cfg);

/// Least-squares slope of log(y) against log(x) over positive pairs.
SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Writes sweep.csv, sweep.json, eigen_error.svg and d3.svg into dir.
void write_sweep_outputs(const SweepResult& r, const std::string& dir);

inline constexpr const char* kSweepCsvHeader = "eps,lambda_idx,mg_value,tube_value,abs_err,d1,d2,d3,delta_eps,pass";

}  // namespace qg
