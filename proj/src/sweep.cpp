#include "qglab/sweep.hpp"

#include "qglab/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qg {

namespace fs = std::filesystem;

void SweepConfig::validate() const {
  if (eps.empty()) throw Error(ErrorKind::InvalidSpec, "empty eps list");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] <= 1.0)) throw Error(ErrorKind::InvalidSpec, "eps values must lie in (0, 1]");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw Error(ErrorKind::InvalidSpec, "eps list must be strictly decreasing");
  }
  if (k < 2) throw Error(ErrorKind::InvalidSpec, "k must be at least 2");
  if (!(h_cap > 0.0)) throw Error(ErrorKind::InvalidSpec, "h_cap must be positive");
  if (workers < 1) throw Error(ErrorKind::InvalidSpec, "workers must be at least 1");
  graph.require_finite("sweep");
}

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::InvalidSpec, path + ": " + ex.what());
  }
}

nlohmann::json inline_or_file(const nlohmann::json& j, const std::string& base) {
  if (j.is_string()) {
    fs::path p(j.get<std::string>());
    if (p.is_relative()) p = fs::path(base) / p;
    return read_json(p.string());
  }
  return j;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

SweepConfig sweep_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  SweepConfig c;
  try {
    c.graph = build_graph(graph_spec_from_json(inline_or_file(j.at("graph"), base_dir)));
    if (j.contains("templates"))
      for (const auto& [name, t] : j["templates"].items())
        c.templates[c.graph.vertex_index(name)] = template_from_json(inline_or_file(t, base_dir));
    if (j.contains("eps")) c.eps = j["eps"].get<std::vector<double>>();
    c.h_cap = j.value("h_cap", c.h_cap);
    c.k = j.value("k", c.k);
    c.tau = j.value("tau", c.tau);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.reference_h = j.value("reference_h", c.reference_h);
    c.out_dir = j.value("out_dir", std::string());
    const std::string variant = j.value("variant", std::string("abstract"));
    if (variant == "abstract")
      c.variant = Variant::Abstract;
    else if (variant == "embedded")
      c.variant = Variant::Embedded;
    else
      throw Error(ErrorKind::InvalidSpec, "variant must be abstract or embedded");
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::InvalidSpec, ex.what());
  }
  c.validate();
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  return sweep_config_from_json(read_json(path), fs::path(path).parent_path().string());
}

nlohmann::json SweepRow::to_json() const {
  nlohmann::json j;
  j["eps"] = eps;
  j["h"] = h;
  if (!ok()) {
    j["failure"] = failure;
    return j;
  }
  j["dofs"] = dofs;
  j["seconds"] = seconds;
  j["defects"] = defects.to_json();
  j["delta_bound"] = delta_bound;
  j["max_residual"] = max_residual;
  j["residuals_ok"] = residuals_ok;
  j["pass"] = pass;
  j["eigen"] = nlohmann::json::array();
  for (const auto& r : eigen)
    j["eigen"].push_back({{"index", r.index},
                          {"mg_value", r.mg_value},
                          {"tube_value", r.tube_value},
                          {"abs_err", r.abs_err},
                          {"cluster", r.cluster}});
  if (embedded) j["embedded"] = embedded->to_json();
  return j;
}

nlohmann::json SweepResult::to_json() const {
  nlohmann::json j;
  j["constants"] = constants.to_json();
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(r.to_json());
  j["eigen_slopes"] = nlohmann::json::object();
  for (const auto& [idx, s] : eigen_slopes)
    j["eigen_slopes"][std::to_string(idx)] = {{"slope", s.slope}, {"points", s.points}, {"fitted", s.fitted}};
  j["d3_slope"] = {{"slope", d3_slope.slope}, {"points", d3_slope.points}, {"fitted", d3_slope.fitted}};
  j["eigen_monotone"] = nlohmann::json::object();
  for (const auto& [idx, m] : eigen_monotone) j["eigen_monotone"][std::to_string(idx)] = m;
  j["excluded_eps"] = excluded_eps;
  j["bound_violations"] = bound_violations;
  return j;
}

void SweepResult::write_csv(std::ostream& out) const {
  out << kSweepCsvHeader << "\n";
  for (const auto& r : rows) {
    if (!r.ok()) {
      out << fmt(r.eps) << ",,,,,,,,,false\n";
      continue;
    }
    for (const auto& e : r.eigen)
      out << fmt(r.eps) << ',' << e.index << ',' << fmt(e.mg_value) << ',' << fmt(e.tube_value) << ','
          << fmt(e.abs_err) << ',' << fmt(r.defects.norms.d1) << ',' << fmt(r.defects.norms.d2) << ','
          << fmt(r.defects.norms.d3) << ',' << fmt(r.delta_bound) << ',' << (r.pass ? "true" : "false") << "\n";
  }
}

SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  SlopeFit f;
  f.points = n;
  const double den = n * sxx - sx * sx;
  if (n >= 2 && std::abs(den) > 1e-300) {
    f.slope = (n * sxy - sx * sy) / den;
    f.fitted = true;
  }
  return f;
}

namespace {

struct Shared {
  const SweepConfig& cfg;
  TemplateMap templates;
  ConstantsReport constants;
  Vec reference;  // limit spectrum, ascending
};

SweepRow run_row(const Shared& sh, double e) {
  const auto& cfg = sh.cfg;
  const auto t0 = std::chrono::steady_clock::now();
  SweepRow row;
  row.eps = e;
  row.h = cfg.mesh_size(e);
  try {
    const GraphLikeMesh abs = build_abstract_space(cfg.graph, sh.templates, e, row.h);
    const FemSystem abs_sys = assemble_neumann(abs);
    std::optional<GraphLikeMesh> emb;
    std::optional<FemSystem> emb_sys;
    if (cfg.variant == Variant::Embedded) {
      emb = build_embedded_space(cfg.graph, sh.templates, e, cfg.tau, row.h);
      emb_sys = assemble_neumann(*emb);
      row.embedded = embedded_defects(abs, abs_sys, *emb, *emb_sys);
    }
    const FemSystem& sys = emb_sys ? *emb_sys : abs_sys;
    row.dofs = static_cast<int>(sys.dim());

    EigOptions opts;
    opts.seed = cfg.seed;
    const int kk = static_cast<int>(std::min<Eigen::Index>(sh.reference.size(), sys.dim()));
    const EigResult ev = smallest_eigenpairs(sys, kk, opts);
    for (Eigen::Index i = 0; i < ev.values.size(); ++i)
      row.max_residual = std::max(row.max_residual, ev.residuals[i] / (1.0 + std::abs(ev.values[i])));
    row.residuals_ok = row.max_residual <= 1e-6;

    // index-matched comparison, averaged over multiplicity clusters of the limit
    const Vec ref = sh.reference.head(kk);
    const auto clusters = multiplicity_clusters(ref);
    for (int idx = 2; idx <= std::min(cfg.k, kk); ++idx) {
      const int c = clusters[static_cast<std::size_t>(idx - 1)];
      double s_ref = 0, s_tube = 0;
      int size = 0;
      for (int i = 0; i < kk; ++i)
        if (clusters[static_cast<std::size_t>(i)] == c) {
          s_ref += ref[i];
          s_tube += ev.values[i];
          ++size;
        }
      row.eigen.push_back({idx, ref[idx - 1], ev.values[idx - 1], std::abs(s_tube - s_ref) / size, c});
    }

    const MgGrid grid = matching_grid(abs);
    const auto mg = assemble_kirchhoff_laplacian(grid);
    const auto J0 = build_J0(grid, mg.M, abs, abs_sys.M);
    const IdentificationMap J(J0.matrix(), mg.M, sys.M);
    row.defects.eps = e;
    row.defects.norms = defect_norms_laplacian(mg, {sys.K, sys.M}, J);
    row.delta_bound = delta_eps(sh.constants, e);
    if (row.embedded) row.delta_bound += delta_eps_prime(sh.constants, e);
    row.defects.delta_eps = row.delta_bound;

    const double lambda_max = std::min(ref[kk - 1], ev.values[kk - 1]);
    std::vector<double> a(ref.data(), ref.data() + kk), b(ev.values.data(), ev.values.data() + kk);
    row.defects.hausdorff = hausdorff_resolvent_distance(a, b, lambda_max);
    row.pass = row.defects.bound_ok() && row.defects.hausdorff_bound_ok() && row.residuals_ok &&
               row.defects.norms.converged;
  } catch (const Error& ex) {
    row.failure = ex.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  Shared sh{cfg, {}, {}, {}};
  if (cfg.variant == Variant::Embedded) {
    sh.templates = embedded_default_templates(cfg.graph, cfg.tau);
    for (const auto& [v, t] : cfg.templates) sh.templates[v] = t;
  } else {
    sh.templates = complete_templates(cfg.graph, cfg.templates, cfg.tau);
  }
  SweepResult res;
  sh.constants = compute_constants(cfg.graph, sh.templates, cfg.tau);
  res.constants = sh.constants;

  EigOptions opts;
  opts.seed = cfg.seed;
  sh.reference = kirchhoff_spectrum(MgGrid(cfg.graph, cfg.reference_h), cfg.k + 2, opts).values;

  res.rows.resize(cfg.eps.size());
  const int n = static_cast<int>(cfg.eps.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
  for (int i = 0; i < n; ++i) res.rows[static_cast<std::size_t>(i)] = run_row(sh, cfg.eps[static_cast<std::size_t>(i)]);

  std::vector<double> xs, d3;
  std::map<int, std::vector<double>> errs;
  for (const auto& r : res.rows) {
    if (!r.ok() || !r.residuals_ok || !r.defects.norms.converged) {
      res.excluded_eps.push_back(r.eps);
      if (!r.ok() || !r.pass) ++res.bound_violations;
      continue;
    }
    if (!r.pass) ++res.bound_violations;
    xs.push_back(r.eps);
    d3.push_back(r.defects.norms.d3);
    for (const auto& e : r.eigen) errs[e.index].push_back(e.abs_err);
  }
  if (xs.size() >= 2) {
    res.d3_slope = loglog_slope(xs, d3);
    for (const auto& [idx, y] : errs) res.eigen_slopes[idx] = loglog_slope(xs, y);
  }
  for (const auto& [idx, y] : errs) {
    bool mono = true;
    for (std::size_t i = 1; i < y.size(); ++i)
      if (y[i] > y[i - 1] * (1.0 + 1e-9)) mono = false;
    res.eigen_monotone[idx] = mono;
  }
  return res;
}

void write_sweep_outputs(const SweepResult& r, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "sweep.csv");
    if (!out) throw Error(ErrorKind::Io, "cannot write " + dir + "/sweep.csv");
    r.write_csv(out);
  }
  {
    std::ofstream out(fs::path(dir) / "sweep.json");
    out << r.to_json().dump(2) << "\n";
  }
  std::vector<svg::Series> eig;
  std::map<int, svg::Series> by_idx;
  svg::Series d3{"d3", {}, {}};
  for (const auto& row : r.rows) {
    if (!row.ok()) continue;
    d3.x.push_back(row.eps);
    d3.y.push_back(row.defects.norms.d3);
    for (const auto& e : row.eigen) {
      auto& s = by_idx[e.index];
      s.name = "lambda_" + std::to_string(e.index);
      s.x.push_back(row.eps);
      s.y.push_back(e.abs_err);
    }
  }
  for (auto& [idx, s] : by_idx) eig.push_back(s);
  std::ofstream(fs::path(dir) / "eigen_error.svg")
      << svg::loglog_chart("eigenvalue error vs eps", "eps", "|lambda(eps) - lambda(0)|", eig);
  std::ofstream(fs::path(dir) / "d3.svg") << svg::loglog_chart("resolvent defect d3 vs eps", "eps", "d3", {d3});
}

}  // namespace qg
