#include "qglab/analysis.hpp"
#include "qglab/constants.hpp"
#include "qglab/fem.hpp"
#include "qglab/graphlike_mesh.hpp"
#include "qglab/mg_operators.hpp"
#include "qglab/secular.hpp"
#include "qglab/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using nlohmann::json;
namespace an = qg::analysis;

constexpr int kPass = 0;
constexpr int kFailure = 1;
constexpr int kViolation = 2;

struct Globals {
  std::optional<double> h;
  int k = 8;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool csv = false;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int error_exit(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
  return kFailure;
}

qg::Variant parse_variant(const std::string& s) {
  if (s == "abstract") return qg::Variant::Abstract;
  if (s == "embedded") return qg::Variant::Embedded;
  throw qg::Error(qg::ErrorKind::InvalidSpec, "variant must be abstract or embedded");
}

qg::GraphLikeMesh build_mesh(const qg::MetricGraph& g, qg::Variant v, double eps, double tau, double h) {
  if (v == qg::Variant::Embedded) return qg::build_embedded_space(g, {}, eps, tau, h);
  return qg::build_abstract_space(g, {}, eps, h);
}

int cmd_mgspec(const Globals& gl, const std::string& path) {
  const auto g = qg::load_graph(path);
  g.require_finite("mgspec");
  const double h = gl.h.value_or(1e-3);
  qg::EigOptions opts;
  opts.seed = gl.seed;
  const auto fem = qg::kirchhoff_spectrum(qg::MgGrid(g, h), gl.k, opts).values;
  const auto oracle = qg::secular_first_eigenvalues(g, gl.k);
  if (gl.csv) {
    std::cout << "idx,fem,secular,rel_err\n";
    for (int i = 0; i < gl.k; ++i) {
      const double o = oracle[static_cast<std::size_t>(i)];
      std::cout << i + 1 << ',' << num(fem[i]) << ',' << num(o) << ',' << num(std::abs(fem[i] - o) / std::max(1.0, o))
                << "\n";
    }
    return kPass;
  }
  json j{{"graph", path}, {"h", h}, {"fem", json::array()}, {"secular", oracle}, {"rel_err", json::array()}};
  for (int i = 0; i < gl.k; ++i) {
    j["fem"].push_back(fem[i]);
    const double o = oracle[static_cast<std::size_t>(i)];
    j["rel_err"].push_back(std::abs(fem[i] - o) / std::max(1.0, o));
  }
  emit(j);
  return kPass;
}

int cmd_femspec(const Globals& gl, const std::string& path, double eps, const std::string& variant, double tau) {
  const auto g = qg::load_graph(path);
  const double h = gl.h.value_or(qg::default_mesh_size(eps));
  const auto mesh = build_mesh(g, parse_variant(variant), eps, tau, h);
  const auto sys = qg::assemble_neumann(mesh);
  qg::EigOptions opts;
  opts.seed = gl.seed;
  const auto ev = qg::smallest_eigenpairs(sys, gl.k, opts);
  if (gl.csv) {
    std::cout << "idx,value,residual\n";
    for (Eigen::Index i = 0; i < ev.values.size(); ++i)
      std::cout << i + 1 << ',' << num(ev.values[i]) << ',' << num(ev.residuals[i]) << "\n";
    return kPass;
  }
  json j{{"graph", path}, {"eps", eps}, {"h", h}, {"variant", variant}, {"dofs", sys.dim()},
         {"min_angle_deg", mesh.min_angle_deg()}, {"values", json::array()}, {"residuals", json::array()}};
  for (Eigen::Index i = 0; i < ev.values.size(); ++i) {
    j["values"].push_back(ev.values[i]);
    j["residuals"].push_back(ev.residuals[i]);
  }
  emit(j);
  return kPass;
}

int cmd_constants(const std::string& path, double tau, std::optional<double> eps) {
  const auto g = qg::load_graph(path);
  const auto r = qg::compute_constants(g, {}, tau);
  json j = r.to_json();
  if (eps) {
    j["eps"] = *eps;
    j["delta_eps"] = qg::delta_eps(r, *eps);
    j["delta_eps_prime"] = qg::delta_eps_prime(r, *eps);
  }
  emit(j);
  return kPass;
}

int cmd_sweep(const Globals& gl, const std::string& path, bool k_set, bool seed_set, int workers) {
  auto cfg = qg::load_sweep_config(path);
  if (k_set) cfg.k = gl.k;
  if (seed_set) cfg.seed = gl.seed;
  if (gl.h) cfg.h_cap = *gl.h;
  if (workers > 0) cfg.workers = workers;
  if (!gl.out_dir.empty()) cfg.out_dir = gl.out_dir;
  cfg.validate();
  const auto res = qg::run_sweep(cfg);
  if (!cfg.out_dir.empty()) qg::write_sweep_outputs(res, cfg.out_dir);
  if (gl.csv)
    res.write_csv(std::cout);
  else
    emit(res.to_json());
  return res.bound_violations == 0 ? kPass : kViolation;
}

int cmd_verify(const Globals& gl, const std::string& what, const std::string& graph_path, double eps) {
  std::vector<an::CheckReport> reports;
  auto graph = [&] { return graph_path.empty() ? qg::graphs::theta({1.0, 1.5, 2.0}) : qg::load_graph(graph_path); };
  if (what == "gaffney") {
    reports.push_back(an::verify_gaffney_identity({an::Domain::Disc, 1.0, 0.2, 64}));
    reports.push_back(an::verify_gaffney_identity({an::Domain::Rectangle, 1.0, 0.2, 64}));
    reports.push_back(an::verify_gaffney_identity({an::Domain::Annulus, 1.0, 0.2, 64}));
    reports.push_back(an::verify_gaffney_estimate({an::Domain::Annulus, 1.0, 0.2, 64}));
  } else if (what == "kato") {
    for (const auto& s : an::kato_samples()) reports.push_back(an::verify_kato(s));
    an::FormSample eq{"scalar_times_constant",
                      [](qg::Vec2 p) { return qg::Vec2(std::exp(p.x()) * (1.0 + p.y() * p.y()) * qg::Vec2(0.6, 0.8)); }};
    reports.push_back(an::verify_kato(eq, 41, 1e-4, true));
  } else if (what == "trace") {
    const auto g = graph();
    const double h = gl.h.value_or(qg::default_mesh_size(eps));
    const auto mesh = qg::build_abstract_space(g, {}, eps, h);
    const auto sys = qg::assemble_neumann(mesh);
    for (int e = 0; e < g.num_edges(); ++e)
      for (int v : {g.edge(e).init, g.edge(e).term}) {
        const double a = std::min(0.3, 0.5 * g.edge(e).length);
        auto r = an::verify_trace_estimate(mesh, sys, e, v, a, 20, 50, gl.seed);
        r.name += ":" + g.edge(e).name + ":" + g.vertex_name(v);
        reports.push_back(r);
      }
  } else if (what == "scaling") {
    for (const auto& t : {qg::templates::junction(3, qg::templates::junction_arm_length(3, 0.2, 0.3)),
                          qg::templates::end_cap(), qg::templates::disc()})
      for (auto r : an::verify_scaling(t, eps, gl.h.value_or(0.05))) {
        r.name += ":" + t.name;
        reports.push_back(r);
      }
  } else if (what == "supersym") {
    const auto g = graph();
    const double h = gl.h.value_or(0.05);
    const auto mesh = qg::build_abstract_space(g, {}, eps, qg::default_mesh_size(eps));
    reports.push_back(an::verify_supersymmetry(g, h, gl.k, &mesh));
  } else {
    throw qg::Error(qg::ErrorKind::InvalidSpec, "unknown check " + what);
  }
  json out = json::array();
  bool all = true;
  for (const auto& r : reports) {
    out.push_back(r.to_json());
    all = all && r.pass;
  }
  emit(out);
  return all ? kPass : kViolation;
}

int cmd_mesh(const Globals& gl, const std::string& path, double eps, const std::string& variant, double tau,
             const std::string& out_path) {
  const auto g = qg::load_graph(path);
  const double h = gl.h.value_or(qg::default_mesh_size(eps));
  const auto mesh = build_mesh(g, parse_variant(variant), eps, tau, h);
  std::filesystem::path p(out_path);
  if (p.is_relative() && !gl.out_dir.empty()) {
    std::filesystem::create_directories(gl.out_dir);
    p = std::filesystem::path(gl.out_dir) / p;
  }
  std::ofstream out(p);
  if (!out) throw qg::Error(qg::ErrorKind::Io, "cannot write " + p.string());
  mesh.write_text(out);
  emit({{"out", p.string()},
        {"nodes", mesh.num_nodes},
        {"triangles", mesh.triangles.size()},
        {"min_angle_deg", mesh.min_angle_deg()},
        {"area", mesh.area()}});
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric graphs, graph-like spaces and their spectral comparison"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Globals gl;
  double h_value = 0.0;
  bool json_out = false;
  auto* h_opt = app.add_option("--h", h_value, "mesh size");
  auto* k_opt = app.add_option("--k", gl.k, "number of eigenvalues");
  auto* seed_opt = app.add_option("--seed", gl.seed, "random seed");
  app.add_option("--out-dir", gl.out_dir, "output directory");
  auto* fmt_json = app.add_flag("--json", json_out, "JSON output (default)");
  auto* fmt_csv = app.add_flag("--csv", gl.csv, "CSV output");
  fmt_json->excludes(fmt_csv);

  std::string graph_path, config_path, check, out_path = "mesh.txt", variant = "abstract";
  double eps = 0.2, tau = 0.25;
  std::optional<double> const_eps;
  int workers = 0;

  auto* mgspec = app.add_subcommand("mgspec", "metric-graph spectrum, FEM and secular oracle");
  mgspec->add_option("graph", graph_path)->required();

  auto* femspec = app.add_subcommand("femspec", "Neumann spectrum of the graph-like space");
  femspec->add_option("graph", graph_path)->required();
  femspec->add_option("--eps", eps)->required();
  femspec->add_option("--variant", variant);
  femspec->add_option("--tau", tau);

  auto* constants = app.add_subcommand("constants", "explicit constants and rates");
  constants->add_option("graph", graph_path)->required();
  constants->add_option("--tau", tau);
  constants->add_option("--eps", const_eps);

  auto* sweep = app.add_subcommand("sweep", "eps sweep with rates and certificates");
  sweep->add_option("config", config_path)->required();
  sweep->add_option("--workers", workers);

  auto* verify = app.add_subcommand("verify", "analytic identity checks");
  verify->add_option("check", check)->required()->check(CLI::IsMember({"gaffney", "kato", "trace", "scaling", "supersym"}));
  verify->add_option("--graph", graph_path);
  verify->add_option("--eps", eps);

  auto* mesh = app.add_subcommand("mesh", "export a graph-like mesh");
  mesh->add_option("graph", graph_path)->required();
  mesh->add_option("--eps", eps)->required();
  mesh->add_option("--out", out_path);
  mesh->add_option("--variant", variant);
  mesh->add_option("--tau", tau);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return error_exit("UsageError", e.what());
  }
  if (h_opt->count() > 0) gl.h = h_value;

  try {
    if (*mgspec) return cmd_mgspec(gl, graph_path);
    if (*femspec) return cmd_femspec(gl, graph_path, eps, variant, tau);
    if (*constants) return cmd_constants(graph_path, tau, const_eps);
    if (*sweep) return cmd_sweep(gl, config_path, k_opt->count() > 0, seed_opt->count() > 0, workers);
    if (*verify) return cmd_verify(gl, check, graph_path, eps);
    if (*mesh) return cmd_mesh(gl, graph_path, eps, variant, tau, out_path);
  } catch (const qg::Error& e) {
    return error_exit(std::string(qg::to_string(e.kind())), e.what());
  } catch (const std::exception& e) {
    return error_exit("InternalError", e.what());
  }
  return kFailure;
}
