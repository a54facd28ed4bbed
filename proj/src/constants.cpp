#include "qglab/constants.hpp"

#include "qglab/fem.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>

namespace qg {

namespace {

double lambda2_on(const TemplateGeometry& geo, double h) {
  const auto tm = mesh_template(geo, h, std::max(2, static_cast<int>(std::ceil(1.0 / h - 1e-9))));
  std::vector<kernels::TriangleGeom> tris;
  tris.reserve(tm.triangles.size());
  for (const auto& t : tm.triangles)
    tris.push_back({t, {tm.points[static_cast<std::size_t>(t[0])], tm.points[static_cast<std::size_t>(t[1])],
                        tm.points[static_cast<std::size_t>(t[2])]}});
  const auto sys = assemble_p1(std::move(tris), static_cast<Eigen::Index>(tm.points.size()));
  EigOptions opts;
  opts.dense_threshold = 800;
  return smallest_eigenpairs(sys, 2, opts).values[1];
}

Constant c(double v, std::string p) { return {v, std::move(p)}; }

}  // namespace

TemplateEigenvalue template_lambda2(const VertexTemplate& t, double h_fine) {
  static std::mutex mu;
  static std::map<std::string, TemplateEigenvalue> cache;
  const std::string key = to_json(t).dump() + "@" + std::to_string(h_fine);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const TemplateGeometry geo(t);
  TemplateEigenvalue r;
  r.coarse = lambda2_on(geo, 2.0 * h_fine);
  r.fine = lambda2_on(geo, h_fine);
  r.value = (4.0 * r.fine - r.coarse) / 3.0;
  r.error = std::abs(r.fine - r.value);
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = r;
  return r;
}

ConstantsReport compute_constants(const MetricGraph& g, const TemplateMap& templates, double tau, int m) {
  g.require_finite("constants");
  ConstantsReport r;
  r.m = m;
  r.tau = tau;
  r.ell0 = c(g.min_length(), "minimum edge length");
  r.vol_cross_section = c(1.0, "unit port width fixed by template construction");
  r.lambda2_ed = c(std::numbers::pi * std::numbers::pi, "second Neumann eigenvalue of the unit interval, closed form");

  double lam = std::numeric_limits<double>::infinity(), lam_err = 0.0;
  double isoper = 0.0, kappa = 0.0, kappa_sampled = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  const TemplateMap all = complete_templates(g, templates, tau);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const VertexTemplate& t = all.at(v);
    if (t.num_ports() != g.degree(v)) throw Error(ErrorKind::PortMismatch, "template does not match vertex degree");
    const TemplateGeometry geo(t);
    const auto ev = template_lambda2(t);
    const auto conv = check_convexity(t);
    r.vertex_lambda2.push_back(ev.value);
    r.vertex_area.push_back(geo.area());
    r.vertex_degree.push_back(g.degree(v));
    std::vector<double> lens;
    for (int j = 0; j < t.num_ports(); ++j) {
      const int e = g.incident(v)[static_cast<std::size_t>(j)];
      lens.push_back(g.edge(e).length);
      margin = std::min(margin, geo.collar_depth(j) - tau * g.edge(e).length);
    }
    r.vertex_lengths.push_back(std::move(lens));
    if (ev.value < lam) {
      lam = ev.value;
      lam_err = ev.error;
    }
    isoper = std::max(isoper, geo.area() / g.degree(v));
    kappa = std::max(kappa, conv.kappa_minus_exact);
    kappa_sampled = std::max(kappa_sampled, conv.kappa_minus);
  }
  r.min_collar_margin = margin;
  r.lambda2_vx = c(lam, "minimum over vertices of the second Neumann eigenvalue of the unscaled template; P1 FEM at h=0.01 "
                        "extrapolated with h=0.02");
  r.lambda2_vx_error = lam_err;
  r.c_isoper = c(isoper, "maximum over vertices of template area divided by degree times port width");
  const double l0 = r.ell0.value;
  r.c_vxcol = c(tau + 2.0 / (tau * l0 * lam), "tau + 2 / (tau * ell0 * lambda2_vx)");
  r.trace_coth = c(1.0 / std::tanh(l0 / 2.0), "coth(ell0 / 2), squared norm of the optimal interval trace map");
  r.c_vx = c(4.0 * (1.0 / lam + isoper * (r.c_vxcol.value + r.trace_coth.value)),
             "4 (1 / lambda2_vx + C_isoper (C_vxcol + coth(ell0 / 2)))");
  r.kappa_max = c(kappa, "largest inverse radius of a concave corner arc over all templates");
  r.kappa_minus = c(kappa_sampled, "largest negative curvature from circumcircles of boundary samples at spacing 0.005");
  r.c_gaffney = c(kappa == 0.0 ? 1.0 : std::max(2.0, 8.0 * kappa * kappa),
                  kappa == 0.0 ? "1 for convex templates" : "max(2, 8 kappa_max^2) for templates with concave arcs");
  r.graph_a_sq = c(r.trace_coth.value, "coth(ell0 / 2) bounds both graph-side boundary maps");
  r.space_a_sq_per_eps = c(isoper, "C_isoper; the space-side vertex evaluation map has squared norm <= eps C_isoper");
  r.space_b_sq_per_eps = c(r.c_vxcol.value, "C_vxcol; the space-side port average map has squared norm <= eps C_vxcol");
  return r;
}

double delta_eps(const ConstantsReport& r, double eps) {
  const double a = (r.c_vx.value + r.m * eps / r.lambda2_ed.value) * r.c_gaffney.value;
  const double b = (r.c_isoper.value + r.c_vxcol.value) * r.trace_coth.value;
  return std::sqrt(eps) * std::sqrt(std::max(a, b));
}

double delta_eps_prime(const ConstantsReport& r, double eps) {
  return std::sqrt(eps) * std::sqrt(std::max(r.tau, r.c_vx.value * (1.0 + r.c_gaffney.value)));
}

double c_vx_vertex(const ConstantsReport& r, int v, double eps) {
  const auto vi = static_cast<std::size_t>(v);
  const double lam = r.vertex_lambda2.at(vi);
  const double ratio = r.vertex_area.at(vi) / r.vertex_degree.at(vi);
  double best = 0.0;
  for (double le : r.vertex_lengths.at(vi)) {
    const double term = eps * eps / lam + eps * eps * ratio * (r.tau * std::min(le, 1.0) + 2.0 / (r.tau * le * lam)) +
                        eps * ratio / std::tanh(le / 2.0);
    best = std::max(best, term);
  }
  return 4.0 * best;
}

nlohmann::json ConstantsReport::to_json() const {
  auto f = [](const Constant& k) { return nlohmann::json{{"value", k.value}, {"provenance", k.provenance}}; };
  return {{"m", {{"value", m}, {"provenance", "dimension of the graph-like space"}}},
          {"tau", {{"value", tau}, {"provenance", "collar parameter"}}},
          {"ell0", f(ell0)},
          {"vol_Y1", f(vol_cross_section)},
          {"lambda2_vx", f(lambda2_vx)},
          {"lambda2_vx_error", {{"value", lambda2_vx_error}, {"provenance", "|fine - extrapolated|"}}},
          {"lambda2_ed", f(lambda2_ed)},
          {"C_isoper", f(c_isoper)},
          {"C_vxcol", f(c_vxcol)},
          {"C_vx", f(c_vx)},
          {"kappa_max", f(kappa_max)},
          {"kappa_minus", f(kappa_minus)},
          {"C_Gaffney", f(c_gaffney)},
          {"coth_ell0_half", f(trace_coth)},
          {"graph_boundary_norm_sq", f(graph_a_sq)},
          {"space_vertex_norm_sq_per_eps", f(space_a_sq_per_eps)},
          {"space_port_norm_sq_per_eps", f(space_b_sq_per_eps)},
          {"collar_margin", {{"value", min_collar_margin}, {"provenance", "min over ports of straight depth - tau l_e"}}}};
}

}  // namespace qg
