#pragma once

#include "qglab/graphlike_mesh.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qg {

struct Constant {
  double value = 0.0;
  std::string provenance;
};

/// Epsilon-independent constants of a graph with its vertex templates.
struct ConstantsReport {
  int m = 2;
  double tau = 0.25;
  Constant ell0;
  Constant vol_cross_section;
  Constant lambda2_vx;
  double lambda2_vx_error = 0.0;
  Constant lambda2_ed;
  Constant c_isoper;
  Constant c_vxcol;
  Constant c_vx;
  Constant kappa_max;
  Constant kappa_minus;
  Constant c_gaffney;
  Constant trace_coth;
  Constant graph_a_sq;  // bound on the squared norms of the graph-side boundary maps
  Constant space_a_sq_per_eps;
  Constant space_b_sq_per_eps;
  double min_collar_margin = 0.0;  // min over ports of depth - tau * l_e

  // per vertex, in vertex order
  std::vector<double> vertex_lambda2;
  std::vector<double> vertex_area;
  std::vector<int> vertex_degree;
  std::vector<std::vector<double>> vertex_lengths;

  nlohmann::json to_json() const;
};

ConstantsReport compute_constants(const MetricGraph& g, const TemplateMap& templates, double tau = 0.25, int m = 2);

double delta_eps(const ConstantsReport& r, double eps);
double delta_eps_prime(const ConstantsReport& r, double eps);
/// Per-vertex constant of the vertex-neighbourhood estimate; bounded by eps * C_vx.
double c_vx_vertex(const ConstantsReport& r, int v, double eps);

struct TemplateEigenvalue {
  double value = 0.0;  // extrapolated
  double error = 0.0;
  double coarse = 0.0;
  double fine = 0.0;
};
/// Second Neumann eigenvalue of an unscaled template: h = 0.01 with
/// Richardson extrapolation from h = 0.02. Results are cached per template.
TemplateEigenvalue template_lambda2(const VertexTemplate& t, double h_fine = 0.01);

}  // namespace qg
