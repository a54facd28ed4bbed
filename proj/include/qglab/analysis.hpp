#pragma once

#include "qglab/fem.hpp"
#include "qglab/graphlike_mesh.hpp"
#include "qglab/metric_graph.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qg::analysis {

/// Result of one numerical check, serialised as {name, terms, residual, pass}.
struct CheckReport {
  std::string name;
  std::map<std::string, double> terms;
  double residual = 0.0;
  bool pass = false;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Gauss-Legendre nodes and weights on [a, b].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int order, double a, double b);

/// Smallest positive zero of J_n' beyond lo, by bracketing and Newton.
double bessel_jprime_zero(int n, double lo = 0.5);

enum class Domain {
  Disc,       // radius R, u = J_1(j' r / R) cos(theta)
  Rectangle,  // [0, 2R] x [0, R], u = cos(pi x / 2R) cos(pi y / R)
  Annulus,    // R * (r_inner, 1), u = Neumann eigenfunction of angular order 1
};

struct TestField {
  Domain domain = Domain::Disc;
  double scale = 1.0;
  double r_inner = 0.2;  // annulus only, relative to scale
  int order = 64;
};

/// The three terms of the Gaffney identity for the gradient of a Neumann
/// eigenfunction: |d*W|^2, |nabla W|^2 and the boundary curvature integral.
struct GaffneyTerms {
  double codifferential = 0.0;
  double hessian = 0.0;
  double boundary = 0.0;
  double boundary_negative = 0.0;  // contribution of the concave boundary part
  double field = 0.0;              // |W|^2
  double wavenumber = 0.0;
};
GaffneyTerms gaffney_terms(const TestField& field);

/// Relative residual of |d*W|^2 = |nabla W|^2 + S(W, W). Throws
/// QuadratureUnderResolved when halving the order moves a term by more
/// than 1e-3 relative.
CheckReport verify_gaffney_identity(const TestField& field, double tol = 1e-3);

/// |nabla W|^2 <= C (|d*W|^2 + |W|^2) with C = max(2, 8 kappa^2) on an
/// annulus whose inner circle has curvature -kappa.
CheckReport verify_gaffney_estimate(const TestField& field);

struct FormSample {
  std::string name;
  std::function<Vec2(Vec2)> omega;
  Vec2 lo{-1.0, -1.0};
  Vec2 hi{1.0, 1.0};
  double exclude_radius = 0.0;  // skip points this close to the origin
};

/// Pointwise |d|omega|| <= |nabla omega| on an n x n grid with central
/// differences of step h_fd. residual is the largest violation; for an
/// equality sample it is the largest |LHS - RHS|.
CheckReport verify_kato(const FormSample& sample, int n = 41, double h_fd = 1e-4, bool equality = false);
std::vector<FormSample> kato_samples();

struct TraceVector {
  double interface = 0.0;  // |u|^2 on Z
  double energy = 0.0;     // |du|^2 on the collar
  double mass = 0.0;       // |u|^2 on the collar
  double bound = 0.0;      // a energy + (2 / a) mass
};

/// |u|^2_{L2(Z)} <= a |du|^2_{L2(X')} + (2/a) |u|^2_{L2(X')} for Z the port
/// interface between vertex v and edge e, and X' the tube collar of depth a
/// behind it. a is rounded down to a column boundary. Test vectors are the
/// first num_eigen eigenvectors and num_random smoothed random vectors.
CheckReport verify_trace_estimate(const GraphLikeMesh& mesh, const FemSystem& sys, int e, int v, double a,
                                  int num_eigen = 20, int num_random = 50, std::uint64_t seed = 11);
/// Same check on explicit vectors, without solving for eigenvectors.
std::vector<TraceVector> trace_terms(const GraphLikeMesh& mesh, const FemSystem& sys, int e, int v, double a,
                                     const Mat& vectors, double* depth_used = nullptr);

/// Kernel dimensions and index of d on the graph, the exact discrete
/// supersymmetry of d d* and d* d, and optionally the Euler characteristic
/// of a graph-like mesh.
CheckReport verify_supersymmetry(const MetricGraph& g, double h, int k, const GraphLikeMesh* mesh = nullptr);

/// Euler characteristic nodes - edges + triangles of a triangulation.
int euler_characteristic(const GraphLikeMesh& mesh);

/// Homothety laws of lengths, areas, norms, curvature, eigenvalues and the
/// Gaffney terms for the given template scaled by eps.
std::vector<CheckReport> verify_scaling(const VertexTemplate& t, double eps, double h = 0.05);

}  // namespace qg::analysis
