#pragma once

#include "qglab/eigensolver.hpp"
#include "qglab/metric_graph.hpp"

#include <functional>
#include <vector>

namespace qg {

/// Uniform per-edge grids glued at the vertices. Function dofs: vertices
/// first (ids 0..|V|-1), then interior nodes edge by edge. One-form dofs:
/// n_e + 1 nodal samples per edge, edge blocks in edge order.
class MgGrid {
 public:
  MgGrid(const MetricGraph& g, double h_target);
  /// Explicit per-edge cell counts, used to match other discretisations.
  MgGrid(const MetricGraph& g, std::vector<int> cells);

  const MetricGraph& graph() const { return *graph_; }
  int cells(int e) const { return cells_[static_cast<std::size_t>(e)]; }
  double step(int e) const { return graph_->edge(e).length / cells(e); }
  double max_step() const;
  Eigen::Index num_function_dofs() const { return num_function_dofs_; }
  Eigen::Index num_form_dofs() const { return num_form_dofs_; }
  /// dof of node k in 0..n_e on edge e.
  Eigen::Index function_dof(int e, int k) const;
  Eigen::Index form_dof(int e, int k) const { return form_offset_[static_cast<std::size_t>(e)] + k; }
  std::uint64_t tag() const { return tag_; }

 private:
  void finish();
  const MetricGraph* graph_;
  std::vector<int> cells_;
  std::vector<Eigen::Index> interior_offset_;
  std::vector<Eigen::Index> form_offset_;
  Eigen::Index num_function_dofs_ = 0;
  Eigen::Index num_form_dofs_ = 0;
  std::uint64_t tag_ = 0;
};

/// Continuous P1 function on the glued grid (one value per vertex).
struct MgFunction {
  std::uint64_t grid_tag = 0;
  Vec dofs;
};

/// Edgewise nodal samples of a 1-form coefficient F_e (ds_e understood).
struct MgOneForm {
  std::uint64_t grid_tag = 0;
  Vec dofs;
};

/// Symmetric stiffness/mass pair of a discrete self-adjoint operator.
struct WeightedOperatorPair {
  SpMat K;
  SpMat M;
  Eigen::Index dim() const { return K.rows(); }
};

WeightedOperatorPair assemble_kirchhoff_laplacian(const MgGrid& grid);
WeightedOperatorPair assemble_kirchhoff_laplacian(const MetricGraph& g, double h_target);

/// Edgewise P1 mass matrix of the one-form space.
SpMat form_mass(const MgGrid& grid);

MgFunction interpolate(const MgGrid& grid, const std::function<double(int edge, double s)>& f);
MgOneForm interpolate_form(const MgGrid& grid, const std::function<double(int edge, double s)>& F);
std::vector<double> edge_samples(const MgGrid& grid, const MgFunction& f, int e);

MgOneForm mg_gradient(const MgGrid& grid, const MgFunction& f);
MgFunction mg_divergence(const MgGrid& grid, const MgOneForm& F);

/// Oriented vertex sums sum_{e in E_v} F_e(v), with -F_e(0) at the initial
/// and +F_e(l_e) at the terminal vertex.
Vec vertex_flux(const MgGrid& grid, const MgOneForm& F);

/// Fundamental-cycle basis of the harmonic 1-forms: edgewise constant +-1
/// following the edge orientation around each cycle.
std::vector<MgOneForm> harmonic_oneform_basis(const MgGrid& grid);
std::vector<MgOneForm> harmonic_oneform_basis(const MetricGraph& g, double h_target);

/// Dimension of {F : F' = 0 cellwise, vertex flux = 0} by numerical rank.
int divergence_kernel_dimension(const MgGrid& grid);

/// Smallest Kirchhoff eigenvalues on the grid.
EigResult kirchhoff_spectrum(const MgGrid& grid, int k, const EigOptions& opts = {});

/// The k smallest-magnitude Dirac eigenvalues, built from the Kirchhoff
/// spectrum: +-sqrt(lambda) for nonzero lambda plus 0 with multiplicity b0+b1.
std::vector<double> mg_dirac_spectrum(const MetricGraph& g, double h_target, int k, const EigOptions& opts = {});

}  // namespace qg
