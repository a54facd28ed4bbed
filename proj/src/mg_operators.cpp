#include "qglab/mg_operators.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <queue>

namespace qg {

MgGrid::MgGrid(const MetricGraph& g, double h_target) : graph_(&g) {
  g.require_finite("metric-graph discretisation");
  if (!(h_target > 0.0)) throw Error(ErrorKind::TooCoarse, "h_target must be positive");
  for (const auto& e : g.edges()) {
    const int n = static_cast<int>(std::ceil(e.length / h_target - 1e-9));
    if (n < 2)
      throw Error(ErrorKind::TooCoarse, "edge '" + e.name + "' gets " + std::to_string(n) + " cells; need at least 2");
    cells_.push_back(n);
  }
  finish();
}

MgGrid::MgGrid(const MetricGraph& g, std::vector<int> cells) : graph_(&g), cells_(std::move(cells)) {
  g.require_finite("metric-graph discretisation");
  if (static_cast<int>(cells_.size()) != g.num_edges()) throw Error(ErrorKind::GridMismatch, "one cell count per edge required");
  for (int n : cells_)
    if (n < 2) throw Error(ErrorKind::TooCoarse, "every edge needs at least 2 cells");
  finish();
}

void MgGrid::finish() {
  Eigen::Index next = graph_->num_vertices();
  Eigen::Index form = 0;
  std::uint64_t h = 1469598103934665603ULL;
  for (int n : cells_) {
    interior_offset_.push_back(next);
    next += n - 1;
    form_offset_.push_back(form);
    form += n + 1;
    h = (h ^ static_cast<std::uint64_t>(n)) * 1099511628211ULL;
  }
  num_function_dofs_ = next;
  num_form_dofs_ = form;
  tag_ = (h ^ reinterpret_cast<std::uintptr_t>(graph_)) | 1ULL;
}

double MgGrid::max_step() const {
  double h = 0.0;
  for (int e = 0; e < graph_->num_edges(); ++e) h = std::max(h, step(e));
  return h;
}

Eigen::Index MgGrid::function_dof(int e, int k) const {
  const Edge& ed = graph_->edge(e);
  if (k == 0) return ed.init;
  if (k == cells(e)) return ed.term;
  return interior_offset_[static_cast<std::size_t>(e)] + k - 1;
}

WeightedOperatorPair assemble_kirchhoff_laplacian(const MgGrid& grid) {
  const auto& g = grid.graph();
  std::vector<Eigen::Triplet<double>> kt, mt;
  for (int e = 0; e < g.num_edges(); ++e) {
    const double h = grid.step(e);
    for (int c = 0; c < grid.cells(e); ++c) {
      const Eigen::Index a = grid.function_dof(e, c), b = grid.function_dof(e, c + 1);
      kt.emplace_back(a, a, 1.0 / h);
      kt.emplace_back(b, b, 1.0 / h);
      kt.emplace_back(a, b, -1.0 / h);
      kt.emplace_back(b, a, -1.0 / h);
      mt.emplace_back(a, a, h / 3.0);
      mt.emplace_back(b, b, h / 3.0);
      mt.emplace_back(a, b, h / 6.0);
      mt.emplace_back(b, a, h / 6.0);
    }
  }
  WeightedOperatorPair p;
  const Eigen::Index n = grid.num_function_dofs();
  p.K.resize(n, n);
  p.M.resize(n, n);
  p.K.setFromTriplets(kt.begin(), kt.end());
  p.M.setFromTriplets(mt.begin(), mt.end());
  return p;
}

WeightedOperatorPair assemble_kirchhoff_laplacian(const MetricGraph& g, double h_target) {
  return assemble_kirchhoff_laplacian(MgGrid(g, h_target));
}

SpMat form_mass(const MgGrid& grid) {
  const auto& g = grid.graph();
  std::vector<Eigen::Triplet<double>> mt;
  for (int e = 0; e < g.num_edges(); ++e) {
    const double h = grid.step(e);
    for (int c = 0; c < grid.cells(e); ++c) {
      const Eigen::Index a = grid.form_dof(e, c), b = grid.form_dof(e, c + 1);
      mt.emplace_back(a, a, h / 3.0);
      mt.emplace_back(b, b, h / 3.0);
      mt.emplace_back(a, b, h / 6.0);
      mt.emplace_back(b, a, h / 6.0);
    }
  }
  SpMat M(grid.num_form_dofs(), grid.num_form_dofs());
  M.setFromTriplets(mt.begin(), mt.end());
  return M;
}

MgFunction interpolate(const MgGrid& grid, const std::function<double(int, double)>& f) {
  MgFunction out{grid.tag(), Vec::Zero(grid.num_function_dofs())};
  const auto& g = grid.graph();
  for (int e = 0; e < g.num_edges(); ++e)
    for (int k = 0; k <= grid.cells(e); ++k) out.dofs[grid.function_dof(e, k)] = f(e, k * grid.step(e));
  return out;
}

MgOneForm interpolate_form(const MgGrid& grid, const std::function<double(int, double)>& F) {
  MgOneForm out{grid.tag(), Vec::Zero(grid.num_form_dofs())};
  const auto& g = grid.graph();
  for (int e = 0; e < g.num_edges(); ++e)
    for (int k = 0; k <= grid.cells(e); ++k) out.dofs[grid.form_dof(e, k)] = F(e, k * grid.step(e));
  return out;
}

std::vector<double> edge_samples(const MgGrid& grid, const MgFunction& f, int e) {
  if (f.grid_tag != grid.tag()) throw Error(ErrorKind::GridMismatch, "function lives on a different grid");
  std::vector<double> s(static_cast<std::size_t>(grid.cells(e) + 1));
  for (int k = 0; k <= grid.cells(e); ++k) s[static_cast<std::size_t>(k)] = f.dofs[grid.function_dof(e, k)];
  return s;
}

MgOneForm mg_gradient(const MgGrid& grid, const MgFunction& f) {
  if (f.grid_tag != grid.tag() || f.dofs.size() != grid.num_function_dofs())
    throw Error(ErrorKind::GridMismatch, "gradient of a function from a different grid");
  MgOneForm out{grid.tag(), Vec::Zero(grid.num_form_dofs())};
  const auto& g = grid.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    const int n = grid.cells(e);
    const double h = grid.step(e);
    auto slope = [&](int c) { return (f.dofs[grid.function_dof(e, c + 1)] - f.dofs[grid.function_dof(e, c)]) / h; };
    out.dofs[grid.form_dof(e, 0)] = slope(0);
    out.dofs[grid.form_dof(e, n)] = slope(n - 1);
    for (int k = 1; k < n; ++k) out.dofs[grid.form_dof(e, k)] = 0.5 * (slope(k - 1) + slope(k));
  }
  return out;
}

MgFunction mg_divergence(const MgGrid& grid, const MgOneForm& F) {
  if (F.grid_tag != grid.tag() || F.dofs.size() != grid.num_form_dofs())
    throw Error(ErrorKind::GridMismatch, "divergence of a form from a different grid");
  // Galerkin projection of -F' onto the continuous P1 space
  Vec rhs = Vec::Zero(grid.num_function_dofs());
  const auto& g = grid.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    const double h = grid.step(e);
    for (int c = 0; c < grid.cells(e); ++c) {
      const double slope = (F.dofs[grid.form_dof(e, c + 1)] - F.dofs[grid.form_dof(e, c)]) / h;
      rhs[grid.function_dof(e, c)] -= 0.5 * h * slope;
      rhs[grid.function_dof(e, c + 1)] -= 0.5 * h * slope;
    }
  }
  const auto pair = assemble_kirchhoff_laplacian(grid);
  Eigen::SimplicialLDLT<SpMat> mfac(pair.M);
  return {grid.tag(), mfac.solve(rhs)};
}

Vec vertex_flux(const MgGrid& grid, const MgOneForm& F) {
  if (F.grid_tag != grid.tag()) throw Error(ErrorKind::GridMismatch, "form lives on a different grid");
  const auto& g = grid.graph();
  Vec flux = Vec::Zero(g.num_vertices());
  for (int e = 0; e < g.num_edges(); ++e) {
    flux[g.edge(e).init] -= F.dofs[grid.form_dof(e, 0)];
    flux[g.edge(e).term] += F.dofs[grid.form_dof(e, grid.cells(e))];
  }
  return flux;
}

std::vector<MgOneForm> harmonic_oneform_basis(const MgGrid& grid) {
  const auto& g = grid.graph();
  const int nv = g.num_vertices();
  std::vector<int> parent(static_cast<std::size_t>(nv), -1), parent_edge(static_cast<std::size_t>(nv), -1),
      depth(static_cast<std::size_t>(nv), 0);
  std::vector<char> tree_edge(static_cast<std::size_t>(g.num_edges()), 0), seen(static_cast<std::size_t>(nv), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int e : g.incident(v)) {
      const Edge& ed = g.edge(e);
      const int w = ed.init == v ? ed.term : ed.init;
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = 1;
      parent[static_cast<std::size_t>(w)] = v;
      parent_edge[static_cast<std::size_t>(w)] = e;
      depth[static_cast<std::size_t>(w)] = depth[static_cast<std::size_t>(v)] + 1;
      tree_edge[static_cast<std::size_t>(e)] = 1;
      q.push(w);
    }
  }

  std::vector<MgOneForm> basis;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (tree_edge[static_cast<std::size_t>(e)]) continue;
    Vec coeff = Vec::Zero(g.num_edges());
    coeff[e] = 1.0;  // traverse e from init to term, return through the tree
    int a = g.edge(e).term, b = g.edge(e).init;
    // climbing from a: walk child -> parent; climbing from b: reversed (parent -> child)
    while (a != b) {
      if (depth[static_cast<std::size_t>(a)] >= depth[static_cast<std::size_t>(b)]) {
        const int pe = parent_edge[static_cast<std::size_t>(a)];
        coeff[pe] += g.edge(pe).init == a ? 1.0 : -1.0;
        a = parent[static_cast<std::size_t>(a)];
      } else {
        const int pe = parent_edge[static_cast<std::size_t>(b)];
        coeff[pe] += g.edge(pe).term == b ? 1.0 : -1.0;
        b = parent[static_cast<std::size_t>(b)];
      }
    }
    MgOneForm F{grid.tag(), Vec::Zero(grid.num_form_dofs())};
    for (int f = 0; f < g.num_edges(); ++f)
      for (int k = 0; k <= grid.cells(f); ++k) F.dofs[grid.form_dof(f, k)] = coeff[f];
    basis.push_back(std::move(F));
  }
  return basis;
}

std::vector<MgOneForm> harmonic_oneform_basis(const MetricGraph& g, double h_target) {
  return harmonic_oneform_basis(MgGrid(g, h_target));
}

int divergence_kernel_dimension(const MgGrid& grid) {
  // The Galerkin divergence has checkerboard null vectors on P1 forms, so
  // the kernel is taken from the cellwise derivative instead.
  const auto& g = grid.graph();
  Eigen::Index rows = g.num_vertices();
  for (int e = 0; e < g.num_edges(); ++e) rows += grid.cells(e);
  Mat A = Mat::Zero(rows, grid.num_form_dofs());
  Eigen::Index r = 0;
  for (int e = 0; e < g.num_edges(); ++e)
    for (int c = 0; c < grid.cells(e); ++c, ++r) {
      A(r, grid.form_dof(e, c + 1)) = 1.0 / grid.step(e);
      A(r, grid.form_dof(e, c)) = -1.0 / grid.step(e);
    }
  for (int e = 0; e < g.num_edges(); ++e) {
    A(r + g.edge(e).init, grid.form_dof(e, 0)) -= 1.0;
    A(r + g.edge(e).term, grid.form_dof(e, grid.cells(e))) += 1.0;
  }
  Eigen::FullPivLU<Mat> lu(A);
  lu.setThreshold(1e-10);
  return static_cast<int>(grid.num_form_dofs() - lu.rank());
}

EigResult kirchhoff_spectrum(const MgGrid& grid, int k, const EigOptions& opts) {
  const auto pair = assemble_kirchhoff_laplacian(grid);
  return smallest_eigenpairs(pair.K, pair.M, k, opts);
}

std::vector<double> mg_dirac_spectrum(const MetricGraph& g, double h_target, int k, const EigOptions& opts) {
  const Betti b = betti_numbers(g);
  const int zeros = b.b0 + b.b1;
  const int nonzero_needed = std::max(0, (k - zeros + 1) / 2) + 1;
  const MgGrid grid(g, h_target);
  const EigResult eig = kirchhoff_spectrum(grid, 1 + nonzero_needed, opts);
  std::vector<double> all(static_cast<std::size_t>(zeros), 0.0);
  for (Eigen::Index i = 1; i < eig.values.size(); ++i) {
    const double s = std::sqrt(std::max(0.0, eig.values[i]));
    all.push_back(-s);
    all.push_back(s);
  }
  std::stable_sort(all.begin(), all.end(), [](double a, double c) { return std::abs(a) < std::abs(c); });
  all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(k)));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace qg
