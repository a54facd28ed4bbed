#include "qglab/identification.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <limits>

namespace qg {

namespace {

std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> factor(const SpMat& A, const char* what) {
  auto f = std::make_shared<Eigen::SimplicialLDLT<SpMat>>(A);
  if (f->info() != Eigen::Success) throw Error(ErrorKind::FactorizationFailure, what);
  return f;
}

}  // namespace

IdentificationMap::IdentificationMap(SpMat J, SpMat M_src, SpMat M_tgt)
    : J_(std::move(J)), Ms_(std::move(M_src)), Mt_(std::move(M_tgt)) {
  if (J_.cols() != Ms_.rows() || J_.rows() != Mt_.rows())
    throw Error(ErrorKind::GridMismatch, "identification map does not fit the mass matrices");
  src_fac_ = factor(Ms_, "source mass matrix is not positive definite");
}

Vec IdentificationMap::adjoint(const Vec& u) const { return src_fac_->solve(J_.transpose() * (Mt_ * u)); }

double IdentificationMap::norm() const {
  return operator_norm([this](const Vec& f) { return apply(f); }, [this](const Vec& u) { return adjoint(u); }, Ms_)
      .value;
}

MgGrid matching_grid(const GraphLikeMesh& mesh) {
  std::vector<int> cells;
  for (const auto& t : mesh.tubes) cells.push_back(t.nx);
  return MgGrid(mesh.graph, std::move(cells));
}

IdentificationMap build_J0(const MgGrid& grid, const SpMat& mg_mass, const GraphLikeMesh& mesh, const SpMat& mesh_mass) {
  if (mesh.variant != Variant::Abstract) throw Error(ErrorKind::VariantMismatch, "J0 needs the abstract graph-like space");
  const auto& g = grid.graph();
  if (g.num_edges() != mesh.graph.num_edges()) throw Error(ErrorKind::GridMismatch, "edge sets differ");
  for (int e = 0; e < g.num_edges(); ++e)
    if (std::abs(g.edge(e).length - mesh.graph.edge(e).length) > 1e-12)
      throw Error(ErrorKind::GridMismatch, "edge lengths differ on edge " + g.edge(e).name);

  const double scale = 1.0 / std::sqrt(mesh.eps);
  std::vector<Eigen::Triplet<double>> trips;
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& tube = mesh.tubes[static_cast<std::size_t>(e)];
    const int n = grid.cells(e);
    const double he = grid.step(e);
    for (int i = 0; i <= tube.nx; ++i) {
      const double s = tube.s(i);
      const int c = std::min(n - 1, static_cast<int>(std::floor(s / he)));
      const double w = std::clamp(s / he - c, 0.0, 1.0);
      for (int k = 0; k <= tube.ny; ++k) {
        const int row = tube.node(i, k);
        if (1.0 - w > 0.0) trips.emplace_back(row, grid.function_dof(e, c), scale * (1.0 - w));
        if (w > 0.0) trips.emplace_back(row, grid.function_dof(e, c + 1), scale * w);
      }
    }
  }
  SpMat J(mesh.num_nodes, grid.num_function_dofs());
  J.setFromTriplets(trips.begin(), trips.end());
  return IdentificationMap(std::move(J), mg_mass, mesh_mass);
}

NormEstimate operator_norm(const LinearOp& A, const LinearOp& A_adjoint, const SpMat& M_src, std::uint64_t seed,
                           double rel_tol, int max_iterations) {
  const Eigen::Index n = M_src.rows();
  const Eigen::Index p = std::min<Eigen::Index>(4, n);
  Lcg rng(seed);
  Mat X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) X.col(j) = rng.vector(n);

  NormEstimate est;
  double prev = -1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    // M-orthonormalize the block
    for (Eigen::Index j = 0; j < p; ++j) {
      // columns that collapse under projection are replaced by fresh random ones
      for (int attempt = 0; attempt < 4; ++attempt) {
        const double before = m_norm(M_src, X.col(j));
        for (int pass = 0; pass < 2; ++pass)
          for (Eigen::Index i = 0; i < j; ++i) X.col(j) -= X.col(i).dot(M_src * X.col(j)) * X.col(i);
        const double nrm = m_norm(M_src, X.col(j));
        if (nrm > 1e-8 * before && nrm > 1e-300) {
          X.col(j) /= nrm;
          break;
        }
        X.col(j) = rng.vector(n);
      }
    }
    Mat Y(n, p);
    for (Eigen::Index j = 0; j < p; ++j) Y.col(j) = A_adjoint(A(X.col(j)));
    Mat H = X.transpose() * (M_src * Y);
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const double top = std::max(0.0, es.eigenvalues()[p - 1]);
    est.value = std::sqrt(top);
    est.iterations = it;
    if (prev >= 0.0 && std::abs(top - prev) <= rel_tol * std::max(top, 1e-300)) {
      est.converged = true;
      return est;
    }
    if (top == 0.0 && prev == 0.0) {
      est.converged = true;
      return est;
    }
    prev = top;
    X = Y * es.eigenvectors();
  }
  return est;
}

DefectNorms defect_norms_laplacian(const WeightedOperatorPair& src, const WeightedOperatorPair& tgt,
                                   const IdentificationMap& J) {
  const auto rs = factor(src.K + src.M, "K + M of the metric graph");
  const auto rt = factor(tgt.K + tgt.M, "K + M of the graph-like space");
  // (K + M)^{-1} M is M-self-adjoint
  auto R0 = [&](const Vec& f) -> Vec { return rs->solve(src.M * f); };
  auto Re = [&](const Vec& u) -> Vec { return rt->solve(tgt.M * u); };

  DefectNorms d;
  auto A1 = [&](const Vec& f) -> Vec {
    const Vec r = R0(f);
    return r - J.adjoint(J.apply(r));
  };
  auto A1s = [&](const Vec& f) -> Vec { return R0(f - J.adjoint(J.apply(f))); };
  auto A2 = [&](const Vec& u) -> Vec {
    const Vec r = Re(u);
    return r - J.apply(J.adjoint(r));
  };
  auto A2s = [&](const Vec& u) -> Vec { return Re(u - J.apply(J.adjoint(u))); };
  auto A3 = [&](const Vec& f) -> Vec { return J.apply(R0(f)) - Re(J.apply(f)); };
  auto A3s = [&](const Vec& u) -> Vec { return R0(J.adjoint(u)) - J.adjoint(Re(u)); };

  const auto n1 = operator_norm(A1, A1s, src.M);
  const auto n2 = operator_norm(A2, A2s, tgt.M);
  const auto n3 = operator_norm(A3, A3s, src.M);
  d.d1 = n1.value;
  d.d2 = n2.value;
  d.d3 = n3.value;
  d.converged = n1.converged && n2.converged && n3.converged;
  return d;
}

nlohmann::json EmbeddedDefects::to_json() const {
  return {{"eps", eps},
          {"tau", tau},
          {"one_minus_jstar_j", one_minus_jstar_j},
          {"one_minus_j_jstar", one_minus_j_jstar},
          {"commutator", commutator}};
}

EmbeddedDefects embedded_defects(const GraphLikeMesh& abstract_mesh, const FemSystem& abstract_sys,
                                 const GraphLikeMesh& embedded_mesh, const FemSystem& embedded_sys) {
  if (abstract_mesh.variant != Variant::Abstract || embedded_mesh.variant != Variant::Embedded)
    throw Error(ErrorKind::VariantMismatch, "need one abstract and one embedded mesh");
  if (abstract_mesh.num_nodes != embedded_mesh.num_nodes || abstract_mesh.eps != embedded_mesh.eps ||
      abstract_mesh.triangles.size() != embedded_mesh.triangles.size())
    throw Error(ErrorKind::VariantMismatch, "meshes were not built from the same graph, templates and eps");
  for (std::size_t t = 0; t < abstract_mesh.triangles.size(); ++t)
    if (abstract_mesh.triangles[t].nodes != embedded_mesh.triangles[t].nodes)
      throw Error(ErrorKind::VariantMismatch, "meshes do not share their node numbering");

  const SpMat& Ma = abstract_sys.M;
  const SpMat& Mb = embedded_sys.M;
  const auto fa = factor(Ma, "abstract mass matrix");
  // J is the identity on coefficients, J* = Ma^{-1} Mb.
  auto Jst = [&](const Vec& u) -> Vec { return fa->solve(Mb * u); };

  EmbeddedDefects out;
  out.eps = embedded_mesh.eps;
  out.tau = embedded_mesh.tau;
  auto B1 = [&](const Vec& f) -> Vec { return f - Jst(f); };  // M_a-self-adjoint
  out.one_minus_jstar_j = operator_norm(B1, B1, Ma).value;
  auto B2 = [&](const Vec& u) -> Vec { return u - Jst(u); };
  // 1 - J J* acts on the embedded space as u - Ma^{-1} Mb u, self-adjoint in M_b
  out.one_minus_j_jstar = operator_norm(B2, B2, Mb).value;

  const auto ra = factor(abstract_sys.K + Ma, "abstract K + M");
  const auto rb = factor(embedded_sys.K + Mb, "embedded K + M");
  auto Ra = [&](const Vec& f) -> Vec { return ra->solve(Ma * f); };
  auto Rb = [&](const Vec& u) -> Vec { return rb->solve(Mb * u); };
  auto C = [&](const Vec& f) -> Vec { return Ra(f) - Rb(f); };
  auto Cs = [&](const Vec& u) -> Vec { return Ra(Jst(u)) - Jst(Rb(u)); };
  out.commutator = operator_norm(C, Cs, Ma).value;
  return out;
}

HausdorffResult hausdorff_resolvent_distance(const std::vector<double>& a, const std::vector<double>& b,
                                             double lambda_max) {
  std::vector<double> A{0.0}, B{0.0};
  for (double l : a)
    if (l <= lambda_max) A.push_back(1.0 / (l + 1.0));
  for (double l : b)
    if (l <= lambda_max) B.push_back(1.0 / (l + 1.0));
  if (A.size() == 1 || B.size() == 1) throw Error(ErrorKind::EmptySpectrum, "no eigenvalue below the truncation");
  auto directed = [](const std::vector<double>& X, const std::vector<double>& Y) {
    double d = 0.0;
    for (double x : X) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : Y) best = std::min(best, std::abs(x - y));
      d = std::max(d, best);
    }
    return d;
  };
  return {std::max(directed(A, B), directed(B, A)), 1.0 / (lambda_max + 1.0)};
}

bool DefectReport::bound_ok() const {
  const double b = 2.0 * delta_eps;
  return norms.d1 <= b && norms.d2 <= b && norms.d3 <= b;
}

bool DefectReport::hausdorff_bound_ok() const { return hausdorff.distance <= std::sqrt(3.0) * 2.0 * delta_eps; }

nlohmann::json DefectReport::to_json() const {
  return {{"eps", eps},
          {"d1", norms.d1},
          {"d2", norms.d2},
          {"d3", norms.d3},
          {"delta_eps", delta_eps},
          {"bound_ok", bound_ok()},
          {"hausdorff", hausdorff.distance},
          {"hausdorff_truncation", hausdorff.truncation},
          {"hausdorff_bound_ok", hausdorff_bound_ok()}};
}

}  // namespace qg
