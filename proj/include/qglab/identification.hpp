#pragma once

#include "qglab/fem.hpp"
#include "qglab/graphlike_mesh.hpp"
#include "qglab/mg_operators.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <vector>

namespace qg {

/// Linear map between two M-weighted spaces with its M-adjoint
/// J* = M_src^{-1} J^T M_tgt.
class IdentificationMap {
 public:
  IdentificationMap(SpMat J, SpMat M_src, SpMat M_tgt);
  const SpMat& matrix() const { return J_; }
  const SpMat& source_mass() const { return Ms_; }
  const SpMat& target_mass() const { return Mt_; }
  Vec apply(const Vec& f) const { return J_ * f; }
  Vec adjoint(const Vec& u) const;
  /// M-operator norm of J.
  double norm() const;

 private:
  SpMat J_, Ms_, Mt_;
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> src_fac_;
};

/// Metric-graph grid whose nodes coincide with the tube columns of mesh.
MgGrid matching_grid(const GraphLikeMesh& mesh);

/// Tube values f_e(s) / sqrt(eps), linear in s between metric-graph nodes;
/// template nodes get 0.
IdentificationMap build_J0(const MgGrid& grid, const SpMat& mg_mass, const GraphLikeMesh& mesh, const SpMat& mesh_mass);

/// Largest singular value of A in the M norms, by block power iteration on
/// A*A (block 4, Rayleigh-Ritz), relative tolerance 1e-4, at most 300 steps.
struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};
using LinearOp = std::function<Vec(const Vec&)>;
NormEstimate operator_norm(const LinearOp& A, const LinearOp& A_adjoint, const SpMat& M_src, std::uint64_t seed = 7,
                           double rel_tol = 1e-4, int max_iterations = 300);

struct DefectNorms {
  double d1 = 0.0;  // ||(1 - J*J)(L_0 + 1)^{-1}||
  double d2 = 0.0;  // ||(1 - J J*)(L_eps + 1)^{-1}||
  double d3 = 0.0;  // ||J (L_0 + 1)^{-1} - (L_eps + 1)^{-1} J||
  bool converged = true;
};

DefectNorms defect_norms_laplacian(const WeightedOperatorPair& src, const WeightedOperatorPair& tgt,
                                   const IdentificationMap& J);

/// Abstract-to-embedded pullback along the tube coordinate maps. Both meshes
/// share node numbering, so the map is the identity on coefficients.
struct EmbeddedDefects {
  double eps = 0.0;
  double tau = 0.0;
  double one_minus_jstar_j = 0.0;
  double one_minus_j_jstar = 0.0;
  double commutator = 0.0;  // ||J R_abs - R_emb J||
  nlohmann::json to_json() const;
};
EmbeddedDefects embedded_defects(const GraphLikeMesh& abstract_mesh, const FemSystem& abstract_sys,
                                 const GraphLikeMesh& embedded_mesh, const FemSystem& embedded_sys);

struct HausdorffResult {
  double distance = 0.0;
  double truncation = 0.0;  // (lambda_max + 1)^{-1}
};
/// Hausdorff distance of {1/(lambda+1) : lambda <= lambda_max} plus {0}.
HausdorffResult hausdorff_resolvent_distance(const std::vector<double>& a, const std::vector<double>& b,
                                             double lambda_max);

struct DefectReport {
  double eps = 0.0;
  DefectNorms norms;
  double delta_eps = 0.0;
  HausdorffResult hausdorff;
  bool bound_ok() const;
  bool hausdorff_bound_ok() const;
  nlohmann::json to_json() const;
};

}  // namespace qg
