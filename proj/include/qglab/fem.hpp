#pragma once

#include "qglab/eigensolver.hpp"
#include "qglab/graphlike_mesh.hpp"
#include "qglab/kernels.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qg {

/// P1 Neumann Laplacian on a triangulation. Node i is dof i.
struct FemSystem {
  SpMat K;
  SpMat M;
  std::vector<kernels::TriangleGeom> geometry;
  std::vector<kernels::P1Local> locals;
  const GraphLikeMesh* mesh = nullptr;  // null for plain triangulations
  Eigen::Index dim() const { return K.rows(); }
};

FemSystem assemble_neumann(const GraphLikeMesh& mesh, kernels::Exec exec = kernels::Exec::Parallel);
FemSystem assemble_p1(std::vector<kernels::TriangleGeom> geometry, Eigen::Index num_nodes,
                      kernels::Exec exec = kernels::Exec::Parallel);

/// Structured triangulation of [0, a] x [0, b] with nx x ny cells.
std::vector<kernels::TriangleGeom> rectangle_triangles(double a, double b, int nx, int ny);

EigResult smallest_eigenpairs(const FemSystem& sys, int k, const EigOptions& opts = {});

struct RegionForms {
  double dirichlet_energy = 0.0;
  double mass = 0.0;
};

/// x^T K_region x and x^T M_region x. Region names as in GraphLikeMesh::select.
RegionForms rayleigh_region(const FemSystem& sys, const Vec& x, const std::string& region,
                            kernels::Exec exec = kernels::Exec::Parallel);
RegionForms rayleigh_region(const FemSystem& sys, const Vec& x, const std::vector<char>& selection,
                            kernels::Exec exec = kernels::Exec::Parallel);

/// Coordinate list "row col value", one entry per line, upper and lower parts.
void write_coo(std::ostream& out, const SpMat& A);

}  // namespace qg
