#include "qglab/fem.hpp"

#include <ostream>

namespace qg {

FemSystem assemble_p1(std::vector<kernels::TriangleGeom> geometry, Eigen::Index num_nodes, kernels::Exec exec) {
  FemSystem sys;
  sys.geometry = std::move(geometry);
  sys.locals = kernels::p1_locals(sys.geometry, exec);
  kernels::assemble(sys.geometry, sys.locals, num_nodes, sys.K, sys.M);
  return sys;
}

FemSystem assemble_neumann(const GraphLikeMesh& mesh, kernels::Exec exec) {
  FemSystem sys = assemble_p1(mesh.geometry(), mesh.num_nodes, exec);
  sys.mesh = &mesh;
  return sys;
}

std::vector<kernels::TriangleGeom> rectangle_triangles(double a, double b, int nx, int ny) {
  std::vector<kernels::TriangleGeom> out;
  auto id = [&](int i, int k) { return i * (ny + 1) + k; };
  auto xy = [&](int i, int k) { return Vec2(a * i / nx, b * k / ny); };
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < ny; ++k) {
      out.push_back({{id(i, k), id(i + 1, k), id(i + 1, k + 1)}, {xy(i, k), xy(i + 1, k), xy(i + 1, k + 1)}});
      out.push_back({{id(i, k), id(i + 1, k + 1), id(i, k + 1)}, {xy(i, k), xy(i + 1, k + 1), xy(i, k + 1)}});
    }
  return out;
}

EigResult smallest_eigenpairs(const FemSystem& sys, int k, const EigOptions& opts) {
  return smallest_eigenpairs(sys.K, sys.M, k, opts);
}

RegionForms rayleigh_region(const FemSystem& sys, const Vec& x, const std::vector<char>& selection,
                            kernels::Exec exec) {
  if (selection.size() != sys.geometry.size()) throw Error(ErrorKind::UnknownRegion, "selection size mismatch");
  const auto q = kernels::quadratic_forms(sys.geometry, sys.locals, selection, x, exec);
  return {q.stiffness, q.mass};
}

RegionForms rayleigh_region(const FemSystem& sys, const Vec& x, const std::string& region, kernels::Exec exec) {
  if (!sys.mesh) {
    if (region != "all") throw Error(ErrorKind::UnknownRegion, "plain triangulations only have region 'all'");
    return rayleigh_region(sys, x, std::vector<char>(sys.geometry.size(), 1), exec);
  }
  return rayleigh_region(sys, x, sys.mesh->select(region), exec);
}

void write_coo(std::ostream& out, const SpMat& A) {
  out.precision(17);
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMat::InnerIterator it(A, c); it; ++it) out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace qg
