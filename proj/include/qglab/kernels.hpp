#pragma once

// Data-parallel inner loops. Every kernel has a serial reference path that
// produces bit-identical output; the parallel path only distributes work
// over independent items and reduces in a fixed order.

#include "qglab/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace qg {
class SecularFunction;
}

namespace qg::kernels {

enum class Exec { Serial, Parallel };

struct TriangleGeom {
  std::array<int, 3> nodes{};
  std::array<Vec2, 3> xy{};  // physical corner coordinates
};

/// P1 element matrices of one triangle, row-major 3x3.
struct P1Local {
  double area = 0.0;
  std::array<double, 9> stiffness{};
  std::array<double, 9> mass{};
};

P1Local p1_local(const TriangleGeom& t);
std::vector<P1Local> p1_locals(std::span<const TriangleGeom> tris, Exec exec);

/// Global sparse matrices from element matrices, summed in triangle order.
void assemble(std::span<const TriangleGeom> tris, std::span<const P1Local> locals, Eigen::Index n, SpMat& K, SpMat& M);

struct QuadraticForms {
  double stiffness = 0.0;
  double mass = 0.0;
};

/// Sum of x^T K_t x and x^T M_t x over triangles with select[t] != 0.
/// Partial sums run over fixed-size chunks so the result does not depend on
/// the number of threads.
QuadraticForms quadratic_forms(std::span<const TriangleGeom> tris, std::span<const P1Local> locals,
                               std::span<const char> select, const Vec& x, Exec exec);

struct SecularSamples {
  std::vector<double> determinant;
  std::vector<double> smallest_singular;
};

SecularSamples secular_scan(const SecularFunction& f, std::span<const double> kappas, Exec exec);

}  // namespace qg::kernels
