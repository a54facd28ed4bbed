#include "qglab/kernels.hpp"

#include "qglab/secular.hpp"

#include <omp.h>

namespace qg::kernels {

P1Local p1_local(const TriangleGeom& t) {
  const Vec2& a = t.xy[0];
  const Vec2& b = t.xy[1];
  const Vec2& c = t.xy[2];
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  P1Local out;
  out.area = 0.5 * std::abs(det);
  if (out.area <= 0.0) throw Error(ErrorKind::DegenerateTriangle, "triangle with zero area");
  // gradients of barycentric coordinates times 2*area*sign(det)
  const std::array<Vec2, 3> g{Vec2(b.y() - c.y(), c.x() - b.x()), Vec2(c.y() - a.y(), a.x() - c.x()),
                              Vec2(a.y() - b.y(), b.x() - a.x())};
  const double scale = 1.0 / (4.0 * out.area);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.stiffness[3 * i + j] = scale * g[i].dot(g[j]);
      out.mass[3 * i + j] = out.area / 12.0 * (i == j ? 2.0 : 1.0);
    }
  return out;
}

std::vector<P1Local> p1_locals(std::span<const TriangleGeom> tris, Exec exec) {
  std::vector<P1Local> out(tris.size());
  const auto n = static_cast<std::ptrdiff_t>(tris.size());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = p1_local(tris[static_cast<std::size_t>(t)]);
    return out;
  }
  bool degenerate = false;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    try {
      out[static_cast<std::size_t>(t)] = p1_local(tris[static_cast<std::size_t>(t)]);
    } catch (const Error&) {
#pragma omp atomic write
      degenerate = true;
    }
  }
  if (degenerate) throw Error(ErrorKind::DegenerateTriangle, "triangle with zero area");
  return out;
}

void assemble(std::span<const TriangleGeom> tris, std::span<const P1Local> locals, Eigen::Index n, SpMat& K, SpMat& M) {
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(9 * tris.size());
  mt.reserve(9 * tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(tris[t].nodes[i], tris[t].nodes[j], locals[t].stiffness[3 * i + j]);
        mt.emplace_back(tris[t].nodes[i], tris[t].nodes[j], locals[t].mass[3 * i + j]);
      }
  K.resize(n, n);
  M.resize(n, n);
  K.setFromTriplets(kt.begin(), kt.end());
  M.setFromTriplets(mt.begin(), mt.end());
}

namespace {
constexpr std::size_t kChunk = 256;

QuadraticForms chunk_forms(std::span<const TriangleGeom> tris, std::span<const P1Local> locals,
                           std::span<const char> select, const Vec& x, std::size_t begin, std::size_t end) {
  QuadraticForms q;
  for (std::size_t t = begin; t < end; ++t) {
    if (!select[t]) continue;
    const auto& nd = tris[t].nodes;
    const std::array<double, 3> xl{x[nd[0]], x[nd[1]], x[nd[2]]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        q.stiffness += xl[i] * locals[t].stiffness[3 * i + j] * xl[j];
        q.mass += xl[i] * locals[t].mass[3 * i + j] * xl[j];
      }
  }
  return q;
}
}  // namespace

QuadraticForms quadratic_forms(std::span<const TriangleGeom> tris, std::span<const P1Local> locals,
                               std::span<const char> select, const Vec& x, Exec exec) {
  const std::size_t nchunks = (tris.size() + kChunk - 1) / kChunk;
  std::vector<QuadraticForms> partial(nchunks);
  if (exec == Exec::Serial) {
    for (std::size_t c = 0; c < nchunks; ++c)
      partial[c] = chunk_forms(tris, locals, select, x, c * kChunk, std::min(tris.size(), (c + 1) * kChunk));
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
      const auto cu = static_cast<std::size_t>(c);
      partial[cu] = chunk_forms(tris, locals, select, x, cu * kChunk, std::min(tris.size(), (cu + 1) * kChunk));
    }
  }
  QuadraticForms total;
  for (const auto& p : partial) {
    total.stiffness += p.stiffness;
    total.mass += p.mass;
  }
  return total;
}

SecularSamples secular_scan(const SecularFunction& f, std::span<const double> kappas, Exec exec) {
  SecularSamples s;
  s.determinant.resize(kappas.size());
  s.smallest_singular.resize(kappas.size());
  const auto n = static_cast<std::ptrdiff_t>(kappas.size());
  auto body = [&](std::ptrdiff_t j) {
    const auto ju = static_cast<std::size_t>(j);
    s.determinant[ju] = f.real_determinant(kappas[ju]);
    s.smallest_singular[ju] = f.smallest_singular_value(kappas[ju]);
  };
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t j = 0; j < n; ++j) body(j);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 0; j < n; ++j) body(j);
  }
  return s;
}

}  // namespace qg::kernels
