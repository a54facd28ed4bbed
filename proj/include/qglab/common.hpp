#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qg {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

enum class ErrorKind {
  DisconnectedGraph,
  LoopEdge,
  NonPositiveLength,
  EmbeddingLengthMismatch,
  InvalidSpec,
  InfiniteEdge,
  TooCoarse,
  GridMismatch,
  RootBracketingFailure,
  PortMismatch,
  TemplateOverlap,
  MeshQualityFailure,
  SelfIntersection,
  NonSmoothBoundary,
  DegenerateTriangle,
  FactorizationFailure,
  NoConvergence,
  UnknownRegion,
  VariantMismatch,
  SolverFailure,
  EmptySpectrum,
  QuadratureUnderResolved,
  CollarTooShallow,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Deterministic linear-congruential stream used for every start vector and
// random test vector in the library.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  std::uint64_t next_u64() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }
  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2.0 * uniform() - 1.0; }
  Vec vector(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = symmetric();
    return v;
  }

 private:
  std::uint64_t state_;
};

inline double m_dot(const SpMat& M, const Vec& a, const Vec& b) { return a.dot(M * b); }
inline double m_norm(const SpMat& M, const Vec& a) { return std::sqrt(std::max(0.0, a.dot(M * a))); }

}  // namespace qg
