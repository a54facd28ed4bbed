#pragma once

#include "qglab/common.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace qg {

struct EigOptions {
  /// Shift of the inverted operator; NaN selects -0.1 * min(1, tr(K) / tr(M)),
  /// or -0.1 * tr(K) / tr(M) when trace_shift is set.
  double sigma = std::numeric_limits<double>::quiet_NaN();
  bool trace_shift = false;
  std::uint64_t seed = 1;
  int max_iterations = 500;
  double tolerance = 1e-8;
  /// Systems below this dimension are solved densely unless force_iterative.
  Eigen::Index dense_threshold = 2000;
  bool force_iterative = false;
};

/// Generalized eigenpairs K x = lambda M x, ascending, M-orthonormal.
struct EigResult {
  Vec values;
  Mat vectors;
  Vec residuals;  // ||K x - lambda M x||_{M^{-1}}
  int iterations = 0;
  bool dense = false;
  double sigma = 0.0;
};

EigResult smallest_eigenpairs(const SpMat& K, const SpMat& M, int k, const EigOptions& opts = {});

/// Cluster ids for an ascending list: neighbours closer than
/// rel * max(1, |lambda|) share a cluster.
std::vector<int> multiplicity_clusters(const Vec& ascending, double rel = 1e-6);

/// Residual norms ||K x_i - lambda_i M x_i||_{M^{-1}} for each column.
Vec generalized_residuals(const SpMat& K, const SpMat& M, const Vec& values, const Mat& vectors);

}  // namespace qg
