#include "qglab/eigensolver.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <sstream>

namespace qg {

namespace {

// Modified Gram-Schmidt in the M inner product, run twice for stability.
void m_orthonormalize(const SpMat& M, Mat& X) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      Vec mx = M * X.col(j);
      for (Eigen::Index i = 0; i < j; ++i) {
        const double c = X.col(i).dot(mx);
        X.col(j) -= c * X.col(i);
        mx = M * X.col(j);
      }
      const double nrm = std::sqrt(std::max(0.0, X.col(j).dot(mx)));
      if (nrm < 1e-300) throw Error(ErrorKind::SolverFailure, "rank-deficient iteration block");
      X.col(j) /= nrm;
    }
  }
}

EigResult dense_solve(const SpMat& K, const SpMat& M, int k, double sigma) {
  const Mat Kd(K), Md(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Kd, Md);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::FactorizationFailure, "dense generalized eigensolver failed");
  EigResult r;
  r.values = es.eigenvalues().head(k);
  r.vectors = es.eigenvectors().leftCols(k);
  r.dense = true;
  r.sigma = sigma;
  return r;
}

}  // namespace

Vec generalized_residuals(const SpMat& K, const SpMat& M, const Vec& values, const Mat& vectors) {
  Eigen::SimplicialLDLT<SpMat> mfac(M);
  if (mfac.info() != Eigen::Success) throw Error(ErrorKind::FactorizationFailure, "mass matrix is not positive definite");
  Vec res(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Vec r = K * vectors.col(i) - values[i] * (M * vectors.col(i));
    const Vec z = mfac.solve(r);
    res[i] = std::sqrt(std::max(0.0, r.dot(z)));
  }
  return res;
}

EigResult smallest_eigenpairs(const SpMat& K, const SpMat& M, int k, const EigOptions& opts) {
  const Eigen::Index n = K.rows();
  if (k < 1) throw Error(ErrorKind::SolverFailure, "k must be at least 1");
  if (K.cols() != n || M.rows() != n || M.cols() != n) throw Error(ErrorKind::SolverFailure, "matrix size mismatch");
  k = static_cast<int>(std::min<Eigen::Index>(k, n));

  double sigma = opts.sigma;
  if (std::isnan(sigma)) {
    double trK = 0.0, trM = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      trK += K.coeff(i, i);
      trM += M.coeff(i, i);
    }
    sigma = opts.trace_shift ? -0.1 * trK / trM : -0.1 * std::min(1.0, trK / trM);
  }

  if (!opts.force_iterative && n < opts.dense_threshold) {
    EigResult r = dense_solve(K, M, k, sigma);
    r.residuals = generalized_residuals(K, M, r.values, r.vectors);
    return r;
  }

  const SpMat A = K - sigma * M;
  Eigen::SimplicialLDLT<SpMat> fac(A);
  if (fac.info() != Eigen::Success) throw Error(ErrorKind::FactorizationFailure, "LDLT of K - sigma M failed");
  Eigen::SimplicialLDLT<SpMat> mfac(M);
  if (mfac.info() != Eigen::Success) throw Error(ErrorKind::FactorizationFailure, "mass matrix is not positive definite");

  const Eigen::Index p = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * k, k + 8));
  Lcg rng(opts.seed);
  Mat X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) X.col(j) = rng.vector(n);
  m_orthonormalize(M, X);

  EigResult out;
  out.sigma = sigma;
  Vec theta;
  Vec res(k);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Mat Y(n, p);
    const Mat MX = M * X;
    for (Eigen::Index j = 0; j < p; ++j) Y.col(j) = fac.solve(MX.col(j));
    m_orthonormalize(M, Y);

    // Rayleigh-Ritz in the M-orthonormal basis Y
    Mat Kr = Y.transpose() * (K * Y);
    Kr = 0.5 * (Kr + Kr.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(Kr);
    theta = es.eigenvalues();
    X = Y * es.eigenvectors();

    bool converged = true;
    for (int i = 0; i < k; ++i) {
      const Vec r = K * X.col(i) - theta[i] * (M * X.col(i));
      res[i] = std::sqrt(std::max(0.0, r.dot(mfac.solve(r))));
      if (res[i] > opts.tolerance * (1.0 + std::abs(theta[i]))) converged = false;
    }
    out.iterations = it;
    if (converged) {
      out.values = theta.head(k);
      out.vectors = X.leftCols(k);
      out.residuals = res;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "shift-invert iteration did not converge in " << opts.max_iterations << " iterations; residuals:";
  for (int i = 0; i < k; ++i) msg << ' ' << res[i];
  throw Error(ErrorKind::NoConvergence, msg.str());
}

std::vector<int> multiplicity_clusters(const Vec& ascending, double rel) {
  std::vector<int> ids(static_cast<std::size_t>(ascending.size()));
  int cur = 0;
  for (Eigen::Index i = 0; i < ascending.size(); ++i) {
    if (i > 0 && ascending[i] - ascending[i - 1] > rel * std::max(1.0, std::abs(ascending[i - 1]))) ++cur;
    ids[static_cast<std::size_t>(i)] = cur;
  }
  return ids;
}

}  // namespace qg
