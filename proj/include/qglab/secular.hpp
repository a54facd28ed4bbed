#pragma once

#include "qglab/metric_graph.hpp"

#include <complex>
#include <string>
#include <vector>

namespace qg {

/// Bond-scattering formulation of the Kirchhoff eigenvalue problem.
/// U(k) = S exp(i k L) acts on the 2|E| directed bonds; k > 0 is an
/// eigenvalue wavenumber iff det(I - U(k)) = 0. The normalised determinant
/// Z(k) = det(I - U(k)) / sqrt(det U(k)) is real.
class SecularFunction {
 public:
  explicit SecularFunction(const MetricGraph& g);

  int num_bonds() const { return static_cast<int>(bond_length_.size()); }
  Eigen::MatrixXcd unitary(double k) const;
  double real_determinant(double k) const;
  /// Singular values of I - U(k), ascending.
  Vec singular_values(double k) const;
  double smallest_singular_value(double k) const { return singular_values(k)[0]; }

 private:
  Eigen::MatrixXd scattering_;  // bond-to-bond scattering at the vertices
  std::vector<double> bond_length_;
  double total_length_ = 0.0;
  std::complex<double> sqrt_det_s_;
};

struct SecularRoot {
  double kappa = 0.0;
  int multiplicity = 1;
};

struct SecularSpectrum {
  std::vector<SecularRoot> roots;  // kappa ascending, 0 included
  std::vector<std::string> flags;  // near-degenerate or suspicious roots
  /// Eigenvalues kappa^2 repeated by multiplicity.
  std::vector<double> eigenvalues() const;
};

/// All Kirchhoff eigenvalues with kappa in [0, k_max].
SecularSpectrum secular_spectrum(const MetricGraph& g, double k_max);
std::vector<double> secular_eigenvalues_oracle(const MetricGraph& g, double k_max);

/// The first `count` eigenvalues (with multiplicity), growing k_max as needed.
std::vector<double> secular_first_eigenvalues(const MetricGraph& g, int count);

}  // namespace qg
