#include "qglab/secular.hpp"

#include "qglab/kernels.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>

namespace qg {

namespace {
constexpr double kRootTolerance = 1e-10;
constexpr double kZeroSingular = 1e-6;
}  // namespace

SecularFunction::SecularFunction(const MetricGraph& g) {
  g.require_finite("secular oracle");
  const int ne = g.num_edges();
  // bond 2e runs init -> term, bond 2e+1 runs term -> init
  auto origin = [&](int b) { return b % 2 == 0 ? g.edge(b / 2).init : g.edge(b / 2).term; };
  auto target = [&](int b) { return b % 2 == 0 ? g.edge(b / 2).term : g.edge(b / 2).init; };
  const int nb = 2 * ne;
  scattering_ = Eigen::MatrixXd::Zero(nb, nb);
  for (int b = 0; b < nb; ++b) {
    bond_length_.push_back(g.edge(b / 2).length);
    const int w = target(b);
    const double d = g.degree(w);
    for (int c = 0; c < nb; ++c) {
      if (origin(c) != w) continue;
      scattering_(c, b) = 2.0 / d - ((c ^ 1) == b ? 1.0 : 0.0);
    }
  }
  total_length_ = g.total_length();
  const std::complex<double> det_s = Eigen::MatrixXcd(scattering_.cast<std::complex<double>>()).determinant();
  sqrt_det_s_ = std::sqrt(det_s);
}

Eigen::MatrixXcd SecularFunction::unitary(double k) const {
  const int nb = num_bonds();
  Eigen::MatrixXcd U(nb, nb);
  for (int b = 0; b < nb; ++b) {
    const std::complex<double> phase = std::polar(1.0, k * bond_length_[static_cast<std::size_t>(b)]);
    U.col(b) = scattering_.col(b).cast<std::complex<double>>() * phase;
  }
  return U;
}

double SecularFunction::real_determinant(double k) const {
  const int nb = num_bonds();
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(nb, nb) - unitary(k);
  const std::complex<double> z = A.determinant() / (sqrt_det_s_ * std::polar(1.0, k * total_length_));
  return z.real();
}

Vec SecularFunction::singular_values(double k) const {
  const int nb = num_bonds();
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(nb, nb) - unitary(k);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  Vec s = svd.singularValues();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

std::vector<double> SecularSpectrum::eigenvalues() const {
  std::vector<double> out;
  for (const auto& r : roots)
    for (int m = 0; m < r.multiplicity; ++m) out.push_back(r.kappa * r.kappa);
  return out;
}

SecularSpectrum secular_spectrum(const MetricGraph& g, double k_max) {
  const SecularFunction sf(g);
  SecularSpectrum out;
  out.roots.push_back({0.0, 1});  // constants, connected graph
  if (!(k_max > 0.0)) return out;

  const int steps = 2000;
  const double dk = k_max / steps;
  std::vector<double> grid(steps + 1);
  for (int j = 0; j <= steps; ++j) grid[static_cast<std::size_t>(j)] = j * dk;
  grid[0] = 0.25 * dk;  // stay off the kappa = 0 degeneracy
  const auto samples = kernels::secular_scan(sf, grid, kernels::Exec::Parallel);

  std::vector<double> candidates;
  // odd-multiplicity roots: sign changes of the real determinant
  for (int j = 0; j < steps; ++j) {
    const double z0 = samples.determinant[static_cast<std::size_t>(j)];
    const double z1 = samples.determinant[static_cast<std::size_t>(j + 1)];
    if (z0 == 0.0) {
      candidates.push_back(grid[static_cast<std::size_t>(j)]);
      continue;
    }
    if ((z0 < 0.0) == (z1 < 0.0)) continue;
    double a = grid[static_cast<std::size_t>(j)], b = grid[static_cast<std::size_t>(j + 1)], za = z0;
    while (b - a > kRootTolerance) {
      const double m = 0.5 * (a + b);
      const double zm = sf.real_determinant(m);
      if ((zm < 0.0) == (za < 0.0)) {
        a = m;
        za = zm;
      } else {
        b = m;
      }
    }
    const double root = 0.5 * (a + b);
    if (sf.smallest_singular_value(root) > kZeroSingular) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "sign change in [%.12g, %.12g] is not a root of det(I - U)",
                    grid[static_cast<std::size_t>(j)], grid[static_cast<std::size_t>(j + 1)]);
      throw Error(ErrorKind::RootBracketingFailure, buf);
    }
    candidates.push_back(root);
  }
  // even-multiplicity roots: local minima of the smallest singular value
  for (int j = 1; j < steps; ++j) {
    const double s = samples.smallest_singular[static_cast<std::size_t>(j)];
    if (!(s <= samples.smallest_singular[static_cast<std::size_t>(j - 1)] &&
          s <= samples.smallest_singular[static_cast<std::size_t>(j + 1)]))
      continue;
    double a = grid[static_cast<std::size_t>(j - 1)], b = grid[static_cast<std::size_t>(j + 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = sf.smallest_singular_value(c), fd = sf.smallest_singular_value(d);
    while (b - a > kRootTolerance) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = sf.smallest_singular_value(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = sf.smallest_singular_value(d);
      }
    }
    const double root = 0.5 * (a + b);
    if (sf.smallest_singular_value(root) < kZeroSingular) candidates.push_back(root);
  }

  std::sort(candidates.begin(), candidates.end());
  for (double k : candidates) {
    if (k > k_max || k <= 0.0) continue;
    if (out.roots.size() > 1 && k - out.roots.back().kappa < 1e3 * kRootTolerance) continue;
    const Vec s = sf.singular_values(k);
    int mult = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) mult += s[i] < kZeroSingular ? 1 : 0;
    for (Eigen::Index i = mult; i < s.size(); ++i)
      if (s[i] < 1e-3) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "near-degenerate root at kappa=%.12g (singular value %.3g)", k, s[i]);
        out.flags.emplace_back(buf);
        break;
      }
    out.roots.push_back({k, std::max(1, mult)});
  }
  return out;
}

std::vector<double> secular_eigenvalues_oracle(const MetricGraph& g, double k_max) {
  return secular_spectrum(g, k_max).eigenvalues();
}

std::vector<double> secular_first_eigenvalues(const MetricGraph& g, int count) {
  // Weyl: N(k) ~ L k / pi, so this k_max is usually enough on the first try
  double k_max = std::max(1.0, (count + 2) * std::numbers::pi / g.total_length() * 1.5);
  for (int attempt = 0; attempt < 12; ++attempt, k_max *= 1.6) {
    auto ev = secular_eigenvalues_oracle(g, k_max);
    if (static_cast<int>(ev.size()) >= count) {
      ev.resize(static_cast<std::size_t>(count));
      return ev;
    }
  }
  throw Error(ErrorKind::RootBracketingFailure, "could not collect the requested number of eigenvalues");
}

}  // namespace qg
