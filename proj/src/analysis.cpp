#include "qglab/analysis.hpp"

#include "qglab/mg_operators.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

namespace qg::analysis {

using kernels::TriangleGeom;
using std::numbers::pi;

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["terms"] = nlohmann::json::object();
  for (const auto& [k, v] : terms) j["terms"][k] = v;
  j["residual"] = residual;
  j["pass"] = pass;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

Quadrature gauss_legendre(int order, double a, double b) {
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(order));
  q.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[static_cast<std::size_t>(i)] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    q.weights[static_cast<std::size_t>(i)] = (b - a) / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

namespace {

double bessel_j(int n, double x) { return std::cyl_bessel_j(static_cast<double>(n), x); }
double bessel_y(int n, double x) { return std::cyl_neumann(static_cast<double>(n), x); }
double bessel_jp(int n, double x) { return n == 0 ? -bessel_j(1, x) : bessel_j(n - 1, x) - n * bessel_j(n, x) / x; }
double bessel_yp(int n, double x) { return n == 0 ? -bessel_y(1, x) : bessel_y(n - 1, x) - n * bessel_y(n, x) / x; }

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double first_sign_change(const std::function<double(double)>& f, double lo, double step, double hi) {
  double a = lo, fa = f(a);
  for (double b = lo + step; b <= hi; b += step) {
    const double fb = f(b);
    if ((fa < 0) != (fb < 0)) return bisect(f, a, b);
    a = b;
    fa = fb;
  }
  throw Error(ErrorKind::RootBracketingFailure, "no sign change in the scanned interval");
}

// Radial profile f of u = f(r) cos(theta) and its first two derivatives.
struct Radial {
  double f, df, ddf;
};

struct AnnulusMode {
  double k;
  double ri;
  Radial at(double r) const {
    const double cj = bessel_yp(1, k * ri), cy = bessel_jp(1, k * ri);
    const double f = bessel_j(1, k * r) * cj - bessel_y(1, k * r) * cy;
    const double df = k * (bessel_jp(1, k * r) * cj - bessel_yp(1, k * r) * cy);
    return {f, df, -df / r - (k * k - 1.0 / (r * r)) * f};
  }
};

GaffneyTerms polar_terms(const std::function<Radial(double)>& prof, double k, double r0, double r1, double kappa0,
                         double kappa1, int order) {
  GaffneyTerms t;
  t.wavenumber = k;
  const auto q = gauss_legendre(order, r0, r1);
  const int nth = 2 * order;
  const double dth = 2.0 * pi / nth;
  double uu = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double r = q.nodes[i];
    const auto p = prof(r);
    const double g = p.df / r - p.f / (r * r);
    for (int j = 0; j < nth; ++j) {
      const double th = j * dth;
      const double c = std::cos(th), s = std::sin(th);
      const double w = q.weights[i] * r * dth;
      uu += w * p.f * p.f * c * c;
      t.hessian += w * (p.ddf * p.ddf * c * c + (2.0 * s * s + c * c) * g * g);
      t.field += w * (p.df * p.df * c * c + p.f * p.f / (r * r) * s * s);
    }
  }
  t.codifferential = k * k * k * k * uu;
  // tangential component of W on a circle of radius r is -f(r) sin / r
  auto circle = [&](double r, double kappa) {
    if (r <= 0.0) return 0.0;
    const double ft = prof(r).f / r;
    double acc = 0.0;
    for (int j = 0; j < nth; ++j) {
      const double s = std::sin(j * dth);
      acc += kappa * ft * ft * s * s * r * dth;
    }
    return acc;
  };
  const double outer = circle(r1, kappa1);
  const double inner = circle(r0, kappa0);
  t.boundary = outer + inner;
  t.boundary_negative = std::min(0.0, inner);
  return t;
}

GaffneyTerms rectangle_terms(double R, int order) {
  GaffneyTerms t;
  const double a = 2.0 * R, b = R;
  const double p = pi / a, q = pi / b;
  t.wavenumber = std::hypot(p, q);
  const auto qx = gauss_legendre(order, 0.0, a);
  const auto qy = gauss_legendre(order, 0.0, b);
  double uu = 0.0;
  for (std::size_t i = 0; i < qx.nodes.size(); ++i)
    for (std::size_t j = 0; j < qy.nodes.size(); ++j) {
      const double w = qx.weights[i] * qy.weights[j];
      const double cx = std::cos(p * qx.nodes[i]), sx = std::sin(p * qx.nodes[i]);
      const double cy = std::cos(q * qy.nodes[j]), sy = std::sin(q * qy.nodes[j]);
      const double u = cx * cy;
      uu += w * u * u;
      t.hessian += w * (std::pow(p, 4) * u * u + std::pow(q, 4) * u * u + 2.0 * p * p * q * q * sx * sx * sy * sy);
      t.field += w * (p * p * sx * sx * cy * cy + q * q * cx * cx * sy * sy);
    }
  t.codifferential = std::pow(p * p + q * q, 2) * uu;
  return t;
}

AnnulusMode annulus_mode(double ri, double ro) {
  auto neumann_outer = [&](double k) {
    return bessel_jp(1, k * ro) * bessel_yp(1, k * ri) - bessel_yp(1, k * ro) * bessel_jp(1, k * ri);
  };
  const double k = first_sign_change(neumann_outer, 0.05 / ro, 0.01 / ro, 200.0 / ro);
  return {k, ri};
}

}  // namespace

double bessel_jprime_zero(int n, double lo) {
  auto f = [n](double x) { return bessel_jp(n, x); };
  double x = first_sign_change(f, lo, 0.05, lo + 100.0);
  // polish with Newton; J_n'' from the Bessel equation
  for (int it = 0; it < 50; ++it) {
    const double d1 = bessel_jp(n, x);
    const double d2 = -d1 / x - (1.0 - static_cast<double>(n * n) / (x * x)) * bessel_j(n, x);
    const double dx = d1 / d2;
    x -= dx;
    if (std::abs(dx) < 1e-12 * x) break;
  }
  return x;
}

GaffneyTerms gaffney_terms(const TestField& field) {
  const double R = field.scale;
  switch (field.domain) {
    case Domain::Disc: {
      const double k = bessel_jprime_zero(1) / R;
      auto prof = [k](double r) {
        const double f = bessel_j(1, k * r);
        const double df = k * bessel_jp(1, k * r);
        return Radial{f, df, -df / r - (k * k - 1.0 / (r * r)) * f};
      };
      return polar_terms(prof, k, 0.0, R, 0.0, 1.0 / R, field.order);
    }
    case Domain::Rectangle:
      return rectangle_terms(R, field.order);
    case Domain::Annulus: {
      const double ri = field.r_inner * R;
      const auto mode = annulus_mode(ri, R);
      return polar_terms([&](double r) { return mode.at(r); }, mode.k, ri, R, -1.0 / ri, 1.0 / R, field.order);
    }
  }
  throw Error(ErrorKind::InvalidSpec, "unknown test domain");
}

namespace {

const char* domain_name(Domain d) {
  switch (d) {
    case Domain::Disc: return "disc";
    case Domain::Rectangle: return "rectangle";
    case Domain::Annulus: return "annulus";
  }
  return "?";
}

void require_resolved(const TestField& field, const GaffneyTerms& fine) {
  TestField half = field;
  half.order = std::max(1, field.order / 2);
  const auto coarse = gaffney_terms(half);
  const double scale = std::max({std::abs(fine.codifferential), std::abs(fine.hessian), 1e-300});
  const std::pair<double, double> pairs[] = {{fine.codifferential, coarse.codifferential},
                                             {fine.hessian, coarse.hessian},
                                             {fine.boundary, coarse.boundary}};
  for (const auto& [a, b] : pairs)
    if (std::abs(a - b) > 1e-3 * scale)
      throw Error(ErrorKind::QuadratureUnderResolved,
                  "halving the quadrature order changes a term by " + std::to_string(std::abs(a - b) / scale));
}

}  // namespace

CheckReport verify_gaffney_identity(const TestField& field, double tol) {
  const auto t = gaffney_terms(field);
  require_resolved(field, t);
  CheckReport r;
  r.name = std::string("gaffney_identity_") + domain_name(field.domain);
  r.terms = {{"codifferential", t.codifferential},
             {"hessian", t.hessian},
             {"boundary", t.boundary},
             {"wavenumber", t.wavenumber}};
  r.residual = std::abs(t.codifferential - t.hessian - t.boundary) / std::max(std::abs(t.codifferential), 1e-300);
  const bool convex = field.domain != Domain::Annulus;
  r.pass = r.residual <= tol && (!convex || t.boundary >= 0.0);
  r.extra["order"] = field.order;
  r.extra["scale"] = field.scale;
  r.extra["convex"] = convex;
  return r;
}

CheckReport verify_gaffney_estimate(const TestField& field) {
  TestField f = field;
  f.domain = Domain::Annulus;
  const auto t = gaffney_terms(f);
  require_resolved(f, t);
  const double kappa = 1.0 / (f.r_inner * f.scale);
  const double c = std::max(2.0, 8.0 * kappa * kappa);
  CheckReport r;
  r.name = "gaffney_estimate_annulus";
  r.terms = {{"hessian", t.hessian},
             {"codifferential", t.codifferential},
             {"field", t.field},
             {"boundary", t.boundary},
             {"boundary_negative", t.boundary_negative},
             {"kappa_minus", kappa},
             {"c_gaffney", c}};
  r.residual = t.hessian / (c * (t.codifferential + t.field));
  r.pass = r.residual <= 1.0;
  r.extra["identity_residual"] =
      std::abs(t.codifferential - t.hessian - t.boundary) / std::max(std::abs(t.codifferential), 1e-300);
  r.extra["order"] = f.order;
  return r;
}

CheckReport verify_kato(const FormSample& sample, int n, double h_fd, bool equality) {
  auto norm_at = [&](Vec2 p) { return sample.omega(p).norm(); };
  double worst = -std::numeric_limits<double>::infinity();
  int used = 0, skipped = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 p(sample.lo.x() + (sample.hi.x() - sample.lo.x()) * i / (n - 1),
                   sample.lo.y() + (sample.hi.y() - sample.lo.y()) * j / (n - 1));
      if (p.norm() < sample.exclude_radius || norm_at(p) < 1e-8) {
        ++skipped;
        continue;
      }
      const Vec2 ex(h_fd, 0.0), ey(0.0, h_fd);
      const Vec2 dn((norm_at(p + ex) - norm_at(p - ex)) / (2 * h_fd), (norm_at(p + ey) - norm_at(p - ey)) / (2 * h_fd));
      const Vec2 dwx = (sample.omega(p + ex) - sample.omega(p - ex)) / (2 * h_fd);
      const Vec2 dwy = (sample.omega(p + ey) - sample.omega(p - ey)) / (2 * h_fd);
      const double lhs = dn.norm();
      const double rhs = std::sqrt(dwx.squaredNorm() + dwy.squaredNorm());
      worst = std::max(worst, equality ? std::abs(lhs - rhs) : lhs - rhs);
      ++used;
    }
  CheckReport r;
  r.name = "kato_" + sample.name;
  r.residual = used > 0 ? std::max(0.0, worst) : 0.0;
  r.terms = {{"max_violation", used > 0 ? worst : 0.0}, {"h_fd", h_fd}};
  r.pass = r.residual <= 10.0 * h_fd;
  r.extra["points"] = used;
  r.extra["skipped"] = skipped;
  r.extra["equality"] = equality;
  return r;
}

std::vector<FormSample> kato_samples() {
  std::vector<FormSample> out;
  out.push_back({"constant", [](Vec2) { return Vec2(1.0, 2.0); }});
  out.push_back({"radial_unit", [](Vec2 p) { return Vec2(p / p.norm()); }, {-1, -1}, {1, 1}, 0.05});
  out.push_back({"rotational", [](Vec2 p) { return Vec2(Vec2(-p.y(), p.x()) * (1.0 + p.x() * p.x())); }});
  const double k = bessel_jprime_zero(1);
  out.push_back({"disc_gradient", [k](Vec2 p) {
                   const double r = p.norm(), th = std::atan2(p.y(), p.x());
                   const double f = bessel_j(1, k * r), df = k * bessel_jp(1, k * r);
                   const double wr = df * std::cos(th), wt = -f / r * std::sin(th);
                   return Vec2(wr * std::cos(th) - wt * std::sin(th), wr * std::sin(th) + wt * std::cos(th));
                 }, {-0.7, -0.7}, {0.7, 0.7}, 0.02});
  return out;
}

std::vector<TraceVector> trace_terms(const GraphLikeMesh& mesh, const FemSystem& sys, int e, int v, double a,
                                     const Mat& vectors, double* depth_used) {
  const auto& edge = mesh.graph.edge(e);
  if (edge.init != v && edge.term != v)
    throw Error(ErrorKind::UnknownRegion, "vertex is not an end of the edge");
  const PortGlue* glue = nullptr;
  for (const auto& p : mesh.ports)
    if (p.vertex == v && p.edge == e) glue = &p;
  if (glue == nullptr) throw Error(ErrorKind::UnknownRegion, "no port between the vertex and the edge");
  const auto& tube = mesh.tubes[static_cast<std::size_t>(e)];
  const double dx = tube.length / tube.nx;
  const double available = tube.longitudinal * tube.length / 2.0;
  if (a <= 0.0 || a > available * (1.0 + 1e-12))
    throw Error(ErrorKind::CollarTooShallow, "collar depth " + std::to_string(a) + " exceeds the available " +
                                                 std::to_string(available));
  const int cols = std::min(tube.nx / 2, static_cast<int>(std::floor(a / (tube.longitudinal * dx) + 1e-9)));
  if (cols < 1) throw Error(ErrorKind::CollarTooShallow, "collar thinner than one tube column");
  const double depth = cols * tube.longitudinal * dx;
  if (depth_used != nullptr) *depth_used = depth;

  const int region = mesh.edge_half_region(e, v);
  const bool at_init = edge.init == v;
  std::vector<char> sel(mesh.triangles.size(), 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    if (tri.region != region) continue;
    bool inside = true;
    for (const auto& c : tri.chart) {
      const double d = at_init ? c.x() : tube.length - c.x();
      if (d > cols * dx + 1e-9 * tube.length) inside = false;
    }
    sel[t] = inside ? 1 : 0;
  }

  const double dz = mesh.eps / tube.ny;
  std::vector<TraceVector> out;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    const Vec x = vectors.col(j);
    TraceVector tv;
    for (std::size_t k = 0; k + 1 < glue->nodes.size(); ++k) {
      const double p = x[glue->nodes[k]], q = x[glue->nodes[k + 1]];
      tv.interface += dz / 3.0 * (p * p + p * q + q * q);
    }
    const auto f = rayleigh_region(sys, x, sel, kernels::Exec::Serial);
    tv.energy = f.dirichlet_energy;
    tv.mass = f.mass;
    tv.bound = depth * tv.energy + 2.0 / depth * tv.mass;
    out.push_back(tv);
  }
  return out;
}

CheckReport verify_trace_estimate(const GraphLikeMesh& mesh, const FemSystem& sys, int e, int v, double a,
                                  int num_eigen, int num_random, std::uint64_t seed) {
  const Eigen::Index n = sys.dim();
  const int ne = static_cast<int>(std::min<Eigen::Index>(num_eigen, n));
  Mat X(n, ne + num_random + 1);
  if (ne > 0) X.leftCols(ne) = smallest_eigenpairs(sys, ne).vectors;
  Eigen::SimplicialLDLT<SpMat> fac(SpMat(sys.K + sys.M));
  if (fac.info() != Eigen::Success) throw Error(ErrorKind::FactorizationFailure, "K + M");
  Lcg rng(seed);
  for (int j = 0; j < num_random; ++j) {
    Vec x = fac.solve(sys.M * rng.vector(n));
    X.col(ne + j) = x / m_norm(sys.M, x);
  }
  X.col(ne + num_random) = Vec::Ones(n);

  double depth = 0.0;
  const auto tv = trace_terms(mesh, sys, e, v, a, X, &depth);
  CheckReport r;
  r.name = "trace_estimate";
  int violations = 0;
  double worst = 0.0;
  for (const auto& t : tv) {
    const double ratio = t.interface / std::max(t.bound, 1e-300);
    worst = std::max(worst, ratio);
    if (t.interface > t.bound * (1.0 + 1e-10) + 1e-14) ++violations;
  }
  r.residual = worst;
  r.terms = {{"depth", depth}, {"max_ratio", worst}, {"vectors", static_cast<double>(tv.size())},
             {"violations", static_cast<double>(violations)}};
  r.pass = violations == 0;
  r.extra["edge"] = e;
  r.extra["vertex"] = v;
  return r;
}

int euler_characteristic(const GraphLikeMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      const int a = t.nodes[static_cast<std::size_t>(i)], b = t.nodes[static_cast<std::size_t>((i + 1) % 3)];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return mesh.num_nodes - static_cast<int>(edges.size()) + static_cast<int>(mesh.triangles.size());
}

CheckReport verify_supersymmetry(const MetricGraph& g, double h, int k, const GraphLikeMesh* mesh) {
  g.require_finite("supersymmetry check");
  const MgGrid grid(g, h);
  const auto op = assemble_kirchhoff_laplacian(grid);
  const Eigen::Index n0 = grid.num_function_dofs();
  Eigen::Index n1 = 0;
  for (int e = 0; e < g.num_edges(); ++e) n1 += grid.cells(e);

  // d maps P1 functions to cellwise constant 1-forms
  std::vector<Eigen::Triplet<double>> trip;
  Vec cell_len(n1);
  Eigen::Index row = 0;
  for (int e = 0; e < g.num_edges(); ++e)
    for (int j = 0; j < grid.cells(e); ++j, ++row) {
      const double he = grid.step(e);
      trip.emplace_back(row, grid.function_dof(e, j), -1.0 / he);
      trip.emplace_back(row, grid.function_dof(e, j + 1), 1.0 / he);
      cell_len[row] = he;
    }
  SpMat D(n1, n0);
  D.setFromTriplets(trip.begin(), trip.end());
  const Mat Dd(D);
  const Mat K0 = Dd.transpose() * cell_len.asDiagonal() * Dd;
  const double stiff_err = (K0 - Mat(op.K)).norm() / Mat(op.K).norm();

  const Mat M0(op.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es0(K0, M0);
  // d d* on 1-forms, symmetrised with the square root of the diagonal form mass
  const Vec sq = cell_len.cwiseSqrt();
  const Mat L1 = sq.asDiagonal() * Dd * M0.llt().solve(Dd.transpose()) * sq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> es1(0.5 * (L1 + L1.transpose()));

  const Vec& s0 = es0.eigenvalues();
  const Vec& s1 = es1.eigenvalues();
  const double zero = 1e-9 * std::max(s0.maxCoeff(), s1.maxCoeff());
  std::vector<double> nz0, nz1;
  int ker0 = 0, ker1 = 0;
  for (double x : s0) {
    if (std::abs(x) < zero) ++ker0;
    else nz0.push_back(x);
  }
  for (double x : s1) {
    if (std::abs(x) < zero) ++ker1;
    else nz1.push_back(x);
  }
  double mismatch = nz0.size() == nz1.size() ? 0.0 : std::numeric_limits<double>::infinity();
  if (nz0.size() == nz1.size())
    for (std::size_t i = 0; i < nz0.size(); ++i)
      mismatch = std::max(mismatch, std::abs(nz0[i] - nz1[i]) / std::max(1.0, nz0[i]));

  const auto betti = betti_numbers(g);
  const int div_kernel = divergence_kernel_dimension(grid);
  const int harmonic = static_cast<int>(harmonic_oneform_basis(grid).size());
  const int index = ker0 - ker1;

  const auto dirac = mg_dirac_spectrum(g, h, k);
  int dirac_zeros = 0;
  for (double x : dirac)
    if (std::abs(x) < 1e-6) ++dirac_zeros;
  const int expected_zeros = std::min<int>(static_cast<int>(dirac.size()), betti.b0 + betti.b1);
  double dirac_err = 0.0;
  {
    std::vector<double> sq_nonzero;
    for (double x : dirac)
      if (x > 1e-6) sq_nonzero.push_back(x * x);
    std::sort(sq_nonzero.begin(), sq_nonzero.end());
    for (std::size_t i = 0; i < sq_nonzero.size() && i < nz0.size(); ++i)
      dirac_err = std::max(dirac_err, std::abs(sq_nonzero[i] - nz0[i]) / std::max(1.0, nz0[i]));
  }

  CheckReport r;
  r.name = "supersymmetry";
  r.terms = {{"kernel_d", ker0},
             {"kernel_dstar", ker1},
             {"index", index},
             {"euler", euler_index(g)},
             {"b0", betti.b0},
             {"b1", betti.b1},
             {"divergence_kernel", div_kernel},
             {"harmonic_basis", harmonic},
             {"dirac_zeros", dirac_zeros},
             {"nonzero_mismatch", mismatch},
             {"dirac_mismatch", dirac_err},
             {"stiffness_factorisation", stiff_err}};
  r.residual = std::max({mismatch, dirac_err, stiff_err});
  r.pass = index == euler_index(g) && ker0 == betti.b0 && ker1 == betti.b1 && div_kernel == betti.b1 &&
           harmonic == betti.b1 && dirac_zeros == expected_zeros && r.residual <= 1e-6;
  if (mesh != nullptr) {
    const int chi = euler_characteristic(*mesh);
    r.terms["mesh_euler"] = chi;
    r.pass = r.pass && chi == euler_index(g);
  }
  return r;
}

namespace {

double circum_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double cross = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  return 2.0 * cross / ((b - a).norm() * (c - b).norm() * (a - c).norm());
}

CheckReport ratio_report(const std::string& name, double scaled, double unscaled, double factor) {
  CheckReport r;
  r.name = name;
  r.terms = {{"scaled", scaled}, {"unscaled", unscaled}, {"factor", factor}};
  r.residual = std::abs(scaled - factor * unscaled) / std::max(std::abs(factor * unscaled), 1e-300);
  r.pass = r.residual <= 1e-6;
  return r;
}

}  // namespace

std::vector<CheckReport> verify_scaling(const VertexTemplate& t, double eps, double h) {
  constexpr int m = 2;
  const TemplateGeometry geo(t);
  const int cells = std::max(2, static_cast<int>(std::ceil(1.0 / h - 1e-9)));
  const auto tm = mesh_template(geo, h, cells);
  auto geometry = [&](double s) {
    std::vector<TriangleGeom> out;
    for (const auto& tri : tm.triangles) {
      TriangleGeom tg;
      for (int i = 0; i < 3; ++i) {
        tg.nodes[static_cast<std::size_t>(i)] = tri[static_cast<std::size_t>(i)];
        tg.xy[static_cast<std::size_t>(i)] = s * tm.points[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
      }
      out.push_back(tg);
    }
    return out;
  };
  const auto n = static_cast<Eigen::Index>(tm.points.size());
  const auto sys1 = assemble_p1(geometry(1.0), n, kernels::Exec::Serial);
  const auto sys_e = assemble_p1(geometry(eps), n, kernels::Exec::Serial);

  std::vector<CheckReport> out;
  auto area = [](const FemSystem& s) {
    double a = 0.0;
    for (const auto& l : s.locals) a += l.area;
    return a;
  };
  out.push_back(ratio_report("scaling_area", area(sys_e), area(sys1), std::pow(eps, m)));

  double len1 = 0.0, len_e = 0.0;
  for (int i = 0; i < tm.num_boundary; ++i) {
    const Vec2& a = tm.points[static_cast<std::size_t>(i)];
    const Vec2& b = tm.points[static_cast<std::size_t>((i + 1) % tm.num_boundary)];
    len1 += (b - a).norm();
    len_e += (eps * b - eps * a).norm();
  }
  out.push_back(ratio_report("scaling_boundary_length", len_e, len1, eps));

  Lcg rng(5);
  const Vec u = rng.vector(n);
  out.push_back(ratio_report("scaling_function_norm", u.dot(sys_e.M * u), u.dot(sys1.M * u), std::pow(eps, m)));
  out.push_back(ratio_report("scaling_gradient_norm", u.dot(sys_e.K * u), u.dot(sys1.K * u), std::pow(eps, m - 2)));

  // dense on both sides so the comparison is at roundoff level
  EigOptions opts;
  opts.dense_threshold = std::max<Eigen::Index>(opts.dense_threshold, n + 1);
  const double l1 = smallest_eigenpairs(sys1, 2, opts).values[1];
  const double le = smallest_eigenpairs(sys_e, 2, opts).values[1];
  out.push_back(ratio_report("scaling_lambda2", le, l1, 1.0 / (eps * eps)));

  // curvature from circumcircles of the boundary samples
  double worst = 0.0, kmax1 = 0.0, kmax_e = 0.0;
  for (int i = 0; i < tm.num_boundary; ++i) {
    const auto& P = tm.points;
    const int nb = tm.num_boundary;
    const Vec2 a = P[static_cast<std::size_t>((i + nb - 1) % nb)], b = P[static_cast<std::size_t>(i)],
               c = P[static_cast<std::size_t>((i + 1) % nb)];
    const double k1 = circum_curvature(a, b, c);
    const double ke = circum_curvature(eps * a, eps * b, eps * c);
    kmax1 = std::max(kmax1, std::abs(k1));
    kmax_e = std::max(kmax_e, std::abs(ke));
    worst = std::max(worst, std::abs(ke - k1 / eps));
  }
  {
    CheckReport r;
    r.name = "scaling_curvature";
    r.terms = {{"max_curvature_scaled", kmax_e}, {"max_curvature_unscaled", kmax1}, {"factor", 1.0 / eps}};
    r.residual = worst / std::max(kmax_e, 1e-300);
    r.pass = r.residual <= 1e-6;
    out.push_back(r);
  }

  for (auto dom : {Domain::Disc, Domain::Annulus}) {
    const auto t1 = gaffney_terms({dom, 1.0, 0.2, 64});
    // potential eps * u(x / eps): the field keeps its pointwise size
    auto te = gaffney_terms({dom, eps, 0.2, 64});
    te.codifferential *= eps * eps;
    te.hessian *= eps * eps;
    te.boundary *= eps * eps;
    const double f = std::pow(eps, m - 2);
    CheckReport r;
    r.name = std::string("scaling_gaffney_") + domain_name(dom);
    r.terms = {{"codifferential_ratio", te.codifferential / t1.codifferential},
               {"hessian_ratio", te.hessian / t1.hessian},
               {"boundary_ratio", te.boundary / t1.boundary},
               {"factor", f}};
    r.residual = std::max({std::abs(te.codifferential / t1.codifferential - f),
                           std::abs(te.hessian / t1.hessian - f), std::abs(te.boundary / t1.boundary - f)}) /
                 f;
    r.pass = r.residual <= 1e-6;
    out.push_back(r);
  }
  return out;
}

}  // namespace qg::analysis
