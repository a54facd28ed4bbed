#include "qglab/analysis.hpp"
#include "qglab/constants.hpp"
#include "qglab/identification.hpp"
#include "qglab/secular.hpp"
#include "qglab/sweep.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace qg;
using std::numbers::pi;

namespace {

// Pinned tolerances.
constexpr double kSecularRel = 1e-3;
constexpr double kRatioLo = 3.5, kRatioHi = 4.5;
constexpr double kIsometryFactor = 5.0;
constexpr double kSlopeMin = 0.5;
constexpr double kEmbeddedRel = 1e-3;
constexpr double kGaffneyTol = 1e-3;
constexpr double kGaffneyFloor = 1e-12;  // roundoff floor for the refinement sequence
constexpr double kKatoFd = 1e-4;
constexpr double kScalingTol = 1e-6;

const std::string kData = QGLAB_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int report(int id, const std::string& title, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& ex) {
    o = {false, std::string("exception: ") + ex.what()};
  }
  std::printf("%s %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

// Components and cycle rank from an independent union-find and the rank of
// the incidence matrix.
struct Topology {
  int b0 = 0;
  int b1 = 0;
  int b1_rank = 0;
};

Topology topology_oracle(const MetricGraph& g) {
  std::vector<int> parent(static_cast<std::size_t>(g.num_vertices()));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  int comps = g.num_vertices();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.num_vertices(), g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.edge(e);
    B(ed.init, e) -= 1.0;
    B(ed.term, e) += 1.0;
    const int a = find(ed.init), b = find(ed.term);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --comps;
    }
  }
  Topology t;
  t.b0 = comps;
  t.b1 = g.num_edges() - g.num_vertices() + comps;
  t.b1_rank = g.num_edges() - static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(B).rank());
  return t;
}

std::vector<std::pair<std::string, MetricGraph>> test_graphs() {
  return {{"single_edge", graphs::single_edge(pi)},
          {"two_cycle", graphs::two_edge_cycle(pi)},
          {"star3", graphs::star({1.0, 1.0, 1.0})},
          {"theta", graphs::theta({1.0, 1.5, 2.0})}};
}

Outcome criterion1() {
  Outcome o;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MetricGraph g = graphs::random_connected(seed, 8);
    const Topology t = topology_oracle(g);
    const int harmonic = static_cast<int>(harmonic_oneform_basis(g, 0.1).size());
    const bool ok = euler_index(g) == t.b0 - t.b1 && t.b1 == t.b1_rank && harmonic == t.b1 &&
                    betti_numbers(g).b1 == t.b1 && betti_numbers(g).b0 == t.b0;
    if (!ok) {
      o.pass = false;
      o.detail += "seed " + std::to_string(seed) + " mismatch; ";
    }
    ++checked;
  }
  o.detail += std::to_string(checked) + " graphs, index and harmonic count exact";
  return o;
}

Outcome criterion2() {
  Outcome o;
  double worst_rel = 0.0, ratio_lo = 1e9, ratio_hi = 0.0;
  for (const auto& [name, g] : test_graphs()) {
    const auto exact = secular_first_eigenvalues(g, 6);
    const auto fine = kirchhoff_spectrum(MgGrid(g, 1e-3), 6).values;
    const auto coarse = kirchhoff_spectrum(MgGrid(g, 2e-3), 6).values;
    for (int i = 1; i <= 5; ++i) {
      const double ref = exact[static_cast<std::size_t>(i)];
      const double ef = std::abs(fine[i] - ref), ec = std::abs(coarse[i] - ref);
      worst_rel = std::max(worst_rel, ef / ref);
      const double ratio = ec / ef;
      ratio_lo = std::min(ratio_lo, ratio);
      ratio_hi = std::max(ratio_hi, ratio);
    }
  }
  o.pass = worst_rel <= kSecularRel && ratio_lo >= kRatioLo && ratio_hi <= kRatioHi;
  o.detail = "max rel err " + fmt("%.3g", worst_rel) + ", h-halving ratio in [" + fmt("%.3f", ratio_lo) + ", " +
             fmt("%.3f", ratio_hi) + "]";
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst = 0.0, worst_allowed = 1e9;
  for (const auto& [name, g] : test_graphs()) {
    const double h = 0.05;
    const auto mesh = build_abstract_space(g, {}, 0.2, h);
    const auto sys = assemble_neumann(mesh);
    const MgGrid grid = matching_grid(mesh);
    const auto mg = assemble_kirchhoff_laplacian(grid);
    const auto J = build_J0(grid, mg.M, mesh, sys.M);
    const auto f = interpolate(grid, [&](int e, double s) {
      const double l = g.edge(e).length;
      return std::sin(pi * s / l) * (1.0 + 0.3 * std::cos(2.0 * s));
    });
    const double rel = m_norm(mg.M, J.adjoint(J.apply(f.dofs)) - f.dofs) / m_norm(mg.M, f.dofs);
    const double allowed = kIsometryFactor * grid.max_step() * grid.max_step();
    worst = std::max(worst, rel);
    worst_allowed = std::min(worst_allowed, allowed);
    if (rel > allowed) {
      o.pass = false;
      o.detail += name + " " + fmt("%.3g", rel) + "; ";
    }
  }
  o.detail += "max |J*Jf - f|/|f| " + fmt("%.3g", worst) + " vs 5h^2 >= " + fmt("%.3g", worst_allowed);
  return o;
}

struct SweepRun {
  std::string name;
  SweepResult result;
  std::string csv;
};

std::vector<SweepRun> run_sweeps() {
  std::vector<SweepRun> runs;
  for (const std::string name : {"star3", "theta"}) {
    auto cfg = load_sweep_config(kData + "/configs/" + name + ".json");
    SweepRun r{name, run_sweep(cfg), {}};
    std::ostringstream out;
    r.result.write_csv(out);
    r.csv = out.str();
    write_sweep_outputs(r.result, "acceptance_out/" + name);
    runs.push_back(std::move(r));
  }
  return runs;
}

Outcome criterion4(const std::vector<SweepRun>& runs) {
  Outcome o;
  for (const auto& r : runs) {
    const auto& res = r.result;
    bool mono = true;
    double min_slope = 1e9;
    for (const auto& [idx, m] : res.eigen_monotone)
      if (idx <= 5) mono = mono && m;
    for (const auto& [idx, s] : res.eigen_slopes)
      if (idx <= 5) min_slope = std::min(min_slope, s.fitted ? s.slope : -1e9);
    const double d3 = res.d3_slope.fitted ? res.d3_slope.slope : -1e9;
    const bool ok = mono && min_slope >= kSlopeMin && d3 >= kSlopeMin && res.excluded_eps.empty();
    o.pass = o.pass && ok;
    o.detail += r.name + ": monotone " + (mono ? "yes" : "no") + ", min eigen slope " + fmt("%.3f", min_slope) +
                ", d3 slope " + fmt("%.3f", d3) + "; ";
  }
  return o;
}

Outcome criterion5(const std::vector<SweepRun>& runs) {
  Outcome o;
  int rows = 0, violations = 0;
  double worst = 0.0, trunc = 0.0;
  for (const auto& r : runs)
    for (const auto& row : r.result.rows) {
      ++rows;
      if (!row.ok() || !row.defects.bound_ok() || !row.defects.hausdorff_bound_ok()) ++violations;
      if (!row.ok()) continue;
      const auto& n = row.defects.norms;
      worst = std::max(worst, std::max({n.d1, n.d2, n.d3}) / (2.0 * row.defects.delta_eps));
      trunc = std::max(trunc, row.defects.hausdorff.truncation);
    }
  o.pass = violations == 0 && rows > 0;
  o.detail = std::to_string(rows) + " rows, " + std::to_string(violations) + " violations, max d/(2 delta) " +
             fmt("%.3g", worst) + ", max truncation " + fmt("%.3g", trunc);
  return o;
}

Outcome criterion6() {
  Outcome o;
  const MetricGraph g = load_graph(kData + "/graphs/dumbbell_embedded.json");
  const double tau = 0.25;
  const auto T = embedded_default_templates(g, tau);
  const auto constants = compute_constants(g, T, tau);
  for (double eps : {0.2, 0.1}) {
    const double h = std::min(eps / 4.0, 0.02);
    const auto a = build_abstract_space(g, T, eps, h);
    const auto b = build_embedded_space(g, T, eps, tau, h);
    const auto d = embedded_defects(a, assemble_neumann(a), b, assemble_neumann(b));
    const double target = eps * tau;
    const double rel = std::max(std::abs(d.one_minus_jstar_j - target), std::abs(d.one_minus_j_jstar - target)) / target;
    const double dp = delta_eps_prime(constants, eps);
    const bool ok = rel <= kEmbeddedRel && d.commutator <= dp * dp;
    o.pass = o.pass && ok;
    o.detail += "eps " + fmt("%g", eps) + ": rel " + fmt("%.2g", rel) + ", commutator " + fmt("%.3g", d.commutator) +
                " <= " + fmt("%.3g", dp * dp) + "; ";
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  using namespace qg::analysis;
  const auto r = verify_gaffney_identity(TestField{Domain::Disc, 1.0, 0.2, 64}, kGaffneyTol);
  std::vector<double> seq;
  for (int order : {4, 8, 16, 32, 64, 128}) {
    const auto t = gaffney_terms(TestField{Domain::Disc, 1.0, 0.2, order});
    seq.push_back(std::abs(t.codifferential - t.hessian - t.boundary) / t.codifferential);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (seq[i] > seq[i - 1] && seq[i] > kGaffneyFloor) decreasing = false;
  const double boundary = r.terms.at("boundary");
  o.pass = r.residual <= kGaffneyTol && decreasing && boundary >= 0.0;
  o.detail = "residual at order 64 " + fmt("%.3g", r.residual) + ", order 4 " + fmt("%.3g", seq.front()) +
             ", decreasing " + (decreasing ? "yes" : "no") + ", boundary term " + fmt("%.4g", boundary);
  return o;
}

Outcome criterion8() {
  Outcome o;
  using namespace qg::analysis;
  double worst = 0.0;
  for (const auto& s : kato_samples()) {
    const auto r = verify_kato(s, 41, kKatoFd);
    worst = std::max(worst, r.residual);
    if (r.residual > 10.0 * kKatoFd) {
      o.pass = false;
      o.detail += s.name + " violates; ";
    }
  }
  o.detail += std::to_string(kato_samples().size()) + " samples, max violation " + fmt("%.3g", worst);
  return o;
}

Outcome criterion9() {
  Outcome o;
  using namespace qg::analysis;
  double worst = 0.0;
  int checks = 0;
  const std::vector<VertexTemplate> shipped{templates::end_cap(), templates::straight(), templates::junction(3),
                                            templates::disc()};
  for (const auto& t : shipped)
    for (double eps : {0.1, 0.05})
      for (const auto& r : verify_scaling(t, eps)) {
        ++checks;
        worst = std::max(worst, r.residual);
        if (r.residual > kScalingTol) {
          o.pass = false;
          o.detail += r.name + " on " + t.name + "; ";
        }
      }
  o.detail += std::to_string(checks) + " checks, max rel residual " + fmt("%.3g", worst);
  return o;
}

Outcome criterion10(const std::vector<SweepRun>& first) {
  Outcome o;
  const auto second = run_sweeps();
  for (std::size_t i = 0; i < first.size(); ++i) {
    const bool same = first[i].csv == second[i].csv;
    o.pass = o.pass && same;
    o.detail += first[i].name + (same ? " identical" : " differs") + " (" + std::to_string(first[i].csv.size()) +
                " bytes); ";
  }
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  failures += report(1, "topology exactness", criterion1);
  failures += report(2, "metric-graph solver vs secular oracle", criterion2);
  failures += report(3, "identification isometry", criterion3);
  std::vector<SweepRun> runs;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    runs = run_sweeps();
  } catch (const std::exception& ex) {
    std::printf("sweep error: %s\n", ex.what());
  }
  std::printf("sweeps finished in %.1fs\n", seconds_since(t0));
  failures += report(4, "convergence rate", [&] { return criterion4(runs); });
  failures += report(5, "explicit-bound certificates", [&] { return criterion5(runs); });
  failures += report(6, "embedded perturbation", criterion6);
  failures += report(7, "Gaffney identity", criterion7);
  failures += report(8, "Kato inequality", criterion8);
  failures += report(9, "scaling laws", criterion9);
  failures += report(10, "determinism", [&] { return criterion10(runs); });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
