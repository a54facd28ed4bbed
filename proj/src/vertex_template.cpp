#include "qglab/vertex_template.hpp"

#include "qglab/delaunay.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>

namespace qg {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
Vec2 left_normal(const Vec2& d) { return {-d.y(), d.x()}; }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = mesh2d::orient(a, b, c), o2 = mesh2d::orient(a, b, d);
  const double o3 = mesh2d::orient(c, d, a), o4 = mesh2d::orient(c, d, b);
  const double tol = 1e-14;
  return ((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) && ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol));
}

}  // namespace

Vec2 VertexTemplate::port_start(int j) const { return polygon[static_cast<std::size_t>(ports.at(static_cast<std::size_t>(j)))]; }

Vec2 VertexTemplate::port_end(int j) const {
  const auto s = static_cast<std::size_t>(ports.at(static_cast<std::size_t>(j)));
  return polygon[(s + 1) % polygon.size()];
}

Vec2 VertexTemplate::port_normal(int j) const {
  const Vec2 d = (port_end(j) - port_start(j)).normalized();
  return {d.y(), -d.x()};
}

Vec2 BoundaryPiece::point(double t) const {
  if (!arc) return a + t * (b - a);
  const double th = angle0 + t * sweep;
  return center + radius * Vec2(std::cos(th), std::sin(th));
}

TemplateGeometry::TemplateGeometry(VertexTemplate t) : t_(std::move(t)) {
  const auto& P = t_.polygon;
  const int n = static_cast<int>(P.size());
  if (n < 3) throw Error(ErrorKind::InvalidSpec, "template '" + t_.name + "' needs at least 3 corners");
  double signed_area = 0.0;
  for (int i = 0; i < n; ++i) signed_area += 0.5 * cross(P[i], P[(i + 1) % n]);
  if (signed_area <= 0.0) throw Error(ErrorKind::InvalidSpec, "template '" + t_.name + "' is not counter-clockwise");

  std::vector<int> port_of_side(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < t_.num_ports(); ++j) {
    const int s = t_.ports[static_cast<std::size_t>(j)];
    if (s < 0 || s >= n || port_of_side[static_cast<std::size_t>(s)] >= 0)
      throw Error(ErrorKind::PortMismatch, "template '" + t_.name + "' has an invalid port side");
    port_of_side[static_cast<std::size_t>(s)] = j;
    if (std::abs((P[(s + 1) % n] - P[s]).norm() - 1.0) > 1e-9)
      throw Error(ErrorKind::PortMismatch, "template '" + t_.name + "' has a port of width != 1");
  }

  auto dir = [&](int side) { return (P[(side + 1) % n] - P[side]).normalized(); };
  std::vector<double> tangent(static_cast<std::size_t>(n), 0.0), turn(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    const Vec2 din = dir(prev), dout = dir(i);
    const double phi = std::atan2(cross(din, dout), din.dot(dout));
    turn[static_cast<std::size_t>(i)] = phi;
    const bool at_port = port_of_side[static_cast<std::size_t>(prev)] >= 0 || port_of_side[static_cast<std::size_t>(i)] >= 0;
    if (at_port) {
      if (std::abs(phi - std::numbers::pi / 2) > 1e-9)
        throw Error(ErrorKind::PortMismatch, "walls at a port of template '" + t_.name + "' are not perpendicular");
      continue;
    }
    if (t_.r_round > 0.0 && std::abs(phi) > 1e-12)
      tangent[static_cast<std::size_t>(i)] = t_.r_round * std::tan(0.5 * std::abs(phi));
  }
  for (int i = 0; i < n; ++i) {
    const double len = (P[(i + 1) % n] - P[i]).norm();
    if (tangent[static_cast<std::size_t>(i)] + tangent[static_cast<std::size_t>((i + 1) % n)] > len + 1e-12)
      throw Error(ErrorKind::TemplateOverlap, "corner roundings of template '" + t_.name + "' overlap");
  }

  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    const double ti = tangent[static_cast<std::size_t>(i)];
    if (ti > 0.0) {
      const Vec2 din = dir(prev), dout = dir(i);
      const double phi = turn[static_cast<std::size_t>(i)];
      BoundaryPiece arc;
      arc.arc = true;
      arc.a = P[i] - ti * din;
      arc.b = P[i] + ti * dout;
      arc.radius = t_.r_round;
      arc.center = arc.a + (phi > 0 ? 1.0 : -1.0) * t_.r_round * left_normal(din);
      arc.angle0 = std::atan2(arc.a.y() - arc.center.y(), arc.a.x() - arc.center.x());
      arc.sweep = phi;
      pieces_.push_back(arc);
    }
    BoundaryPiece seg;
    seg.a = P[i] + ti * dir(i);
    seg.b = P[(i + 1) % n] - tangent[static_cast<std::size_t>((i + 1) % n)] * dir(i);
    seg.port = port_of_side[static_cast<std::size_t>(i)];
    if (seg.length() > 1e-12 || seg.port >= 0) pieces_.push_back(seg);
  }

  for (const auto& p : pieces_) {
    if (!p.arc) {
      area_ += 0.5 * cross(p.a, p.b);
    } else {
      const double r = p.radius, a0 = p.angle0, a1 = p.angle0 + p.sweep;
      area_ += 0.5 * (r * r * p.sweep + r * (p.center.x() * (std::sin(a1) - std::sin(a0)) -
                                             p.center.y() * (std::cos(a1) - std::cos(a0))));
    }
  }

  fine_ = sample(0.01, 100).points;
  const std::size_t m = fine_.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i + 2; k < m; ++k) {
      if (i == 0 && k == m - 1) continue;
      if (segments_cross(fine_[i], fine_[(i + 1) % m], fine_[k], fine_[(k + 1) % m]))
        throw Error(ErrorKind::TemplateOverlap, "boundary of template '" + t_.name + "' self-intersects");
    }
}

TemplateGeometry::Sampling TemplateGeometry::sample(double h, int port_cells) const {
  Sampling s;
  s.port_nodes.resize(static_cast<std::size_t>(t_.num_ports()));
  for (const auto& p : pieces_) {
    const int cells = p.port >= 0 ? port_cells : std::max(1, static_cast<int>(std::ceil(p.length() / h - 1e-9)));
    if (p.port >= 0) {
      auto& ids = s.port_nodes[static_cast<std::size_t>(p.port)];
      for (int k = 0; k <= cells; ++k) ids.push_back(static_cast<int>(s.points.size()) + k);
    }
    for (int k = 0; k < cells; ++k) s.points.push_back(p.point(static_cast<double>(k) / cells));
  }
  const int total = static_cast<int>(s.points.size());
  for (auto& ids : s.port_nodes) ids.back() %= total;
  return s;
}

double TemplateGeometry::collar_depth(int port) const {
  // Walls adjacent to a port are the pieces right before and after it.
  const int np = static_cast<int>(pieces_.size());
  for (int i = 0; i < np; ++i) {
    if (pieces_[static_cast<std::size_t>(i)].port != port) continue;
    const auto& before = pieces_[static_cast<std::size_t>((i + np - 1) % np)];
    const auto& after = pieces_[static_cast<std::size_t>((i + 1) % np)];
    const double lb = before.arc ? 0.0 : before.length();
    const double la = after.arc ? 0.0 : after.length();
    return std::min(lb, la);
  }
  throw Error(ErrorKind::PortMismatch, "no such port");
}

bool TemplateGeometry::contains(const Vec2& p) const {
  int winding = 0;
  const std::size_t m = fine_.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = fine_[i];
    const Vec2& b = fine_[(i + 1) % m];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && mesh2d::orient(a, b, p) > 0.0) ++winding;
    } else if (b.y() <= p.y() && mesh2d::orient(a, b, p) < 0.0) {
      --winding;
    }
  }
  return winding != 0;
}

double TemplateGeometry::boundary_distance(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t m = fine_.size();
  for (std::size_t i = 0; i < m; ++i) d = std::min(d, segment_distance(p, fine_[i], fine_[(i + 1) % m]));
  return d;
}

nlohmann::json ConvexityReport::to_json() const {
  return {{"kappa_minus", kappa_minus},
          {"kappa_minus_exact", kappa_minus_exact},
          {"negative_only_on_template", negative_only_on_template},
          {"samples", samples.size()}};
}

ConvexityReport check_convexity(const VertexTemplate& t, double h) {
  if (t.r_round <= 0.0) throw Error(ErrorKind::NonSmoothBoundary, "template '" + t.name + "' has unrounded corners");
  const TemplateGeometry geo(t);
  const auto s = geo.sample(h, std::max(2, static_cast<int>(std::ceil(1.0 / h))));
  ConvexityReport rep;
  rep.samples = s.points;
  const std::size_t m = s.points.size();
  rep.curvature.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = s.points[(i + m - 1) % m];
    const Vec2& b = s.points[i];
    const Vec2& c = s.points[(i + 1) % m];
    const double k = 2.0 * mesh2d::orient(a, b, c) / ((b - a).norm() * (c - b).norm() * (c - a).norm());
    rep.curvature[i] = k;
    rep.kappa_minus = std::max(rep.kappa_minus, -k);
  }
  for (const auto& p : geo.pieces())
    if (p.arc && p.sweep < 0.0) rep.kappa_minus_exact = std::max(rep.kappa_minus_exact, 1.0 / p.radius);
  // Tubes are flat, so concave boundary can only come from the template.
  for (const auto& ids : s.port_nodes)
    for (std::size_t k = 1; k + 1 < ids.size(); ++k)
      if (std::abs(rep.curvature[static_cast<std::size_t>(ids[k])]) > 1e-9) rep.negative_only_on_template = false;
  return rep;
}

VertexTemplate template_from_json(const nlohmann::json& j) {
  try {
    VertexTemplate t;
    t.name = j.value("name", std::string("template"));
    for (const auto& p : j.at("polygon")) t.polygon.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    t.ports = j.at("ports").get<std::vector<int>>();
    t.r_round = j.value("r_round", 0.2);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, e.what());
  }
}

nlohmann::json to_json(const VertexTemplate& t) {
  nlohmann::json poly = nlohmann::json::array();
  for (const auto& p : t.polygon) poly.push_back({p.x(), p.y()});
  return {{"name", t.name}, {"polygon", poly}, {"ports", t.ports}, {"r_round", t.r_round}};
}

VertexTemplate load_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, path + ": " + e.what());
  }
  return template_from_json(j);
}

namespace templates {

VertexTemplate end_cap(double port_offset, double depth, double r_round) {
  const double x1 = port_offset, x0 = port_offset - depth;
  return {"end_cap", {{x1, -0.5}, {x1, 0.5}, {x0, 0.5}, {x0, -0.5}}, {0}, r_round};
}

VertexTemplate straight(double half_length, double angle) {
  const Eigen::Rotation2Dd R(angle);
  const double L = half_length;
  std::vector<Vec2> poly{{L, -0.5}, {L, 0.5}, {-L, 0.5}, {-L, -0.5}};
  for (auto& p : poly) p = R * p;
  return {"straight", poly, {0, 2}, 0.2};
}

VertexTemplate junction(int degree, double arm_length, double r_round) {
  if (degree < 1) throw Error(ErrorKind::InvalidSpec, "junction degree must be positive");
  if (degree == 1) return end_cap(arm_length, 0.5 + arm_length, r_round);
  if (degree == 2) return straight(arm_length);
  VertexTemplate t;
  t.name = "junction" + std::to_string(degree);
  t.r_round = r_round;
  for (int j = 0; j < degree; ++j) {
    const double a0 = 2.0 * std::numbers::pi * j / degree;
    const double a1 = 2.0 * std::numbers::pi * (j + 1) / degree;
    const Vec2 d0(std::cos(a0), std::sin(a0)), d1(std::cos(a1), std::sin(a1));
    const Vec2 n0 = left_normal(d0), n1 = left_normal(d1);
    // left wall of arm j meets right wall of arm j+1
    Eigen::Matrix2d A;
    A.col(0) = d0;
    A.col(1) = -d1;
    const Eigen::Vector2d st = A.colPivHouseholderQr().solve(-0.5 * n1 - 0.5 * n0);
    t.ports.push_back(static_cast<int>(t.polygon.size()));
    t.polygon.push_back(arm_length * d0 - 0.5 * n0);
    t.polygon.push_back(arm_length * d0 + 0.5 * n0);
    t.polygon.push_back(st[0] * d0 + 0.5 * n0);
  }
  return t;
}

VertexTemplate disc() { return {"disc", {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}, {}, 0.5}; }

double junction_arm_length(int degree, double r_round, double collar) {
  const double half_angle = std::numbers::pi / degree;
  const double corner = 0.5 / std::tan(half_angle);
  const double tangent = r_round * std::tan(0.5 * (std::numbers::pi - 2.0 * half_angle));
  return corner + tangent + collar;
}

VertexTemplate default_for_degree(int degree, double collar) {
  if (degree == 1) return end_cap(0.125, std::max(0.5, collar + 0.2));
  if (degree == 2) return straight(std::max(0.5, 0.5 * collar));
  return junction(degree, junction_arm_length(degree, 0.2, collar));
}

}  // namespace templates

}  // namespace qg

namespace qg {

double TemplateMesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) a += 0.5 * mesh2d::orient(points[t[0]], points[t[1]], points[t[2]]);
  return a;
}

namespace {

struct Triangulated {
  std::vector<std::array<int, 3>> tris;
  std::vector<Vec2> pts;
};

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double b2 = ab.squaredNorm(), c2 = ac.squaredNorm();
  return a + Vec2(ac.y() * b2 - ab.y() * c2, ab.x() * c2 - ac.x() * b2) / d;
}

// Delaunay of pts keeping only triangles whose centroid lies in the domain.
Triangulated triangulate(const TemplateGeometry& geo, const std::vector<Vec2>& pts) {
  Vec2 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  mesh2d::Delaunay dt(lo, hi);
  std::vector<int> local(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) local[i] = dt.insert(pts[i]);
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (local[i] != static_cast<int>(i) + mesh2d::Delaunay::kSuper)
      throw Error(ErrorKind::MeshQualityFailure, "duplicate template mesh points");
  Triangulated out;
  out.pts = pts;
  for (auto t : dt.triangles()) {
    for (auto& v : t) v -= mesh2d::Delaunay::kSuper;
    const Vec2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    if (geo.contains(c)) out.tris.push_back(t);
  }
  return out;
}

double worst_angle(const Triangulated& m) {
  double w = 180.0;
  for (const auto& t : m.tris) w = std::min(w, mesh2d::min_angle_deg(m.pts[t[0]], m.pts[t[1]], m.pts[t[2]]));
  return w;
}

}  // namespace

TemplateMesh mesh_template(const TemplateGeometry& geo, double h, int port_cells) {
  const auto samp = geo.sample(h, port_cells);
  const int nb = static_cast<int>(samp.points.size());
  std::vector<Vec2> pts = samp.points;

  Vec2 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double dy = h * std::sqrt(3.0) / 2.0;
  int row = 0;
  for (double y = lo.y() + dy; y < hi.y(); y += dy, ++row) {
    for (double x = lo.x() + (row % 2 ? 0.5 * h : h); x < hi.x(); x += h) {
      const Vec2 p(x, y);
      if (geo.contains(p) && geo.boundary_distance(p) >= 0.7 * h) pts.push_back(p);
    }
  }

  Triangulated m = triangulate(geo, pts);
  for (int round = 0; round < 8; ++round) {
    std::vector<Vec2> extra;
    for (const auto& t : m.tris) {
      const Vec2 &a = m.pts[t[0]], &b = m.pts[t[1]], &c = m.pts[t[2]];
      if (mesh2d::min_angle_deg(a, b, c) >= 25.0) continue;
      const Vec2 cc = circumcenter(a, b, c);
      if ((cc - a).norm() < 0.5 * h) continue;
      if (!geo.contains(cc) || geo.boundary_distance(cc) < 0.5 * h) continue;
      bool near = false;
      for (const auto& e : extra) near = near || (e - cc).norm() < 0.5 * h;
      if (!near) extra.push_back(cc);
    }
    if (extra.empty()) break;
    m.pts.insert(m.pts.end(), extra.begin(), extra.end());
    m = triangulate(geo, m.pts);
  }

  // Laplacian smoothing of interior points, rejecting inverting moves.
  const int np = static_cast<int>(m.pts.size());
  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(np)), incident(static_cast<std::size_t>(np));
  for (std::size_t ti = 0; ti < m.tris.size(); ++ti) {
    const auto& t = m.tris[ti];
    for (int i = 0; i < 3; ++i) {
      incident[static_cast<std::size_t>(t[i])].push_back(static_cast<int>(ti));
      for (int k = 1; k < 3; ++k) nbrs[static_cast<std::size_t>(t[i])].push_back(t[(i + k) % 3]);
    }
  }
  for (auto& nl : nbrs) {
    std::sort(nl.begin(), nl.end());
    nl.erase(std::unique(nl.begin(), nl.end()), nl.end());
  }
  for (int sweep = 0; sweep < 5; ++sweep) {
    for (int p = nb; p < np; ++p) {
      const auto& nl = nbrs[static_cast<std::size_t>(p)];
      if (nl.empty()) continue;
      Vec2 avg = Vec2::Zero();
      for (int q : nl) avg += m.pts[static_cast<std::size_t>(q)];
      avg /= static_cast<double>(nl.size());
      const Vec2 old = m.pts[static_cast<std::size_t>(p)];
      double before = 180.0, after = 180.0;
      for (int ti : incident[static_cast<std::size_t>(p)]) {
        const auto& t = m.tris[static_cast<std::size_t>(ti)];
        before = std::min(before, mesh2d::min_angle_deg(m.pts[t[0]], m.pts[t[1]], m.pts[t[2]]));
      }
      m.pts[static_cast<std::size_t>(p)] = avg;
      bool ok = geo.boundary_distance(avg) >= 0.35 * h;
      for (int ti : incident[static_cast<std::size_t>(p)]) {
        const auto& t = m.tris[static_cast<std::size_t>(ti)];
        if (mesh2d::orient(m.pts[t[0]], m.pts[t[1]], m.pts[t[2]]) <= 0.0) ok = false;
        after = std::min(after, mesh2d::min_angle_deg(m.pts[t[0]], m.pts[t[1]], m.pts[t[2]]));
      }
      if (!ok || after < before) m.pts[static_cast<std::size_t>(p)] = old;
    }
  }
  Triangulated smoothed = triangulate(geo, m.pts);
  if (worst_angle(smoothed) >= worst_angle(m)) m = std::move(smoothed);

  // every boundary segment must be a mesh edge
  std::vector<std::vector<int>> edges(static_cast<std::size_t>(nb));
  for (const auto& t : m.tris)
    for (int i = 0; i < 3; ++i) {
      const int a = t[i], b = t[(i + 1) % 3];
      if (a < nb) edges[static_cast<std::size_t>(a)].push_back(b);
    }
  for (int i = 0; i < nb; ++i) {
    const auto& e = edges[static_cast<std::size_t>(i)];
    if (std::find(e.begin(), e.end(), (i + 1) % nb) == e.end())
      throw Error(ErrorKind::MeshQualityFailure, "boundary of template '" + geo.spec().name + "' not recovered");
  }

  TemplateMesh out;
  out.points = std::move(m.pts);
  out.triangles = std::move(m.tris);
  out.port_nodes = samp.port_nodes;
  out.num_boundary = nb;
  out.min_angle_deg = 180.0;
  for (const auto& t : out.triangles)
    out.min_angle_deg =
        std::min(out.min_angle_deg, mesh2d::min_angle_deg(out.points[t[0]], out.points[t[1]], out.points[t[2]]));
  if (out.min_angle_deg < 20.0)
    throw Error(ErrorKind::MeshQualityFailure, "template '" + geo.spec().name + "' minimum angle " +
                                                   std::to_string(out.min_angle_deg) + " deg");
  return out;
}

}  // namespace qg
