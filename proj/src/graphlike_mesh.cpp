#include "qglab/graphlike_mesh.hpp"

#include "qglab/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace qg {

namespace {

Vec2 rot90(const Vec2& d) { return {-d.y(), d.x()}; }

Vec2 edge_direction(const MetricGraph& g, int e, int v) {
  const auto& ed = g.edge(e);
  const auto& xy = g.embedding();
  const int other = ed.init == v ? ed.term : ed.init;
  return (xy[static_cast<std::size_t>(other)] - xy[static_cast<std::size_t>(v)]).normalized();
}


bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  int winding = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && mesh2d::orient(a, b, p) > 0.0) ++winding;
    } else if (b.y() <= p.y() && mesh2d::orient(a, b, p) < 0.0) {
      --winding;
    }
  }
  return winding != 0;
}

bool proper_crossing(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol) {
  const double o1 = mesh2d::orient(a, b, c), o2 = mesh2d::orient(a, b, d);
  const double o3 = mesh2d::orient(c, d, a), o4 = mesh2d::orient(c, d, b);
  return ((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) && ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol));
}

struct Builder {
  const MetricGraph& g;
  Variant variant;
  double eps, tau, h;
  GraphLikeMesh m;

  Builder(const MetricGraph& graph, Variant var, double e, double t, double hh)
      : g(graph), variant(var), eps(e), tau(t), h(hh) {}

  void validate(const TemplateMap& templates) {
    g.require_finite("graph-like space");
    if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidSpec, "eps must lie in (0, 1]");
    if (!(h > 0.0) || h > eps / 4.0 * (1.0 + 1e-12))
      throw Error(ErrorKind::TooCoarse, "mesh size must satisfy 0 < h <= eps / 4");
    if (variant == Variant::Embedded) {
      if (!g.has_embedding()) throw Error(ErrorKind::InvalidSpec, "embedded space needs vertex coordinates");
      if (!(eps * tau > 0.0 && eps * tau < 1.0)) throw Error(ErrorKind::InvalidSpec, "need 0 < eps * tau < 1");
    }
    for (const auto& [v, t] : templates)
      if (v < 0 || v >= g.num_vertices()) throw Error(ErrorKind::PortMismatch, "template for unknown vertex");
  }

  void build(const TemplateMap& templates) {
    validate(templates);
    m.graph = g;
    m.variant = variant;
    m.eps = eps;
    m.tau = variant == Variant::Embedded ? tau : 0.0;
    m.h = h;
    const int V = g.num_vertices(), E = g.num_edges();
    for (int v = 0; v < V; ++v) m.regions.push_back({RegionKind::Vertex, v, -1, "vertex:" + g.vertex_name(v)});
    for (int e = 0; e < E; ++e)
      for (int end : {g.edge(e).init, g.edge(e).term})
        m.regions.push_back({RegionKind::EdgeHalf, end, e, "edge_half:" + g.edge(e).name + ":" + g.vertex_name(end)});

    const int ny = std::max(2, static_cast<int>(std::ceil(eps / h - 1e-9)));
    const double ht = h / eps;

    // vertex patches
    TemplateMap all = variant == Variant::Embedded ? embedded_default_templates(g, tau) : default_templates(g);
    for (const auto& [v, t] : templates) all[v] = t;
    std::map<std::string, TemplateMesh> cache;
    m.patches.resize(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) {
      auto& patch = m.patches[static_cast<std::size_t>(v)];
      patch.spec = all.at(v);
      if (patch.spec.num_ports() != g.degree(v))
        throw Error(ErrorKind::PortMismatch, "template '" + patch.spec.name + "' has " +
                                                 std::to_string(patch.spec.num_ports()) + " ports but vertex " +
                                                 g.vertex_name(v) + " has degree " + std::to_string(g.degree(v)));
      const TemplateGeometry geo(patch.spec);
      const std::string key = to_json(patch.spec).dump();
      auto found = cache.find(key);
      if (found == cache.end()) found = cache.emplace(key, mesh_template(geo, ht, ny)).first;
      const TemplateMesh& tm = found->second;
      patch.template_area = geo.area();
      patch.points = tm.points;
      patch.nodes.resize(tm.points.size());
      for (auto& n : patch.nodes) n = m.num_nodes++;
      for (const auto& t : tm.triangles) {
        MeshTriangle tri;
        for (int i = 0; i < 3; ++i) {
          tri.nodes[i] = patch.nodes[static_cast<std::size_t>(t[i])];
          tri.chart[i] = tm.points[static_cast<std::size_t>(t[i])];
        }
        tri.sx = tri.sy = eps;
        tri.region = m.vertex_region(v);
        m.triangles.push_back(tri);
      }
      for (int j = 0; j < patch.spec.num_ports(); ++j) {
        PortGlue glue;
        glue.vertex = v;
        glue.edge = g.incident(v)[static_cast<std::size_t>(j)];
        glue.port = j;
        for (int idx : tm.port_nodes[static_cast<std::size_t>(j)])
          glue.nodes.push_back(patch.nodes[static_cast<std::size_t>(idx)]);
        m.ports.push_back(std::move(glue));
      }
    }

    // tubes
    m.tubes.resize(static_cast<std::size_t>(E));
    for (int e = 0; e < E; ++e) {
      const auto& ed = g.edge(e);
      auto& tube = m.tubes[static_cast<std::size_t>(e)];
      tube.length = ed.length;
      tube.nx = std::max(2, static_cast<int>(std::ceil(ed.length / h - 1e-9)));
      tube.nx += tube.nx % 2;
      tube.ny = ny;
      tube.longitudinal = variant == Variant::Embedded ? 1.0 - eps * tau : 1.0;
      tube.nodes.assign(static_cast<std::size_t>((tube.nx + 1) * (ny + 1)), -1);
      const auto& init_glue = glue_for(ed.init, e);
      const auto& term_glue = glue_for(ed.term, e);
      for (int k = 0; k <= ny; ++k) {
        tube.nodes[static_cast<std::size_t>(k)] = init_glue.nodes[static_cast<std::size_t>(k)];
        tube.nodes[static_cast<std::size_t>(tube.nx * (ny + 1) + k)] = term_glue.nodes[static_cast<std::size_t>(ny - k)];
      }
      for (int i = 1; i < tube.nx; ++i)
        for (int k = 0; k <= ny; ++k) tube.nodes[static_cast<std::size_t>(i * (ny + 1) + k)] = m.num_nodes++;
      for (int i = 0; i < tube.nx; ++i) {
        const int region = m.edge_half_region(e, 2 * i < tube.nx ? ed.init : ed.term);
        for (int k = 0; k < ny; ++k) {
          const Vec2 a(tube.s(i), tube.y(k)), b(tube.s(i + 1), tube.y(k));
          const Vec2 c(tube.s(i + 1), tube.y(k + 1)), d(tube.s(i), tube.y(k + 1));
          MeshTriangle t1{{tube.node(i, k), tube.node(i + 1, k), tube.node(i + 1, k + 1)},
                          {a, b, c}, tube.longitudinal, eps, region};
          MeshTriangle t2{{tube.node(i, k), tube.node(i + 1, k + 1), tube.node(i, k + 1)},
                          {a, c, d}, tube.longitudinal, eps, region};
          m.triangles.push_back(t1);
          m.triangles.push_back(t2);
        }
      }
    }

    boundary();
    layout();
    const double worst = m.min_angle_deg();
    if (worst < 20.0)
      throw Error(ErrorKind::MeshQualityFailure, "minimum angle " + std::to_string(worst) + " deg below 20");
  }

  const PortGlue& glue_for(int v, int e) const {
    for (const auto& p : m.ports)
      if (p.vertex == v && p.edge == e) return p;
    throw Error(ErrorKind::PortMismatch, "no port for edge " + g.edge(e).name);
  }

  void boundary() {
    std::map<std::pair<int, int>, std::pair<int, int>> count;  // edge -> (count, region)
    for (const auto& t : m.triangles)
      for (int i = 0; i < 3; ++i) {
        const int a = t.nodes[i], b = t.nodes[(i + 1) % 3];
        auto& c = count[{std::min(a, b), std::max(a, b)}];
        ++c.first;
        c.second = t.region;
      }
    for (const auto& [edge, c] : count) {
      if (c.first > 2) throw Error(ErrorKind::MeshQualityFailure, "non-manifold mesh edge");
      if (c.first == 1) {
        m.boundary_edges.push_back({edge.first, edge.second});
        m.boundary_region.push_back(c.second);
      }
    }
  }

  void layout() {
    m.xy.assign(static_cast<std::size_t>(m.num_nodes), Vec2::Zero());
    const int V = g.num_vertices(), E = g.num_edges();
    if (variant == Variant::Abstract) {
      for (int v = 0; v < V; ++v) {
        const auto& patch = m.patches[static_cast<std::size_t>(v)];
        const Vec2 c(4.0 * v, 0.0);
        for (std::size_t i = 0; i < patch.points.size(); ++i) m.xy[static_cast<std::size_t>(patch.nodes[i])] = c + eps * patch.points[i];
      }
      for (int e = 0; e < E; ++e) {
        const auto& tube = m.tubes[static_cast<std::size_t>(e)];
        for (int i = 1; i < tube.nx; ++i)
          for (int k = 0; k <= tube.ny; ++k)
            m.xy[static_cast<std::size_t>(tube.node(i, k))] = Vec2(tube.s(i), -2.0 - e * (eps + 0.5) + eps * tube.y(k));
      }
      return;
    }

    const auto& P = g.embedding();
    for (int v = 0; v < V; ++v) {
      auto& patch = m.patches[static_cast<std::size_t>(v)];
      const Vec2 n0 = patch.spec.port_normal(0);
      const Vec2 d0 = edge_direction(g, g.incident(v)[0], v);
      patch.rotation = std::atan2(d0.y(), d0.x()) - std::atan2(n0.y(), n0.x());
      const Eigen::Rotation2Dd R(patch.rotation);
      for (int j = 0; j < patch.spec.num_ports(); ++j) {
        const int e = g.incident(v)[static_cast<std::size_t>(j)];
        const Vec2 d = edge_direction(g, e, v);
        const Vec2 want = 0.5 * tau * g.edge(e).length * d;
        if ((R * patch.spec.port_normal(j) - d).norm() > 1e-9 || (R * patch.spec.port_midpoint(j) - want).norm() > 1e-9)
          throw Error(ErrorKind::PortMismatch, "port " + std::to_string(j) + " of template '" + patch.spec.name +
                                                   "' does not line up with edge " + g.edge(e).name);
      }
      for (std::size_t i = 0; i < patch.points.size(); ++i)
        m.xy[static_cast<std::size_t>(patch.nodes[i])] = P[static_cast<std::size_t>(v)] + eps * (R * patch.points[i]);
    }
    for (int e = 0; e < E; ++e) {
      const auto& tube = m.tubes[static_cast<std::size_t>(e)];
      const int v0 = g.edge(e).init;
      const Vec2 d = edge_direction(g, e, v0);
      const Vec2 S = P[static_cast<std::size_t>(v0)] + m.shortened_start(e) * d;
      for (int i = 0; i <= tube.nx; ++i)
        for (int k = 0; k <= tube.ny; ++k) {
          const Vec2 x = S + tube.longitudinal * tube.s(i) * d + eps * tube.y(k) * rot90(d);
          auto& slot = m.xy[static_cast<std::size_t>(tube.node(i, k))];
          if (i == 0 || i == tube.nx) {
            if ((slot - x).norm() > 1e-9) throw Error(ErrorKind::PortMismatch, "tube of edge " + g.edge(e).name + " misses its port");
          } else {
            slot = x;
          }
        }
    }
    check_overlap();
  }

  void check_overlap() const {
    // Outlines of every region piece in the plane: templates and tubes.
    std::vector<std::vector<Vec2>> outlines;
    const auto& P = g.embedding();
    for (int v = 0; v < g.num_vertices(); ++v) {
      const auto& patch = m.patches[static_cast<std::size_t>(v)];
      const TemplateGeometry geo(patch.spec);
      const Eigen::Rotation2Dd R(patch.rotation);
      auto pts = geo.sample(std::max(0.02, h / eps), 4).points;
      for (auto& p : pts) p = P[static_cast<std::size_t>(v)] + eps * (R * p);
      outlines.push_back(std::move(pts));
    }
    for (int e = 0; e < g.num_edges(); ++e) {
      const auto& t = m.tubes[static_cast<std::size_t>(e)];
      outlines.push_back({m.xy[static_cast<std::size_t>(t.node(0, 0))], m.xy[static_cast<std::size_t>(t.node(t.nx, 0))],
                          m.xy[static_cast<std::size_t>(t.node(t.nx, t.ny))], m.xy[static_cast<std::size_t>(t.node(0, t.ny))]});
    }
    const double tol = 1e-12 * eps * eps;
    for (std::size_t a = 0; a < outlines.size(); ++a)
      for (std::size_t b = a + 1; b < outlines.size(); ++b) {
        const auto& A = outlines[a];
        const auto& B = outlines[b];
        for (std::size_t i = 0; i < A.size(); ++i)
          for (std::size_t k = 0; k < B.size(); ++k)
            if (proper_crossing(A[i], A[(i + 1) % A.size()], B[k], B[(k + 1) % B.size()], tol))
              throw Error(ErrorKind::SelfIntersection, "regions overlap in the plane");
        Vec2 ca = Vec2::Zero(), cb = Vec2::Zero();
        for (const auto& p : A) ca += p;
        for (const auto& p : B) cb += p;
        ca /= static_cast<double>(A.size());
        cb /= static_cast<double>(B.size());
        if ((point_in_polygon(A, ca) && point_in_polygon(B, ca)) || (point_in_polygon(B, cb) && point_in_polygon(A, cb)))
          throw Error(ErrorKind::SelfIntersection, "one region contains another");
      }
  }
};

}  // namespace

int GraphLikeMesh::edge_half_region(int e, int v) const {
  const auto& ed = graph.edge(e);
  if (v != ed.init && v != ed.term) throw Error(ErrorKind::UnknownRegion, "vertex not on edge");
  return graph.num_vertices() + 2 * e + (v == ed.init ? 0 : 1);
}

std::vector<char> GraphLikeMesh::select_all() const { return std::vector<char>(triangles.size(), 1); }

std::vector<char> GraphLikeMesh::select_vertex(int v) const {
  if (v < 0 || v >= graph.num_vertices()) throw Error(ErrorKind::UnknownRegion, "vertex index out of range");
  std::vector<char> s(triangles.size(), 0);
  for (std::size_t t = 0; t < triangles.size(); ++t) s[t] = triangles[t].region == v;
  return s;
}

std::vector<char> GraphLikeMesh::select_edge_half(int e, int v) const {
  if (e < 0 || e >= graph.num_edges()) throw Error(ErrorKind::UnknownRegion, "edge index out of range");
  const int r = edge_half_region(e, v);
  std::vector<char> s(triangles.size(), 0);
  for (std::size_t t = 0; t < triangles.size(); ++t) s[t] = triangles[t].region == r;
  return s;
}

std::vector<char> GraphLikeMesh::select_edge(int e) const {
  auto s = select_edge_half(e, graph.edge(e).init);
  const auto t = select_edge_half(e, graph.edge(e).term);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = s[i] || t[i];
  return s;
}

std::vector<char> GraphLikeMesh::select_star(int v) const {
  auto s = select_vertex(v);
  for (int e : graph.incident(v)) {
    const auto t = select_edge_half(e, v);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = s[i] || t[i];
  }
  return s;
}

std::vector<char> GraphLikeMesh::select(const std::string& name) const {
  if (name == "all") return select_all();
  std::vector<std::string> parts;
  std::stringstream ss(name);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto vertex = [&](const std::string& n) {
    try {
      return graph.vertex_index(n);
    } catch (const Error&) {
      throw Error(ErrorKind::UnknownRegion, "unknown vertex '" + n + "'");
    }
  };
  auto edge = [&](const std::string& n) {
    for (int e = 0; e < graph.num_edges(); ++e)
      if (graph.edge(e).name == n) return e;
    throw Error(ErrorKind::UnknownRegion, "unknown edge '" + n + "'");
  };
  if (parts.size() == 2 && parts[0] == "vertex") return select_vertex(vertex(parts[1]));
  if (parts.size() == 2 && parts[0] == "star") return select_star(vertex(parts[1]));
  if (parts.size() == 2 && parts[0] == "edge") return select_edge(edge(parts[1]));
  if (parts.size() == 3 && parts[0] == "edge_half") return select_edge_half(edge(parts[1]), vertex(parts[2]));
  throw Error(ErrorKind::UnknownRegion, "unknown region '" + name + "'");
}

std::vector<kernels::TriangleGeom> GraphLikeMesh::geometry() const {
  std::vector<kernels::TriangleGeom> out(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    out[t].nodes = tri.nodes;
    for (int i = 0; i < 3; ++i) out[t].xy[i] = Vec2(tri.sx * tri.chart[i].x(), tri.sy * tri.chart[i].y());
  }
  return out;
}

double GraphLikeMesh::area(const std::vector<char>& selection) const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    if (!selection[t]) continue;
    const auto& tri = triangles[t];
    a += 0.5 * tri.sx * tri.sy * mesh2d::orient(tri.chart[0], tri.chart[1], tri.chart[2]);
  }
  return a;
}

double GraphLikeMesh::min_angle_deg() const {
  double w = 180.0;
  for (const auto& g : geometry()) w = std::min(w, mesh2d::min_angle_deg(g.xy[0], g.xy[1], g.xy[2]));
  return w;
}

double GraphLikeMesh::phi(int e, double s_tilde) const {
  const double start = shortened_start(e);
  return (s_tilde - start) / (1.0 - eps * tau);
}

std::vector<Vec2> GraphLikeMesh::vertex_coordinates(int v) const {
  std::vector<Vec2> out;
  for (const auto& p : patches.at(static_cast<std::size_t>(v)).points) out.push_back(eps * p);
  return out;
}

void GraphLikeMesh::write_text(std::ostream& out) const {
  out << "nodes " << num_nodes << " triangles " << triangles.size() << "\n";
  out.precision(17);
  for (const auto& p : xy) out << p.x() << " " << p.y() << "\n";
  for (const auto& t : triangles)
    out << t.nodes[0] << " " << t.nodes[1] << " " << t.nodes[2] << " " << regions[static_cast<std::size_t>(t.region)].name << "\n";
}

GraphLikeMesh build_abstract_space(const MetricGraph& g, const TemplateMap& templates, double eps, double h) {
  Builder b(g, Variant::Abstract, eps, 0.0, h);
  b.build(templates);
  return std::move(b.m);
}

GraphLikeMesh build_embedded_space(const MetricGraph& g, const TemplateMap& templates, double eps, double tau,
                                   double h) {
  Builder b(g, Variant::Embedded, eps, tau, h);
  b.build(templates);
  return std::move(b.m);
}

TemplateMap default_templates(const MetricGraph& g, double tau) {
  TemplateMap out;
  for (int v = 0; v < g.num_vertices(); ++v) {
    double longest = 0.0;
    for (int e : g.incident(v)) longest = std::max(longest, g.edge(e).length);
    out[v] = templates::default_for_degree(g.degree(v), tau * longest + 0.05);
  }
  return out;
}

TemplateMap complete_templates(const MetricGraph& g, const TemplateMap& templates, double tau) {
  TemplateMap out = default_templates(g, tau);
  for (const auto& [v, t] : templates) out[v] = t;
  return out;
}

TemplateMap embedded_default_templates(const MetricGraph& g, double tau) {
  TemplateMap out;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const double offset = 0.5 * tau * g.edge(g.incident(v)[0]).length;
    const int d = g.degree(v);
    if (d == 1)
      out[v] = templates::end_cap(offset);
    else if (d == 2)
      out[v] = templates::straight(offset);
    else
      out[v] = templates::junction(d, offset);
  }
  return out;
}

double default_mesh_size(double eps) { return std::min(eps / 4.0, 0.02); }

}  // namespace qg
