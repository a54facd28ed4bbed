#include "qglab/delaunay.hpp"

#include <algorithm>
#include <numbers>
#include <unordered_map>

namespace qg::mesh2d {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
}

double min_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)}) * 180.0 / std::numbers::pi;
}

Delaunay::Delaunay(const Vec2& lo, const Vec2& hi) {
  const Vec2 c = 0.5 * (lo + hi);
  const double d = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12}) * 50.0;
  pts_ = {c + Vec2(-d, -d), c + Vec2(d, -d), c + Vec2(0.0, d)};
  tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
}

bool Delaunay::in_circumcircle(int t, const Vec2& p) const {
  const auto& v = tris_[static_cast<std::size_t>(t)].v;
  using ld = long double;
  const ld ax = pts_[v[0]].x() - p.x(), ay = pts_[v[0]].y() - p.y();
  const ld bx = pts_[v[1]].x() - p.x(), by = pts_[v[1]].y() - p.y();
  const ld cx = pts_[v[2]].x() - p.x(), cy = pts_[v[2]].y() - p.y();
  const ld det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                 (cx * cx + cy * cy) * (ax * by - bx * ay);
  return det > 0;
}

int Delaunay::locate(const Vec2& p) const {
  int t = last_;
  if (!tris_[static_cast<std::size_t>(t)].alive) t = -1;
  if (t >= 0) {
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const auto& tr = tris_[static_cast<std::size_t>(t)];
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        if (orient(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p) < 0.0) {
          next = tr.nb[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
  }
  for (std::size_t i = 0; i < tris_.size(); ++i) {
    const auto& tr = tris_[i];
    if (!tr.alive) continue;
    if (orient(pts_[tr.v[0]], pts_[tr.v[1]], p) >= 0.0 && orient(pts_[tr.v[1]], pts_[tr.v[2]], p) >= 0.0 &&
        orient(pts_[tr.v[2]], pts_[tr.v[0]], p) >= 0.0)
      return static_cast<int>(i);
  }
  throw Error(ErrorKind::MeshQualityFailure, "point outside the triangulation");
}

int Delaunay::insert(const Vec2& p) {
  const int t0 = locate(p);
  for (int vi : tris_[static_cast<std::size_t>(t0)].v)
    if ((pts_[vi] - p).norm() < 1e-12) return -1;

  std::vector<int> cavity{t0};
  std::vector<char> in_cavity(tris_.size(), 0);
  in_cavity[static_cast<std::size_t>(t0)] = 1;
  struct Rim {
    int a, b, outer;
  };
  std::vector<Rim> rim;
  bool grown = true;
  while (grown) {
    grown = false;
    rim.clear();
    for (std::size_t ci = 0; ci < cavity.size(); ++ci) {
      const auto tr = tris_[static_cast<std::size_t>(cavity[ci])];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n >= 0 && in_cavity[static_cast<std::size_t>(n)]) continue;
        const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
        const bool visible = orient(pts_[a], pts_[b], p) > 0.0;
        if (n >= 0 && (in_circumcircle(n, p) || !visible)) {
          in_cavity[static_cast<std::size_t>(n)] = 1;
          cavity.push_back(n);
          grown = true;
        } else {
          rim.push_back({a, b, n});
        }
      }
    }
  }

  const int pi = static_cast<int>(pts_.size());
  pts_.push_back(p);
  for (int c : cavity) tris_[static_cast<std::size_t>(c)].alive = false;

  std::unordered_map<int, int> starts, ends;
  std::vector<int> created;
  for (const auto& r : rim) {
    const int t = static_cast<int>(tris_.size());
    tris_.push_back({{r.a, r.b, pi}, {-1, -1, r.outer}, true});
    if (r.outer >= 0) {
      auto& o = tris_[static_cast<std::size_t>(r.outer)];
      for (int i = 0; i < 3; ++i)
        if (o.nb[i] >= 0 && in_cavity[static_cast<std::size_t>(o.nb[i])] && o.v[(i + 1) % 3] == r.b &&
            o.v[(i + 2) % 3] == r.a)
          o.nb[i] = t;
    }
    starts[r.a] = t;
    ends[r.b] = t;
    created.push_back(t);
  }
  for (int t : created) {
    auto& tr = tris_[static_cast<std::size_t>(t)];
    tr.nb[0] = starts.at(tr.v[1]);  // edge (b, p)
    tr.nb[1] = ends.at(tr.v[0]);    // edge (p, a)
  }
  last_ = created.back();
  return pi;
}

std::vector<std::array<int, 3>> Delaunay::triangles() const {
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris_) {
    if (!t.alive) continue;
    if (t.v[0] < kSuper || t.v[1] < kSuper || t.v[2] < kSuper) continue;
    out.push_back(t.v);
  }
  return out;
}

}  // namespace qg::mesh2d
