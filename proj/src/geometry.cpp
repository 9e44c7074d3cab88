#include "svem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace svem {

LineEquation LineEquation::through_edge(const Point2& p, const Point2& q) {
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  const double len = std::hypot(dx, dy);
  if (len <= 0.0 || !std::isfinite(len)) {
    throw InvalidGeometryError("degenerate edge in line construction");
  }
  // Outward normal of a CCW edge points to the right of the travel direction.
  LineEquation l;
  l.a = dy / len;
  l.b = -dx / len;
  l.c = -(l.a * p.x + l.b * p.y);
  return l;
}

namespace {

// Orientation sign of the triangle (a, b, c), robust up to a scale-relative
// tolerance: +1 CCW, -1 CW, 0 collinear.
int orientation(const Point2& a, const Point2& b, const Point2& c, double scale) {
  const double cr = (b - a).cross(c - a);
  const double tol = 1e-14 * scale * scale;
  if (cr > tol) return 1;
  if (cr < -tol) return -1;
  return 0;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p, double scale) {
  const double tol = 1e-12 * scale;
  return p.x >= std::min(a.x, b.x) - tol && p.x <= std::max(a.x, b.x) + tol &&
         p.y >= std::min(a.y, b.y) - tol && p.y <= std::max(a.y, b.y) + tol;
}

// Proper or improper intersection of segments [a,b] and [c,d].
bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d,
                        double scale) {
  const int o1 = orientation(a, b, c, scale);
  const int o2 = orientation(a, b, d, scale);
  const int o3 = orientation(c, d, a, scale);
  const int o4 = orientation(c, d, b, scale);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c, scale)) return true;
  if (o2 == 0 && on_segment(a, b, d, scale)) return true;
  if (o3 == 0 && on_segment(c, d, a, scale)) return true;
  if (o4 == 0 && on_segment(c, d, b, scale)) return true;
  return false;
}

}  // namespace

Polygon::Polygon(std::vector<Point2> vertices) : verts_(std::move(vertices)) {
  const int n = static_cast<int>(verts_.size());
  if (n < 3) throw InvalidGeometryError("polygon needs at least 3 vertices");

  for (const Point2& v : verts_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw InvalidGeometryError("non-finite vertex coordinate");
    }
  }

  double dia = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      dia = std::max(dia, distance(verts_[static_cast<size_t>(i)], verts_[static_cast<size_t>(j)]));
    }
  }
  diameter_ = dia;
  if (!(dia > 0.0)) throw InvalidGeometryError("polygon has zero extent");

  for (int i = 0; i < n; ++i) {
    if (distance(edge_start(i), edge_end(i)) <= 1e-14 * dia) {
      throw InvalidGeometryError("repeated consecutive vertices");
    }
  }

  // Shoelace area and area-weighted centroid.
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point2& p = edge_start(i);
    const Point2& q = edge_end(i);
    const double w = p.cross(q);
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  area_ = 0.5 * a2;
  if (!(area_ > 0.0)) {
    throw InvalidGeometryError("polygon area must be positive (CCW loop required)");
  }
  centroid_ = {cx / (3.0 * a2), cy / (3.0 * a2)};

  // Simplicity: non-adjacent edges must not meet. Adjacent edges share a
  // vertex and may even be collinear (flat vertices are allowed).
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(edge_start(i), edge_end(i), edge_start(j), edge_end(j), dia)) {
        throw InvalidGeometryError("self-intersecting polygon boundary");
      }
    }
  }
}

Point2 Polygon::edge_normal(int i) const {
  const Point2 d = edge_end(i) - edge_start(i);
  const double len = d.norm();
  return {d.y / len, -d.x / len};
}

std::vector<int> Polygon::reflex_vertices() const {
  const int n = num_vertices();
  std::vector<int> out;
  const double tol = 1e-12 * diameter_ * diameter_;
  for (int i = 0; i < n; ++i) {
    const Point2& prev = verts_[static_cast<size_t>((i + n - 1) % n)];
    const Point2& cur = verts_[static_cast<size_t>(i)];
    const Point2& next = verts_[static_cast<size_t>((i + 1) % n)];
    if ((cur - prev).cross(next - cur) < -tol) out.push_back(i);
  }
  return out;
}

bool Polygon::convex() const { return reflex_vertices().empty(); }

bool Polygon::contains(const Point2& p) const {
  // Crossing number; points within 1e-12*diameter of the boundary count as inside.
  const int n = num_vertices();
  for (int i = 0; i < n; ++i) {
    const Point2 a = edge_start(i), b = edge_end(i);
    const double cr = (b - a).cross(p - a);
    if (std::abs(cr) <= 1e-12 * diameter_ * (b - a).norm() && on_segment(a, b, p, diameter_)) {
      return true;
    }
  }
  bool inside = false;
  for (int i = 0; i < n; ++i) {
    const Point2 a = edge_start(i), b = edge_end(i);
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

PolygonMeasures polygon_measures(const Polygon& p) {
  return {p.area(), p.centroid(), p.diameter()};
}

EdgeLineClasses distinct_edge_lines(const Polygon& p, double theta0) {
  if (theta0 < 0.0) throw InvalidGeometryError("theta0 must be non-negative");
  const int n = p.num_vertices();
  const double dist_tol = theta0 * p.diameter();
  const double cos_tol = std::cos(theta0);

  std::vector<LineEquation> lines(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) lines[static_cast<size_t>(i)] = p.edge_line(i);

  // Union-find over edges; two edges merge when their lines are parallel up
  // to theta0 and each edge's endpoints lie on the other line up to
  // theta0 * h_E. The endpoint test keeps parallel-but-offset lines apart.
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  };
  auto unite = [&](int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); };

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const LineEquation &li = lines[static_cast<size_t>(i)], &lj = lines[static_cast<size_t>(j)];
      const double cosang = std::abs(li.a * lj.a + li.b * lj.b);
      if (cosang < cos_tol) continue;
      const double d = std::max({lj.distance_to(p.edge_start(i)), lj.distance_to(p.edge_end(i)),
                                 li.distance_to(p.edge_start(j)), li.distance_to(p.edge_end(j))});
      if (d <= dist_tol) unite(i, j);
    }
  }

  EdgeLineClasses out;
  out.edge_class.assign(static_cast<size_t>(n), -1);
  std::vector<int> root_to_class(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_to_class[static_cast<size_t>(r)] < 0) {
      root_to_class[static_cast<size_t>(r)] = static_cast<int>(out.lines.size());
      out.lines.push_back(lines[static_cast<size_t>(r)]);
    }
    out.edge_class[static_cast<size_t>(i)] = root_to_class[static_cast<size_t>(r)];
  }
  out.eta = static_cast<int>(out.lines.size());
  return out;
}

std::optional<ReentrantWeight> reentrant_weight(const Polygon& p) {
  const std::vector<int> reflex = p.reflex_vertices();
  if (reflex.empty()) return std::nullopt;

  const int n = p.num_vertices();
  std::vector<int> edges;
  for (int v : reflex) {
    const int e_in = (v + n - 1) % n;  // edge ending at v
    const int e_out = v;               // edge starting at v
    for (int e : {e_in, e_out}) {
      if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
    }
  }
  if (edges.size() != 2) {
    throw UnsupportedShapeError("polygon has more than two re-entrant edges; use the lazy strategy");
  }

  const LineEquation l1 = p.edge_line(edges[0]);
  const LineEquation l2 = p.edge_line(edges[1]);
  const Point2 c = p.centroid();
  const double h = p.diameter();

  // Each normalized line in the scaled frame u = (x - x_E)/h_E reads
  // a*u + b*v + l(x_E)/h_E, which is O(1) on the element; the product is the
  // quadratic weight in graded order {1, u, v, u^2, uv, v^2}.
  const double c1 = l1.eval(c) / h, c2 = l2.eval(c) / h;
  ReentrantWeight w;
  w.edge_i = edges[0];
  w.edge_j = edges[1];
  w.coeffs = {c1 * c2,
              c1 * l2.a + c2 * l1.a,
              c1 * l2.b + c2 * l1.b,
              l1.a * l2.a,
              l1.a * l2.b + l1.b * l2.a,
              l1.b * l2.b};
  return w;
}

}  // namespace svem
