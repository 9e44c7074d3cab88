#include "svem/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace svem {

namespace {

// Legendre P_m and its derivative at x by the three-term recurrence.
std::pair<double, double> legendre(int m, double x) {
  double p0 = 1.0, p1 = x;
  if (m == 0) return {1.0, 0.0};
  for (int j = 2; j <= m; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  const double dp = m * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

// Force exact +/- symmetry of a computed rule.
void symmetrize(Rule1D& r) {
  const int n = r.size();
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (r.nodes[static_cast<size_t>(j)] - r.nodes[static_cast<size_t>(i)]);
    const double w = 0.5 * (r.weights[static_cast<size_t>(i)] + r.weights[static_cast<size_t>(j)]);
    r.nodes[static_cast<size_t>(i)] = -x;
    r.nodes[static_cast<size_t>(j)] = x;
    r.weights[static_cast<size_t>(i)] = w;
    r.weights[static_cast<size_t>(j)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<size_t>(n / 2)] = 0.0;
}

}  // namespace

Rule1D gauss(int npts) {
  if (npts < 1) throw InvalidGeometryError("gauss rule needs at least 1 point");
  Rule1D r;
  r.nodes.resize(static_cast<size_t>(npts));
  r.weights.resize(static_cast<size_t>(npts));
  for (int i = 0; i < npts; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (npts + 0.5));  // ascending-order guess
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(npts, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const auto [p, dp] = legendre(npts, x);
    (void)p;
    r.nodes[static_cast<size_t>(i)] = x;
    r.weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::sort(r.nodes.begin(), r.nodes.end());
  symmetrize(r);
  // Weights must be recomputed after sorting/symmetrizing.
  for (int i = 0; i < npts; ++i) {
    const auto [p, dp] = legendre(npts, r.nodes[static_cast<size_t>(i)]);
    (void)p;
    const double x = r.nodes[static_cast<size_t>(i)];
    r.weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (npts == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = 2.0;
  }
  symmetrize(r);
  return r;
}

Rule1D gauss_lobatto(int npts) {
  if (npts < 2) throw InvalidGeometryError("gauss-lobatto rule needs at least 2 points");
  const int m = npts - 1;  // interior nodes are the roots of P_m'
  Rule1D r;
  r.nodes.resize(static_cast<size_t>(npts));
  r.weights.resize(static_cast<size_t>(npts));
  r.nodes[0] = -1.0;
  r.nodes[static_cast<size_t>(npts - 1)] = 1.0;
  for (int i = 1; i < npts - 1; ++i) {
    // Chebyshev-Lobatto starting guess, refined by Newton on P_m'.
    double x = std::cos(M_PI * (npts - 1 - i) / m);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(m, x);
      const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[static_cast<size_t>(i)] = x;
  }
  std::sort(r.nodes.begin(), r.nodes.end());
  for (int i = 0; i < npts; ++i) {
    const auto [p, dp] = legendre(m, r.nodes[static_cast<size_t>(i)]);
    (void)dp;
    r.weights[static_cast<size_t>(i)] = 2.0 / (m * (m + 1.0) * p * p);
  }
  symmetrize(r);
  return r;
}

std::vector<QuadraturePoint> triangle_quadrature(const Point2& a, const Point2& b, const Point2& c,
                                                 int exactness) {
  if (exactness < 0) exactness = 0;
  // Collapsed-square rule: x = u, y = v (1 - u) on the unit triangle, with
  // the Jacobian (1 - u) folded into the integrand, so the u-rule needs one
  // extra degree. All weights stay positive.
  const int mu = (exactness + 3) / 2;
  const int mv = (exactness + 2) / 2;
  const Rule1D ru = gauss(mu);
  const Rule1D rv = gauss(std::max(mv, 1));

  const double jac = (b - a).cross(c - a);  // 2 * signed area
  std::vector<QuadraturePoint> pts;
  pts.reserve(static_cast<size_t>(ru.size() * rv.size()));
  for (int i = 0; i < ru.size(); ++i) {
    const double u = 0.5 * (ru.nodes[static_cast<size_t>(i)] + 1.0);
    const double wu = 0.5 * ru.weights[static_cast<size_t>(i)];
    for (int j = 0; j < rv.size(); ++j) {
      const double v = 0.5 * (rv.nodes[static_cast<size_t>(j)] + 1.0);
      const double wv = 0.5 * rv.weights[static_cast<size_t>(j)];
      const double x = u;
      const double y = v * (1.0 - u);
      QuadraturePoint q;
      q.p = {a.x + x * (b.x - a.x) + y * (c.x - a.x), a.y + x * (b.y - a.y) + y * (c.y - a.y)};
      q.w = wu * wv * (1.0 - u) * std::abs(jac);
      pts.push_back(q);
    }
  }
  return pts;
}

namespace {

// Strictly-inside test via barycentric signs; boundary points do not count.
bool strictly_inside(const Point2& p, const Point2& a, const Point2& b, const Point2& c,
                     double tol) {
  const double d1 = (b - a).cross(p - a);
  const double d2 = (c - b).cross(p - b);
  const double d3 = (a - c).cross(p - c);
  return d1 > tol && d2 > tol && d3 > tol;
}

}  // namespace

std::vector<std::array<Point2, 3>> triangulate(const Polygon& p) {
  const int n = p.num_vertices();
  const double scale = p.diameter();
  const double area_tol = 1e-14 * scale * scale;
  std::vector<std::array<Point2, 3>> tris;

  if (p.convex()) {
    for (int i = 1; i + 1 < n; ++i) {
      const Point2 a = p.vertex(0), b = p.vertex(i), c = p.vertex(i + 1);
      if (0.5 * (b - a).cross(c - a) > area_tol) tris.push_back({a, b, c});
    }
    return tris;
  }

  std::vector<Point2> ring = p.vertices();
  while (ring.size() > 3) {
    const int m = static_cast<int>(ring.size());
    bool clipped = false;
    for (int i = 0; i < m; ++i) {
      const Point2& prev = ring[static_cast<size_t>((i + m - 1) % m)];
      const Point2& cur = ring[static_cast<size_t>(i)];
      const Point2& next = ring[static_cast<size_t>((i + 1) % m)];
      const double cr = (cur - prev).cross(next - cur);
      if (cr < -area_tol) continue;  // reflex corner, not an ear
      if (cr <= area_tol) {
        // Flat corner: dropping it leaves the region unchanged.
        ring.erase(ring.begin() + i);
        clipped = true;
        break;
      }
      bool blocked = false;
      for (int j = 0; j < m && !blocked; ++j) {
        if (j == i || j == (i + m - 1) % m || j == (i + 1) % m) continue;
        blocked = strictly_inside(ring[static_cast<size_t>(j)], prev, cur, next, area_tol);
      }
      if (blocked) continue;
      tris.push_back({prev, cur, next});
      ring.erase(ring.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) throw InvalidGeometryError("polygon triangulation failed");
  }
  const double cr = 0.5 * (ring[1] - ring[0]).cross(ring[2] - ring[0]);
  if (cr > area_tol) tris.push_back({ring[0], ring[1], ring[2]});
  return tris;
}

std::vector<QuadraturePoint> polygon_quadrature(const Polygon& p, int exactness) {
  if (exactness < 0) throw InvalidGeometryError("quadrature exactness must be >= 0");
  std::vector<QuadraturePoint> pts;
  for (const auto& t : triangulate(p)) {
    const auto tp = triangle_quadrature(t[0], t[1], t[2], exactness);
    pts.insert(pts.end(), tp.begin(), tp.end());
  }
  return pts;
}

}  // namespace svem
