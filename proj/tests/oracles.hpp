// Test-only oracles and fixture shapes. Everything here deliberately avoids
// the code paths it is used to check: polygon integrals go through the
// divergence theorem on the boundary instead of triangulation, projector
// references go through dense normal equations instead of the SVD route.
#ifndef SVEM_TESTS_ORACLES_HPP
#define SVEM_TESTS_ORACLES_HPP

#include <cmath>
#include <random>
#include <vector>

#include "svem/geometry.hpp"
#include "svem/mesh.hpp"
#include "svem/polynomials.hpp"
#include "svem/quadrature.hpp"

namespace oracles {

using svem::Point2;
using svem::Polygon;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double a, double b) {
    const double t = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return a + t * (b - a);
  }
  int uniform_int(int a, int b) {  // inclusive
    return a + static_cast<int>(eng() % static_cast<std::uint64_t>(b - a + 1));
  }
};

// ---- fixture shapes -------------------------------------------------------

inline Polygon unit_square() {
  return Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

inline Polygon right_triangle() {
  return Polygon({{0, 0}, {1, 0}, {0, 1}});
}

inline Polygon regular_polygon(int n, double radius, double angle0 = M_PI / 2) {
  std::vector<Point2> v;
  for (int i = 0; i < n; ++i) {
    const double a = angle0 + 2.0 * M_PI * i / n;
    v.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return Polygon(v);
}

inline Polygon l_hexagon() {
  return Polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
}

inline Polygon nonconvex_quad() {
  return Polygon({{0, 0}, {2, 0}, {0.6, 0.6}, {0, 2}});
}

// Two collinear edges along the bottom (flat vertex at (0.5, 0)).
inline Polygon collinear_quad() {
  return Polygon({{0, 0}, {0.5, 0}, {1, 0}, {0, 1}});
}

// Ten-edge star outline: each of the five chords of a regular pentagon
// carries two boundary edges, so only five distinct lines cover the boundary.
inline Polygon pentagram() {
  std::vector<Point2> outer;
  for (int i = 0; i < 5; ++i) {
    const double a = M_PI / 2 + 2.0 * M_PI * i / 5;
    outer.push_back({std::cos(a), std::sin(a)});
  }
  auto intersect = [](Point2 a, Point2 b, Point2 c, Point2 d) {
    const double den = (b - a).cross(d - c);
    const double t = (c - a).cross(d - c) / den;
    return Point2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  };
  std::vector<Point2> v;
  for (int i = 0; i < 5; ++i) {
    v.push_back(outer[static_cast<size_t>(i)]);
    // Inner vertex between tips i and i+1: chords (i, i+2) and (i+4, i+1).
    v.push_back(intersect(outer[static_cast<size_t>(i)], outer[static_cast<size_t>((i + 2) % 5)],
                          outer[static_cast<size_t>((i + 4) % 5)],
                          outer[static_cast<size_t>((i + 1) % 5)]));
  }
  return Polygon(v);
}

// ---- random shapes --------------------------------------------------------

inline Polygon random_triangle(Rng& rng) {
  for (;;) {
    std::vector<Point2> v = {{rng.uniform(0, 1), rng.uniform(0, 1)},
                             {rng.uniform(0, 1), rng.uniform(0, 1)},
                             {rng.uniform(0, 1), rng.uniform(0, 1)}};
    const double a2 = (v[1] - v[0]).cross(v[2] - v[0]);
    if (std::abs(a2) < 0.08) continue;
    if (a2 < 0) std::swap(v[1], v[2]);
    return Polygon(v);
  }
}

inline Polygon random_convex_quad(Rng& rng) {
  for (;;) {
    // Random radii on four spread-out directions; reject non-convex draws.
    std::vector<Point2> v;
    double ang = rng.uniform(0, 2 * M_PI);
    for (int i = 0; i < 4; ++i) {
      const double r = rng.uniform(0.5, 1.0);
      v.push_back({r * std::cos(ang), r * std::sin(ang)});
      ang += rng.uniform(0.6, 1.4) * (2 * M_PI / 4);
    }
    try {
      Polygon p(v);
      if (p.convex() && p.area() > 0.3) return p;
    } catch (const svem::Error&) {
    }
  }
}

// Trapezoid with two parallel vertical sides (never affine for generic draws).
inline Polygon random_trapezoid(Rng& rng) {
  const double x0 = rng.uniform(0, 0.3), x1 = rng.uniform(0.7, 1.0);
  const double ya = rng.uniform(0, 0.2), yc = rng.uniform(-0.2, 0.2);
  const double yb = ya + rng.uniform(0.5, 1.0), yd = yc + rng.uniform(0.6, 1.2);
  return Polygon({{x0, ya}, {x1, yc}, {x1, yd}, {x0, yb}});
}

// Quadrilateral with one reflex vertex (exactly two re-entrant edges).
inline Polygon random_reentrant_quad(Rng& rng) {
  for (;;) {
    const double a = rng.uniform(1.0, 2.0), b = rng.uniform(1.0, 2.0);
    const Point2 notch{rng.uniform(0.2, 0.45) * a, rng.uniform(0.2, 0.45) * b};
    try {
      Polygon p({{0, 0}, {a, 0}, notch, {0, b}});
      if (p.reflex_vertices().size() == 1) return p;
    } catch (const svem::Error&) {
    }
  }
}

// Cells of a small Lloyd-regularized Voronoi mesh, recentred on demand.
inline std::vector<Polygon> voronoi_cell_pool(std::uint64_t seed) {
  const svem::Mesh m = svem::gen_voronoi_lloyd(25, 20, seed);
  std::vector<Polygon> cells;
  for (int c = 0; c < m.num_cells(); ++c) cells.push_back(m.cell_polygon(c));
  return cells;
}

// ---- independent integration oracle ---------------------------------------

// Exact integral of x^a y^b over a polygon through the divergence theorem:
// int_P x^a y^b dA = sum_edges int_e x^(a+1)/(a+1) y^b n_x ds, with the edge
// integrals done by 1D Gauss of sufficient exactness.
inline double monomial_integral(const Polygon& p, int a, int b) {
  const int deg = a + 1 + b;
  const svem::Rule1D rule = svem::gauss(deg / 2 + 1);
  double total = 0.0;
  for (int e = 0; e < p.num_vertices(); ++e) {
    const Point2 s = p.edge_start(e), t = p.edge_end(e);
    const double len = svem::distance(s, t);
    const Point2 n = p.edge_normal(e);
    if (n.x == 0.0) continue;
    for (int q = 0; q < rule.size(); ++q) {
      const double u = 0.5 * (rule.nodes[static_cast<size_t>(q)] + 1.0);
      const double w = 0.5 * len * rule.weights[static_cast<size_t>(q)];
      const double x = s.x + u * (t.x - s.x);
      const double y = s.y + u * (t.y - s.y);
      total += w * n.x * std::pow(x, a + 1) / (a + 1) * std::pow(y, b);
    }
  }
  return total;
}

// Same route for scaled monomials with an optional scaled quadratic weight:
// used to cross-check mass matrices. Divergence theorem in scaled
// coordinates u = (x - c)/h: int m_alpha m_beta w dE = h^2 * contour term.
inline double scaled_monomial_integral(const Polygon& p, const svem::ScaledMonomialBasis& basis,
                                       int ax, int ay) {
  const int deg = ax + 1 + ay;
  const svem::Rule1D rule = svem::gauss(deg / 2 + 1);
  double total = 0.0;
  for (int e = 0; e < p.num_vertices(); ++e) {
    const Point2 s = p.edge_start(e), t = p.edge_end(e);
    const double len = svem::distance(s, t);
    const Point2 n = p.edge_normal(e);
    if (n.x == 0.0) continue;
    for (int q = 0; q < rule.size(); ++q) {
      const double uu = 0.5 * (rule.nodes[static_cast<size_t>(q)] + 1.0);
      const double w = 0.5 * len * rule.weights[static_cast<size_t>(q)];
      const double x = s.x + uu * (t.x - s.x);
      const double y = s.y + uu * (t.y - s.y);
      const double su = (x - basis.center.x) / basis.h;
      const double sv = (y - basis.center.y) / basis.h;
      // d/dx [h * su^(ax+1)/(ax+1) * sv^ay] = su^ax sv^ay
      total += w * n.x * basis.h * std::pow(su, ax + 1) / (ax + 1) * std::pow(sv, ay);
    }
  }
  return total;
}

}  // namespace oracles

#endif
