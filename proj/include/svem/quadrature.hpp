#ifndef SVEM_QUADRATURE_HPP
#define SVEM_QUADRATURE_HPP

#include <utility>
#include <vector>

#include "svem/geometry.hpp"

namespace svem {

/// Nodes and weights of a 1D rule on [-1, 1], nodes sorted ascending and
/// exactly symmetric about 0.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Legendre rule, exact for polynomials of degree <= 2*npts - 1.
Rule1D gauss(int npts);

/// Gauss-Lobatto rule (endpoints included), exact for degree <= 2*npts - 3.
Rule1D gauss_lobatto(int npts);

struct QuadraturePoint {
  Point2 p;
  double w = 0.0;
};

/// Positive-weight rule over a triangle, exact for bivariate polynomials of
/// total degree <= exactness.
std::vector<QuadraturePoint> triangle_quadrature(const Point2& a, const Point2& b,
                                                 const Point2& c, int exactness);

/// Triangulation of a simple polygon (ear clipping; fan for convex input).
/// Triangles are CCW and cover the polygon exactly.
std::vector<std::array<Point2, 3>> triangulate(const Polygon& p);

/// Rule over a simple polygon built by triangulating and applying the
/// triangle rule on each piece.
std::vector<QuadraturePoint> polygon_quadrature(const Polygon& p, int exactness);

}  // namespace svem

#endif
