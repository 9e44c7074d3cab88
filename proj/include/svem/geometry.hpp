#ifndef SVEM_GEOMETRY_HPP
#define SVEM_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace svem {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidGeometryError : Error {
  using Error::Error;
};

/// Raised when a non-convex element needs weighted internal moments but has
/// more than two re-entrant edges. Callers should fall back to the lazy
/// strategy or reject the element.
struct UnsupportedShapeError : Error {
  using Error::Error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Point2& o) const { return x * o.x + y * o.y; }
  /// z-component of the 2D cross product.
  double cross(const Point2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Normalized line a*x + b*y + c = 0 with a^2 + b^2 = 1.
/// For a line built from a CCW polygon edge, (a, b) is the outward normal of
/// the first incident edge.
struct LineEquation {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  /// Line through the directed edge p -> q of a CCW polygon; normal points
  /// outward (to the right of the direction of travel).
  static LineEquation through_edge(const Point2& p, const Point2& q);

  double eval(const Point2& pt) const { return a * pt.x + b * pt.y + c; }
  /// Unsigned point-line distance (|eval| since the normal is unit).
  double distance_to(const Point2& pt) const { return std::abs(eval(pt)); }
};

/// Simple polygon with CCW vertex loop. Area, centroid and diameter are
/// computed on construction. Flat (angle == pi) vertices are allowed, so two
/// consecutive edges may be collinear.
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> vertices);

  int num_vertices() const { return static_cast<int>(verts_.size()); }
  const Point2& vertex(int i) const { return verts_[static_cast<size_t>(i)]; }
  const std::vector<Point2>& vertices() const { return verts_; }

  double area() const { return area_; }
  const Point2& centroid() const { return centroid_; }
  double diameter() const { return diameter_; }

  /// Edge i runs vertex(i) -> vertex((i+1) % n).
  Point2 edge_start(int i) const { return verts_[static_cast<size_t>(i)]; }
  Point2 edge_end(int i) const { return verts_[(static_cast<size_t>(i) + 1) % verts_.size()]; }
  double edge_length(int i) const { return distance(edge_start(i), edge_end(i)); }
  LineEquation edge_line(int i) const { return LineEquation::through_edge(edge_start(i), edge_end(i)); }

  /// Outward unit normal of edge i.
  Point2 edge_normal(int i) const;

  /// True when no vertex is reflex (flat vertices do not spoil convexity).
  bool convex() const;

  /// Indices of vertices with interior angle > pi.
  std::vector<int> reflex_vertices() const;

  bool contains(const Point2& p) const;

 private:
  std::vector<Point2> verts_;
  double area_ = 0.0;
  Point2 centroid_;
  double diameter_ = 0.0;
};

/// area / centroid / diameter of a polygon as one tuple.
struct PolygonMeasures {
  double area;
  Point2 centroid;
  double diameter;
};
PolygonMeasures polygon_measures(const Polygon& p);

/// Classification of the edge lines of a polygon into collinearity classes.
/// Two lines are merged when both the angle between them is <= theta0 and all
/// four edge endpoints lie within theta0 * h_E of the other line. eta is the
/// number of classes (the minimum number of straight lines covering the
/// boundary, up to the tolerance).
struct EdgeLineClasses {
  int eta = 0;
  std::vector<LineEquation> lines;   // one representative per class
  std::vector<int> edge_class;      // per edge, index into lines
};
EdgeLineClasses distinct_edge_lines(const Polygon& p, double theta0);

/// Quadratic weight for non-convex elements: the product of the two
/// re-entrant edge lines, expressed in the scaled coordinates
/// u = (x - x_E)/h_E, v = (y - y_E)/h_E. Coefficient order is the graded
/// monomial order {1, u, v, u^2, u*v, v^2}.
struct ReentrantWeight {
  std::array<double, 6> coeffs{};
  int edge_i = -1;  // the two re-entrant edges
  int edge_j = -1;
};

/// nullopt for convex polygons; throws UnsupportedShapeError when more than
/// two edges are incident to reflex vertices.
std::optional<ReentrantWeight> reentrant_weight(const Polygon& p);

}  // namespace svem

#endif
