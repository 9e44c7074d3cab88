#ifndef SVEM_POLYNOMIALS_HPP
#define SVEM_POLYNOMIALS_HPP

#include <Eigen/Dense>
#include <vector>

#include "svem/geometry.hpp"
#include "svem/quadrature.hpp"

namespace svem {

/// Bivariate monomial exponent pair. The global enumeration is graded
/// lexicographic: (0,0); (1,0),(0,1); (2,0),(1,1),(0,2); ...
struct MultiIndex {
  int ax = 0;
  int ay = 0;
  int degree() const { return ax + ay; }
};

/// dim P_k in d in {1,2} variables; poly_dim(-1, d) == 0.
int poly_dim(int k, int d);

/// Exponents of all monomials of total degree <= k in graded-lex order.
const std::vector<MultiIndex>& monomial_exponents(int k);

/// Position of x^ax y^ay in the graded-lex enumeration.
int monomial_position(int ax, int ay);

/// Scaled monomials m_alpha(x) = ((x - center)/h)^alpha on an element; every
/// member is bounded by 1 in magnitude on the element.
struct ScaledMonomialBasis {
  Point2 center;
  double h = 1.0;
  int degree = 0;

  static ScaledMonomialBasis for_polygon(const Polygon& p, int k) {
    return {p.centroid(), p.diameter(), k};
  }

  int size() const { return poly_dim(degree, 2); }

  double eval_one(int member, const Point2& pt) const;

  /// Rows: points, columns: members.
  Eigen::MatrixXd eval(const std::vector<Point2>& pts) const;
  Eigen::MatrixXd eval(const std::vector<QuadraturePoint>& pts) const;

  /// d/dx and d/dy of every member at every point; entries scale as 1/h.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> eval_grad(const std::vector<Point2>& pts) const;
};

/// Coefficients of a polynomial of total degree <= degree in the graded-lex
/// scaled monomial basis of some element.
struct PolyCoeffs {
  int degree = 0;
  Eigen::VectorXd c;

  static PolyCoeffs zero(int degree) {
    return {degree, Eigen::VectorXd::Zero(poly_dim(degree, 2))};
  }
};

double eval_poly(const PolyCoeffs& p, const ScaledMonomialBasis& basis, const Point2& pt);

/// Derivative in the same scaled basis (degree drops by one); the factor 1/h
/// from the chain rule is included.
PolyCoeffs derivative_x(const PolyCoeffs& p, double h);
PolyCoeffs derivative_y(const PolyCoeffs& p, double h);

/// H_{ab} = int_E m_a m_b [w] dE for all members of B. Positive definite when
/// the weight is omitted or single-signed. The quadrature exactness is
/// 2*degree plus the weight degree unless overridden.
Eigen::MatrixXd mass_matrix_H(const ScaledMonomialBasis& basis, const Polygon& p,
                              const PolyCoeffs* weight = nullptr, int exactness_override = -1);

}  // namespace svem

#endif
