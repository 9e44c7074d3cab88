#ifndef SVEM_ELEMENT_HPP
#define SVEM_ELEMENT_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svem/geometry.hpp"
#include "svem/polynomials.hpp"

namespace svem {

struct PropertySViolationError : Error {
  PropertySViolationError(const std::string& what, double min_sv_)
      : Error(what), min_sv(min_sv_) {}
  double min_sv = 0.0;
};

/// How many internal moments to keep on each element.
///  - Original: moments up to k-2 (the classical nodal element counts)
///  - Lazy:     moments up to k-3
///  - Stingy:   moments up to k - eta_E(theta0); on non-convex elements with
///              two re-entrant edges the moments are weighted by w2
///  - FixedInternalDegree: moments up to an explicit degree j
enum class StrategyKind { Original, Lazy, Stingy, FixedInternalDegree };

struct SerendipityStrategy {
  StrategyKind kind = StrategyKind::Stingy;
  double theta0 = 1e-8;  // collinearity tolerance for Stingy
  int fixed_degree = -1;

  static SerendipityStrategy original() { return {StrategyKind::Original, 1e-8, -1}; }
  static SerendipityStrategy lazy() { return {StrategyKind::Lazy, 1e-8, -1}; }
  static SerendipityStrategy stingy(double theta0 = 1e-8) {
    return {StrategyKind::Stingy, theta0, -1};
  }
  static SerendipityStrategy fixed(int j) { return {StrategyKind::FixedInternalDegree, 1e-8, j}; }

  std::string name() const;
};

/// Per-element dof enumeration: one value per vertex, k-1 Gauss-Lobatto
/// interior point values per edge, then scaled internal moments
/// (1/|E|) int_E phi m_alpha [w2] dE for |alpha| <= internal_degree.
/// Boundary dofs always precede internal ones.
struct DofLayout {
  int k = 1;
  int n_vertices = 0;
  int eta = 0;               // line count of the element boundary
  int internal_degree = -1;  // -1 means no internal moments
  bool weighted = false;     // internal moments carry the w2 factor
  std::array<double, 6> w2{};  // valid when weighted (scaled-coordinate quadratic)

  int n_boundary() const { return k * n_vertices; }
  int n_internal() const { return poly_dim(internal_degree, 2); }
  int S() const { return n_boundary() + n_internal(); }
  int N_E() const { return k * n_vertices + poly_dim(k, 2); }
};

DofLayout build_dof_layout(const Polygon& p, int k, const SerendipityStrategy& strat);

/// The k-1 interior Gauss-Lobatto points of edge i, in traversal order.
std::vector<Point2> edge_interior_points(const Polygon& p, int edge, int k);

/// All boundary dof positions (vertices then per-edge points), in dof order.
std::vector<Point2> boundary_dof_points(const Polygon& p, int k);

/// D: S x pi_{k,2} matrix of the retained dofs applied to the scaled
/// monomials, DS[i][alpha] = delta_i(m_alpha).
Eigen::MatrixXd build_D(const Polygon& p, int k, const DofLayout& layout);

/// Rank check of the chosen dofs on P_k: the smallest singular value of the
/// column-scaled D matrix must exceed 1e-10.
struct PropertySCheck {
  bool ok = false;
  double min_sv = 0.0;
};
PropertySCheck check_property_S(const Eigen::MatrixXd& DS);

/// Least-squares projector onto P_k in dof space: the unique solution of
/// (D(PiS phi - phi), D q) = 0 for all q in P_k, computed through a
/// rank-revealing factorization. Throws PropertySViolationError when the
/// rank check fails.
Eigen::MatrixXd build_PiS(const Eigen::MatrixXd& DS);

/// Moment extension: maps the S retained dofs to all scaled moments of
/// degree <= k of the extended function (kept moments read from the dofs,
/// missing ones taken from PiS phi), plus the L2(E) projector onto P_k.
/// Returns (MomFull, Pi0k), both pi_{k,2} x S.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> extend_and_project(const Polygon& p, int k,
                                                               const DofLayout& layout,
                                                               const Eigen::MatrixXd& DS,
                                                               const Eigen::MatrixXd& PiS);

/// L2 projections of the two gradient components onto P_{k-1}, computed by
/// integration by parts: the volume term from MomFull, the boundary term
/// from the piecewise degree-k edge traces. Returns (x, y) matrices of size
/// pi_{k-1,2} x S.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_Pi0grad(const Polygon& p, int k,
                                                          const DofLayout& layout,
                                                          const Eigen::MatrixXd& MomFull);

/// Everything the assembly needs for one element.
struct ElementOperators {
  DofLayout layout;
  ScaledMonomialBasis basis;
  Eigen::MatrixXd DS;        // S x pi_k
  Eigen::MatrixXd PiS;       // pi_k x S
  Eigen::MatrixXd MomFull;   // pi_k x S
  Eigen::MatrixXd Pi0k;      // pi_k x S
  Eigen::MatrixXd Pi0grad_x; // pi_{k-1} x S
  Eigen::MatrixXd Pi0grad_y; // pi_{k-1} x S
  double min_sv = 0.0;
};

ElementOperators build_element_operators(const Polygon& p, int k,
                                         const SerendipityStrategy& strat);

}  // namespace svem

#endif
