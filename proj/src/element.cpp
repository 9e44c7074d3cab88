#include "svem/element.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "svem/quadrature.hpp"

namespace svem {

std::string SerendipityStrategy::name() const {
  switch (kind) {
    case StrategyKind::Original:
      return "original";
    case StrategyKind::Lazy:
      return "lazy";
    case StrategyKind::Stingy:
      return "stingy";
    case StrategyKind::FixedInternalDegree:
      return "fixed(" + std::to_string(fixed_degree) + ")";
  }
  return "?";
}

DofLayout build_dof_layout(const Polygon& p, int k, const SerendipityStrategy& strat) {
  if (k < 1) throw Error("polynomial degree k must be >= 1");
  DofLayout layout;
  layout.k = k;
  layout.n_vertices = p.num_vertices();
  layout.eta = distinct_edge_lines(p, strat.theta0).eta;

  int kint = -1;
  switch (strat.kind) {
    case StrategyKind::Original:
      kint = k - 2;
      break;
    case StrategyKind::Lazy:
      kint = k - 3;
      break;
    case StrategyKind::Stingy:
      kint = k - layout.eta;
      break;
    case StrategyKind::FixedInternalDegree:
      kint = strat.fixed_degree;
      break;
  }
  layout.internal_degree = std::max(kint, -1);

  // The stingy count k - eta is only safe on non-convex elements when the
  // moments carry the re-entrant weight (two re-entrant edges required).
  if (strat.kind == StrategyKind::Stingy && layout.internal_degree >= 0 && !p.convex()) {
    const auto w2 = reentrant_weight(p);
    layout.weighted = true;
    layout.w2 = w2->coeffs;
  }
  return layout;
}

std::vector<Point2> edge_interior_points(const Polygon& p, int edge, int k) {
  std::vector<Point2> pts;
  if (k < 2) return pts;
  const Rule1D gl = gauss_lobatto(k + 1);
  const Point2 a = p.edge_start(edge), b = p.edge_end(edge);
  pts.reserve(static_cast<size_t>(k - 1));
  for (int s = 1; s < k; ++s) {
    const double t = 0.5 * (gl.nodes[static_cast<size_t>(s)] + 1.0);
    pts.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  return pts;
}

std::vector<Point2> boundary_dof_points(const Polygon& p, int k) {
  std::vector<Point2> pts = p.vertices();
  for (int e = 0; e < p.num_vertices(); ++e) {
    const auto ep = edge_interior_points(p, e, k);
    pts.insert(pts.end(), ep.begin(), ep.end());
  }
  return pts;
}

namespace {

// Expansion of the internal moment test functions in the degree-k basis:
// row beta of W holds the coefficients of m_beta * w (w == 1 or the w2
// quadratic, both exact since scaled monomials multiply by exponent
// addition). Internal dofs then read delta_beta = W * Mom.
Eigen::MatrixXd moment_test_expansion(const DofLayout& layout) {
  const int n_int = layout.n_internal();
  const int nk = poly_dim(layout.k, 2);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n_int, nk);
  if (n_int == 0) return W;
  const auto& exps = monomial_exponents(layout.internal_degree);
  if (!layout.weighted) {
    for (int b = 0; b < n_int; ++b) W(b, b) = 1.0;  // graded order is nested
    return W;
  }
  static const int wexp[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (int b = 0; b < n_int; ++b) {
    for (int g = 0; g < 6; ++g) {
      const int ax = exps[static_cast<size_t>(b)].ax + wexp[g][0];
      const int ay = exps[static_cast<size_t>(b)].ay + wexp[g][1];
      W(b, monomial_position(ax, ay)) += layout.w2[static_cast<size_t>(g)];
    }
  }
  return W;
}

Eigen::MatrixXd column_scaled(const Eigen::MatrixXd& DS, Eigen::VectorXd* scale_out = nullptr) {
  Eigen::VectorXd scale = DS.cwiseAbs().colwise().maxCoeff();
  for (Eigen::Index c = 0; c < scale.size(); ++c) {
    if (scale(c) <= 0.0) scale(c) = 1.0;
  }
  if (scale_out) *scale_out = scale;
  return DS * scale.cwiseInverse().asDiagonal();
}

}  // namespace

Eigen::MatrixXd build_D(const Polygon& p, int k, const DofLayout& layout) {
  const ScaledMonomialBasis basis = ScaledMonomialBasis::for_polygon(p, k);
  const int nk = basis.size();
  Eigen::MatrixXd DS(layout.S(), nk);

  DS.topRows(layout.n_boundary()) = basis.eval(boundary_dof_points(p, k));

  const int n_int = layout.n_internal();
  if (n_int > 0) {
    const Eigen::MatrixXd H = mass_matrix_H(basis, p);
    const Eigen::MatrixXd W = moment_test_expansion(layout);
    DS.bottomRows(n_int) = (W * H) / p.area();
  }
  return DS;
}

PropertySCheck check_property_S(const Eigen::MatrixXd& DS) {
  if (DS.rows() < DS.cols()) return {false, 0.0};
  const Eigen::MatrixXd scaled = column_scaled(DS);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const double min_sv = svd.singularValues()(svd.singularValues().size() - 1);
  return {min_sv > 1e-10, min_sv};
}

Eigen::MatrixXd build_PiS(const Eigen::MatrixXd& DS) {
  Eigen::VectorXd scale;
  const Eigen::MatrixXd scaled = column_scaled(DS, &scale);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double min_sv = DS.rows() < DS.cols() ? 0.0 : sv(sv.size() - 1);
  if (!(min_sv > 1e-10)) {
    throw PropertySViolationError("dof set violates property S (min singular value " +
                                      std::to_string(min_sv) + ")",
                                  min_sv);
  }
  const Eigen::MatrixXd pinv =
      svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  return scale.cwiseInverse().asDiagonal() * pinv;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> extend_and_project(const Polygon& p, int k,
                                                               const DofLayout& layout,
                                                               const Eigen::MatrixXd& DS,
                                                               const Eigen::MatrixXd& PiS) {
  (void)DS;
  const ScaledMonomialBasis basis = ScaledMonomialBasis::for_polygon(p, k);
  const Eigen::MatrixXd H = mass_matrix_H(basis, p);
  const int S = layout.S();
  const int n_int = layout.n_internal();

  // Scaled moments of PiS phi for every reduced dof-basis function.
  Eigen::MatrixXd mom = (H * PiS) / p.area();

  if (n_int > 0) {
    Eigen::MatrixXd dof_rows = Eigen::MatrixXd::Zero(n_int, S);
    dof_rows.rightCols(n_int).setIdentity();  // internal dofs close the layout
    if (!layout.weighted) {
      // Moments up to the internal degree are the kept dofs themselves.
      mom.topRows(n_int) = dof_rows;
    } else {
      // Weighted dofs constrain W * Mom; correct the projector moments by
      // the minimum-norm update that restores them, leaving the
      // complementary components at their PiS values.
      const Eigen::MatrixXd W = moment_test_expansion(layout);
      const Eigen::MatrixXd WWt = W * W.transpose();
      const Eigen::MatrixXd corr = W.transpose() * WWt.ldlt().solve(dof_rows - W * mom);
      mom += corr;
    }
  }

  const Eigen::MatrixXd Pi0k = H.ldlt().solve(p.area() * mom);
  return {mom, Pi0k};
}

namespace {

// Lagrange basis values over the given nodes at the evaluation points
// (rows: points, cols: nodes), via barycentric weights.
Eigen::MatrixXd lagrange_values(const std::vector<double>& nodes, const std::vector<double>& pts) {
  const size_t n = nodes.size();
  std::vector<double> bw(n, 1.0);
  for (size_t j = 0; j < n; ++j) {
    for (size_t l = 0; l < n; ++l) {
      if (l != j) bw[j] /= (nodes[j] - nodes[l]);
    }
  }
  Eigen::MatrixXd L(pts.size(), n);
  for (size_t q = 0; q < pts.size(); ++q) {
    long exact = -1;
    for (size_t j = 0; j < n; ++j) {
      if (pts[q] == nodes[j]) exact = static_cast<long>(j);
    }
    if (exact >= 0) {
      for (size_t j = 0; j < n; ++j) L(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)) = 0.0;
      L(static_cast<Eigen::Index>(q), exact) = 1.0;
      continue;
    }
    double denom = 0.0;
    for (size_t j = 0; j < n; ++j) denom += bw[j] / (pts[q] - nodes[j]);
    for (size_t j = 0; j < n; ++j) {
      L(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)) =
          (bw[j] / (pts[q] - nodes[j])) / denom;
    }
  }
  return L;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_Pi0grad(const Polygon& p, int k,
                                                          const DofLayout& layout,
                                                          const Eigen::MatrixXd& MomFull) {
  const ScaledMonomialBasis basis = ScaledMonomialBasis::for_polygon(p, k);
  const ScaledMonomialBasis basis_km1{basis.center, basis.h, k - 1};
  const int nkm1 = poly_dim(k - 1, 2);
  const int S = layout.S();
  const int n = p.num_vertices();
  const auto& exps = monomial_exponents(k - 1);

  Eigen::MatrixXd Bx = Eigen::MatrixXd::Zero(nkm1, S);
  Eigen::MatrixXd By = Eigen::MatrixXd::Zero(nkm1, S);

  // Volume part of the integration by parts: -int_E phi d(m_beta), read off
  // the full moment map (degrees <= k-2 are always available there).
  for (int b = 0; b < nkm1; ++b) {
    const MultiIndex mi = exps[static_cast<size_t>(b)];
    if (mi.ax > 0) {
      Bx.row(b) -= (mi.ax / basis.h) * p.area() * MomFull.row(monomial_position(mi.ax - 1, mi.ay));
    }
    if (mi.ay > 0) {
      By.row(b) -= (mi.ay / basis.h) * p.area() * MomFull.row(monomial_position(mi.ax, mi.ay - 1));
    }
  }

  // Boundary part: the trace on each edge is the degree-k Lagrange
  // interpolant through the vertex and Gauss-Lobatto dof values.
  const Rule1D gl = gauss_lobatto(k + 1);
  const Rule1D gq = gauss(k + 1);
  const Eigen::MatrixXd L = lagrange_values(gl.nodes, gq.nodes);

  for (int e = 0; e < n; ++e) {
    const Point2 a = p.edge_start(e), b = p.edge_end(e);
    const double len = distance(a, b);
    const Point2 nrm = p.edge_normal(e);

    std::vector<int> trace_dofs(static_cast<size_t>(k + 1));
    trace_dofs[0] = e;
    for (int s = 1; s < k; ++s) trace_dofs[static_cast<size_t>(s)] = n + e * (k - 1) + (s - 1);
    trace_dofs[static_cast<size_t>(k)] = (e + 1) % n;

    std::vector<Point2> qpts(static_cast<size_t>(gq.size()));
    for (int q = 0; q < gq.size(); ++q) {
      const double t = 0.5 * (gq.nodes[static_cast<size_t>(q)] + 1.0);
      qpts[static_cast<size_t>(q)] = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    }
    const Eigen::MatrixXd M = basis_km1.eval(qpts);  // q x nkm1

    for (int q = 0; q < gq.size(); ++q) {
      const double w = 0.5 * len * gq.weights[static_cast<size_t>(q)];
      for (int j = 0; j <= k; ++j) {
        const double tr = L(q, j);
        const int dof = trace_dofs[static_cast<size_t>(j)];
        Bx.col(dof) += (w * nrm.x * tr) * M.row(q).transpose();
        By.col(dof) += (w * nrm.y * tr) * M.row(q).transpose();
      }
    }
  }

  const Eigen::MatrixXd Hkm1 = mass_matrix_H(basis_km1, p);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Hkm1);
  return {ldlt.solve(Bx), ldlt.solve(By)};
}

ElementOperators build_element_operators(const Polygon& p, int k,
                                         const SerendipityStrategy& strat) {
  ElementOperators ops;
  ops.layout = build_dof_layout(p, k, strat);
  ops.basis = ScaledMonomialBasis::for_polygon(p, k);
  ops.DS = build_D(p, k, ops.layout);
  const PropertySCheck chk = check_property_S(ops.DS);
  ops.min_sv = chk.min_sv;
  ops.PiS = build_PiS(ops.DS);
  auto [mom, pi0k] = extend_and_project(p, k, ops.layout, ops.DS, ops.PiS);
  ops.MomFull = std::move(mom);
  ops.Pi0k = std::move(pi0k);
  auto [gx, gy] = build_Pi0grad(p, k, ops.layout, ops.MomFull);
  ops.Pi0grad_x = std::move(gx);
  ops.Pi0grad_y = std::move(gy);
  return ops;
}

}  // namespace svem
