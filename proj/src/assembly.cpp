#include "svem/assembly.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <tuple>

#include "svem/quadrature.hpp"

namespace svem {

GlobalDofMap::GlobalDofMap(const Mesh& mesh, int k, const std::vector<DofLayout>& layouts) {
  k_ = k;
  n_vertices_ = mesh.num_vertices();
  n_edge_dofs_ = (k - 1) * mesh.num_edges();

  edge_offset_.resize(static_cast<size_t>(mesh.num_edges()));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    edge_offset_[static_cast<size_t>(e)] = n_vertices_ + e * (k - 1);
  }

  int next = n_vertices_ + n_edge_dofs_;
  cell_internal_offset_.resize(static_cast<size_t>(mesh.num_cells()));
  cell_internal_count_.resize(static_cast<size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cell_internal_offset_[static_cast<size_t>(c)] = next;
    cell_internal_count_[static_cast<size_t>(c)] = layouts[static_cast<size_t>(c)].n_internal();
    next += layouts[static_cast<size_t>(c)].n_internal();
  }
  total_ = next;

  boundary_.assign(static_cast<size_t>(total_), false);
  for (int v = 0; v < n_vertices_; ++v) {
    boundary_[static_cast<size_t>(v)] = mesh.vertex_on_boundary(v);
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.edge_on_boundary(e)) continue;
    for (int s = 0; s < k - 1; ++s) {
      boundary_[static_cast<size_t>(edge_offset_[static_cast<size_t>(e)] + s)] = true;
    }
  }
}

std::vector<int> GlobalDofMap::cell_dofs(const Mesh& mesh, int c) const {
  const auto& loop = mesh.cells[static_cast<size_t>(c)];
  const auto& eids = mesh.cell_edge_ids(c);
  const int m = static_cast<int>(loop.size());

  std::vector<int> dofs;
  dofs.reserve(static_cast<size_t>(k_ * m + internal_count(c)));
  for (int v : loop) dofs.push_back(v);
  for (int i = 0; i < m; ++i) {
    const int a = loop[static_cast<size_t>(i)];
    const int b = loop[static_cast<size_t>((i + 1) % m)];
    const int off = edge_offset_[static_cast<size_t>(eids[static_cast<size_t>(i)])];
    // Slot order follows the canonical (low vertex -> high vertex) direction;
    // a backwards traversal sees the symmetric Gauss-Lobatto points reversed.
    if (a < b) {
      for (int s = 0; s < k_ - 1; ++s) dofs.push_back(off + s);
    } else {
      for (int s = k_ - 2; s >= 0; --s) dofs.push_back(off + s);
    }
  }
  for (int s = 0; s < internal_count(c); ++s) dofs.push_back(internal_offset(c) + s);
  return dofs;
}

Point2 GlobalDofMap::dof_position(const Mesh& mesh, int dof) const {
  if (dof < n_vertices_) return mesh.vertices[static_cast<size_t>(dof)];
  if (dof < n_vertices_ + n_edge_dofs_) {
    const int e = (dof - n_vertices_) / (k_ - 1);
    const int s = (dof - n_vertices_) % (k_ - 1);
    const Mesh::Edge& edge = mesh.edges()[static_cast<size_t>(e)];
    const Point2 a = mesh.vertices[static_cast<size_t>(edge.v0)];
    const Point2 b = mesh.vertices[static_cast<size_t>(edge.v1)];
    const Rule1D gl = gauss_lobatto(k_ + 1);
    const double t = 0.5 * (gl.nodes[static_cast<size_t>(s + 1)] + 1.0);
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  }
  throw Error("internal dofs carry no point position");
}

Eigen::MatrixXd stabilization_matrix(const ElementOperators& ops, double tau) {
  const Eigen::MatrixXd P = ops.DS * ops.Pi0k;  // dof values of the Pi0k polynomial
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(P.rows(), P.cols());
  return tau * (I - P).transpose() * (I - P);
}

LocalSystem local_system(const Polygon& p, const ElementOperators& ops, const ModelProblem& prob) {
  const int k = ops.layout.k;
  const int S = ops.layout.S();
  const int nkm1 = poly_dim(k - 1, 2);

  const auto quad = polygon_quadrature(p, 2 * k + 2);
  const Eigen::MatrixXd Ek = ops.basis.eval(quad);
  const Eigen::MatrixXd Ekm1 = Ek.leftCols(nkm1);

  // Projected fields at quadrature points: gradient at degree k-1, the
  // function part at degree k-1 via truncation of Pi0k, the load against the
  // full Pi0k.
  const Eigen::MatrixXd Vx = Ekm1 * ops.Pi0grad_x;
  const Eigen::MatrixXd Vy = Ekm1 * ops.Pi0grad_y;
  const Eigen::MatrixXd Vp = Ekm1 * ops.Pi0k.topRows(nkm1);
  const Eigen::MatrixXd Vk = Ek * ops.Pi0k;

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(S, S);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(S, S);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(S, S);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S);

  for (size_t q = 0; q < quad.size(); ++q) {
    const double w = quad[q].w;
    const Point2 x = quad[q].p;
    const Eigen::Matrix2d kap = prob.kappa(x);
    if (!(kap(0, 0) > 0.0) || !(kap.determinant() > 0.0) ||
        std::abs(kap(0, 1) - kap(1, 0)) > 1e-12 * kap.norm()) {
      throw ModelError("kappa is not symmetric positive definite at a quadrature point");
    }
    const auto vx = Vx.row(static_cast<Eigen::Index>(q));
    const auto vy = Vy.row(static_cast<Eigen::Index>(q));
    K.noalias() += w * (kap(0, 0) * vx.transpose() * vx + kap(0, 1) * vx.transpose() * vy +
                        kap(0, 1) * vy.transpose() * vx + kap(1, 1) * vy.transpose() * vy);

    const auto vp = Vp.row(static_cast<Eigen::Index>(q));
    if (prob.b) {
      const Eigen::Vector2d bv = prob.b(x);
      if (bv.squaredNorm() > 0.0) {
        C.noalias() -= w * (bv(0) * vx + bv(1) * vy).transpose() * vp;
      }
    }
    if (prob.gamma) {
      const double g = prob.gamma(x);
      if (g != 0.0) R.noalias() += (w * g) * vp.transpose() * vp;
    }
    rhs.noalias() += (w * prob.f(x)) * Vk.row(static_cast<Eigen::Index>(q)).transpose();
  }

  const double tau = K.trace() / S;
  LocalSystem out;
  out.A = K + C + R + stabilization_matrix(ops, tau);
  out.rhs = rhs;
  return out;
}

AssembledProblem assemble(const Mesh& mesh, int k, const SerendipityStrategy& strat,
                          const ModelProblem& prob) {
  AssembledProblem ap;
  ap.element_ops.reserve(static_cast<size_t>(mesh.num_cells()));
  std::vector<DofLayout> layouts;
  layouts.reserve(static_cast<size_t>(mesh.num_cells()));

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Polygon poly = mesh.cell_polygon(c);
    try {
      ap.element_ops.push_back(build_element_operators(poly, k, strat));
    } catch (const PropertySViolationError& e) {
      throw PropertySViolationError(
          "element " + std::to_string(c) + " fails property S (min_sv " +
              std::to_string(e.min_sv) + ")",
          e.min_sv);
    }
    layouts.push_back(ap.element_ops.back().layout);
  }

  ap.dof_map = GlobalDofMap(mesh, k, layouts);

  struct Entry {
    int row, col;
    double v;
  };
  std::vector<Entry> entries;
  std::vector<std::pair<int, double>> rhs_entries;

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Polygon poly = mesh.cell_polygon(c);
    const LocalSystem loc = local_system(poly, ap.element_ops[static_cast<size_t>(c)], prob);
    const std::vector<int> dofs = ap.dof_map.cell_dofs(mesh, c);
    const int S = static_cast<int>(dofs.size());
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j) {
        entries.push_back({dofs[static_cast<size_t>(i)], dofs[static_cast<size_t>(j)],
                           loc.A(i, j)});
      }
      rhs_entries.push_back({dofs[static_cast<size_t>(i)], loc.rhs(i)});
    }
  }

  // Canonical reduction: sorting by (row, col, value) first makes the summed
  // matrix independent of the element processing order.
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.row, a.col, a.v) < std::tie(b.row, b.col, b.v);
  });
  std::sort(rhs_entries.begin(), rhs_entries.end());

  const int n = ap.dof_map.total();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(entries.size());
  for (const Entry& e : entries) trips.emplace_back(e.row, e.col, e.v);
  ap.system.A.resize(n, n);
  ap.system.A.setFromTriplets(trips.begin(), trips.end());
  ap.system.rhs = Eigen::VectorXd::Zero(n);
  for (const auto& [dof, v] : rhs_entries) ap.system.rhs(dof) += v;
  return ap;
}

ReducedSystem apply_dirichlet(const AssembledProblem& ap, const Mesh& mesh,
                              const std::function<double(const Point2&)>& g) {
  const int n = ap.dof_map.total();
  ReducedSystem red;
  red.boundary_values = Eigen::VectorXd::Zero(n);

  std::vector<int> reduced_index(static_cast<size_t>(n), -1);
  for (int d = 0; d < n; ++d) {
    if (ap.dof_map.is_boundary(d)) {
      red.boundary_values(d) = g(ap.dof_map.dof_position(mesh, d));
    } else {
      reduced_index[static_cast<size_t>(d)] = static_cast<int>(red.interior_dofs.size());
      red.interior_dofs.push_back(d);
    }
  }

  const int ni = static_cast<int>(red.interior_dofs.size());
  red.rhs = Eigen::VectorXd::Zero(ni);
  for (int i = 0; i < ni; ++i) red.rhs(i) = ap.system.rhs(red.interior_dofs[static_cast<size_t>(i)]);

  std::vector<Eigen::Triplet<double>> trips;
  for (int outer = 0; outer < ap.system.A.outerSize(); ++outer) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(ap.system.A, outer); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      const int ri = reduced_index[static_cast<size_t>(r)];
      const int ci = reduced_index[static_cast<size_t>(c)];
      if (ri >= 0 && ci >= 0) {
        trips.emplace_back(ri, ci, it.value());
      } else if (ri >= 0 && ci < 0) {
        red.rhs(ri) -= it.value() * red.boundary_values(c);
      }
    }
  }
  red.A.resize(ni, ni);
  red.A.setFromTriplets(trips.begin(), trips.end());
  return red;
}

SolveResult solve(const ReducedSystem& sys) {
  SolveResult res;
  Eigen::VectorXd x;
  if (sys.A.rows() > 0) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(sys.A);
    lu.factorize(sys.A);
    if (lu.info() != Eigen::Success) {
      throw SolverError("sparse LU factorization failed", std::numeric_limits<double>::infinity());
    }
    x = lu.solve(sys.rhs);
    const double bnorm = sys.rhs.norm();
    const double rnorm = (sys.A * x - sys.rhs).norm();
    res.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    if (!(res.residual <= 1e-10)) {
      throw SolverError("linear solve residual above tolerance (" +
                            std::to_string(res.residual) + ")",
                        res.residual);
    }
  }

  res.solution = sys.boundary_values;
  for (size_t i = 0; i < sys.interior_dofs.size(); ++i) {
    res.solution(sys.interior_dofs[i]) = x(static_cast<Eigen::Index>(i));
  }
  return res;
}

void write_matrix_market(const Eigen::SparseMatrix<double>& A, std::ostream& out) {
  char buf[80];
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int outer = 0; outer < A.outerSize(); ++outer) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, outer); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                    static_cast<long>(it.col() + 1), it.value());
      out << buf;
    }
  }
}

void write_matrix_market_vector(const Eigen::VectorXd& v, std::ostream& out) {
  char buf[48];
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v(i));
    out << buf;
  }
}

}  // namespace svem
