#ifndef SVEM_ASSEMBLY_HPP
#define SVEM_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <vector>

#include "svem/element.hpp"
#include "svem/mesh.hpp"

namespace svem {

struct ModelError : Error {
  using Error::Error;
};

struct SolverError : Error {
  SolverError(const std::string& what, double residual_) : Error(what), residual(residual_) {}
  double residual = 0.0;
};

/// Coefficients and data of  div(-kappa grad p + b p) + gamma p = f,  p = g
/// on the boundary. kappa must be symmetric positive definite wherever it is
/// sampled. exact_p / exact_grad_p are optional (empty std::function).
struct ModelProblem {
  std::string name = "custom";
  std::function<Eigen::Matrix2d(const Point2&)> kappa;
  std::function<Eigen::Vector2d(const Point2&)> b;
  std::function<double(const Point2&)> gamma;
  std::function<double(const Point2&)> f;
  std::function<double(const Point2&)> g;
  std::function<double(const Point2&)> exact_p;                 // may be empty
  std::function<Eigen::Vector2d(const Point2&)> exact_grad_p;   // may be empty

  bool has_exact() const { return static_cast<bool>(exact_p); }
};

/// Conforming dof numbering: vertex dofs first, then k-1 dofs per mesh edge
/// (slots ordered along the canonical v0 -> v1 direction), then per-cell
/// internal moments. Edge slots seen from a cell traversing the edge
/// backwards are reversed; Gauss-Lobatto symmetry makes the point positions
/// agree from both sides.
class GlobalDofMap {
 public:
  GlobalDofMap() = default;
  GlobalDofMap(const Mesh& mesh, int k, const std::vector<DofLayout>& layouts);

  int total() const { return total_; }
  int k() const { return k_; }
  int n_vertex_dofs() const { return n_vertices_; }
  int n_edge_dofs() const { return n_edge_dofs_; }
  int n_internal_dofs() const { return total_ - n_vertices_ - n_edge_dofs_; }

  /// Global ids of cell c's dofs in local element order.
  std::vector<int> cell_dofs(const Mesh& mesh, int c) const;

  bool is_boundary(int dof) const { return boundary_[static_cast<size_t>(dof)]; }
  /// Position of a vertex or edge dof (used for Dirichlet interpolation);
  /// internal dofs have no position and must not be queried.
  Point2 dof_position(const Mesh& mesh, int dof) const;

  int internal_offset(int c) const { return cell_internal_offset_[static_cast<size_t>(c)]; }
  int internal_count(int c) const { return cell_internal_count_[static_cast<size_t>(c)]; }

 private:
  int k_ = 1;
  int total_ = 0;
  int n_vertices_ = 0;
  int n_edge_dofs_ = 0;
  std::vector<int> edge_offset_;
  std::vector<int> cell_internal_offset_;
  std::vector<int> cell_internal_count_;
  std::vector<bool> boundary_;
};

/// Local CDR system on one element: consistency terms built from the
/// projected function / gradient, dof-space stabilization, and the load
/// against Pi0k.
struct LocalSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
};
LocalSystem local_system(const Polygon& p, const ElementOperators& ops, const ModelProblem& prob);

/// Stabilization part alone (for diagnostics/tests): tau * (I - DS Pi0k)^T (I - DS Pi0k).
Eigen::MatrixXd stabilization_matrix(const ElementOperators& ops, double tau);

struct SparseSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
};

struct AssembledProblem {
  SparseSystem system;   // full system, Dirichlet not yet applied
  GlobalDofMap dof_map;
  std::vector<ElementOperators> element_ops;
};

/// Builds per-element operators and sums local systems into global triplets.
/// The triplet reduction is canonically ordered, so the result does not
/// depend on element processing order. An element failing the property-S
/// check aborts with its id and min_sv.
AssembledProblem assemble(const Mesh& mesh, int k, const SerendipityStrategy& strat,
                          const ModelProblem& prob);

/// Dirichlet elimination: boundary vertex/edge dofs are interpolated from g
/// pointwise and removed symmetrically from the system.
struct ReducedSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  std::vector<int> interior_dofs;    // reduced index -> global dof
  Eigen::VectorXd boundary_values;   // full-length, nonzero on boundary dofs
};
ReducedSystem apply_dirichlet(const AssembledProblem& ap, const Mesh& mesh,
                              const std::function<double(const Point2&)>& g);

struct SolveResult {
  Eigen::VectorXd solution;  // full-length dof vector including boundary values
  double residual = 0.0;     // relative residual of the reduced system
};

/// Sparse LU with a residual contract of 1e-10; throws SolverError on
/// breakdown or residual failure.
SolveResult solve(const ReducedSystem& sys);

/// Matrix Market exports (coordinate for the matrix, array for the rhs).
void write_matrix_market(const Eigen::SparseMatrix<double>& A, std::ostream& out);
void write_matrix_market_vector(const Eigen::VectorXd& v, std::ostream& out);

}  // namespace svem

#endif
