#ifndef SVEM_EXPERIMENTS_HPP
#define SVEM_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "svem/assembly.hpp"

namespace svem {

/// Poisson problem with the fifth-degree polynomial solution
/// p = x^3 + 5y^2 - 10y^3 + y^4 + x^5 + x^4 y  (kappa = I, b = 0, gamma = 0).
ModelProblem problem_poisson_quintic();

/// Full convection-diffusion-reaction problem with
/// kappa = [[y^2+1, -xy], [-xy, x^2+1]], b = (x, y), gamma = x^2 + y^3 and
/// exact solution p = x^2 y + sin(2 pi x) sin(2 pi y) + 2; f is assembled
/// from the closed-form derivatives.
ModelProblem problem_variable_coeff();

ModelProblem problem_by_name(const std::string& name);

struct ErrorNorms {
  double rel_l2 = 0.0;
  double rel_h1 = 0.0;
};

/// Relative L2 error of the elementwise Pi0k reconstruction and relative
/// H1-seminorm error of the projected gradient against the exact solution.
/// Throws ModelError when the problem has no exact solution.
ErrorNorms error_norms(const Mesh& mesh, int k, const Eigen::VectorXd& solution,
                       const GlobalDofMap& dof_map, const std::vector<ElementOperators>& ops,
                       const ModelProblem& prob);

enum class MeshFamily { Square, Trapezoid, Voronoi };
MeshFamily mesh_family_by_name(const std::string& name);
std::string mesh_family_name(MeshFamily f);

struct ConvergenceOptions {
  int levels = 3;
  double sigma = 0.2;         // trapezoid offset
  int lloyd_iterations = 50;
  std::uint64_t seed = 1;     // level i uses seed + i
  double theta0 = 1e-8;
};

struct ConvergenceLevel {
  std::string mesh_desc;
  double h = 0.0;
  int dofs = 0;
  double rel_l2 = 0.0;
  double rel_h1 = 0.0;
  double solver_residual = 0.0;
};

struct ConvergenceReport {
  std::string problem;
  std::string family;
  std::string strategy;
  int k = 1;
  ConvergenceOptions options;
  std::vector<ConvergenceLevel> levels;

  /// log(e_i/e_{i+1}) / log(h_i/h_{i+1}) for consecutive levels; entry i
  /// pairs level i with level i+1.
  std::vector<double> l2_rates() const;
  std::vector<double> h1_rates() const;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
  std::string table() const;
};

/// Mesh for level `level` (0-based) of a family: square/trapezoid grids run
/// 8, 16, 32, ...; Voronoi runs 25, 100, 400, ... cells.
Mesh family_mesh(MeshFamily family, int level, const ConvergenceOptions& opt);

ConvergenceReport run_convergence(const std::string& problem_id, MeshFamily family, int k,
                                  const SerendipityStrategy& strat, const ConvergenceOptions& opt);

/// Internal-dof bookkeeping per strategy, with the matching finite element
/// counts on triangles (Lagrange) and parallelograms (serendipity FEM).
struct DofReportRow {
  std::string strategy;
  int internal_degree = -1;   // representative (first cell)
  long internal_per_cell = 0; // total internal dofs / cells, rounded
  long total_internal = 0;
  long total_global = 0;
};
struct DofReport {
  int k = 1;
  std::string mesh_desc;
  std::vector<DofReportRow> rows;
  std::string table() const;
};
DofReport dof_report(const Mesh& mesh, int k, double theta0 = 1e-8);

}  // namespace svem

#endif
