#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "svem/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPropertyS = 3;
constexpr int kExitSolver = 4;

struct MeshOpts {
  std::string file;
  std::string family = "square";
  int n = 8;
  double sigma = 0.2;
  int cells = 100;
  int lloyd = 50;
  std::uint64_t seed = 1;
};

void add_mesh_options(CLI::App* cmd, MeshOpts& mo) {
  cmd->add_option("--mesh", mo.file, "mesh JSON file (overrides --family)");
  cmd->add_option("--family", mo.family, "generator family: square | trapezoid | voronoi");
  cmd->add_option("--n", mo.n, "grid size for square/trapezoid")->check(CLI::PositiveNumber);
  cmd->add_option("--sigma", mo.sigma, "trapezoid vertical offset");
  cmd->add_option("--cells", mo.cells, "voronoi cell count")->check(CLI::Range(4, 1000000));
  cmd->add_option("--lloyd", mo.lloyd, "lloyd iteration count")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", mo.seed, "voronoi seed");
}

svem::Mesh make_mesh(const MeshOpts& mo) {
  if (!mo.file.empty()) return svem::read_mesh_file(mo.file);
  switch (svem::mesh_family_by_name(mo.family)) {
    case svem::MeshFamily::Square:
      return svem::gen_square_grid(mo.n);
    case svem::MeshFamily::Trapezoid:
      return svem::gen_trapezoid_grid(mo.n, mo.sigma);
    case svem::MeshFamily::Voronoi:
      return svem::gen_voronoi_lloyd(mo.cells, mo.lloyd, mo.seed);
  }
  throw svem::Error("bad mesh source");
}

struct StrategyOpts {
  std::string name = "stingy";
  double theta0 = 1e-8;
  int fixed_degree = -1;
};

void add_strategy_options(CLI::App* cmd, StrategyOpts& so) {
  cmd->add_option("--strategy", so.name, "original | lazy | stingy | fixed");
  cmd->add_option("--theta0", so.theta0, "collinearity tolerance for stingy")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fixed-degree", so.fixed_degree, "internal degree for --strategy fixed");
}

svem::SerendipityStrategy make_strategy(const StrategyOpts& so) {
  if (so.name == "original") return svem::SerendipityStrategy::original();
  if (so.name == "lazy") return svem::SerendipityStrategy::lazy();
  if (so.name == "stingy") return svem::SerendipityStrategy::stingy(so.theta0);
  if (so.name == "fixed") return svem::SerendipityStrategy::fixed(so.fixed_degree);
  throw svem::Error("unknown strategy '" + so.name + "'");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw svem::Error("cannot open output file: " + path);
  return out;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svem - serendipity virtual element solver on polygonal meshes"};
  app.require_subcommand(1);

  // gen-mesh
  auto* cmd_gen = app.add_subcommand("gen-mesh", "generate a mesh and write it as JSON");
  MeshOpts gen_mesh_opts;
  std::string gen_out;
  add_mesh_options(cmd_gen, gen_mesh_opts);
  cmd_gen->add_option("--out", gen_out, "output mesh file")->required();

  // solve
  auto* cmd_solve = app.add_subcommand("solve", "solve a model problem on one mesh");
  MeshOpts solve_mesh_opts;
  StrategyOpts solve_strat_opts;
  int solve_k = 2;
  std::string solve_problem = "poisson-quintic";
  std::string solve_out, dump_system;
  double solver_tol = 1e-10;
  add_mesh_options(cmd_solve, solve_mesh_opts);
  add_strategy_options(cmd_solve, solve_strat_opts);
  cmd_solve->add_option("--k", solve_k, "polynomial degree")->check(CLI::Range(1, 8));
  cmd_solve->add_option("--problem", solve_problem, "poisson-quintic | variable-coeff");
  cmd_solve->add_option("--out", solve_out, "write solution summary JSON");
  cmd_solve->add_option("--dump-system", dump_system,
                        "write the reduced system (Matrix Market; rhs to <path>.rhs)");
  cmd_solve->add_option("--solver-tol", solver_tol, "accepted relative residual")
      ->check(CLI::PositiveNumber);

  // convergence
  auto* cmd_conv = app.add_subcommand("convergence", "run a mesh-refinement study");
  StrategyOpts conv_strat_opts;
  int conv_k = 2;
  int conv_levels = 3;
  std::string conv_problem = "trapezoid-quintic";
  std::string conv_family;
  std::string conv_csv, conv_json;
  double conv_sigma = 0.2;
  int conv_lloyd = 50;
  std::uint64_t conv_seed = 1;
  add_strategy_options(cmd_conv, conv_strat_opts);
  cmd_conv->add_option("--k", conv_k, "polynomial degree")->check(CLI::Range(1, 8));
  cmd_conv->add_option("--problem", conv_problem,
                       "poisson-quintic | variable-coeff | trapezoid-quintic | square-quintic | "
                       "lloyd-varcoef");
  cmd_conv->add_option("--family", conv_family, "square | trapezoid | voronoi");
  cmd_conv->add_option("--levels", conv_levels, "number of refinement levels")
      ->check(CLI::Range(2, 8));
  cmd_conv->add_option("--sigma", conv_sigma, "trapezoid offset");
  cmd_conv->add_option("--lloyd", conv_lloyd, "lloyd iterations")->check(CLI::NonNegativeNumber);
  cmd_conv->add_option("--seed", conv_seed, "voronoi base seed");
  cmd_conv->add_option("--csv", conv_csv, "write report CSV");
  cmd_conv->add_option("--json", conv_json, "write report JSON");

  // inspect
  auto* cmd_inspect = app.add_subcommand("inspect", "dump per-element operators");
  MeshOpts inspect_mesh_opts;
  StrategyOpts inspect_strat_opts;
  int inspect_k = 2;
  std::string inspect_out;
  add_mesh_options(cmd_inspect, inspect_mesh_opts);
  add_strategy_options(cmd_inspect, inspect_strat_opts);
  cmd_inspect->add_option("--k", inspect_k, "polynomial degree")->check(CLI::Range(1, 8));
  cmd_inspect->add_option("--out", inspect_out, "operator dump JSON file");

  // dofs
  auto* cmd_dofs = app.add_subcommand("dofs", "internal/global dof accounting per strategy");
  MeshOpts dofs_mesh_opts;
  int dofs_k = 2;
  double dofs_theta0 = 1e-8;
  std::string dofs_strategy = "all";
  add_mesh_options(cmd_dofs, dofs_mesh_opts);
  cmd_dofs->add_option("--k", dofs_k, "polynomial degree")->check(CLI::Range(1, 8));
  cmd_dofs->add_option("--strategy", dofs_strategy, "all | original | lazy | stingy");
  cmd_dofs->add_option("--theta0", dofs_theta0, "collinearity tolerance")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*cmd_gen) {
      const svem::Mesh mesh = make_mesh(gen_mesh_opts);
      svem::write_mesh_file(mesh, gen_out);
      std::cout << "wrote " << gen_out << ": " << mesh.num_cells() << " cells, "
                << mesh.num_vertices() << " vertices, " << mesh.num_edges() << " edges\n";
      return kExitOk;
    }

    if (*cmd_solve) {
      const svem::Mesh mesh = make_mesh(solve_mesh_opts);
      const svem::SerendipityStrategy strat = make_strategy(solve_strat_opts);
      const svem::ModelProblem prob = svem::problem_by_name(solve_problem);

      const svem::AssembledProblem ap = svem::assemble(mesh, solve_k, strat, prob);
      const svem::ReducedSystem red = svem::apply_dirichlet(ap, mesh, prob.g);
      if (!dump_system.empty()) {
        auto out = open_out(dump_system);
        svem::write_matrix_market(red.A, out);
        auto out_rhs = open_out(dump_system + ".rhs");
        svem::write_matrix_market_vector(red.rhs, out_rhs);
      }
      svem::SolveResult sol = svem::solve(red);
      if (!(sol.residual <= solver_tol)) {
        throw svem::SolverError("residual above --solver-tol", sol.residual);
      }

      std::cout << "cells " << mesh.num_cells() << ", dofs " << ap.dof_map.total()
                << ", residual " << sol.residual << "\n";
      nlohmann::json j = {{"problem", prob.name},
                          {"k", solve_k},
                          {"strategy", strat.name()},
                          {"cells", mesh.num_cells()},
                          {"dofs", ap.dof_map.total()},
                          {"residual", sol.residual}};
      if (prob.has_exact()) {
        const svem::ErrorNorms norms =
            svem::error_norms(mesh, solve_k, sol.solution, ap.dof_map, ap.element_ops, prob);
        std::cout << "rel_l2 " << norms.rel_l2 << ", rel_h1 " << norms.rel_h1 << "\n";
        j["rel_l2"] = norms.rel_l2;
        j["rel_h1"] = norms.rel_h1;
      }
      if (!solve_out.empty()) {
        j["solution"] = std::vector<double>(sol.solution.data(),
                                            sol.solution.data() + sol.solution.size());
        open_out(solve_out) << j.dump(1) << "\n";
      }
      return kExitOk;
    }

    if (*cmd_conv) {
      std::string problem = conv_problem;
      std::string family = conv_family;
      if (problem == "trapezoid-quintic") {
        problem = "poisson-quintic";
        if (family.empty()) family = "trapezoid";
      } else if (problem == "square-quintic") {
        problem = "poisson-quintic";
        if (family.empty()) family = "square";
      } else if (problem == "lloyd-varcoef") {
        problem = "variable-coeff";
        if (family.empty()) family = "voronoi";
      }
      if (family.empty()) family = "square";

      svem::ConvergenceOptions opt;
      opt.levels = conv_levels;
      opt.sigma = conv_sigma;
      opt.lloyd_iterations = conv_lloyd;
      opt.seed = conv_seed;
      opt.theta0 = conv_strat_opts.theta0;
      const svem::ConvergenceReport rep = svem::run_convergence(
          problem, svem::mesh_family_by_name(family), conv_k, make_strategy(conv_strat_opts), opt);

      std::cout << rep.table();
      if (!conv_csv.empty()) {
        auto out = open_out(conv_csv);
        rep.write_csv(out);
      }
      if (!conv_json.empty()) {
        auto out = open_out(conv_json);
        rep.write_json(out);
      }
      return kExitOk;
    }

    if (*cmd_inspect) {
      const svem::Mesh mesh = make_mesh(inspect_mesh_opts);
      const svem::SerendipityStrategy strat = make_strategy(inspect_strat_opts);

      nlohmann::json j;
      j["k"] = inspect_k;
      j["strategy"] = strat.name();
      j["elements"] = nlohmann::json::array();
      double worst = std::numeric_limits<double>::infinity();
      int failures = 0;
      for (int c = 0; c < mesh.num_cells(); ++c) {
        const svem::Polygon poly = mesh.cell_polygon(c);
        const svem::DofLayout layout = svem::build_dof_layout(poly, inspect_k, strat);
        const Eigen::MatrixXd DS = svem::build_D(poly, inspect_k, layout);
        const svem::PropertySCheck chk = svem::check_property_S(DS);
        worst = std::min(worst, chk.min_sv);

        nlohmann::json el = {{"id", c},
                             {"n_vertices", layout.n_vertices},
                             {"eta", layout.eta},
                             {"internal_degree", layout.internal_degree},
                             {"S", layout.S()},
                             {"N_E", layout.N_E()},
                             {"min_sv", chk.min_sv},
                             {"property_S", chk.ok}};
        el["DS"] = matrix_json(DS);
        if (chk.ok) {
          const Eigen::MatrixXd PiS = svem::build_PiS(DS);
          const auto [mom, pi0k] = svem::extend_and_project(poly, inspect_k, layout, DS, PiS);
          (void)mom;
          el["PiS"] = matrix_json(PiS);
          el["Pi0k"] = matrix_json(pi0k);
        } else {
          ++failures;
        }
        j["elements"].push_back(std::move(el));
      }
      std::cout << mesh.num_cells() << " elements, min min_sv " << worst << ", "
                << failures << " property-S failures\n";
      if (!inspect_out.empty()) open_out(inspect_out) << j.dump(1) << "\n";
      return failures == 0 ? kExitOk : kExitPropertyS;
    }

    if (*cmd_dofs) {
      const svem::Mesh mesh = make_mesh(dofs_mesh_opts);
      svem::DofReport rep = svem::dof_report(mesh, dofs_k, dofs_theta0);
      if (dofs_strategy != "all") {
        std::erase_if(rep.rows,
                      [&](const svem::DofReportRow& r) { return r.strategy != dofs_strategy; });
        if (rep.rows.empty()) throw svem::Error("unknown strategy '" + dofs_strategy + "'");
      }
      std::cout << rep.table();
      return kExitOk;
    }
  } catch (const svem::PropertySViolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPropertyS;
  } catch (const svem::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
