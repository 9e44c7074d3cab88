#include "svem/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "svem/quadrature.hpp"

namespace svem {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

ModelProblem problem_poisson_quintic() {
  ModelProblem prob;
  prob.name = "poisson-quintic";
  prob.kappa = [](const Point2&) { return Eigen::Matrix2d::Identity().eval(); };
  prob.b = nullptr;
  prob.gamma = nullptr;
  auto p = [](const Point2& q) {
    const double x = q.x, y = q.y;
    return x * x * x + 5 * y * y - 10 * y * y * y + y * y * y * y + std::pow(x, 5) +
           std::pow(x, 4) * y;
  };
  prob.exact_p = p;
  prob.exact_grad_p = [](const Point2& q) {
    const double x = q.x, y = q.y;
    return Eigen::Vector2d(3 * x * x + 5 * std::pow(x, 4) + 4 * x * x * x * y,
                           10 * y - 30 * y * y + 4 * y * y * y + std::pow(x, 4));
  };
  prob.f = [](const Point2& q) {
    const double x = q.x, y = q.y;
    return -(6 * x + 20 * x * x * x + 12 * x * x * y + 10 - 60 * y + 12 * y * y);
  };
  prob.g = p;
  return prob;
}

ModelProblem problem_variable_coeff() {
  ModelProblem prob;
  prob.name = "variable-coeff";
  prob.kappa = [](const Point2& q) {
    Eigen::Matrix2d m;
    m << q.y * q.y + 1.0, -q.x * q.y, -q.x * q.y, q.x * q.x + 1.0;
    return m;
  };
  prob.b = [](const Point2& q) { return Eigen::Vector2d(q.x, q.y); };
  prob.gamma = [](const Point2& q) { return q.x * q.x + q.y * q.y * q.y; };

  auto p = [](const Point2& q) {
    return q.x * q.x * q.y + std::sin(kTwoPi * q.x) * std::sin(kTwoPi * q.y) + 2.0;
  };
  prob.exact_p = p;
  prob.exact_grad_p = [](const Point2& q) {
    const double x = q.x, y = q.y;
    return Eigen::Vector2d(2 * x * y + kTwoPi * std::cos(kTwoPi * x) * std::sin(kTwoPi * y),
                           x * x + kTwoPi * std::sin(kTwoPi * x) * std::cos(kTwoPi * y));
  };
  // f = -div(kappa grad p) + div(b p) + gamma p expanded with the closed-form
  // second derivatives of p.
  prob.f = [p](const Point2& q) {
    const double x = q.x, y = q.y;
    const double sx = std::sin(kTwoPi * x), cx = std::cos(kTwoPi * x);
    const double sy = std::sin(kTwoPi * y), cy = std::cos(kTwoPi * y);
    const double px = 2 * x * y + kTwoPi * cx * sy;
    const double py = x * x + kTwoPi * sx * cy;
    const double pxx = 2 * y - kTwoPi * kTwoPi * sx * sy;
    const double pyy = -kTwoPi * kTwoPi * sx * sy;
    const double pxy = 2 * x + kTwoPi * kTwoPi * cx * cy;
    const double val = p(q);
    const double gamma = x * x + y * y * y;
    return -(y * y + 1.0) * pxx - (x * x + 1.0) * pyy + 2.0 * x * y * pxy + 2.0 * x * px +
           2.0 * y * py + (2.0 + gamma) * val;
  };
  prob.g = p;
  return prob;
}

ModelProblem problem_by_name(const std::string& name) {
  if (name == "poisson-quintic") return problem_poisson_quintic();
  if (name == "variable-coeff") return problem_variable_coeff();
  throw Error("unknown problem '" + name + "' (use poisson-quintic or variable-coeff)");
}

ErrorNorms error_norms(const Mesh& mesh, int k, const Eigen::VectorXd& solution,
                       const GlobalDofMap& dof_map, const std::vector<ElementOperators>& ops,
                       const ModelProblem& prob) {
  if (!prob.has_exact()) throw ModelError("error norms need an exact solution");
  const int nkm1 = poly_dim(k - 1, 2);

  double num_l2 = 0.0, den_l2 = 0.0, num_h1 = 0.0, den_h1 = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Polygon poly = mesh.cell_polygon(c);
    const ElementOperators& op = ops[static_cast<size_t>(c)];
    const std::vector<int> dofs = dof_map.cell_dofs(mesh, c);
    Eigen::VectorXd loc(dofs.size());
    for (size_t i = 0; i < dofs.size(); ++i) loc(static_cast<Eigen::Index>(i)) = solution(dofs[i]);

    const Eigen::VectorXd ph = op.Pi0k * loc;        // Pi0k reconstruction
    const Eigen::VectorXd gx = op.Pi0grad_x * loc;   // projected gradient
    const Eigen::VectorXd gy = op.Pi0grad_y * loc;

    const auto quad = polygon_quadrature(poly, 2 * k + 4);
    const Eigen::MatrixXd Ek = op.basis.eval(quad);
    for (size_t q = 0; q < quad.size(); ++q) {
      const double w = quad[q].w;
      const Point2 x = quad[q].p;
      const double exact = prob.exact_p(x);
      const double approx = Ek.row(static_cast<Eigen::Index>(q)) * ph;
      num_l2 += w * (approx - exact) * (approx - exact);
      den_l2 += w * exact * exact;
      if (prob.exact_grad_p) {
        const Eigen::Vector2d eg = prob.exact_grad_p(x);
        const double ax = Ek.row(static_cast<Eigen::Index>(q)).head(nkm1) * gx;
        const double ay = Ek.row(static_cast<Eigen::Index>(q)).head(nkm1) * gy;
        num_h1 += w * ((ax - eg(0)) * (ax - eg(0)) + (ay - eg(1)) * (ay - eg(1)));
        den_h1 += w * eg.squaredNorm();
      }
    }
  }

  ErrorNorms norms;
  norms.rel_l2 = std::sqrt(num_l2 / den_l2);
  norms.rel_h1 = den_h1 > 0.0 ? std::sqrt(num_h1 / den_h1) : 0.0;
  return norms;
}

MeshFamily mesh_family_by_name(const std::string& name) {
  if (name == "square") return MeshFamily::Square;
  if (name == "trapezoid") return MeshFamily::Trapezoid;
  if (name == "voronoi" || name == "lloyd") return MeshFamily::Voronoi;
  throw Error("unknown mesh family '" + name + "' (use square, trapezoid or voronoi)");
}

std::string mesh_family_name(MeshFamily f) {
  switch (f) {
    case MeshFamily::Square:
      return "square";
    case MeshFamily::Trapezoid:
      return "trapezoid";
    case MeshFamily::Voronoi:
      return "voronoi";
  }
  return "?";
}

Mesh family_mesh(MeshFamily family, int level, const ConvergenceOptions& opt) {
  switch (family) {
    case MeshFamily::Square:
      return gen_square_grid(8 << level);
    case MeshFamily::Trapezoid:
      return gen_trapezoid_grid(8 << level, opt.sigma);
    case MeshFamily::Voronoi:
      return gen_voronoi_lloyd(25 << (2 * level), opt.lloyd_iterations, opt.seed + static_cast<std::uint64_t>(level));
  }
  throw Error("bad mesh family");
}

std::vector<double> ConvergenceReport::l2_rates() const {
  std::vector<double> rates;
  for (size_t i = 0; i + 1 < levels.size(); ++i) {
    rates.push_back(std::log(levels[i].rel_l2 / levels[i + 1].rel_l2) /
                    std::log(levels[i].h / levels[i + 1].h));
  }
  return rates;
}

std::vector<double> ConvergenceReport::h1_rates() const {
  std::vector<double> rates;
  for (size_t i = 0; i + 1 < levels.size(); ++i) {
    rates.push_back(std::log(levels[i].rel_h1 / levels[i + 1].rel_h1) /
                    std::log(levels[i].h / levels[i + 1].h));
  }
  return rates;
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  out << "level,mesh,h,dofs,rel_l2,rate_l2,rel_h1,rate_h1,residual\n";
  const auto rl2 = l2_rates();
  const auto rh1 = h1_rates();
  for (size_t i = 0; i < levels.size(); ++i) {
    const ConvergenceLevel& L = levels[i];
    out << i << "," << L.mesh_desc << "," << fmt(L.h) << "," << L.dofs << "," << fmt(L.rel_l2)
        << "," << (i == 0 ? "" : fmt(rl2[i - 1])) << "," << fmt(L.rel_h1) << ","
        << (i == 0 ? "" : fmt(rh1[i - 1])) << "," << fmt(L.solver_residual) << "\n";
  }
}

void ConvergenceReport::write_json(std::ostream& out) const {
  nlohmann::json j;
  j["problem"] = problem;
  j["family"] = family;
  j["strategy"] = strategy;
  j["k"] = k;
  j["options"] = {{"levels", options.levels},
                  {"sigma", options.sigma},
                  {"lloyd_iterations", options.lloyd_iterations},
                  {"seed", options.seed},
                  {"theta0", options.theta0}};
  j["levels"] = nlohmann::json::array();
  for (const ConvergenceLevel& L : levels) {
    j["levels"].push_back({{"mesh", L.mesh_desc},
                           {"h", L.h},
                           {"dofs", L.dofs},
                           {"rel_l2", L.rel_l2},
                           {"rel_h1", L.rel_h1},
                           {"residual", L.solver_residual}});
  }
  j["l2_rates"] = l2_rates();
  j["h1_rates"] = h1_rates();
  out << j.dump(1) << "\n";
}

std::string ConvergenceReport::table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s on %s meshes, k=%d, strategy=%s\n", problem.c_str(),
                family.c_str(), k, strategy.c_str());
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-14s %10s %8s %12s %7s %12s %7s\n", "mesh", "h", "dofs",
                "rel_L2", "rate", "rel_H1", "rate");
  os << buf;
  const auto rl2 = l2_rates();
  const auto rh1 = h1_rates();
  for (size_t i = 0; i < levels.size(); ++i) {
    const ConvergenceLevel& L = levels[i];
    std::snprintf(buf, sizeof(buf), "%-14s %10.4g %8d %12.4e %7s %12.4e %7s\n",
                  L.mesh_desc.c_str(), L.h, L.dofs, L.rel_l2,
                  i == 0 ? "-" : fmt(rl2[i - 1], "%.2f").c_str(), L.rel_h1,
                  i == 0 ? "-" : fmt(rh1[i - 1], "%.2f").c_str());
    os << buf;
  }
  return os.str();
}

ConvergenceReport run_convergence(const std::string& problem_id, MeshFamily family, int k,
                                  const SerendipityStrategy& strat,
                                  const ConvergenceOptions& opt) {
  if (opt.levels < 2) throw Error("convergence study needs at least 2 levels");
  const ModelProblem prob = problem_by_name(problem_id);

  ConvergenceReport rep;
  rep.problem = problem_id;
  rep.family = mesh_family_name(family);
  rep.strategy = strat.name();
  rep.k = k;
  rep.options = opt;

  for (int level = 0; level < opt.levels; ++level) {
    const Mesh mesh = family_mesh(family, level, opt);
    const AssembledProblem ap = assemble(mesh, k, strat, prob);
    const ReducedSystem red = apply_dirichlet(ap, mesh, prob.g);
    const SolveResult sol = solve(red);
    const ErrorNorms norms = error_norms(mesh, k, sol.solution, ap.dof_map, ap.element_ops, prob);

    ConvergenceLevel L;
    L.mesh_desc = rep.family + "-" + std::to_string(mesh.num_cells());
    L.h = mesh.mesh_size();
    L.dofs = ap.dof_map.total();
    L.rel_l2 = norms.rel_l2;
    L.rel_h1 = norms.rel_h1;
    L.solver_residual = sol.residual;
    rep.levels.push_back(L);
  }
  return rep;
}

DofReport dof_report(const Mesh& mesh, int k, double theta0) {
  DofReport rep;
  rep.k = k;
  rep.mesh_desc = std::to_string(mesh.num_cells()) + " cells, " +
                  std::to_string(mesh.num_vertices()) + " vertices";

  const std::vector<SerendipityStrategy> strategies = {
      SerendipityStrategy::original(), SerendipityStrategy::lazy(),
      SerendipityStrategy::stingy(theta0)};
  for (const SerendipityStrategy& strat : strategies) {
    std::vector<DofLayout> layouts;
    long internal = 0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      layouts.push_back(build_dof_layout(mesh.cell_polygon(c), k, strat));
      internal += layouts.back().n_internal();
    }
    const GlobalDofMap map(mesh, k, layouts);
    DofReportRow row;
    row.strategy = strat.name();
    row.internal_degree = layouts.front().internal_degree;
    row.internal_per_cell = internal / mesh.num_cells();
    row.total_internal = internal;
    row.total_global = map.total();
    rep.rows.push_back(row);
  }
  return rep;
}

std::string DofReport::table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "dof report, k=%d, mesh: %s\n", k, mesh_desc.c_str());
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-12s %14s %16s %14s %13s\n", "strategy", "internal_deg",
                "internal/cell", "internal_tot", "global_total");
  os << buf;
  for (const DofReportRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-12s %14d %16ld %14ld %13ld\n", r.strategy.c_str(),
                  r.internal_degree, r.internal_per_cell, r.total_internal, r.total_global);
    os << buf;
  }
  return os.str();
}

}  // namespace svem
