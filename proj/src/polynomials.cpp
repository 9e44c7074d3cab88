#include "svem/polynomials.hpp"

#include <map>
#include <mutex>

namespace svem {

int poly_dim(int k, int d) {
  if (k < -1 || (d != 1 && d != 2)) throw Error("poly_dim: bad arguments");
  if (k < 0) return 0;
  return d == 1 ? k + 1 : (k + 1) * (k + 2) / 2;
}

const std::vector<MultiIndex>& monomial_exponents(int k) {
  static std::mutex mu;
  static std::map<int, std::vector<MultiIndex>> cache;  // node-stable references
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) {
    std::vector<MultiIndex> v;
    v.reserve(static_cast<size_t>(poly_dim(k, 2)));
    for (int deg = 0; deg <= k; ++deg) {
      for (int ay = 0; ay <= deg; ++ay) v.push_back({deg - ay, ay});
    }
    it = cache.emplace(k, std::move(v)).first;
  }
  return it->second;
}

int monomial_position(int ax, int ay) {
  const int d = ax + ay;
  return d * (d + 1) / 2 + ay;
}

double ScaledMonomialBasis::eval_one(int member, const Point2& pt) const {
  const MultiIndex mi = monomial_exponents(degree)[static_cast<size_t>(member)];
  const double u = (pt.x - center.x) / h;
  const double v = (pt.y - center.y) / h;
  return std::pow(u, mi.ax) * std::pow(v, mi.ay);
}

namespace {

// Powers 0..k of a scalar.
void fill_powers(double t, int k, std::vector<double>& out) {
  out.resize(static_cast<size_t>(k) + 1);
  out[0] = 1.0;
  for (int i = 1; i <= k; ++i) out[static_cast<size_t>(i)] = out[static_cast<size_t>(i - 1)] * t;
}

}  // namespace

Eigen::MatrixXd ScaledMonomialBasis::eval(const std::vector<Point2>& pts) const {
  const auto& exps = monomial_exponents(degree);
  Eigen::MatrixXd M(pts.size(), exps.size());
  std::vector<double> pu, pv;
  for (size_t r = 0; r < pts.size(); ++r) {
    fill_powers((pts[r].x - center.x) / h, degree, pu);
    fill_powers((pts[r].y - center.y) / h, degree, pv);
    for (size_t c = 0; c < exps.size(); ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          pu[static_cast<size_t>(exps[c].ax)] * pv[static_cast<size_t>(exps[c].ay)];
    }
  }
  return M;
}

Eigen::MatrixXd ScaledMonomialBasis::eval(const std::vector<QuadraturePoint>& pts) const {
  std::vector<Point2> raw(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) raw[i] = pts[i].p;
  return eval(raw);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ScaledMonomialBasis::eval_grad(
    const std::vector<Point2>& pts) const {
  const auto& exps = monomial_exponents(degree);
  Eigen::MatrixXd Gx(pts.size(), exps.size());
  Eigen::MatrixXd Gy(pts.size(), exps.size());
  std::vector<double> pu, pv;
  for (size_t r = 0; r < pts.size(); ++r) {
    fill_powers((pts[r].x - center.x) / h, degree, pu);
    fill_powers((pts[r].y - center.y) / h, degree, pv);
    for (size_t c = 0; c < exps.size(); ++c) {
      const int ax = exps[c].ax, ay = exps[c].ay;
      Gx(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          ax == 0 ? 0.0
                  : ax * pu[static_cast<size_t>(ax - 1)] * pv[static_cast<size_t>(ay)] / h;
      Gy(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          ay == 0 ? 0.0
                  : ay * pu[static_cast<size_t>(ax)] * pv[static_cast<size_t>(ay - 1)] / h;
    }
  }
  return {Gx, Gy};
}

double eval_poly(const PolyCoeffs& p, const ScaledMonomialBasis& basis, const Point2& pt) {
  const auto& exps = monomial_exponents(p.degree);
  const double u = (pt.x - basis.center.x) / basis.h;
  const double v = (pt.y - basis.center.y) / basis.h;
  double s = 0.0;
  for (size_t i = 0; i < exps.size(); ++i) {
    s += p.c(static_cast<Eigen::Index>(i)) * std::pow(u, exps[i].ax) * std::pow(v, exps[i].ay);
  }
  return s;
}

PolyCoeffs derivative_x(const PolyCoeffs& p, double h) {
  PolyCoeffs d = PolyCoeffs::zero(std::max(p.degree - 1, 0));
  const auto& exps = monomial_exponents(p.degree);
  for (size_t i = 0; i < exps.size(); ++i) {
    if (exps[i].ax == 0) continue;
    const int pos = monomial_position(exps[i].ax - 1, exps[i].ay);
    d.c(pos) += exps[i].ax * p.c(static_cast<Eigen::Index>(i)) / h;
  }
  return d;
}

PolyCoeffs derivative_y(const PolyCoeffs& p, double h) {
  PolyCoeffs d = PolyCoeffs::zero(std::max(p.degree - 1, 0));
  const auto& exps = monomial_exponents(p.degree);
  for (size_t i = 0; i < exps.size(); ++i) {
    if (exps[i].ay == 0) continue;
    const int pos = monomial_position(exps[i].ax, exps[i].ay - 1);
    d.c(pos) += exps[i].ay * p.c(static_cast<Eigen::Index>(i)) / h;
  }
  return d;
}

Eigen::MatrixXd mass_matrix_H(const ScaledMonomialBasis& basis, const Polygon& p,
                              const PolyCoeffs* weight, int exactness_override) {
  int exact = 2 * basis.degree + (weight ? weight->degree : 0);
  if (exactness_override >= 0) exact = exactness_override;
  const auto quad = polygon_quadrature(p, exact);
  const Eigen::MatrixXd M = basis.eval(quad);
  Eigen::VectorXd w(quad.size());
  for (size_t i = 0; i < quad.size(); ++i) {
    double wi = quad[i].w;
    if (weight) wi *= eval_poly(*weight, basis, quad[i].p);
    w(static_cast<Eigen::Index>(i)) = wi;
  }
  const Eigen::MatrixXd H = M.transpose() * w.asDiagonal() * M;
  return 0.5 * (H + H.transpose());
}

}  // namespace svem
