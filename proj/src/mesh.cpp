#include "svem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace svem {

void Mesh::build_topology() {
  const int nv = num_vertices();
  const int nc = num_cells();
  edges_.clear();
  cell_edges_.assign(static_cast<size_t>(nc), {});
  vertex_boundary_.assign(static_cast<size_t>(nv), false);

  edge_ids_.clear();
  std::map<std::pair<int, int>, int>& edge_ids = edge_ids_;
  for (int c = 0; c < nc; ++c) {
    const auto& loop = cells[static_cast<size_t>(c)];
    const int m = static_cast<int>(loop.size());
    if (m < 3) throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
    auto& ce = cell_edges_[static_cast<size_t>(c)];
    ce.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
      const int a = loop[static_cast<size_t>(i)];
      const int b = loop[static_cast<size_t>((i + 1) % m)];
      if (a < 0 || a >= nv || b < 0 || b >= nv) {
        throw MeshError("cell " + std::to_string(c) + " references an invalid vertex");
      }
      if (a == b) throw MeshError("cell " + std::to_string(c) + " has a zero-length edge");
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        Edge e;
        e.v0 = key.first;
        e.v1 = key.second;
        it = edge_ids.emplace(key, static_cast<int>(edges_.size())).first;
        edges_.push_back(e);
      }
      Edge& e = edges_[static_cast<size_t>(it->second)];
      const bool forward = (a == e.v0);
      if (forward) {
        if (e.cell_a >= 0) {
          throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") traversed twice in the same direction");
        }
        e.cell_a = c;
      } else {
        if (e.cell_b >= 0) {
          throw MeshError("edge (" + std::to_string(b) + "," + std::to_string(a) +
                          ") traversed twice in the same direction");
        }
        e.cell_b = c;
      }
      ce[static_cast<size_t>(i)] = it->second;
    }
  }

  for (size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].cell_a < 0 && edges_[e].cell_b < 0) continue;
    if (edges_[e].cell_a < 0 || edges_[e].cell_b < 0) {
      vertex_boundary_[static_cast<size_t>(edges_[e].v0)] = true;
      vertex_boundary_[static_cast<size_t>(edges_[e].v1)] = true;
    }
  }
}

int Mesh::find_edge(int a, int b) const {
  const auto it = edge_ids_.find({std::min(a, b), std::max(a, b)});
  return it == edge_ids_.end() ? -1 : it->second;
}

Polygon Mesh::cell_polygon(int c) const {
  const auto& loop = cells[static_cast<size_t>(c)];
  std::vector<Point2> pts(loop.size());
  for (size_t i = 0; i < loop.size(); ++i) pts[i] = vertices[static_cast<size_t>(loop[i])];
  return Polygon(std::move(pts));
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int c = 0; c < num_cells(); ++c) a += cell_polygon(c).area();
  return a;
}

double Mesh::mesh_size() const {
  double h = 0.0;
  for (int c = 0; c < num_cells(); ++c) h = std::max(h, cell_polygon(c).diameter());
  return h;
}

Mesh gen_square_grid(int n) {
  if (n < 1) throw MeshError("grid size must be >= 1");
  Mesh m;
  m.vertices.resize(static_cast<size_t>((n + 1) * (n + 1)));
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      m.vertices[static_cast<size_t>(vid(i, j))] = {static_cast<double>(i) / n,
                                                    static_cast<double>(j) / n};
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m.cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  m.build_topology();
  return m;
}

Mesh gen_trapezoid_grid(int n, double sigma) {
  if (n < 1) throw MeshError("grid size must be >= 1");
  if (sigma < 0.0 || sigma >= 0.5) throw MeshError("trapezoid offset must satisfy 0 <= sigma < 0.5");
  Mesh m = gen_square_grid(n);
  // Alternating vertical offset on interior vertices only; x stays uniform,
  // so every cell keeps two parallel vertical edges.
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) {
      const int sign = ((i + j) % 2 == 0) ? 1 : -1;
      m.vertices[static_cast<size_t>(j * (n + 1) + i)].y += sign * sigma / n;
    }
  }
  m.build_topology();
  return m;
}

namespace {

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Clip a convex polygon by the half-plane a*x + b*y + c <= 0.
std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, double a, double b, double c) {
  std::vector<Point2> out;
  const size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 2);
  for (size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    const double fp = a * p.x + b * p.y + c;
    const double fq = a * q.x + b * q.y + c;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double t = fp / (fp - fq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

std::vector<std::vector<Point2>> voronoi_cells(const std::vector<Point2>& seeds) {
  const size_t n = seeds.size();
  const std::vector<Point2> box = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::vector<Point2>> cells(n);

  std::vector<std::pair<double, size_t>> order(n);
  for (size_t i = 0; i < n; ++i) {
    const Point2 si = seeds[i];
    for (size_t j = 0; j < n; ++j) {
      order[j] = {distance(si, seeds[j]), j};
    }
    std::sort(order.begin(), order.end());

    std::vector<Point2> cell = box;
    for (size_t r = 1; r < n && !cell.empty(); ++r) {
      const auto [dist, j] = order[r];
      // A seed farther than twice the current cell radius cannot cut it.
      double radius = 0.0;
      for (const Point2& p : cell) radius = std::max(radius, distance(si, p));
      if (dist > 2.0 * radius) break;
      const Point2 sj = seeds[j];
      const double a = 2.0 * (sj.x - si.x);
      const double b = 2.0 * (sj.y - si.y);
      const double c = (si.x * si.x + si.y * si.y) - (sj.x * sj.x + sj.y * sj.y);
      cell = clip_halfplane(cell, a, b, c);
    }
    cells[i] = std::move(cell);
  }
  return cells;
}

Point2 polygon_centroid_raw(const std::vector<Point2>& pts) {
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& p = pts[i];
    const Point2& q = pts[(i + 1) % n];
    const double w = p.cross(q);
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (a2 == 0.0) return pts.empty() ? Point2{0.5, 0.5} : pts[0];
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

// Merge near-duplicate cell corners into shared mesh vertices (hash grid,
// absolute tolerance) and build the conforming mesh.
Mesh cells_to_mesh(const std::vector<std::vector<Point2>>& cells, double tol) {
  Mesh m;
  std::unordered_map<long long, std::vector<int>> grid;
  auto cell_index = [tol](double t) { return static_cast<long long>(std::floor(t / tol)) + 16; };
  auto key_of = [](long long gx, long long gy) { return (gx << 32) | gy; };
  auto find_or_add = [&](const Point2& p) {
    const long long gx = cell_index(p.x), gy = cell_index(p.y);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find(key_of(gx + dx, gy + dy));
        if (it == grid.end()) continue;
        for (int v : it->second) {
          if (distance(m.vertices[static_cast<size_t>(v)], p) <= tol) return v;
        }
      }
    }
    const int v = static_cast<int>(m.vertices.size());
    m.vertices.push_back(p);
    grid[key_of(gx, gy)].push_back(v);
    return v;
  };

  for (const auto& cell : cells) {
    std::vector<int> loop;
    for (const Point2& p : cell) {
      const int v = find_or_add(p);
      if (loop.empty() || loop.back() != v) loop.push_back(v);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    if (loop.size() < 3) throw MeshError("voronoi cell collapsed");
    // A repeated non-consecutive vertex pinches the cell.
    std::vector<int> sorted = loop;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw MeshError("voronoi cell pinched");
    }
    m.cells.push_back(std::move(loop));
  }
  m.build_topology();
  return m;
}

}  // namespace

Mesh gen_voronoi_lloyd(int n_cells, int n_iter, std::uint64_t seed) {
  if (n_cells < 4) throw MeshError("voronoi mesh needs at least 4 cells");
  if (n_iter < 0) throw MeshError("lloyd iteration count must be >= 0");

  for (int attempt = 0; attempt < 10; ++attempt) {
    std::mt19937_64 eng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
    std::vector<Point2> seeds(static_cast<size_t>(n_cells));
    for (auto& s : seeds) s = {uniform01(eng), uniform01(eng)};

    try {
      for (int it = 0; it < n_iter; ++it) {
        const auto cells = voronoi_cells(seeds);
        for (size_t i = 0; i < seeds.size(); ++i) {
          if (cells[i].size() < 3) throw MeshError("voronoi cell collapsed");
          seeds[i] = polygon_centroid_raw(cells[i]);
        }
      }
      Mesh m = cells_to_mesh(voronoi_cells(seeds), 1e-9);
      // Generation must produce valid polygons; a failure here retries.
      for (int c = 0; c < m.num_cells(); ++c) (void)m.cell_polygon(c);
      if (std::abs(m.total_area() - 1.0) > 1e-9) throw MeshError("voronoi cells do not tile");
      return m;
    } catch (const Error&) {
      continue;
    }
  }
  throw MeshError("voronoi generation failed after 10 attempts");
}

MeshReport validate_mesh(const Mesh& m, double rho0) {
  MeshReport rep;
  const int nv = m.num_vertices();

  std::vector<bool> used(static_cast<size_t>(nv), false);
  std::map<std::pair<int, int>, std::vector<std::pair<int, bool>>> edge_use;

  for (int c = 0; c < m.num_cells(); ++c) {
    const auto& loop = m.cells[static_cast<size_t>(c)];
    const int n = static_cast<int>(loop.size());
    if (n < 3) {
      rep.conformity_errors.push_back("cell " + std::to_string(c) + ": fewer than 3 vertices");
      continue;
    }
    bool bad_index = false;
    for (int v : loop) {
      if (v < 0 || v >= nv) {
        rep.conformity_errors.push_back("cell " + std::to_string(c) + ": invalid vertex index");
        bad_index = true;
        break;
      }
      used[static_cast<size_t>(v)] = true;
    }
    if (bad_index) continue;

    double a2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const Point2& p = m.vertices[static_cast<size_t>(loop[static_cast<size_t>(i)])];
      const Point2& q = m.vertices[static_cast<size_t>(loop[static_cast<size_t>((i + 1) % n)])];
      a2 += p.cross(q);
    }
    if (a2 <= 0.0) {
      rep.orientation_errors.push_back("cell " + std::to_string(c) + ": negative signed area");
    }

    for (int i = 0; i < n; ++i) {
      const int a = loop[static_cast<size_t>(i)];
      const int b = loop[static_cast<size_t>((i + 1) % n)];
      edge_use[{std::min(a, b), std::max(a, b)}].push_back({c, a < b});
    }
  }

  for (int v = 0; v < nv; ++v) {
    if (!used[static_cast<size_t>(v)]) {
      rep.dangling_edges.push_back("vertex " + std::to_string(v) + ": referenced by no cell");
    }
  }
  for (const auto& [key, uses] : edge_use) {
    const std::string name = "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) + ")";
    if (uses.size() > 2) {
      rep.conformity_errors.push_back(name + ": shared by more than 2 cells");
    } else if (uses.size() == 2 && uses[0].second == uses[1].second) {
      rep.orientation_errors.push_back(name + ": traversed twice in the same direction");
    }
  }

  // Hanging nodes: a used vertex lying strictly inside some cell edge.
  for (const auto& [key, uses] : edge_use) {
    (void)uses;
    const Point2 a = m.vertices[static_cast<size_t>(key.first)];
    const Point2 b = m.vertices[static_cast<size_t>(key.second)];
    const double len = distance(a, b);
    for (int v = 0; v < nv; ++v) {
      if (v == key.first || v == key.second || !used[static_cast<size_t>(v)]) continue;
      const Point2 p = m.vertices[static_cast<size_t>(v)];
      const double cross = std::abs((b - a).cross(p - a)) / len;
      const double t = (p - a).dot(b - a) / (len * len);
      if (cross < 1e-12 && t > 1e-9 && t < 1.0 - 1e-9) {
        rep.conformity_errors.push_back("vertex " + std::to_string(v) +
                                        " hangs on edge (" + std::to_string(key.first) + "," +
                                        std::to_string(key.second) + ")");
      }
    }
  }

  if (rho0 > 0.0) {
    for (int c = 0; c < m.num_cells(); ++c) {
      std::optional<Polygon> maybe;
      try {
        maybe.emplace(m.cell_polygon(c));
      } catch (const Error& e) {
        rep.conformity_errors.push_back("cell " + std::to_string(c) + ": " + e.what());
        continue;
      }
      const Polygon& poly = *maybe;
      const double h = poly.diameter();
      for (int e = 0; e < poly.num_vertices(); ++e) {
        if (poly.edge_length(e) < rho0 * h) {
          rep.edge_length_violations.push_back("cell " + std::to_string(c) + " edge " +
                                               std::to_string(e) + ": shorter than rho0*h_E");
        }
      }
      // Kernel shrunk by rho0*h_E must stay nonempty (half-plane intersection).
      std::vector<Point2> kernel = {{poly.centroid().x - 2 * h, poly.centroid().y - 2 * h},
                                    {poly.centroid().x + 2 * h, poly.centroid().y - 2 * h},
                                    {poly.centroid().x + 2 * h, poly.centroid().y + 2 * h},
                                    {poly.centroid().x - 2 * h, poly.centroid().y + 2 * h}};
      for (int e = 0; e < poly.num_vertices() && !kernel.empty(); ++e) {
        const LineEquation l = poly.edge_line(e);
        kernel = clip_halfplane(kernel, l.a, l.b, l.c + rho0 * h);
      }
      if (kernel.size() < 3) {
        rep.star_shape_violations.push_back("cell " + std::to_string(c) +
                                            ": no kernel ball of radius rho0*h_E");
      }
    }
  }
  return rep;
}

Mesh read_mesh_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw MeshError(std::string("mesh JSON parse failure: ") + e.what());
  }
  if (!j.contains("vertices") || !j.contains("cells")) {
    throw MeshError("mesh JSON must contain 'vertices' and 'cells'");
  }
  Mesh m;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2) throw MeshError("vertex entries must be [x, y]");
    m.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  for (const auto& cell : j["cells"]) {
    std::vector<int> loop;
    for (const auto& idx : cell) loop.push_back(idx.get<int>());
    if (loop.size() < 3) throw MeshError("cells need at least 3 vertices");
    for (int v : loop) {
      if (v < 0 || v >= m.num_vertices()) throw MeshError("cell references an invalid vertex");
    }
    // Normalize to CCW.
    double a2 = 0.0;
    for (size_t i = 0; i < loop.size(); ++i) {
      const Point2& p = m.vertices[static_cast<size_t>(loop[i])];
      const Point2& q = m.vertices[static_cast<size_t>(loop[(i + 1) % loop.size()])];
      a2 += p.cross(q);
    }
    if (a2 < 0.0) std::reverse(loop.begin(), loop.end());
    m.cells.push_back(std::move(loop));
  }
  m.build_topology();
  return m;
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  return read_mesh_json(in);
}

void write_mesh_json(const Mesh& m, std::ostream& out) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const Point2& v : m.vertices) j["vertices"].push_back({v.x, v.y});
  j["cells"] = m.cells;
  out << j.dump(1) << "\n";
}

void write_mesh_file(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open output file: " + path);
  write_mesh_json(m, out);
}

}  // namespace svem
