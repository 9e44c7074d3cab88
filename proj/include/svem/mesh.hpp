#ifndef SVEM_MESH_HPP
#define SVEM_MESH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "svem/geometry.hpp"

namespace svem {

struct MeshError : Error {
  using Error::Error;
};

/// Conforming polygonal mesh: a list of vertices and CCW cell loops.
/// Topology (edge table, boundary flags) is derived by build_topology(),
/// which every generator and the JSON reader call before returning.
class Mesh {
 public:
  std::vector<Point2> vertices;
  std::vector<std::vector<int>> cells;

  /// Undirected edge, endpoints stored with v0 < v1 (canonical direction
  /// v0 -> v1). An interior edge has two incident cells, a boundary edge one.
  struct Edge {
    int v0 = -1, v1 = -1;
    int cell_a = -1;  // traverses v0 -> v1
    int cell_b = -1;  // traverses v1 -> v0
  };

  /// Builds the edge table and boundary flags; throws MeshError on
  /// non-conforming input (an edge used more than twice or twice with the
  /// same orientation, invalid indices, degenerate cells).
  void build_topology();

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Edge>& edges() const { return edges_; }
  /// Edge index for the unordered pair {a, b}; -1 if absent.
  int find_edge(int a, int b) const;
  /// Per cell, the edge index of each loop edge (edge i goes from loop
  /// vertex i to loop vertex i+1).
  const std::vector<int>& cell_edge_ids(int c) const { return cell_edges_[static_cast<size_t>(c)]; }

  bool vertex_on_boundary(int v) const { return vertex_boundary_[static_cast<size_t>(v)]; }
  bool edge_on_boundary(int e) const { return edges_[static_cast<size_t>(e)].cell_b < 0; }

  Polygon cell_polygon(int c) const;
  double total_area() const;
  /// Max cell diameter.
  double mesh_size() const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> cell_edges_;
  std::vector<bool> vertex_boundary_;
  std::map<std::pair<int, int>, int> edge_ids_;
};

/// n x n unit-square grid on ]0,1[^2.
Mesh gen_square_grid(int n);

/// n x n grid whose interior vertices get the alternating vertical offset
/// (-1)^(i+j) * sigma / n. Every cell is a trapezoid with two parallel
/// vertical edges, non-affine uniformly in n.
Mesh gen_trapezoid_grid(int n, double sigma);

/// Voronoi diagram of n_cells random seeds clipped to the unit square,
/// regularized by n_iter Lloyd iterations. Deterministic for a given seed.
/// Retries with a perturbed seed when a cell collapses; throws MeshError
/// after 10 attempts.
Mesh gen_voronoi_lloyd(int n_cells, int n_iter, std::uint64_t seed);

/// Report-valued mesh diagnostics. rho0 > 0 additionally enables the
/// edge-length (|e| >= rho0 * h_E) and star-shapedness checks.
struct MeshReport {
  std::vector<std::string> orientation_errors;
  std::vector<std::string> conformity_errors;
  std::vector<std::string> dangling_edges;
  std::vector<std::string> edge_length_violations;
  std::vector<std::string> star_shape_violations;

  bool clean() const {
    return orientation_errors.empty() && conformity_errors.empty() && dangling_edges.empty() &&
           edge_length_violations.empty() && star_shape_violations.empty();
  }
};
MeshReport validate_mesh(const Mesh& m, double rho0);

/// JSON mesh format: { "vertices": [[x,y],...], "cells": [[i0,i1,...],...] },
/// zero-based indices. The reader normalizes cell orientation to CCW.
Mesh read_mesh_json(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh_json(const Mesh& m, std::ostream& out);
void write_mesh_file(const Mesh& m, const std::string& path);

}  // namespace svem

#endif
