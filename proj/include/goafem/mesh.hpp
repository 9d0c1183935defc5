#pragma once

#include <goafem/types.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace goafem {

/// Element vertex indices. Intervals use the first two entries. Triangles
/// are ordered counterclockwise with the reference edge between local
/// vertices 0 and 1, i.e. local vertex 2 is the newest vertex.
using Cell = std::array<Index, 3>;

/// Facet vertex indices; 1D facets are single vertices (second entry unused).
using Facet = std::array<Index, 2>;

/**
 * Conforming simplicial triangulation of an interval (d = 1) or of a
 * polygon (d = 2). Immutable after construction; refinement produces a new
 * mesh. Every mesh carries an identifier that is preserved by copies so that
 * per-element data can be bound to the mesh it was computed on.
 */
class Mesh
{
public:
  Mesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells,
       std::vector<Facet> boundary_facets, std::vector<int> generation = {});

  int dim() const noexcept { return dim_; }
  std::uint64_t id() const noexcept { return id_; }

  Index n_vertices() const noexcept { return vertices_.size(); }
  Index n_cells() const noexcept { return cells_.size(); }
  int vertices_per_cell() const noexcept { return dim_ + 1; }

  const std::vector<Point> &vertices() const noexcept { return vertices_; }
  const std::vector<Cell> &cells() const noexcept { return cells_; }
  const std::vector<Facet> &boundary_facets() const noexcept { return boundary_facets_; }
  const std::vector<int> &generation() const noexcept { return generation_; }

  const Point &vertex(Index v) const { return vertices_.at(v); }
  const Cell &cell(Index c) const { return cells_.at(c); }

  /// Interval length or (signed, counterclockwise positive) triangle area.
  double measure(Index c) const;
  Point centroid(Index c) const;
  /// h_T = |T|^{1/d}.
  double cell_size(Index c) const;
  double domain_measure() const;

private:
  int dim_;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<Facet> boundary_facets_;
  std::vector<int> generation_;
  std::uint64_t id_;
};

/**
 * Edge connectivity of a 2D mesh (vertex connectivity in 1D). Local edge k of
 * a triangle joins local vertices (k, k+1 mod 3), so local edge 0 is the
 * reference edge.
 */
struct Topology
{
  std::vector<std::array<Index, 2>> edges;      // sorted vertex pairs
  std::vector<std::array<Index, 3>> cell_edges; // per cell, local edge -> edge
  std::vector<std::array<Index, 2>> edge_cells; // second entry invalid on boundary

  bool is_boundary(Index e) const { return edge_cells[e][1] == invalid_index; }
};

Topology build_topology(const Mesh &mesh);

/// Maps fine cells to their coarse parents and records which coarse cells
/// were bisected.
struct RefinementRelation
{
  std::vector<Index> parent_of;   // fine cell -> coarse cell
  std::vector<Index> refined_set; // ascending coarse indices, T_H \ T_h
  std::uint64_t coarse_mesh_id = 0;
  std::uint64_t fine_mesh_id = 0;

  bool is_refined(Index coarse_cell) const;
};

Mesh initial_mesh_1d(double a, double b, Index n);

/// Two counterclockwise triangles on (0,1)^2 sharing the (0,0)-(1,1)
/// diagonal as the reference edge of both.
Mesh initial_mesh_unit_square();

/// Bisects every marked cell. In 2D newest vertex bisection is closed by
/// marking reference edges until every triangle with a marked edge also has
/// its reference edge marked; each triangle is then split into 2, 3 or 4
/// children.
std::pair<Mesh, RefinementRelation> refine(const Mesh &mesh, std::span<const Index> marked);

std::pair<Mesh, RefinementRelation> uniform_refine(const Mesh &mesh);

struct MeshQuality
{
  double h_max = 0.0;
  double h_min = 0.0;
  double min_angle = 0.0; // radians, 2D only
};

MeshQuality mesh_quality(const Mesh &mesh);

/// Smallest interior angle of one triangle.
double min_angle(const Mesh &mesh, Index c);

/// Checks positivity of cell measures, facet matching and vertex uniqueness.
/// Returns an empty string when the mesh is valid, otherwise a description
/// of the first violation.
std::string check_mesh(const Mesh &mesh);

/// Legacy ASCII VTK. Cell data arrays must have one value per cell.
void write_vtk(std::ostream &out, const Mesh &mesh,
               const std::vector<std::pair<std::string, std::span<const double>>> &cell_data = {});

} // namespace goafem
