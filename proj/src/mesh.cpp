#include <goafem/mesh.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace goafem {

namespace {

std::uint64_t next_mesh_id()
{
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

std::array<Index, 2> sorted_pair(Index a, Index b)
{
  return a < b ? std::array<Index, 2>{a, b} : std::array<Index, 2>{b, a};
}

Point midpoint(const Point &a, const Point &b)
{
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

double angle_at(const Point &p, const Point &q, const Point &r)
{
  const Vec2 u = q - p;
  const Vec2 v = r - p;
  const double cross = u[0] * v[1] - u[1] * v[0];
  return std::atan2(std::abs(cross), dot(u, v));
}

} // namespace

Mesh::Mesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells,
           std::vector<Facet> boundary_facets, std::vector<int> generation)
  : dim_(dim)
  , vertices_(std::move(vertices))
  , cells_(std::move(cells))
  , boundary_facets_(std::move(boundary_facets))
  , generation_(std::move(generation))
  , id_(next_mesh_id())
{
  if (dim_ != 1 && dim_ != 2)
    throw InvalidArgument("mesh dimension must be 1 or 2");
  if (generation_.empty())
    generation_.assign(cells_.size(), 0);
  if (generation_.size() != cells_.size())
    throw DimensionMismatch("generation array does not match cell count");
  for (const Cell &c : cells_)
    for (int k = 0; k < dim_ + 1; ++k)
      if (c[k] >= vertices_.size())
        throw InvalidArgument("cell references a nonexistent vertex");
}

double Mesh::measure(Index c) const
{
  const Cell &cell = cells_.at(c);
  const Point &a = vertices_[cell[0]];
  const Point &b = vertices_[cell[1]];
  if (dim_ == 1)
    return b[0] - a[0];
  const Point &p = vertices_[cell[2]];
  return 0.5 * ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]));
}

Point Mesh::centroid(Index c) const
{
  const Cell &cell = cells_.at(c);
  Point s{0.0, 0.0};
  for (int k = 0; k <= dim_; ++k)
  {
    s[0] += vertices_[cell[k]][0];
    s[1] += vertices_[cell[k]][1];
  }
  return {s[0] / (dim_ + 1), s[1] / (dim_ + 1)};
}

double Mesh::cell_size(Index c) const
{
  const double m = measure(c);
  return dim_ == 1 ? m : std::sqrt(m);
}

double Mesh::domain_measure() const
{
  double total = 0.0;
  for (Index c = 0; c < n_cells(); ++c)
    total += measure(c);
  return total;
}

bool RefinementRelation::is_refined(Index coarse_cell) const
{
  return std::binary_search(refined_set.begin(), refined_set.end(), coarse_cell);
}

Topology build_topology(const Mesh &mesh)
{
  Topology topo;
  const Index nc = mesh.n_cells();
  topo.cell_edges.resize(nc);
  std::map<std::array<Index, 2>, Index> lookup;

  const int n_local = mesh.dim() == 1 ? 2 : 3;
  for (Index c = 0; c < nc; ++c)
  {
    const Cell &cell = mesh.cell(c);
    topo.cell_edges[c] = {invalid_index, invalid_index, invalid_index};
    for (int k = 0; k < n_local; ++k)
    {
      // In 1D the "edges" are the vertices themselves.
      const std::array<Index, 2> key = mesh.dim() == 1
                                         ? std::array<Index, 2>{cell[k], cell[k]}
                                         : sorted_pair(cell[k], cell[(k + 1) % 3]);
      auto [it, inserted] = lookup.try_emplace(key, topo.edges.size());
      if (inserted)
      {
        topo.edges.push_back(key);
        topo.edge_cells.push_back({c, invalid_index});
      }
      else
      {
        topo.edge_cells[it->second][1] = c;
      }
      topo.cell_edges[c][k] = it->second;
    }
  }
  return topo;
}

Mesh initial_mesh_1d(double a, double b, Index n)
{
  if (!(a < b))
    throw InvalidArgument("initial_mesh_1d requires a < b");
  if (n == 0)
    throw InvalidArgument("initial_mesh_1d requires at least one interval");
  std::vector<Point> vertices(n + 1);
  for (Index k = 0; k <= n; ++k)
    vertices[k] = {k == n ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(n), 0.0};
  std::vector<Cell> cells(n);
  for (Index k = 0; k < n; ++k)
    cells[k] = {k, k + 1, invalid_index};
  std::vector<Facet> boundary{{0, invalid_index}, {n, invalid_index}};
  return Mesh(1, std::move(vertices), std::move(cells), std::move(boundary));
}

Mesh initial_mesh_unit_square()
{
  std::vector<Point> vertices{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  // Local edge 0-1 is the diagonal in both triangles.
  std::vector<Cell> cells{{2, 0, 1}, {0, 2, 3}};
  std::vector<Facet> boundary{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return Mesh(2, std::move(vertices), std::move(cells), std::move(boundary));
}

namespace {

std::pair<Mesh, RefinementRelation> refine_1d(const Mesh &mesh, const std::vector<char> &flag)
{
  std::vector<Point> vertices = mesh.vertices();
  std::vector<Cell> cells;
  std::vector<int> generation;
  RefinementRelation rel;
  rel.coarse_mesh_id = mesh.id();
  cells.reserve(mesh.n_cells() * 2);

  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    const Cell &cell = mesh.cell(c);
    const int gen = mesh.generation()[c];
    if (!flag[c])
    {
      cells.push_back(cell);
      generation.push_back(gen);
      rel.parent_of.push_back(c);
      continue;
    }
    const Index mid = vertices.size();
    vertices.push_back(midpoint(mesh.vertex(cell[0]), mesh.vertex(cell[1])));
    cells.push_back({cell[0], mid, invalid_index});
    cells.push_back({mid, cell[1], invalid_index});
    generation.insert(generation.end(), 2, gen + 1);
    rel.parent_of.insert(rel.parent_of.end(), 2, c);
    rel.refined_set.push_back(c);
  }
  Mesh fine(1, std::move(vertices), std::move(cells), mesh.boundary_facets(), std::move(generation));
  rel.fine_mesh_id = fine.id();
  return {std::move(fine), std::move(rel)};
}

std::pair<Mesh, RefinementRelation> refine_2d(const Mesh &mesh, const std::vector<char> &flag)
{
  const Topology topo = build_topology(mesh);
  std::vector<char> edge_marked(topo.edges.size(), 0);
  for (Index c = 0; c < mesh.n_cells(); ++c)
    if (flag[c])
      edge_marked[topo.cell_edges[c][0]] = 1;

  // Closure: a triangle with any bisected edge must bisect its reference edge.
  bool changed = true;
  while (changed)
  {
    changed = false;
    for (Index c = 0; c < mesh.n_cells(); ++c)
    {
      const auto &ce = topo.cell_edges[c];
      if (!edge_marked[ce[0]] && (edge_marked[ce[1]] || edge_marked[ce[2]]))
      {
        edge_marked[ce[0]] = 1;
        changed = true;
      }
    }
  }

  std::vector<Point> vertices = mesh.vertices();
  std::vector<Index> edge_mid(topo.edges.size(), invalid_index);
  auto mid_of = [&](Index e) {
    if (edge_mid[e] == invalid_index)
    {
      edge_mid[e] = vertices.size();
      vertices.push_back(midpoint(mesh.vertex(topo.edges[e][0]), mesh.vertex(topo.edges[e][1])));
    }
    return edge_mid[e];
  };

  std::vector<Cell> cells;
  std::vector<int> generation;
  RefinementRelation rel;
  rel.coarse_mesh_id = mesh.id();
  cells.reserve(mesh.n_cells() * 2);

  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    const Cell &t = mesh.cell(c);
    const auto &ce = topo.cell_edges[c];
    const int gen = mesh.generation()[c];
    auto emit = [&](Cell child, int g) {
      cells.push_back(child);
      generation.push_back(g);
      rel.parent_of.push_back(c);
    };
    if (!edge_marked[ce[0]])
    {
      emit(t, gen);
      continue;
    }
    rel.refined_set.push_back(c);
    const Index m = mid_of(ce[0]);
    // Children of (v0, v1, v2): left (v2, v0, m) and right (v1, v2, m).
    const Cell left{t[2], t[0], m};
    const Cell right{t[1], t[2], m};
    if (edge_marked[ce[2]]) // edge v2-v0 is the reference edge of the left child
    {
      const Index m2 = mid_of(ce[2]);
      emit({left[2], left[0], m2}, gen + 2);
      emit({left[1], left[2], m2}, gen + 2);
    }
    else
    {
      emit(left, gen + 1);
    }
    if (edge_marked[ce[1]]) // edge v1-v2 is the reference edge of the right child
    {
      const Index m1 = mid_of(ce[1]);
      emit({right[2], right[0], m1}, gen + 2);
      emit({right[1], right[2], m1}, gen + 2);
    }
    else
    {
      emit(right, gen + 1);
    }
  }

  std::map<std::array<Index, 2>, Index> boundary_edge;
  for (Index e = 0; e < topo.edges.size(); ++e)
    if (topo.is_boundary(e))
      boundary_edge.emplace(topo.edges[e], e);

  std::vector<Facet> boundary;
  for (const Facet &f : mesh.boundary_facets())
  {
    const auto it = boundary_edge.find(sorted_pair(f[0], f[1]));
    const Index e = it == boundary_edge.end() ? invalid_index : it->second;
    if (e != invalid_index && edge_marked[e])
    {
      boundary.push_back({f[0], edge_mid[e]});
      boundary.push_back({edge_mid[e], f[1]});
    }
    else
    {
      boundary.push_back(f);
    }
  }

  Mesh fine(2, std::move(vertices), std::move(cells), std::move(boundary), std::move(generation));
  rel.fine_mesh_id = fine.id();
  return {std::move(fine), std::move(rel)};
}

} // namespace

std::pair<Mesh, RefinementRelation> refine(const Mesh &mesh, std::span<const Index> marked)
{
  std::vector<char> flag(mesh.n_cells(), 0);
  for (Index c : marked)
  {
    if (c >= mesh.n_cells())
      throw InvalidArgument("marked cell index " + std::to_string(c) + " out of range");
    flag[c] = 1;
  }
  return mesh.dim() == 1 ? refine_1d(mesh, flag) : refine_2d(mesh, flag);
}

std::pair<Mesh, RefinementRelation> uniform_refine(const Mesh &mesh)
{
  std::vector<Index> all(mesh.n_cells());
  for (Index c = 0; c < all.size(); ++c)
    all[c] = c;
  return refine(mesh, all);
}

double min_angle(const Mesh &mesh, Index c)
{
  const Cell &t = mesh.cell(c);
  const Point &a = mesh.vertex(t[0]);
  const Point &b = mesh.vertex(t[1]);
  const Point &p = mesh.vertex(t[2]);
  return std::min({angle_at(a, b, p), angle_at(b, p, a), angle_at(p, a, b)});
}

MeshQuality mesh_quality(const Mesh &mesh)
{
  MeshQuality q;
  q.h_min = std::numeric_limits<double>::infinity();
  q.min_angle = mesh.dim() == 2 ? std::numbers::pi : 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    const double h = mesh.cell_size(c);
    q.h_max = std::max(q.h_max, h);
    q.h_min = std::min(q.h_min, h);
    if (mesh.dim() == 2)
      q.min_angle = std::min(q.min_angle, min_angle(mesh, c));
  }
  return q;
}

std::string check_mesh(const Mesh &mesh)
{
  std::ostringstream msg;
  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    if (!(mesh.measure(c) > 0.0))
    {
      msg << "cell " << c << " has nonpositive measure " << mesh.measure(c);
      return msg.str();
    }
  }

  std::vector<Point> sorted = mesh.vertices();
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    return "duplicate vertices";

  const Topology topo = build_topology(mesh);
  std::vector<std::array<Index, 2>> boundary;
  for (const Facet &f : mesh.boundary_facets())
    boundary.push_back(mesh.dim() == 1 ? std::array<Index, 2>{f[0], f[0]} : sorted_pair(f[0], f[1]));
  std::sort(boundary.begin(), boundary.end());

  Index n_boundary = 0;
  for (Index e = 0; e < topo.edges.size(); ++e)
  {
    const bool listed = std::binary_search(boundary.begin(), boundary.end(), topo.edges[e]);
    if (topo.is_boundary(e))
    {
      ++n_boundary;
      if (!listed)
      {
        msg << "facet (" << topo.edges[e][0] << "," << topo.edges[e][1]
            << ") has one neighbor but is not a boundary facet (hanging node)";
        return msg.str();
      }
    }
    else if (listed)
    {
      msg << "boundary facet (" << topo.edges[e][0] << "," << topo.edges[e][1] << ") has two neighbors";
      return msg.str();
    }
  }
  if (n_boundary != boundary.size())
    return "boundary facet list does not match the mesh";

  // A facet shared by more than two cells shows up as a repeated
  // (cell, local facet) assignment to the same edge.
  std::vector<int> uses(topo.edges.size(), 0);
  for (const auto &ce : topo.cell_edges)
    for (int k = 0; k < (mesh.dim() == 1 ? 2 : 3); ++k)
      ++uses[ce[k]];
  for (Index e = 0; e < uses.size(); ++e)
    if (uses[e] > 2)
    {
      msg << "facet " << e << " shared by " << uses[e] << " cells";
      return msg.str();
    }
  return {};
}

void write_vtk(std::ostream &out, const Mesh &mesh,
               const std::vector<std::pair<std::string, std::span<const double>>> &cell_data)
{
  const int nv = mesh.vertices_per_cell();
  out << "# vtk DataFile Version 3.0\n";
  out << "goafem mesh\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out.precision(17);
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Point &p : mesh.vertices())
    out << p[0] << ' ' << p[1] << " 0\n";
  out << "CELLS " << mesh.n_cells() << ' ' << mesh.n_cells() * (nv + 1) << '\n';
  for (const Cell &c : mesh.cells())
  {
    out << nv;
    for (int k = 0; k < nv; ++k)
      out << ' ' << c[k];
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.n_cells() << '\n';
  const int type = mesh.dim() == 1 ? 3 : 5;
  for (Index c = 0; c < mesh.n_cells(); ++c)
    out << type << '\n';
  if (cell_data.empty())
    return;
  out << "CELL_DATA " << mesh.n_cells() << '\n';
  for (const auto &[name, values] : cell_data)
  {
    if (values.size() != mesh.n_cells())
      throw DimensionMismatch("cell data '" + name + "' has wrong length");
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double v : values)
      out << v << '\n';
  }
}

} // namespace goafem
