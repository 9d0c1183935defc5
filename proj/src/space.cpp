#include <goafem/space.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace goafem {

Point CellGeometry::map(const Point &ref) const
{
  if (dim == 1)
    return {origin[0] + jacobian[0][0] * ref[0], 0.0};
  return {origin[0] + jacobian[0][0] * ref[0] + jacobian[0][1] * ref[1],
          origin[1] + jacobian[1][0] * ref[0] + jacobian[1][1] * ref[1]};
}

Point CellGeometry::to_reference(const Point &x) const
{
  const Vec2 d = x - origin;
  if (dim == 1)
    return {d[0] * inv_jacobian[0][0], 0.0};
  return matvec(inv_jacobian, d);
}

Vec2 CellGeometry::physical_gradient(const Vec2 &g) const
{
  if (dim == 1)
    return {g[0] * inv_jacobian[0][0], 0.0};
  // J^{-T} g
  return {inv_jacobian[0][0] * g[0] + inv_jacobian[1][0] * g[1],
          inv_jacobian[0][1] * g[0] + inv_jacobian[1][1] * g[1]};
}

Mat2 CellGeometry::physical_hessian(const Mat2 &h) const
{
  if (dim == 1)
    return {{{h[0][0] * inv_jacobian[0][0] * inv_jacobian[0][0], 0.0}, {0.0, 0.0}}};
  const Mat2 &k = inv_jacobian;
  Mat2 out{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
    {
      double s = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          s += k[i][a] * h[i][j] * k[j][b];
      out[a][b] = s;
    }
  return out;
}

CellGeometry cell_geometry(const Mesh &mesh, Index c)
{
  CellGeometry g;
  g.dim = mesh.dim();
  const Cell &cell = mesh.cell(c);
  const Point &v0 = mesh.vertex(cell[0]);
  const Point &v1 = mesh.vertex(cell[1]);
  g.origin = v0;
  if (g.dim == 1)
  {
    const double h = v1[0] - v0[0];
    g.jacobian = {{{h, 0.0}, {0.0, 1.0}}};
    g.inv_jacobian = {{{1.0 / h, 0.0}, {0.0, 1.0}}};
    g.det = h;
    return g;
  }
  const Point &v2 = mesh.vertex(cell[2]);
  g.jacobian = {{{v1[0] - v0[0], v2[0] - v0[0]}, {v1[1] - v0[1], v2[1] - v0[1]}}};
  g.det = g.jacobian[0][0] * g.jacobian[1][1] - g.jacobian[0][1] * g.jacobian[1][0];
  g.inv_jacobian = {{{g.jacobian[1][1] / g.det, -g.jacobian[0][1] / g.det},
                     {-g.jacobian[1][0] / g.det, g.jacobian[0][0] / g.det}}};
  return g;
}

namespace {

std::vector<Point> reference_nodes_for(int dim, int degree)
{
  std::vector<Point> nodes;
  if (dim == 1)
  {
    nodes.push_back({0.0, 0.0});
    nodes.push_back({1.0, 0.0});
    for (int k = 1; k < degree; ++k)
      nodes.push_back({static_cast<double>(k) / degree, 0.0});
    return nodes;
  }
  nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (degree == 2)
  {
    nodes.push_back({0.5, 0.0});
    nodes.push_back({0.5, 0.5});
    nodes.push_back({0.0, 0.5});
  }
  return nodes;
}

void check_degree(int dim, int degree)
{
  const int max_degree = dim == 1 ? 4 : 2;
  if (degree < 1 || degree > max_degree)
    throw InvalidArgument("unsupported polynomial degree " + std::to_string(degree) + " for dimension " +
                          std::to_string(dim));
}

} // namespace

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree)
  : mesh_(std::move(mesh))
  , degree_(degree)
{
  if (!mesh_)
    throw InvalidArgument("FeSpace requires a mesh");
  const int d = mesh_->dim();
  check_degree(d, degree_);
  dofs_per_cell_ = d == 1 ? degree_ + 1 : (degree_ + 1) * (degree_ + 2) / 2;
  topology_ = build_topology(*mesh_);
  reference_nodes_ = reference_nodes_for(d, degree_);

  const Index nv = mesh_->n_vertices();
  const Index nc = mesh_->n_cells();
  Index n_dofs = nv;
  if (d == 1)
    n_dofs += nc * static_cast<Index>(degree_ - 1);
  else if (degree_ == 2)
    n_dofs += topology_.edges.size();

  dof_coords_.assign(n_dofs, Point{0.0, 0.0});
  boundary_mask_.assign(n_dofs, 0);
  cell_dofs_.resize(nc * dofs_per_cell_);

  for (Index v = 0; v < nv; ++v)
    dof_coords_[v] = mesh_->vertex(v);

  for (Index c = 0; c < nc; ++c)
  {
    const Cell &cell = mesh_->cell(c);
    Index *dofs = cell_dofs_.data() + c * dofs_per_cell_;
    for (int k = 0; k <= d; ++k)
      dofs[k] = cell[k];
    if (d == 1)
    {
      const CellGeometry geo = cell_geometry(*mesh_, c);
      for (int k = 1; k < degree_; ++k)
      {
        const Index dof = nv + c * static_cast<Index>(degree_ - 1) + static_cast<Index>(k - 1);
        dofs[1 + k] = dof;
        dof_coords_[dof] = geo.map(reference_nodes_[1 + k]);
      }
    }
    else if (degree_ == 2)
    {
      for (int k = 0; k < 3; ++k)
      {
        const Index e = topology_.cell_edges[c][k];
        const Index dof = nv + e;
        dofs[3 + k] = dof;
        const Point &a = mesh_->vertex(topology_.edges[e][0]);
        const Point &b = mesh_->vertex(topology_.edges[e][1]);
        dof_coords_[dof] = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      }
    }
  }

  for (const Facet &f : mesh_->boundary_facets())
  {
    boundary_mask_[f[0]] = 1;
    if (d == 2)
      boundary_mask_[f[1]] = 1;
  }
  if (d == 2 && degree_ == 2)
    for (Index e = 0; e < topology_.edges.size(); ++e)
      if (topology_.is_boundary(e))
        boundary_mask_[nv + e] = 1;

  for (Index i = 0; i < n_dofs; ++i)
    if (!boundary_mask_[i])
      interior_dofs_.push_back(i);
}

FeSpace build_space(std::shared_ptr<const Mesh> mesh, int degree) { return FeSpace(std::move(mesh), degree); }

FeSpace build_space(const Mesh &mesh, int degree)
{
  return FeSpace(std::make_shared<const Mesh>(mesh), degree);
}

ReferenceShape reference_shape(int dim, int degree, const Point &ref)
{
  ReferenceShape s;
  if (dim == 1)
  {
    const std::vector<Point> nodes = reference_nodes_for(1, degree);
    const int n = degree + 1;
    const double t = ref[0];
    s.value.resize(n);
    s.grad.assign(n, Vec2{0.0, 0.0});
    s.hessian.assign(n, Mat2{});
    for (int j = 0; j < n; ++j)
    {
      double denom = 1.0;
      for (int k = 0; k < n; ++k)
        if (k != j)
          denom *= nodes[j][0] - nodes[k][0];
      auto prod_except = [&](int a, int b, int c) {
        double p = 1.0;
        for (int k = 0; k < n; ++k)
          if (k != a && k != b && k != c)
            p *= t - nodes[k][0];
        return p;
      };
      double d1 = 0.0;
      double d2 = 0.0;
      for (int l = 0; l < n; ++l)
      {
        if (l == j)
          continue;
        d1 += prod_except(j, l, j);
        for (int r = 0; r < n; ++r)
          if (r != j && r != l)
            d2 += prod_except(j, l, r);
      }
      s.value[j] = prod_except(j, j, j) / denom;
      s.grad[j] = {d1 / denom, 0.0};
      s.hessian[j][0][0] = d2 / denom;
    }
    return s;
  }

  const double l0 = 1.0 - ref[0] - ref[1];
  const std::array<double, 3> lam{l0, ref[0], ref[1]};
  const std::array<Vec2, 3> dlam{Vec2{-1.0, -1.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  auto outer = [](const Vec2 &a, const Vec2 &b) {
    return Mat2{{{a[0] * b[0], a[0] * b[1]}, {a[1] * b[0], a[1] * b[1]}}};
  };
  if (degree == 1)
  {
    s.value.assign(lam.begin(), lam.end());
    s.grad.assign(dlam.begin(), dlam.end());
    s.hessian.assign(3, Mat2{});
    return s;
  }
  s.value.resize(6);
  s.grad.resize(6);
  s.hessian.resize(6);
  for (int i = 0; i < 3; ++i)
  {
    s.value[i] = lam[i] * (2.0 * lam[i] - 1.0);
    s.grad[i] = (4.0 * lam[i] - 1.0) * dlam[i];
    const Mat2 o = outer(dlam[i], dlam[i]);
    s.hessian[i] = {{{4.0 * o[0][0], 4.0 * o[0][1]}, {4.0 * o[1][0], 4.0 * o[1][1]}}};
  }
  for (int k = 0; k < 3; ++k)
  {
    const int i = k;
    const int j = (k + 1) % 3;
    s.value[3 + k] = 4.0 * lam[i] * lam[j];
    s.grad[3 + k] = 4.0 * (lam[i] * dlam[j] + lam[j] * dlam[i]);
    const Mat2 a = outer(dlam[i], dlam[j]);
    const Mat2 b = outer(dlam[j], dlam[i]);
    s.hessian[3 + k] = {{{4.0 * (a[0][0] + b[0][0]), 4.0 * (a[0][1] + b[0][1])},
                         {4.0 * (a[1][0] + b[1][0]), 4.0 * (a[1][1] + b[1][1])}}};
  }
  return s;
}

BasisValues evaluate_basis(const FeSpace &space, Index c, std::span<const Point> ref_points)
{
  const CellGeometry geo = cell_geometry(space.mesh(), c);
  BasisValues bv;
  bv.n_points = ref_points.size();
  bv.n_basis = static_cast<std::size_t>(space.dofs_per_cell());
  bv.points.reserve(bv.n_points);
  bv.value.reserve(bv.n_points * bv.n_basis);
  bv.grad.reserve(bv.n_points * bv.n_basis);
  bv.hessian.reserve(bv.n_points * bv.n_basis);
  for (const Point &ref : ref_points)
  {
    bv.points.push_back(geo.map(ref));
    const ReferenceShape s = reference_shape(space.dim(), space.degree(), ref);
    for (std::size_t i = 0; i < bv.n_basis; ++i)
    {
      bv.value.push_back(s.value[i]);
      bv.grad.push_back(geo.physical_gradient(s.grad[i]));
      bv.hessian.push_back(geo.physical_hessian(s.hessian[i]));
    }
  }
  return bv;
}

LocalEvaluation eval_local(const FeSpace &space, std::span<const double> coeffs, Index c,
                           std::span<const Point> ref_points)
{
  if (coeffs.size() != space.n_dofs())
    throw DimensionMismatch("coefficient vector does not match the space");
  if (c >= space.mesh().n_cells())
    throw InvalidArgument("cell index out of range");
  const BasisValues bv = evaluate_basis(space, c, ref_points);
  const auto dofs = space.cell_dofs(c);
  LocalEvaluation out;
  out.points = bv.points;
  out.values.assign(bv.n_points, 0.0);
  out.gradients.assign(bv.n_points, Vec2{0.0, 0.0});
  for (std::size_t q = 0; q < bv.n_points; ++q)
    for (std::size_t i = 0; i < bv.n_basis; ++i)
    {
      const double u = coeffs[dofs[i]];
      out.values[q] += u * bv.phi(q, i);
      out.gradients[q] = out.gradients[q] + u * bv.dphi(q, i);
    }
  return out;
}

std::vector<double> prolongate(const FeSpace &coarse, const FeSpace &fine,
                               const RefinementRelation &relation, std::span<const double> coeffs)
{
  if (coeffs.size() != coarse.n_dofs())
    throw DimensionMismatch("prolongate: coefficient vector does not match the coarse space");
  if (relation.parent_of.size() != fine.mesh().n_cells())
    throw DimensionMismatch("prolongate: refinement relation does not match the fine mesh");
  if (coarse.degree() != fine.degree() || coarse.dim() != fine.dim())
    throw DimensionMismatch("prolongate: spaces differ in degree or dimension");

  std::vector<double> out(fine.n_dofs(), 0.0);
  std::vector<char> done(fine.n_dofs(), 0);
  for (Index c = 0; c < fine.mesh().n_cells(); ++c)
  {
    const Index parent = relation.parent_of[c];
    const auto fine_dofs = fine.cell_dofs(c);
    const auto coarse_dofs = coarse.cell_dofs(parent);
    const CellGeometry geo = cell_geometry(coarse.mesh(), parent);
    for (std::size_t i = 0; i < fine_dofs.size(); ++i)
    {
      const Index dof = fine_dofs[i];
      if (done[dof])
        continue;
      const Point ref = geo.to_reference(fine.dof_coords()[dof]);
      // Nodes shared with the coarse space keep their value bit for bit, so
      // functions on unrefined cells are reproduced exactly.
      const auto &nodes = coarse.reference_nodes();
      const auto same = std::find_if(nodes.begin(), nodes.end(), [&](const Point &p) {
        return std::abs(p[0] - ref[0]) + std::abs(p[1] - ref[1]) < 1e-10;
      });
      if (same != nodes.end())
      {
        out[dof] = coeffs[coarse_dofs[same - nodes.begin()]];
        done[dof] = 1;
        continue;
      }
      const ReferenceShape s = reference_shape(coarse.dim(), coarse.degree(), ref);
      // Coarse basis functions of interior DOFs vanish on the boundary.
      const bool on_boundary = fine.is_boundary_dof(dof);
      double v = 0.0;
      for (std::size_t j = 0; j < coarse_dofs.size(); ++j)
        if (!on_boundary || coarse.is_boundary_dof(coarse_dofs[j]))
          v += coeffs[coarse_dofs[j]] * s.value[j];
      out[dof] = v;
      done[dof] = 1;
    }
  }
  return out;
}

std::vector<double> interpolate(const FeSpace &space, const std::function<double(const Point &)> &fn)
{
  std::vector<double> out(space.n_dofs());
  for (Index i = 0; i < space.n_dofs(); ++i)
    out[i] = fn(space.dof_coords()[i]);
  return out;
}

Index locate_cell(const Mesh &mesh, const Point &x, double tol)
{
  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    const CellGeometry geo = cell_geometry(mesh, c);
    const Point r = geo.to_reference(x);
    if (mesh.dim() == 1)
    {
      if (r[0] >= -tol && r[0] <= 1.0 + tol)
        return c;
    }
    else if (r[0] >= -tol && r[1] >= -tol && r[0] + r[1] <= 1.0 + tol)
    {
      return c;
    }
  }
  return invalid_index;
}

double evaluate_at(const FeSpace &space, std::span<const double> coeffs, const Point &x)
{
  const Index c = locate_cell(space.mesh(), x);
  if (c == invalid_index)
    throw InvalidArgument("evaluation point outside the mesh");
  const Point ref = cell_geometry(space.mesh(), c).to_reference(x);
  const auto e = eval_local(space, coeffs, c, std::span<const Point>(&ref, 1));
  return e.values[0];
}

} // namespace goafem
