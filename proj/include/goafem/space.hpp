#pragma once

#include <goafem/mesh.hpp>
#include <goafem/quadrature.hpp>

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace goafem {

/// Affine map from the reference element to a mesh cell.
struct CellGeometry
{
  int dim = 1;
  Point origin{};
  Mat2 jacobian{};     // columns are v1 - v0 and v2 - v0 (1D: jacobian[0][0] = h)
  Mat2 inv_jacobian{}; // inverse of jacobian
  double det = 0.0;    // interval length, or twice the triangle area

  Point map(const Point &ref) const;
  Point to_reference(const Point &x) const;
  /// Maps a reference gradient to physical coordinates (J^{-T} g).
  Vec2 physical_gradient(const Vec2 &ref_grad) const;
  /// Maps a reference Hessian to physical coordinates (J^{-T} H J^{-1}).
  Mat2 physical_hessian(const Mat2 &ref_hessian) const;
};

CellGeometry cell_geometry(const Mesh &mesh, Index c);

/**
 * Continuous Lagrange finite element space of degree m on equispaced element
 * nodes, with homogeneous Dirichlet data imposed by excluding boundary DOFs.
 * Supported degrees: 1..4 in 1D, 1..2 in 2D.
 *
 * DOF layout: vertex DOFs first (global index = vertex index), then edge
 * midpoints in 2D (P2) or element-interior nodes in 1D.
 */
class FeSpace
{
public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh &mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const Mesh> &mesh_ptr() const noexcept { return mesh_; }
  const Topology &topology() const noexcept { return topology_; }

  int dim() const noexcept { return mesh_->dim(); }
  int degree() const noexcept { return degree_; }
  Index n_dofs() const noexcept { return dof_coords_.size(); }
  int dofs_per_cell() const noexcept { return dofs_per_cell_; }

  std::span<const Index> cell_dofs(Index c) const
  {
    return {cell_dofs_.data() + c * dofs_per_cell_, static_cast<std::size_t>(dofs_per_cell_)};
  }

  const std::vector<Point> &dof_coords() const noexcept { return dof_coords_; }
  const std::vector<Index> &interior_dofs() const noexcept { return interior_dofs_; }
  bool is_boundary_dof(Index i) const { return boundary_mask_[i] != 0; }

  /// Local node positions on the reference element, in local DOF order.
  const std::vector<Point> &reference_nodes() const noexcept { return reference_nodes_; }

private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int dofs_per_cell_;
  Topology topology_;
  std::vector<Index> cell_dofs_;
  std::vector<Point> dof_coords_;
  std::vector<char> boundary_mask_;
  std::vector<Index> interior_dofs_;
  std::vector<Point> reference_nodes_;
};

FeSpace build_space(std::shared_ptr<const Mesh> mesh, int degree);
FeSpace build_space(const Mesh &mesh, int degree);

/// Reference basis values, gradients and Hessians at one reference point.
struct ReferenceShape
{
  std::vector<double> value;
  std::vector<Vec2> grad;
  std::vector<Mat2> hessian;
};

ReferenceShape reference_shape(int dim, int degree, const Point &ref);

/// Physical basis data for one cell at a set of reference points. Entries
/// are stored point-major: index q * n_basis + i.
struct BasisValues
{
  std::size_t n_points = 0;
  std::size_t n_basis = 0;
  std::vector<Point> points; // physical coordinates
  std::vector<double> value;
  std::vector<Vec2> grad;
  std::vector<Mat2> hessian;

  double phi(std::size_t q, std::size_t i) const { return value[q * n_basis + i]; }
  const Vec2 &dphi(std::size_t q, std::size_t i) const { return grad[q * n_basis + i]; }
  const Mat2 &d2phi(std::size_t q, std::size_t i) const { return hessian[q * n_basis + i]; }
};

BasisValues evaluate_basis(const FeSpace &space, Index c, std::span<const Point> ref_points);

/// Values and physical gradients of a discrete function at mapped points.
struct LocalEvaluation
{
  std::vector<Point> points;
  std::vector<double> values;
  std::vector<Vec2> gradients;
};

LocalEvaluation eval_local(const FeSpace &space, std::span<const double> coeffs, Index c,
                           std::span<const Point> ref_points);

/// Exact nested embedding of a coarse discrete function into the space on a
/// refinement of the coarse mesh.
std::vector<double> prolongate(const FeSpace &coarse, const FeSpace &fine,
                               const RefinementRelation &relation, std::span<const double> coeffs);

/// Nodal interpolant. Boundary DOFs are interpolated as well; callers that
/// need zero trace must pass a function vanishing on the boundary.
std::vector<double> interpolate(const FeSpace &space, const std::function<double(const Point &)> &fn);

/// Cell containing x (first match in index order), or invalid_index.
Index locate_cell(const Mesh &mesh, const Point &x, double tol = 1e-12);

/// Point evaluation of a discrete function by cell search.
double evaluate_at(const FeSpace &space, std::span<const double> coeffs, const Point &x);

} // namespace goafem
