#include <goafem/assembly.hpp>

#include <cmath>

namespace goafem {

namespace {

// Shared loop for bilinear forms: coefficient(q, x) multiplies the integrand.
template <typename LocalForm>
SparseMatrix assemble_matrix(const FeSpace &space, LocalForm &&local)
{
  SparseMatrix mat = make_pattern(space);
  const QuadRule rule = quad_rule(space.dim(), volume_order(space.degree()));
  const std::size_t nb = static_cast<std::size_t>(space.dofs_per_cell());
  std::vector<double> cell_matrix(nb * nb);
  for (Index c = 0; c < space.mesh().n_cells(); ++c)
  {
    const BasisValues bv = evaluate_basis(space, c, rule.points);
    const double jac = std::abs(cell_geometry(space.mesh(), c).det);
    std::fill(cell_matrix.begin(), cell_matrix.end(), 0.0);
    for (std::size_t q = 0; q < bv.n_points; ++q)
      local(c, q, rule.weights[q] * jac, bv, cell_matrix);
    const auto dofs = space.cell_dofs(c);
    for (std::size_t i = 0; i < nb; ++i)
      for (std::size_t j = 0; j < nb; ++j)
        mat.add(dofs[i], dofs[j], cell_matrix[i * nb + j]);
  }
  return mat;
}

double eval_coeffs(const BasisValues &bv, std::span<const Index> dofs, std::span<const double> u, std::size_t q)
{
  double v = 0.0;
  for (std::size_t i = 0; i < bv.n_basis; ++i)
    v += u[dofs[i]] * bv.phi(q, i);
  return v;
}

void check_length(const FeSpace &space, std::span<const double> v)
{
  if (v.size() != space.n_dofs())
    throw DimensionMismatch("coefficient vector does not match the space");
}

} // namespace

SparseMatrix make_pattern(const FeSpace &space)
{
  std::vector<std::vector<Index>> rows(space.n_dofs());
  for (Index c = 0; c < space.mesh().n_cells(); ++c)
  {
    const auto dofs = space.cell_dofs(c);
    for (Index i : dofs)
      rows[i].insert(rows[i].end(), dofs.begin(), dofs.end());
  }
  return SparseMatrix::from_pattern(space.n_dofs(), space.n_dofs(), std::move(rows));
}

SparseMatrix assemble_stiffness(const FeSpace &space, const ProblemSpec &problem)
{
  return assemble_matrix(space, [&](Index, std::size_t q, double w, const BasisValues &bv, std::vector<double> &m) {
    const Mat2 a = problem.diffusion(bv.points[q]);
    for (std::size_t i = 0; i < bv.n_basis; ++i)
    {
      const Vec2 agrad = matvec(a, bv.dphi(q, i));
      for (std::size_t j = 0; j < bv.n_basis; ++j)
        m[j * bv.n_basis + i] += w * dot(agrad, bv.dphi(q, j));
    }
  });
}

std::vector<double> energy_form_action(const FeSpace &space, const ProblemSpec &problem,
                                       std::span<const double> v_coeffs)
{
  check_length(space, v_coeffs);
  std::vector<double> out(space.n_dofs(), 0.0);
  const QuadRule rule = quad_rule(space.dim(), volume_order(space.degree()));
  std::vector<double> shifted(static_cast<std::size_t>(space.dofs_per_cell()));
  for (Index c = 0; c < space.mesh().n_cells(); ++c)
  {
    const BasisValues bv = evaluate_basis(space, c, rule.points);
    const double jac = std::abs(cell_geometry(space.mesh(), c).det);
    const auto dofs = space.cell_dofs(c);
    // The basis gradients sum to zero, so subtracting one coefficient leaves
    // grad v unchanged and removes the O(|v|/h) cancellation.
    for (std::size_t i = 0; i < bv.n_basis; ++i)
      shifted[i] = v_coeffs[dofs[i]] - v_coeffs[dofs[0]];
    for (std::size_t q = 0; q < bv.n_points; ++q)
    {
      Vec2 grad{0.0, 0.0};
      for (std::size_t j = 1; j < bv.n_basis; ++j)
        grad = grad + shifted[j] * bv.dphi(q, j);
      const Vec2 flux = (rule.weights[q] * jac) * matvec(problem.diffusion(bv.points[q]), grad);
      for (std::size_t i = 0; i < bv.n_basis; ++i)
        out[dofs[i]] += dot(flux, bv.dphi(q, i));
    }
  }
  return out;
}

SparseMatrix assemble_reaction_jacobian(const FeSpace &space, const ProblemSpec &problem,
                                        std::span<const double> w_coeffs)
{
  check_length(space, w_coeffs);
  return assemble_matrix(space, [&](Index c, std::size_t q, double w, const BasisValues &bv, std::vector<double> &m) {
    const double wq = eval_coeffs(bv, space.cell_dofs(c), w_coeffs, q);
    const double coef = w * problem.reaction_derivative(bv.points[q], wq);
    for (std::size_t i = 0; i < bv.n_basis; ++i)
      for (std::size_t j = 0; j < bv.n_basis; ++j)
        m[i * bv.n_basis + j] += coef * bv.phi(q, i) * bv.phi(q, j);
  });
}

namespace {

std::vector<double> assemble_linear_form(const FeSpace &space, const ScalarField &weight, const VectorField &flux,
                                         const ProblemSpec *singular)
{
  std::vector<double> out(space.n_dofs(), 0.0);
  const QuadRule rule = quad_rule(space.dim(), volume_order(space.degree()));
  for (Index c = 0; c < space.mesh().n_cells(); ++c)
  {
    const BasisValues bv = evaluate_basis(space, c, rule.points);
    const double jac = std::abs(cell_geometry(space.mesh(), c).det);
    const auto dofs = space.cell_dofs(c);
    const bool split = singular && touches_goal_singularity(space, *singular, c);
    for (std::size_t q = 0; q < bv.n_points; ++q)
    {
      const double w = rule.weights[q] * jac;
      const double f = split ? 0.0 : weight(bv.points[q]);
      const Vec2 flux_q = flux(bv.points[q]);
      for (std::size_t i = 0; i < bv.n_basis; ++i)
        out[dofs[i]] += w * (f * bv.phi(q, i) + dot(flux_q, bv.dphi(q, i)));
    }
    if (!split)
      continue;
    // int_0^h x^alpha ghat(x) phi_i(x) dx = h^{1+alpha} sum_q w_q ghat(h t_q) phi_i(t_q)
    const double alpha = *singular->singular_goal_exponent;
    const QuadRule gj = gauss_jacobi_rule(alpha, space.degree() + 2);
    const BasisValues sbv = evaluate_basis(space, c, gj.points);
    const double h = space.mesh().measure(c);
    const double scale = std::pow(h, 1.0 + alpha);
    for (std::size_t q = 0; q < sbv.n_points; ++q)
    {
      const double ghat = regular_goal_factor(*singular, sbv.points[q]);
      for (std::size_t i = 0; i < sbv.n_basis; ++i)
        out[dofs[i]] += scale * gj.weights[q] * ghat * sbv.phi(q, i);
    }
  }
  return out;
}

} // namespace

bool touches_goal_singularity(const FeSpace &space, const ProblemSpec &problem, Index c)
{
  if (!problem.singular_goal_exponent || space.dim() != 1)
    return false;
  return space.mesh().vertex(space.mesh().cell(c)[0])[0] == 0.0;
}

std::vector<double> assemble_primal_load(const FeSpace &space, const ProblemSpec &problem)
{
  return assemble_linear_form(space, problem.source, problem.source_flux, nullptr);
}

std::vector<double> assemble_goal_load(const FeSpace &space, const ProblemSpec &problem)
{
  return assemble_linear_form(space, problem.goal_weight, problem.goal_flux,
                              problem.singular_goal_exponent ? &problem : nullptr);
}

std::vector<double> assemble_reaction_vector(const FeSpace &space, const ProblemSpec &problem,
                                             std::span<const double> u_coeffs)
{
  check_length(space, u_coeffs);
  std::vector<double> out(space.n_dofs(), 0.0);
  const QuadRule rule = quad_rule(space.dim(), volume_order(space.degree()));
  for (Index c = 0; c < space.mesh().n_cells(); ++c)
  {
    const BasisValues bv = evaluate_basis(space, c, rule.points);
    const double jac = std::abs(cell_geometry(space.mesh(), c).det);
    const auto dofs = space.cell_dofs(c);
    for (std::size_t q = 0; q < bv.n_points; ++q)
    {
      const double b = problem.reaction(bv.points[q], eval_coeffs(bv, dofs, u_coeffs, q));
      const double w = rule.weights[q] * jac * b;
      for (std::size_t i = 0; i < bv.n_basis; ++i)
        out[dofs[i]] += w * bv.phi(q, i);
    }
  }
  return out;
}

std::vector<double> nonlinear_residual(const FeSpace &space, const ProblemSpec &problem,
                                       std::span<const double> u_coeffs)
{
  check_length(space, u_coeffs);
  std::vector<double> r = assemble_primal_load(space, problem);
  const std::vector<double> ku = energy_form_action(space, problem, u_coeffs);
  const std::vector<double> bu = assemble_reaction_vector(space, problem, u_coeffs);
  for (Index i = 0; i < r.size(); ++i)
    r[i] = space.is_boundary_dof(i) ? 0.0 : r[i] - ku[i] - bu[i];
  return r;
}

double energy_norm(const FeSpace &space, const ProblemSpec &problem, std::span<const double> v)
{
  check_length(space, v);
  const std::vector<double> kv = energy_form_action(space, problem, v);
  return std::sqrt(std::max(0.0, dot(std::span<const double>(kv), v)));
}

} // namespace goafem
