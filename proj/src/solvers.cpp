#include <goafem/solvers.hpp>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <string>

namespace goafem {

namespace {

using EigenMatrix = Eigen::SparseMatrix<double>;

EigenMatrix to_eigen(const SparseMatrix &a)
{
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(a.nnz());
  for (Index i = 0; i < a.n_rows(); ++i)
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(a.col_idx()[k]), a.values()[k]);
  EigenMatrix m(static_cast<int>(a.n_rows()), static_cast<int>(a.n_cols()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

// Pivots below this fraction of their diagonal entry count as breakdown.
constexpr double pivot_tolerance = 1e-12;

// Newton updates below this many ulps of max|u| count as stagnation.
constexpr double stagnation_ulps = 64.0;

} // namespace

void NewtonConfig::validate() const
{
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw InvalidArgument("Newton tolerances must be positive");
  if (max_iter < 1)
    throw InvalidArgument("Newton needs max_iter >= 1");
  if (!(min_step > 0.0 && min_step <= 1.0))
    throw InvalidArgument("Newton minimum step must lie in (0, 1]");
}

std::vector<double> solve_spd(const SparseMatrix &matrix, std::span<const double> rhs)
{
  if (matrix.n_rows() != matrix.n_cols() || rhs.size() != matrix.n_rows())
    throw DimensionMismatch("solve_spd: matrix and right-hand side sizes differ");
  const Index n = matrix.n_rows();
  if (n == 0)
    return {};

  // Symmetric diagonal scaling: on strongly graded meshes the raw matrix
  // spans many orders of magnitude, the scaled one does not.
  EigenMatrix a = to_eigen(matrix);
  Eigen::VectorXd scale(static_cast<int>(n));
  for (int i = 0; i < static_cast<int>(n); ++i)
  {
    const double d = a.coeff(i, i);
    if (!(d > 0.0))
      throw NotSpd("nonpositive diagonal entry in row " + std::to_string(i));
    scale[i] = 1.0 / std::sqrt(d);
  }
  a = scale.asDiagonal() * a * scale.asDiagonal();
  const Eigen::VectorXd b = scale.cwiseProduct(Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<int>(n)));
  Eigen::VectorXd x;

  if (n > cg_threshold)
  {
    Eigen::ConjugateGradient<EigenMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-14);
    cg.setMaxIterations(static_cast<int>(10 * n));
    cg.compute(a);
    x = cg.solve(b);
    if (cg.info() != Eigen::Success)
      throw NotSpd("conjugate gradient did not converge");
  }
  else
  {
    Eigen::SimplicialLDLT<EigenMatrix> ldlt;
    ldlt.compute(a);
    if (ldlt.info() != Eigen::Success)
      throw NotSpd("sparse factorization failed");
    // After scaling every diagonal entry is 1.
    const Eigen::VectorXd &pivots = ldlt.vectorD();
    for (int i = 0; i < pivots.size(); ++i)
      if (!(pivots[i] > pivot_tolerance))
        throw NotSpd("nonpositive pivot " + std::to_string(pivots[i]) + " in row " + std::to_string(i));
    x = ldlt.solve(b);
    for (int step = 0; step < 2; ++step)
    {
      const Eigen::VectorXd r = b - a * x;
      if (r.norm() <= 1e-14 * (b.norm() + 1.0))
        break;
      x += ldlt.solve(r);
    }
  }
  x = scale.cwiseProduct(x);
  return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> solve_interior(const FeSpace &space, const SparseMatrix &full_matrix,
                                   std::span<const double> full_rhs)
{
  const auto &interior = space.interior_dofs();
  const SparseMatrix a = full_matrix.restrict_to(interior);
  std::vector<double> b(interior.size());
  for (Index k = 0; k < interior.size(); ++k)
    b[k] = full_rhs[interior[k]];
  const std::vector<double> x = solve_spd(a, b);
  std::vector<double> out(space.n_dofs(), 0.0);
  for (Index k = 0; k < interior.size(); ++k)
    out[interior[k]] = x[k];
  return out;
}

SolutionPair newton_primal(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u0,
                           const NewtonConfig &config)
{
  config.validate();
  if (u0.size() != space.n_dofs())
    throw DimensionMismatch("newton_primal: initial guess does not match the space");

  SolutionPair sol;
  sol.u_coeffs.assign(u0.begin(), u0.end());
  for (Index i = 0; i < space.n_dofs(); ++i)
    if (space.is_boundary_dof(i))
      sol.u_coeffs[i] = 0.0;

  const SparseMatrix stiffness = assemble_stiffness(space, problem);
  std::vector<double> load = assemble_primal_load(space, problem);
  for (Index i = 0; i < load.size(); ++i)
    if (space.is_boundary_dof(i))
      load[i] = 0.0;
  const double tol = std::max(config.abs_tol, config.rel_tol * norm2(load));

  auto residual = [&](std::span<const double> u) {
    std::vector<double> r = load;
    const std::vector<double> ku = energy_form_action(space, problem, u);
    const std::vector<double> bu = assemble_reaction_vector(space, problem, u);
    for (Index i = 0; i < r.size(); ++i)
      r[i] = space.is_boundary_dof(i) ? 0.0 : r[i] - ku[i] - bu[i];
    return r;
  };

  std::vector<double> r = residual(sol.u_coeffs);
  double rnorm = norm2(r);
  sol.residual_history.push_back(rnorm);
  int iter = 0;
  while (rnorm > tol)
  {
    if (iter == config.max_iter)
      throw NoConvergence("Newton iteration did not converge (residual " + std::to_string(rnorm) + ")", rnorm,
                          iter);
    const SparseMatrix jac = stiffness.plus(assemble_reaction_jacobian(space, problem, sol.u_coeffs));
    const std::vector<double> delta = solve_interior(space, jac, r);

    double step = 1.0;
    std::vector<double> trial(sol.u_coeffs.size());
    std::vector<double> r_trial;
    double trial_norm = 0.0;
    while (true)
    {
      for (Index i = 0; i < trial.size(); ++i)
        trial[i] = sol.u_coeffs[i] + step * delta[i];
      r_trial = residual(trial);
      trial_norm = norm2(r_trial);
      if (!config.damping || trial_norm < rnorm)
        break;
      step *= 0.5;
      if (step < config.min_step)
      {
        // No decrease found: accept the full step.
        for (Index i = 0; i < trial.size(); ++i)
          trial[i] = sol.u_coeffs[i] + delta[i];
        r_trial = residual(trial);
        trial_norm = norm2(r_trial);
        break;
      }
    }
    // Roundoff stagnation: the update no longer changes u beyond a few ulps,
    // so the residual is as small as double precision can represent.
    double update = 0.0;
    double size = 0.0;
    for (Index i = 0; i < trial.size(); ++i)
    {
      update = std::max(update, std::abs(trial[i] - sol.u_coeffs[i]));
      size = std::max(size, std::abs(trial[i]));
    }
    sol.u_coeffs = std::move(trial);
    r = std::move(r_trial);
    rnorm = trial_norm;
    sol.residual_history.push_back(rnorm);
    ++iter;
    if (rnorm > tol && update <= stagnation_ulps * std::numeric_limits<double>::epsilon() * size)
    {
      sol.stagnated = true;
      break;
    }
  }
  sol.newton_iters = iter;
  sol.residual_norm = rnorm;
  return sol;
}

std::vector<double> solve_dual(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u_coeffs,
                               std::span<const double> goal_load)
{
  if (goal_load.size() != space.n_dofs())
    throw DimensionMismatch("solve_dual: goal load does not match the space");
  const SparseMatrix mass = assemble_reaction_jacobian(space, problem, u_coeffs);
  const SparseMatrix op = assemble_stiffness(space, problem).plus(mass);
  std::vector<double> z = solve_interior(space, op, goal_load);
  // Refine against the shift-exact residual; the assembled product op * z
  // loses digits on strongly graded meshes.
  for (int step = 0; step < 2; ++step)
  {
    const std::vector<double> r = dual_residual(space, problem, mass, goal_load, z);
    const std::vector<double> dz = solve_interior(space, op, r);
    for (Index i = 0; i < z.size(); ++i)
      z[i] += dz[i];
  }
  return z;
}

std::vector<double> dual_residual(const FeSpace &space, const ProblemSpec &problem, const SparseMatrix &reaction,
                                  std::span<const double> goal_load, std::span<const double> z_coeffs)
{
  std::vector<double> r(goal_load.begin(), goal_load.end());
  const std::vector<double> kz = energy_form_action(space, problem, z_coeffs);
  const std::vector<double> mz = reaction.multiply(z_coeffs);
  for (Index i = 0; i < r.size(); ++i)
    r[i] = space.is_boundary_dof(i) ? 0.0 : r[i] - kz[i] - mz[i];
  return r;
}

} // namespace goafem
