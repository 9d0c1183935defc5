#pragma once

#include <goafem/assembly.hpp>

#include <span>
#include <vector>

namespace goafem {

struct NewtonConfig
{
  double abs_tol = 1e-10;
  double rel_tol = 1e-12; // relative to the interior load norm
  int max_iter = 50;
  bool damping = true;
  double min_step = 1.0 / 1024.0;

  void validate() const;
};

/// Discrete primal and dual solutions on one space.
struct SolutionPair
{
  std::vector<double> u_coeffs;
  std::vector<double> z_coeffs;
  int newton_iters = 0;
  double residual_norm = 0.0;
  std::vector<double> residual_history; // ||r(u^k)||_2, k = 0..newton_iters
  // Set when Newton stopped because its update fell to roundoff size
  // relative to u before the residual reached the tolerance.
  bool stagnated = false;
};

/// Sparse direct solve (Cholesky) of an SPD system. Systems above
/// cg_threshold unknowns use diagonally preconditioned CG instead.
/// Throws NotSpd when the factorization breaks down.
std::vector<double> solve_spd(const SparseMatrix &matrix, std::span<const double> rhs);

inline constexpr Index cg_threshold = 200000;

/// Damped Newton iteration for the discrete primal problem. Each step
/// solves (K + M_b'(u^k)) delta = r(u^k) on interior DOFs and halves the
/// step length until the residual norm decreases (or the minimum step is
/// reached, in which case the full step is taken).
SolutionPair newton_primal(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u0,
                           const NewtonConfig &config = {});

/// Solves (K + M_b'(u_H)) z = goal_load on interior DOFs.
std::vector<double> solve_dual(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u_coeffs,
                               std::span<const double> goal_load);

/// goal_load - <<z, phi_i>> - (reaction z)_i on interior DOFs, zero on the
/// boundary. reaction is assemble_reaction_jacobian at the primal solution.
std::vector<double> dual_residual(const FeSpace &space, const ProblemSpec &problem, const SparseMatrix &reaction,
                                  std::span<const double> goal_load, std::span<const double> z_coeffs);

/// Interior-restricted A x = b solve; boundary entries of the result are 0.
std::vector<double> solve_interior(const FeSpace &space, const SparseMatrix &full_matrix,
                                   std::span<const double> full_rhs);

} // namespace goafem
