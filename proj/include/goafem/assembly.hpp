#pragma once

#include <goafem/problem.hpp>
#include <goafem/space.hpp>
#include <goafem/sparse.hpp>

#include <span>
#include <vector>

namespace goafem {

/// Volume quadrature order used for degree-m assembly: 2m + 2.
inline int volume_order(int degree) { return 2 * degree + 2; }

/// Zero matrix with the cell-coupling pattern of the space.
SparseMatrix make_pattern(const FeSpace &space);

/// int A grad(phi_j) . grad(phi_i) over all DOFs.
SparseMatrix assemble_stiffness(const FeSpace &space, const ProblemSpec &problem);

/// <<v_H, phi_i>> = int A grad(v_H) . grad(phi_i), evaluated cell by cell
/// from coefficient differences. Unlike stiffness * v this is exact under
/// constant shifts of v, so it keeps full accuracy on strongly graded meshes.
std::vector<double> energy_form_action(const FeSpace &space, const ProblemSpec &problem,
                                       std::span<const double> v_coeffs);

/// int b'(x, w_H) phi_j phi_i: the Newton Jacobian of the reaction term and
/// the reaction part of the dual operator.
SparseMatrix assemble_reaction_jacobian(const FeSpace &space, const ProblemSpec &problem,
                                        std::span<const double> w_coeffs);

/// F(phi_i) = int f phi_i + int F . grad(phi_i).
std::vector<double> assemble_primal_load(const FeSpace &space, const ProblemSpec &problem);

/// G(phi_i) = int g phi_i + int G_flux . grad(phi_i). A singular goal
/// weight is integrated with Gauss-Jacobi quadrature on the cell at x = 0.
std::vector<double> assemble_goal_load(const FeSpace &space, const ProblemSpec &problem);

/// int b(x, u_H) phi_i.
std::vector<double> assemble_reaction_vector(const FeSpace &space, const ProblemSpec &problem,
                                             std::span<const double> u_coeffs);

/// r_i = F(phi_i) - <<u_H, phi_i>> - <b(u_H), phi_i> on interior DOFs, zero on
/// boundary DOFs.
std::vector<double> nonlinear_residual(const FeSpace &space, const ProblemSpec &problem,
                                       std::span<const double> u_coeffs);

/// Energy norm (<A grad v, grad v>)^{1/2}.
double energy_norm(const FeSpace &space, const ProblemSpec &problem, std::span<const double> v);

/// True when cell c is the 1D cell whose left endpoint is the singular point
/// x = 0 of the goal weight.
bool touches_goal_singularity(const FeSpace &space, const ProblemSpec &problem, Index c);

} // namespace goafem
