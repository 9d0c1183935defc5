#pragma once

#include <goafem/types.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace goafem {

using ScalarField = std::function<double(const Point &)>;
using VectorField = std::function<Vec2(const Point &)>;
using MatrixField = std::function<Mat2(const Point &)>;
/// Function of position and solution value, e.g. b(x, xi).
using Nonlinearity = std::function<double(const Point &, double)>;

/**
 * Data of the semilinear problem
 *
 *   -div(A grad u) + b(x, u) = f - div F   in Omega,  u = 0 on the boundary,
 *
 * and of the goal functional G(v) = int g v + int G_flux . grad v.
 *
 * The elementwise divergences of the flux data enter the residual estimator;
 * they default to zero (piecewise constant fluxes). A singular goal weight
 * g(x) = x^alpha * ghat(x) near x = 0 is flagged by singular_goal_exponent so
 * that quadrature on the adjacent element can absorb the singularity.
 */
struct ProblemSpec
{
  std::string name;
  int dimension = 1;

  MatrixField diffusion = [](const Point &) { return identity_matrix(); };
  bool diffusion_is_constant = true;
  /// (div A)_j = sum_i d_i A_ij; only used when diffusion is not constant.
  VectorField diffusion_divergence = [](const Point &) { return Vec2{0.0, 0.0}; };

  Nonlinearity reaction = [](const Point &, double) { return 0.0; };
  Nonlinearity reaction_derivative = [](const Point &, double) { return 0.0; };

  ScalarField source = [](const Point &) { return 0.0; };
  VectorField source_flux = [](const Point &) { return Vec2{0.0, 0.0}; };
  ScalarField source_flux_divergence = [](const Point &) { return 0.0; };

  ScalarField goal_weight = [](const Point &) { return 0.0; };
  VectorField goal_flux = [](const Point &) { return Vec2{0.0, 0.0}; };
  ScalarField goal_flux_divergence = [](const Point &) { return 0.0; };

  std::optional<double> singular_goal_exponent;
  std::optional<double> reference_goal;
  std::string reference_note;
};

/// -u'' + arctan(u) = f on (0,1) with exact solution sin(pi x) and goal
/// weight x^{-9/20}.
ProblemSpec example_1d_arctan();

/// -Laplace u + u^3 = -div F on (0,1)^2 with piecewise constant fluxes
/// supported on x1 + x2 <= 1/2 (primal) and x1 + x2 >= 3/2 (goal).
ProblemSpec example_2d_cubic();

/// Looks up a built-in problem: "arctan1d" or "cubic2d".
ProblemSpec problem_by_name(const std::string &name);
std::vector<std::string> problem_names();

/// Samples the structural assumptions on a grid of points: b(x,0) = 0,
/// b'(x,xi) >= 0, and A symmetric positive definite. Returns an empty string
/// when all samples pass.
std::string validate_problem(const ProblemSpec &problem);

/// Factor ghat(x) = g(x) x^{-alpha} of a singular goal weight.
double regular_goal_factor(const ProblemSpec &problem, const Point &x);

} // namespace goafem
