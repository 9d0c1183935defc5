#pragma once

#include <goafem/problem.hpp>
#include <goafem/space.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace goafem {

enum class IndicatorKind
{
  primal,
  dual
};

/// Squared local indicators eta_T^2 or zeta_T^2, one per cell of the mesh
/// identified by mesh_id.
struct IndicatorField
{
  std::vector<double> values;
  std::uint64_t mesh_id = 0;
  IndicatorKind kind = IndicatorKind::primal;

  std::size_t size() const noexcept { return values.size(); }
};

/// Residual indicator of the primal problem:
///   h_T^2 ||f + div(A grad u_H - F) - b(u_H)||_T^2
///     + h_T ||[(A grad u_H - F) . n]||_{dT inner}^2.
/// Jumps vanish in 1D. Each interior edge contributes to both neighbours.
IndicatorField eta_local(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u_coeffs);

/// Residual indicator of the practical dual problem linearised at w = u_H:
///   h_T^2 ||g + div(A grad z_H - G_flux) - b'(u_H) z_H||_T^2 + jump term.
IndicatorField zeta_local(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u_coeffs,
                          std::span<const double> z_coeffs);

/// sqrt of the sum of squared indicators.
double total(const IndicatorField &field);
double total(std::span<const double> squared_values);
/// sqrt of the sum over the listed cells.
double total(const IndicatorField &field, std::span<const Index> cells);

/// Offset used to evaluate discontinuous flux data as one-sided traces on
/// element boundaries: x is moved this fraction of the way to the centroid.
inline constexpr double trace_offset = 1e-9;

} // namespace goafem
