#pragma once

#include <goafem/types.hpp>

#include <vector>

namespace goafem {

/// Quadrature rule on a reference element: the unit interval [0,1] or the
/// triangle with vertices (0,0), (1,0), (0,1).
struct QuadRule
{
  std::vector<Point> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  std::size_t size() const noexcept { return weights.size(); }
};

/// n-point Gauss rule on [0,1] for the weight x^alpha, alpha > -1. Exact for
/// x^alpha p(x) with deg p <= 2n - 1. alpha = 0 gives Gauss-Legendre.
QuadRule gauss_jacobi_rule(double alpha, int n);

/// n-point Gauss-Legendre rule on [0,1].
QuadRule gauss_legendre_rule(int n);

/// Rule exact for polynomials of total degree <= order on the reference
/// interval (dimension 1) or triangle (dimension 2, collapsed tensor Gauss).
QuadRule quad_rule(int dimension, int order);

} // namespace goafem
