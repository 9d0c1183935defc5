#include <goafem/quadrature.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace goafem {

namespace {

// Three-term recurrence of the monic Jacobi polynomials for the weight
// (1-t)^a (1+t)^b on [-1,1].
struct Recurrence
{
  std::vector<double> alpha;
  std::vector<double> beta; // beta[0] is the total mass of the weight
};

Recurrence jacobi_recurrence(double a, double b, int n)
{
  Recurrence r;
  r.alpha.resize(n);
  r.beta.resize(n + 1);
  const double ab = a + b;
  r.beta[0] = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                       std::lgamma(ab + 2.0));
  for (int k = 0; k < n; ++k)
  {
    const double s = 2.0 * k + ab;
    r.alpha[k] = k == 0 ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k <= n; ++k)
  {
    const double s = 2.0 * k + ab;
    if (k == 1)
      r.beta[k] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      r.beta[k] = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
  }
  return r;
}

// Orthonormal polynomial p_n(t), its derivative, and sum_{k<n} p_k(t)^2.
struct OrthoEval
{
  double value;
  double derivative;
  double christoffel_sum;
};

OrthoEval eval_orthonormal(const Recurrence &r, int n, double t)
{
  double p_prev = 0.0;
  double p = 1.0 / std::sqrt(r.beta[0]);
  double dp_prev = 0.0;
  double dp = 0.0;
  double sum = 0.0;
  for (int k = 0; k < n; ++k)
  {
    sum += p * p;
    const double sb_next = std::sqrt(r.beta[k + 1]);
    const double sb = k == 0 ? 0.0 : std::sqrt(r.beta[k]);
    const double p_next = ((t - r.alpha[k]) * p - sb * p_prev) / sb_next;
    const double dp_next = (p + (t - r.alpha[k]) * dp - sb * dp_prev) / sb_next;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp, sum};
}

} // namespace

QuadRule gauss_jacobi_rule(double alpha, int n)
{
  if (!(alpha > -1.0))
    throw InvalidArgument("Gauss-Jacobi weight exponent must exceed -1");
  if (n < 1)
    throw InvalidArgument("Gauss-Jacobi rule needs at least one point");

  // Weight x^alpha on [0,1] is (1+t)^alpha on [-1,1] up to scaling.
  const Recurrence rec = jacobi_recurrence(0.0, alpha, n);

  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k)
    diag[k] = rec.alpha[k];
  for (int k = 0; k + 1 < n; ++k)
    sub[k] = std::sqrt(rec.beta[k + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  QuadRule rule;
  rule.exactness_degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  const double scale = std::pow(2.0, -alpha - 1.0);
  for (int i = 0; i < n; ++i)
  {
    double t = eig.eigenvalues()[i];
    for (int it = 0; it < 8; ++it)
    {
      const OrthoEval e = eval_orthonormal(rec, n, t);
      const double step = e.value / e.derivative;
      t -= step;
      if (std::abs(step) < 1e-17)
        break;
    }
    const OrthoEval e = eval_orthonormal(rec, n, t);
    rule.points[i] = {0.5 * (1.0 + t), 0.0};
    rule.weights[i] = scale / e.christoffel_sum;
  }
  return rule;
}

QuadRule gauss_legendre_rule(int n) { return gauss_jacobi_rule(0.0, n); }

QuadRule quad_rule(int dimension, int order)
{
  if (order < 0 || order > 80)
    throw InvalidArgument("unsupported quadrature order " + std::to_string(order));
  const int n = (order + 2) / 2;
  if (dimension == 1)
    return gauss_legendre_rule(n);
  if (dimension != 2)
    throw InvalidArgument("quadrature dimension must be 1 or 2");

  // Collapsed coordinates: x = 1 - s, y = s v with Jacobian s.
  const QuadRule radial = gauss_jacobi_rule(1.0, n);
  const QuadRule line = gauss_legendre_rule(n);
  QuadRule rule;
  rule.exactness_degree = 2 * n - 1;
  for (std::size_t i = 0; i < radial.size(); ++i)
  {
    const double s = radial.points[i][0];
    for (std::size_t j = 0; j < line.size(); ++j)
    {
      rule.points.push_back({1.0 - s, s * line.points[j][0]});
      rule.weights.push_back(radial.weights[i] * line.weights[j]);
    }
  }
  return rule;
}

} // namespace goafem
