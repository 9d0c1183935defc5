#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace goafem {

using Index = std::size_t;
inline constexpr Index invalid_index = std::numeric_limits<Index>::max();

/// Point in R^2; 1D meshes leave the second coordinate at zero.
using Point = std::array<double, 2>;
using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline double dot(const Vec2 &a, const Vec2 &b) { return a[0] * b[0] + a[1] * b[1]; }

inline Vec2 operator+(const Vec2 &a, const Vec2 &b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2 &a, const Vec2 &b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2 &a) { return {s * a[0], s * a[1]}; }

inline Vec2 matvec(const Mat2 &m, const Vec2 &v)
{
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline Mat2 identity_matrix() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

// Error types. Everything derives from std::runtime_error or
// std::invalid_argument so callers can catch broadly.

class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class NotSpd : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error
{
public:
  NoConvergence(const std::string &what, double last_residual, int iterations)
    : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations)
  {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double last_residual_;
  int iterations_;
};

} // namespace goafem
