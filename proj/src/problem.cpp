#include <goafem/problem.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace goafem {

ProblemSpec example_1d_arctan()
{
  using std::numbers::pi;
  ProblemSpec p;
  p.name = "arctan1d";
  p.dimension = 1;
  p.reaction = [](const Point &, double xi) { return std::atan(xi); };
  p.reaction_derivative = [](const Point &, double xi) { return 1.0 / (1.0 + xi * xi); };
  // Manufactured so that u(x) = sin(pi x).
  p.source = [](const Point &x) {
    const double s = std::sin(pi * x[0]);
    return pi * pi * s + std::atan(s);
  };
  p.goal_weight = [](const Point &x) { return std::pow(x[0], -0.45); };
  p.singular_goal_exponent = -0.45;
  p.reference_goal = 0.95925303932778833;
  p.reference_note = "integral of sin(pi x) x^(-9/20) over (0,1)";
  return p;
}

ProblemSpec example_2d_cubic()
{
  ProblemSpec p;
  p.name = "cubic2d";
  p.dimension = 2;
  p.reaction = [](const Point &, double xi) { return xi * xi * xi; };
  p.reaction_derivative = [](const Point &, double xi) { return 3.0 * xi * xi; };
  p.source_flux = [](const Point &x) {
    return x[0] + x[1] <= 0.5 ? Vec2{-1.0, 0.0} : Vec2{0.0, 0.0};
  };
  p.goal_flux = [](const Point &x) {
    return x[0] + x[1] >= 1.5 ? Vec2{-1.0, 0.0} : Vec2{0.0, 0.0};
  };
  p.reference_goal = -0.001584951808832;
  p.reference_note = "extrapolated from P2 goal-oriented runs";
  return p;
}

std::vector<std::string> problem_names() { return {"arctan1d", "cubic2d"}; }

ProblemSpec problem_by_name(const std::string &name)
{
  if (name == "arctan1d")
    return example_1d_arctan();
  if (name == "cubic2d")
    return example_2d_cubic();
  throw InvalidArgument("unknown problem '" + name + "'");
}

std::string validate_problem(const ProblemSpec &problem)
{
  std::ostringstream msg;
  const int n = 7;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= (problem.dimension == 2 ? n : 0); ++j)
    {
      // Sample strictly inside the domain to avoid singular weights at 0.
      const Point x{(i + 0.5) / (n + 1.0), problem.dimension == 2 ? (j + 0.5) / (n + 1.0) : 0.0};
      if (problem.reaction(x, 0.0) != 0.0)
      {
        msg << "b(x,0) != 0 at (" << x[0] << "," << x[1] << ")";
        return msg.str();
      }
      for (int k = -20; k <= 20; ++k)
      {
        const double xi = 5.0 * k;
        if (problem.reaction_derivative(x, xi) < 0.0)
        {
          msg << "b'(x," << xi << ") < 0";
          return msg.str();
        }
      }
      const Mat2 a = problem.diffusion(x);
      if (problem.dimension == 1)
      {
        if (!(a[0][0] > 0.0))
          return "diffusion coefficient not positive";
        continue;
      }
      if (std::abs(a[0][1] - a[1][0]) > 1e-12 * (std::abs(a[0][1]) + 1.0))
        return "diffusion matrix not symmetric";
      const double tr = a[0][0] + a[1][1];
      const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
      if (!(det > 0.0 && tr > 0.0))
        return "diffusion matrix not positive definite";
    }
  return {};
}

double regular_goal_factor(const ProblemSpec &problem, const Point &x)
{
  const double alpha = problem.singular_goal_exponent.value_or(0.0);
  return problem.goal_weight(x) * std::pow(x[0], -alpha);
}

} // namespace goafem
