#include <goafem/estimator.hpp>

#include <goafem/assembly.hpp>
#include <goafem/solvers.hpp>

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace goafem;

namespace {

// P1 gradient on a triangle from its three vertex values (plane fit).
Vec2 plane_gradient(const Mesh &m, Index c, const std::vector<double> &u)
{
  const Cell &t = m.cell(c);
  const Point &a = m.vertex(t[0]);
  const Vec2 e1 = m.vertex(t[1]) - a;
  const Vec2 e2 = m.vertex(t[2]) - a;
  const double d1 = u[t[1]] - u[t[0]];
  const double d2 = u[t[2]] - u[t[0]];
  const double det = e1[0] * e2[1] - e1[1] * e2[0];
  return {(d1 * e2[1] - d2 * e1[1]) / det, (e1[0] * d2 - e2[0] * d1) / det};
}

// Jump-only indicators of a P1 function for data with zero flux and a
// vanishing volume residual: h_T * sum_e |e| [grad u . n]^2.
std::vector<double> p1_jump_oracle(const Mesh &m, const std::vector<double> &u)
{
  std::vector<double> out(m.n_cells(), 0.0);
  const Topology t = build_topology(m);
  for (Index e = 0; e < t.edges.size(); ++e)
  {
    if (t.is_boundary(e))
      continue;
    const Vec2 d = m.vertex(t.edges[e][1]) - m.vertex(t.edges[e][0]);
    const double len = std::sqrt(dot(d, d));
    const Vec2 n{d[1] / len, -d[0] / len};
    const Index k0 = t.edge_cells[e][0];
    const Index k1 = t.edge_cells[e][1];
    const double jump = dot(plane_gradient(m, k0, u) - plane_gradient(m, k1, u), n);
    out[k0] += m.cell_size(k0) * len * jump * jump;
    out[k1] += m.cell_size(k1) * len * jump * jump;
  }
  return out;
}

// Dense-quadrature volume term h_T^2 int_T (f - b(u_h))^2 for P1 in 1D.
double p1_volume_oracle_1d(const FeSpace &s, const ProblemSpec &p, const std::vector<double> &u, Index c)
{
  const QuadRule rule = gauss_legendre_rule(30);
  const CellGeometry g = cell_geometry(s.mesh(), c);
  const auto dofs = s.cell_dofs(c);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q)
  {
    const double t = rule.points[q][0];
    const Point x = g.map(rule.points[q]);
    const double uh = (1 - t) * u[dofs[0]] + t * u[dofs[1]];
    const double r = p.source(x) - p.reaction(x, uh);
    sum += rule.weights[q] * g.det * r * r;
  }
  return g.det * g.det * sum;
}

} // namespace

TEST_SUITE("estimator")
{
  TEST_CASE("zero data gives zero indicators")
  {
    ProblemSpec p;
    for (const Mesh &m : {initial_mesh_1d(0.0, 1.0, 5), testutil::refined_uniformly(initial_mesh_unit_square(), 2)})
    {
      p.dimension = m.dim();
      const FeSpace space = build_space(m, 2);
      const std::vector<double> zero(space.n_dofs(), 0.0);
      const IndicatorField eta = eta_local(space, p, zero);
      const IndicatorField zeta = zeta_local(space, p, zero, zero);
      CHECK(eta.size() == m.n_cells());
      CHECK(total(eta) == 0.0);
      CHECK(total(zeta) == 0.0);
      CHECK(eta.mesh_id == m.id());
      CHECK(zeta.kind == IndicatorKind::dual);
    }
  }

  TEST_CASE("single interval with unit source")
  {
    ProblemSpec p;
    p.source = [](const Point &) { return 1.0; };
    const FeSpace space = build_space(initial_mesh_1d(0.0, 1.0, 1), 1);
    const IndicatorField eta = eta_local(space, p, std::vector<double>(space.n_dofs(), 0.0));
    CHECK(eta.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("totals")
  {
    IndicatorField f;
    f.values = {1, 1, 1, 1};
    CHECK(total(f) == 2.0);
    CHECK(total(std::vector<double>{}) == 0.0);
    CHECK(total(f, std::vector<Index>{0, 3}) == doctest::Approx(std::sqrt(2.0)));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> v(100);
    double s = 0.0;
    for (double &x : v)
    {
      x = d(rng);
      s += x;
    }
    CHECK(total(v) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
  }

  TEST_CASE("1D volume term against dense quadrature")
  {
    // Polynomial data keep the residual polynomial, so the built-in rule is exact.
    ProblemSpec p;
    p.source = [](const Point &x) { return x[0] * x[0]; };
    p.reaction = [](const Point &, double xi) { return xi; };
    p.reaction_derivative = [](const Point &, double) { return 1.0; };
    const FeSpace space = build_space(initial_mesh_1d(0.0, 1.0, 5), 1);
    const std::vector<double> u =
      interpolate(space, [](const Point &x) { return std::sin(3.14159 * x[0]); });
    const IndicatorField eta = eta_local(space, p, u);
    for (Index c = 0; c < 5; ++c)
      CHECK(eta.values[c] == doctest::Approx(p1_volume_oracle_1d(space, p, u, c)).epsilon(1e-8));
  }

  TEST_CASE("2D P1 jump terms against a plane-fit oracle")
  {
    ProblemSpec p;
    p.dimension = 2;
    const Mesh m = uniform_refine(initial_mesh_unit_square()).first;
    const FeSpace space = build_space(m, 1);
    const std::vector<double> u = interpolate(space, [](const Point &x) { return x[0] * x[1]; });
    const IndicatorField eta = eta_local(space, p, u);
    const std::vector<double> oracle = p1_jump_oracle(m, u);
    for (Index c = 0; c < m.n_cells(); ++c)
      CHECK(eta.values[c] == doctest::Approx(oracle[c]).epsilon(1e-12).scale(1e-15));
    CHECK(total(eta) > 0.0);

    // Same on a finer adaptive mesh with a random function.
    std::mt19937 rng(4);
    Mesh a = testutil::refined_uniformly(initial_mesh_unit_square(), 2);
    for (int k = 0; k < 4; ++k)
      a = refine(a, testutil::random_marks(a, rng, 0.3)).first;
    const FeSpace sa = build_space(a, 1);
    const std::vector<double> ua = testutil::random_interior(sa, rng);
    const IndicatorField ea = eta_local(sa, p, ua);
    const std::vector<double> oa = p1_jump_oracle(a, ua);
    for (Index c = 0; c < a.n_cells(); ++c)
      CHECK(ea.values[c] == doctest::Approx(oa[c]).epsilon(1e-12).scale(1e-15));
  }

  TEST_CASE("dual indicator with b' = 0 is the primal formula with goal data")
  {
    std::mt19937 rng(5);
    ProblemSpec dual = example_2d_cubic();
    dual.reaction = [](const Point &, double) { return 0.0; };
    dual.reaction_derivative = [](const Point &, double) { return 0.0; };
    ProblemSpec primal = dual;
    primal.source = dual.goal_weight;
    primal.source_flux = dual.goal_flux;
    primal.source_flux_divergence = dual.goal_flux_divergence;
    const FeSpace space = build_space(testutil::refined_uniformly(initial_mesh_unit_square(), 4), 2);
    const std::vector<double> z = testutil::random_interior(space, rng);
    const std::vector<double> u = testutil::random_interior(space, rng);
    const IndicatorField a = zeta_local(space, dual, u, z);
    const IndicatorField b = eta_local(space, primal, z);
    for (Index c = 0; c < a.size(); ++c)
      CHECK(a.values[c] == doctest::Approx(b.values[c]).epsilon(1e-14));
  }

  TEST_CASE("singular dual volume term on the cell at the origin")
  {
    // Oracle: substitute x = h s^20 so the x^{-9/10} singularity becomes
    // smooth, then use a 60-point Gauss rule in s. A linear reaction keeps
    // the regular part polynomial.
    ProblemSpec p = example_1d_arctan();
    p.reaction = [](const Point &, double xi) { return xi; };
    p.reaction_derivative = [](const Point &, double) { return 1.0; };
    const FeSpace space = build_space(initial_mesh_1d(0.0, 1.0, 5), 2);
    std::mt19937 rng(6);
    const std::vector<double> u = testutil::random_interior(space, rng, 0.5);
    const std::vector<double> z = testutil::random_interior(space, rng, 0.5);
    const IndicatorField zeta = zeta_local(space, p, u, z);
    const CellGeometry g = cell_geometry(space.mesh(), 0);
    const QuadRule rule = gauss_legendre_rule(60);
    double integral = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const double s = rule.points[q][0];
      const double t = std::pow(s, 20);
      const Point ref{t, 0.0};
      const LocalEvaluation ez = eval_local(space, z, 0, std::vector<Point>{ref});
      const LocalEvaluation eu = eval_local(space, u, 0, std::vector<Point>{ref});
      const ReferenceShape sh = reference_shape(1, 2, ref);
      double zxx = 0.0;
      const auto dofs = space.cell_dofs(0);
      for (std::size_t i = 0; i < dofs.size(); ++i)
        zxx += z[dofs[i]] * sh.hessian[i][0][0] / (g.det * g.det);
      const Point x = ez.points[0];
      const double r = p.goal_weight(x) + zxx - p.reaction_derivative(x, eu.values[0]) * ez.values[0];
      integral += rule.weights[q] * 20 * std::pow(s, 19) * g.det * r * r;
    }
    CHECK(zeta.values[0] == doctest::Approx(g.det * g.det * integral).epsilon(1e-9));
  }

  TEST_CASE("reduction and identity under refinement")
  {
    std::mt19937 rng(7);
    for (const std::string name : {"arctan1d", "cubic2d"})
    {
      const ProblemSpec p = problem_by_name(name);
      const int d = p.dimension;
      // In 2D start where the data discontinuity lines are resolved.
      const auto coarse_mesh = testutil::share(testutil::refined_uniformly(initial_mesh_for(p), 3));
      const FeSpace coarse = build_space(coarse_mesh, 2);
      const std::vector<double> u = testutil::random_interior(coarse, rng, 0.5);
      const std::vector<double> z = testutil::random_interior(coarse, rng, 0.5);
      auto [fm, rel] = refine(*coarse_mesh, testutil::random_marks(*coarse_mesh, rng, 0.3));
      const FeSpace fine = build_space(testutil::share(std::move(fm)), 2);
      const std::vector<double> uf = prolongate(coarse, fine, rel, u);
      const std::vector<double> zf = prolongate(coarse, fine, rel, z);

      const IndicatorField ec = eta_local(coarse, p, u);
      const IndicatorField ef = eta_local(fine, p, uf);
      const IndicatorField zc = zeta_local(coarse, p, u, z);
      const IndicatorField zf_ = zeta_local(fine, p, uf, zf);
      std::vector<Index> new_cells, kept_fine;
      std::vector<Index> coarse_of_kept;
      for (Index c = 0; c < fine.mesh().n_cells(); ++c)
      {
        if (rel.is_refined(rel.parent_of[c]))
          new_cells.push_back(c);
        else
        {
          kept_fine.push_back(c);
          coarse_of_kept.push_back(rel.parent_of[c]);
        }
      }
      const double q = std::pow(2.0, -1.0 / (2.0 * d));
      CHECK(total(ef, new_cells) <= q * total(ec, rel.refined_set) + 1e-10);
      CHECK(total(zf_, new_cells) <= q * total(zc, rel.refined_set) + 1e-10);
      for (std::size_t k = 0; k < kept_fine.size(); ++k)
      {
        CHECK(ef.values[kept_fine[k]] == doctest::Approx(ec.values[coarse_of_kept[k]]).epsilon(1e-12));
        CHECK(zf_.values[kept_fine[k]] == doctest::Approx(zc.values[coarse_of_kept[k]]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("coefficient length is checked")
  {
    const ProblemSpec p = example_1d_arctan();
    const FeSpace space = build_space(initial_mesh_1d(0.0, 1.0, 5), 1);
    CHECK_THROWS_AS(eta_local(space, p, std::vector<double>(2, 0.0)), DimensionMismatch);
  }
}
