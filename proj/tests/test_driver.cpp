#include <goafem/driver.hpp>

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace goafem;

namespace {

AdaptiveHistory synthetic(const std::vector<Index> &n, const std::vector<double> &product)
{
  AdaptiveHistory h;
  for (std::size_t k = 0; k < n.size(); ++k)
  {
    LevelRecord r;
    r.level = static_cast<int>(k);
    r.n_elements = n[k];
    r.n_dofs = n[k] + 1;
    r.product = product[k];
    h.levels.push_back(r);
  }
  return h;
}

std::vector<std::string> split_lines(const std::string &s)
{
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);)
    out.push_back(line);
  return out;
}

} // namespace

TEST_SUITE("driver")
{
  TEST_CASE("eoc of synthetic histories")
  {
    const std::vector<Index> n{10, 17, 40, 81, 300};
    std::vector<double> pw;
    for (Index x : n)
      pw.push_back(std::pow(static_cast<double>(x), -2.0));
    for (const auto &r : eoc(synthetic(n, pw), "product"))
    {
      REQUIRE(r.has_value());
      CHECK(*r == doctest::Approx(2.0).epsilon(1e-12));
    }
    for (const auto &r : eoc(synthetic(n, std::vector<double>(5, 3.0)), "product"))
      CHECK(*r == 0.0);

    // Nonpositive values are skipped.
    const auto rates = eoc(synthetic({1, 2, 4}, {1.0, 0.0, 0.25}), "product");
    CHECK_FALSE(rates[0].has_value());
    CHECK_FALSE(rates[1].has_value());
    CHECK_FALSE(mean_last_rates(rates, 5).has_value());
    const auto m = mean_last_rates({1.0, std::nullopt, 2.0, 4.0}, 2);
    CHECK(*m == doctest::Approx(3.0));
    CHECK(*mean_last_rates({1.0, std::nullopt, 2.0, 4.0}, 10) == doctest::Approx(7.0 / 3.0));
    CHECK_THROWS_AS(eoc(synthetic({1}, {1.0}), "product"), InvalidArgument);
    CHECK_THROWS_AS(history_column(synthetic({1}, {1.0}), "nosuch"), InvalidArgument);
    CHECK(std::isnan(history_column(synthetic({1}, {1.0}), "goal_error")[0]));
  }

  TEST_CASE("goal value of the zero function")
  {
    for (const std::string &name : problem_names())
    {
      const ProblemSpec p = problem_by_name(name);
      const FeSpace s = build_space(initial_mesh_for(p), 1);
      CHECK(goal_value(s, p, std::vector<double>(s.n_dofs(), 0.0)) == 0.0);
    }
  }

  TEST_CASE("config validation")
  {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.degree = 5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.problem = "cubic2d";
    c.degree = 3;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.degree = 2;
    c.theta = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.theta = 0.5;
    c.stop = MaxDofs{0};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.stop = ProductTolerance{-1.0};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.problem = "nosuch";
    c.stop = MaxLevels{3};
    CHECK_THROWS(c.validate());
  }

  TEST_CASE("history invariants and stop rules")
  {
    RunConfig c;
    c.problem = "arctan1d";
    c.degree = 2;
    c.stop = MaxDofs{400};
    const AdaptiveHistory h = adaptive_solve(c);
    REQUIRE(h.levels.size() >= 3);
    CHECK(h.levels.back().n_dofs >= 400);
    CHECK(h.levels[h.levels.size() - 2].n_dofs < 400);
    for (std::size_t k = 0; k < h.levels.size(); ++k)
    {
      const LevelRecord &r = h.levels[k];
      CHECK(r.level == static_cast<int>(k));
      CHECK(r.eta >= 0.0);
      CHECK(r.zeta >= 0.0);
      CHECK(r.product == doctest::Approx(r.eta * std::sqrt(r.eta * r.eta + r.zeta * r.zeta)));
      CHECK(r.goal_error.has_value());
      CHECK(r.n_marked > 0);
      if (k > 0)
      {
        CHECK(r.n_elements > h.levels[k - 1].n_elements);
        CHECK(r.n_dofs > h.levels[k - 1].n_dofs);
      }
    }

    c.stop = ProductTolerance{1e-3};
    const AdaptiveHistory t = adaptive_solve(c);
    CHECK(t.levels.back().product <= 1e-3);
    for (std::size_t k = 0; k + 1 < t.levels.size(); ++k)
      CHECK(t.levels[k].product > 1e-3);

    c.stop = MaxLevels{4};
    CHECK(adaptive_solve(c).levels.size() == 4);
    c.stop = MaxElements{50};
    CHECK(adaptive_solve(c).levels.back().n_elements >= 50);
  }

  TEST_CASE("observer sees every level on the right mesh")
  {
    RunConfig c;
    c.problem = "cubic2d";
    c.stop = MaxLevels{5};
    int calls = 0;
    const AdaptiveHistory h = adaptive_solve(c, [&](const LevelState &s) {
      CHECK(s.level == calls);
      CHECK(s.eta.mesh_id == s.space.mesh().id());
      CHECK(s.zeta.mesh_id == s.space.mesh().id());
      CHECK(s.record.n_elements == s.space.mesh().n_cells());
      CHECK(s.solution.u_coeffs.size() == s.space.n_dofs());
      ++calls;
    });
    CHECK(calls == 5);
    // The initial square has no interior DOF, so the first step refines uniformly.
    CHECK(h.levels[0].n_dofs == 4);
    CHECK(h.levels[0].n_marked == 2);
  }

  TEST_CASE("failures carry the partial history")
  {
    RunConfig c;
    c.stop = MaxLevels{6};
    c.newton.max_iter = 1;
    try
    {
      adaptive_solve(c);
      FAIL("expected a failure");
    }
    catch (const AdaptiveRunError &e)
    {
      CHECK(e.history().levels.size() < 6);
      CHECK(std::string(e.what()).find("level") != std::string::npos);
    }
  }

  TEST_CASE("CSV output")
  {
    RunConfig c;
    c.stop = MaxLevels{3};
    const AdaptiveHistory h = adaptive_solve(c);
    std::ostringstream a, b;
    write_history_csv(a, h);
    write_history_csv(b, adaptive_solve(c));
    CHECK(a.str() == b.str());
    const auto lines = split_lines(a.str());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "level,n_elements,n_dofs,eta,zeta,product,goal_value,goal_error,newton_iters,n_marked,wall_ms");
    CHECK(a.str().find('\r') == std::string::npos);
    CHECK(lines[1].substr(lines[1].rfind(',') + 1) == "0");
    // 17 significant digits round-trip exactly.
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_real(x)) == x);
    CHECK(format_real(0.5) == "0.5");
    std::istringstream row(lines[2]);
    std::string cell;
    for (int k = 0; k < 4; ++k)
      std::getline(row, cell, ',');
    CHECK(std::stod(cell) == h.levels[1].eta);
  }
}
