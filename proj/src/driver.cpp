#include <goafem/driver.hpp>

#include <goafem/assembly.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace goafem {

void RunConfig::validate() const
{
  const ProblemSpec p = problem_by_name(problem);
  const int max_degree = p.dimension == 1 ? 4 : 2;
  if (degree < 1 || degree > max_degree)
    throw InvalidArgument("degree " + std::to_string(degree) + " not supported for problem " + problem);
  MarkConfig{theta, strategy}.validate();
  newton.validate();
  if (level_cap < 1)
    throw InvalidArgument("level cap must be positive");
  std::visit(
    [](const auto &rule) {
      if (!(rule.value > 0))
        throw InvalidArgument("stop rule value must be positive");
    },
    stop);
}

Mesh initial_mesh_for(const ProblemSpec &problem)
{
  if (problem.dimension == 1)
    return initial_mesh_1d(0.0, 1.0, 5);
  return initial_mesh_unit_square();
}

double goal_value(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u_coeffs)
{
  const std::vector<double> load = assemble_goal_load(space, problem);
  return dot(std::span<const double>(load), u_coeffs);
}

namespace {

bool stop_reached(const StopRule &rule, const LevelRecord &rec)
{
  return std::visit(
    [&](const auto &r) -> bool {
      using T = std::decay_t<decltype(r)>;
      if constexpr (std::is_same_v<T, MaxDofs>)
        return rec.n_dofs >= r.value;
      else if constexpr (std::is_same_v<T, MaxElements>)
        return rec.n_elements >= r.value;
      else if constexpr (std::is_same_v<T, MaxLevels>)
        return rec.level + 1 >= r.value;
      else
        return rec.product <= r.value;
    },
    rule);
}

} // namespace

AdaptiveHistory adaptive_solve(const RunConfig &config, const LevelObserver &observer)
{
  return adaptive_solve(config, problem_by_name(config.problem), observer);
}

AdaptiveHistory adaptive_solve(const RunConfig &config, const ProblemSpec &problem, const LevelObserver &observer)
{
  config.validate();
  AdaptiveHistory history;
  history.problem = problem.name;
  const MarkConfig mark_config{config.theta, config.strategy};

  auto mesh = std::make_shared<const Mesh>(initial_mesh_for(problem));
  FeSpace space = build_space(mesh, config.degree);
  std::vector<double> guess(space.n_dofs(), 0.0);

  for (int level = 0;; ++level)
  {
    const auto start = std::chrono::steady_clock::now();
    LevelRecord rec;
    rec.level = level;
    rec.n_elements = mesh->n_cells();
    rec.n_dofs = space.n_dofs();

    SolutionPair sol;
    try
    {
      sol = newton_primal(space, problem, guess, config.newton);
      const std::vector<double> goal_load = assemble_goal_load(space, problem);
      sol.z_coeffs = solve_dual(space, problem, sol.u_coeffs, goal_load);
      rec.goal_value = dot(std::span<const double>(goal_load), std::span<const double>(sol.u_coeffs));
    }
    catch (const std::exception &e)
    {
      throw AdaptiveRunError("level " + std::to_string(level) + ": " + e.what(), history);
    }

    const IndicatorField eta = eta_local(space, problem, sol.u_coeffs);
    const IndicatorField zeta = zeta_local(space, problem, sol.u_coeffs, sol.z_coeffs);
    rec.eta = total(eta);
    rec.zeta = total(zeta);
    rec.product = rec.eta * std::sqrt(rec.eta * rec.eta + rec.zeta * rec.zeta);
    if (problem.reference_goal)
      rec.goal_error = std::abs(*problem.reference_goal - rec.goal_value);
    rec.newton_iters = sol.newton_iters;
    rec.newton_residual = sol.residual_norm;
    rec.newton_stagnated = sol.stagnated;

    const MarkResult marks = mark(eta, zeta, mark_config);
    std::vector<Index> marked = marks.marked;
    if (marked.empty())
    {
      // Vanishing indicators: refine uniformly.
      marked.resize(mesh->n_cells());
      std::iota(marked.begin(), marked.end(), Index{0});
    }
    rec.n_marked = marked.size();
    rec.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    history.levels.push_back(rec);

    if (observer)
      observer(LevelState{level, space, problem, sol, eta, zeta, marks, history.levels.back()});

    if (stop_reached(config.stop, rec) || level + 1 >= config.level_cap)
      break;

    auto [fine, relation] = refine(*mesh, marked);
    auto fine_mesh = std::make_shared<const Mesh>(std::move(fine));
    FeSpace fine_space = build_space(fine_mesh, config.degree);
    guess = prolongate(space, fine_space, relation, sol.u_coeffs);
    mesh = std::move(fine_mesh);
    space = std::move(fine_space);
  }
  return history;
}

std::vector<double> history_column(const AdaptiveHistory &history, const std::string &column)
{
  std::vector<double> out;
  out.reserve(history.levels.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const LevelRecord &r : history.levels)
  {
    if (column == "level")
      out.push_back(r.level);
    else if (column == "n_elements")
      out.push_back(static_cast<double>(r.n_elements));
    else if (column == "n_dofs")
      out.push_back(static_cast<double>(r.n_dofs));
    else if (column == "eta")
      out.push_back(r.eta);
    else if (column == "zeta")
      out.push_back(r.zeta);
    else if (column == "product")
      out.push_back(r.product);
    else if (column == "goal_value")
      out.push_back(r.goal_value);
    else if (column == "goal_error")
      out.push_back(r.goal_error.value_or(nan));
    else if (column == "newton_iters")
      out.push_back(r.newton_iters);
    else if (column == "n_marked")
      out.push_back(static_cast<double>(r.n_marked));
    else if (column == "wall_ms")
      out.push_back(r.wall_ms);
    else
      throw InvalidArgument("unknown history column '" + column + "'");
  }
  return out;
}

std::vector<std::optional<double>> eoc(const AdaptiveHistory &history, const std::string &column)
{
  if (history.levels.size() < 2)
    throw InvalidArgument("eoc needs at least two levels");
  const std::vector<double> v = history_column(history, column);
  std::vector<std::optional<double>> rates;
  for (std::size_t k = 0; k + 1 < v.size(); ++k)
  {
    const double n0 = static_cast<double>(history.levels[k].n_elements);
    const double n1 = static_cast<double>(history.levels[k + 1].n_elements);
    if (!(v[k] > 0.0) || !(v[k + 1] > 0.0) || !(n1 > n0))
    {
      rates.push_back(std::nullopt);
      continue;
    }
    rates.push_back(std::log(v[k] / v[k + 1]) / std::log(n1 / n0));
  }
  return rates;
}

std::optional<double> mean_last_rates(const std::vector<std::optional<double>> &rates, std::size_t count)
{
  double sum = 0.0;
  std::size_t n = 0;
  for (auto it = rates.rbegin(); it != rates.rend() && n < count; ++it)
    if (*it)
    {
      sum += **it;
      ++n;
    }
  if (n == 0)
    return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string format_real(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_history_csv(std::ostream &out, const AdaptiveHistory &history, bool include_wall_time)
{
  const auto &cols = history_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const LevelRecord &r : history.levels)
  {
    out << r.level << ',' << r.n_elements << ',' << r.n_dofs << ',' << format_real(r.eta) << ','
        << format_real(r.zeta) << ',' << format_real(r.product) << ',' << format_real(r.goal_value) << ','
        << (r.goal_error ? format_real(*r.goal_error) : std::string()) << ',' << r.newton_iters << ','
        << r.n_marked << ',' << format_real(include_wall_time ? r.wall_ms : 0.0) << '\n';
  }
}

} // namespace goafem
