#pragma once

#include <goafem/estimator.hpp>
#include <goafem/marking.hpp>
#include <goafem/problem.hpp>
#include <goafem/solvers.hpp>
#include <goafem/space.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace goafem {

/// One row of the adaptive history.
struct LevelRecord
{
  int level = 0;
  Index n_elements = 0;
  Index n_dofs = 0;
  double eta = 0.0;
  double zeta = 0.0;
  double product = 0.0; // eta * sqrt(eta^2 + zeta^2)
  double goal_value = 0.0;
  std::optional<double> goal_error;
  int newton_iters = 0;
  double newton_residual = 0.0;
  bool newton_stagnated = false;
  Index n_marked = 0;
  double wall_ms = 0.0;
};

struct AdaptiveHistory
{
  std::string problem;
  std::vector<LevelRecord> levels;
};

// Stop rules. A run records levels until the rule is satisfied by the last
// recorded level.
struct MaxDofs
{
  Index value;
};
struct MaxElements
{
  Index value;
};
struct MaxLevels
{
  int value;
};
struct ProductTolerance
{
  double value;
};
using StopRule = std::variant<MaxDofs, MaxElements, MaxLevels, ProductTolerance>;

struct RunConfig
{
  std::string problem = "arctan1d";
  int degree = 1;
  double theta = 0.5;
  Strategy strategy = Strategy::goafem;
  StopRule stop = MaxDofs{100000};
  NewtonConfig newton;
  /// Safety cap on the number of levels for any stop rule.
  int level_cap = 10000;

  void validate() const;
};

/// Everything computed on one level, passed to observers before refinement.
struct LevelState
{
  int level;
  const FeSpace &space;
  const ProblemSpec &problem;
  const SolutionPair &solution;
  const IndicatorField &eta;
  const IndicatorField &zeta;
  const MarkResult &marks;
  const LevelRecord &record;
};

using LevelObserver = std::function<void(const LevelState &)>;

/// Thrown when a level fails; carries the rows recorded so far.
class AdaptiveRunError : public std::runtime_error
{
public:
  AdaptiveRunError(const std::string &what, AdaptiveHistory partial)
    : std::runtime_error(what), history_(std::move(partial))
  {}

  const AdaptiveHistory &history() const noexcept { return history_; }

private:
  AdaptiveHistory history_;
};

/// Solve, estimate, mark, refine until the stop rule holds.
AdaptiveHistory adaptive_solve(const RunConfig &config, const LevelObserver &observer = {});
AdaptiveHistory adaptive_solve(const RunConfig &config, const ProblemSpec &problem,
                               const LevelObserver &observer = {});

/// G(u_H) = goal_load . u.
double goal_value(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u_coeffs);

/// Initial mesh of a built-in problem.
Mesh initial_mesh_for(const ProblemSpec &problem);

inline const std::vector<std::string> &history_columns()
{
  static const std::vector<std::string> cols{"level", "n_elements", "n_dofs",     "eta",          "zeta",     "product",
                                             "goal_value", "goal_error", "newton_iters", "n_marked", "wall_ms"};
  return cols;
}

/// Column by name; missing goal errors are returned as NaN.
std::vector<double> history_column(const AdaptiveHistory &history, const std::string &column);

/// Empirical orders rate_k = log(v_k / v_{k+1}) / log(N_{k+1} / N_k) with
/// N = n_elements. Pairs with a nonpositive or missing value are reported as
/// nullopt.
std::vector<std::optional<double>> eoc(const AdaptiveHistory &history, const std::string &column);

/// Mean of the last `count` defined rates; nullopt if none are defined.
std::optional<double> mean_last_rates(const std::vector<std::optional<double>> &rates, std::size_t count);

/// CSV with header level,n_elements,n_dofs,eta,zeta,product,goal_value,
/// goal_error,newton_iters,n_marked,wall_ms and 17 significant digits.
/// Wall time is written as 0 unless include_wall_time is set, so that output
/// is reproducible byte for byte.
void write_history_csv(std::ostream &out, const AdaptiveHistory &history, bool include_wall_time = false);

/// Formats a double with 17 significant digits in the C locale.
std::string format_real(double v);

} // namespace goafem
