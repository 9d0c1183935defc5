#include <goafem/cli.hpp>

#include <goafem/study.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace goafem::cli {

namespace {

// CLI11 consumes argument vectors in reverse order.
void parse_args(CLI::App &app, std::vector<std::string> args)
{
  std::reverse(args.begin(), args.end());
  app.parse(args);
}

int report_parse_error(const CLI::App &app, const CLI::ParseError &e, std::ostream &out, std::ostream &err)
{
  if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success))
  {
    out << app.help();
    return exit_ok;
  }
  err << "error: " << e.what() << '\n';
  return exit_config_error;
}

} // namespace

int cmd_run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Run one adaptive solve and write the per-level history as CSV", "goafem run"};
  std::string problem;
  int degree = 1;
  double theta = 0.5;
  std::string strategy = "goafem";
  std::optional<long long> max_dofs;
  std::optional<long long> max_elements;
  std::optional<int> max_levels;
  std::optional<double> product_tol;
  std::string out_path;
  int vtk_every = 0;
  bool record_time = false;
  double newton_abs_tol = NewtonConfig{}.abs_tol;
  int newton_max_iter = NewtonConfig{}.max_iter;

  app.add_option("--problem", problem, "Built-in problem (arctan1d, cubic2d)")->required();
  app.add_option("--degree", degree, "Polynomial degree");
  app.add_option("--theta", theta, "Doerfler parameter in (0,1]");
  app.add_option("--strategy", strategy, "goafem, afem or afem-plus");
  auto *o_dofs = app.add_option("--max-dofs", max_dofs, "Stop once #DOFs reaches this value (default 100000)");
  auto *o_elems = app.add_option("--max-elements", max_elements, "Stop once #T reaches this value");
  auto *o_levels = app.add_option("--max-levels", max_levels, "Stop after this many levels");
  auto *o_tol = app.add_option("--product-tol", product_tol, "Stop once eta*sqrt(eta^2+zeta^2) <= value");
  o_dofs->excludes(o_elems)->excludes(o_levels)->excludes(o_tol);
  o_elems->excludes(o_levels)->excludes(o_tol);
  o_levels->excludes(o_tol);
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  app.add_option("--vtk-every", vtk_every, "Write a VTK mesh every N levels (0: never)");
  app.add_flag("--record-time", record_time, "Write measured wall times instead of 0");
  app.add_option("--newton-abs-tol", newton_abs_tol, "Newton absolute residual tolerance");
  app.add_option("--newton-max-iter", newton_max_iter, "Newton iteration limit");

  try
  {
    parse_args(app, args);
  }
  catch (const CLI::ParseError &e)
  {
    return report_parse_error(app, e, out, err);
  }

  RunConfig cfg;
  try
  {
    cfg.problem = problem;
    (void)problem_by_name(problem);
    cfg.strategy = parse_strategy(strategy);
    cfg.degree = degree;
    cfg.theta = theta;
    if (max_elements)
      cfg.stop = MaxElements{static_cast<Index>(*max_elements)};
    else if (max_levels)
      cfg.stop = MaxLevels{*max_levels};
    else if (product_tol)
      cfg.stop = ProductTolerance{*product_tol};
    else if (max_dofs)
    {
      if (*max_dofs <= 0)
        throw InvalidArgument("--max-dofs must be positive");
      cfg.stop = MaxDofs{static_cast<Index>(*max_dofs)};
    }
    if (max_elements && *max_elements <= 0)
      throw InvalidArgument("--max-elements must be positive");
    if (vtk_every < 0)
      throw InvalidArgument("--vtk-every must be nonnegative");
    cfg.newton.abs_tol = newton_abs_tol;
    cfg.newton.max_iter = newton_max_iter;
    cfg.validate();
  }
  catch (const std::invalid_argument &e)
  {
    err << "error: " << e.what() << '\n';
    return exit_config_error;
  }

  namespace fs = std::filesystem;
  const fs::path vtk_stem = out_path.empty() ? fs::path("goafem") : fs::path(out_path).replace_extension();
  LevelObserver observer;
  if (vtk_every > 0)
    observer = [&](const LevelState &s) {
      if (s.level % vtk_every != 0)
        return;
      std::ofstream vtk(vtk_stem.string() + "_level" + std::to_string(s.level) + ".vtk", std::ios::binary);
      write_vtk(vtk, s.space.mesh(), {{"eta_sq", s.eta.values}, {"zeta_sq", s.zeta.values}});
    };

  AdaptiveHistory history;
  int code = exit_ok;
  try
  {
    history = adaptive_solve(cfg, observer);
  }
  catch (const AdaptiveRunError &e)
  {
    history = e.history();
    err << "solver failure: " << e.what() << '\n';
    code = exit_solver_failure;
  }

  if (out_path.empty())
  {
    write_history_csv(out, history, record_time);
  }
  else
  {
    std::ofstream file(out_path, std::ios::binary);
    if (!file)
    {
      err << "error: cannot write '" << out_path << "'\n";
      return exit_config_error;
    }
    write_history_csv(file, history, record_time);
  }
  return code;
}

int cmd_study(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Run a study described by a key = value config file", "goafem study"};
  std::string path;
  std::optional<unsigned> workers;
  app.add_option("config", path, "Study config file")->required();
  app.add_option("--workers", workers, "Worker threads (default: logical cores)");
  try
  {
    parse_args(app, args);
  }
  catch (const CLI::ParseError &e)
  {
    return report_parse_error(app, e, out, err);
  }

  StudySpec spec;
  try
  {
    spec = load_study(path);
  }
  catch (const std::invalid_argument &e)
  {
    err << "error: " << path << ": " << e.what() << '\n';
    return exit_config_error;
  }
  if (workers)
    spec.workers = *workers;

  const std::vector<StudyResult> results = run_study(spec);
  int code = exit_ok;
  for (const StudyResult &r : results)
  {
    if (!r.error.empty())
    {
      err << r.name << ": " << r.error << '\n';
      code = exit_solver_failure;
    }
    else
    {
      out << r.name << ": " << r.history.levels.size() << " levels\n";
    }
  }
  return code;
}

int main(int argc, char **argv, std::ostream &out, std::ostream &err)
{
  const std::string usage = "usage: goafem {run|study} [options]  (use --help on a subcommand)\n";
  if (argc < 2)
  {
    err << usage;
    return exit_config_error;
  }
  const std::string sub = argv[1];
  std::vector<std::string> rest(argv + 2, argv + argc);
  if (sub == "run")
    return cmd_run(rest, out, err);
  if (sub == "study")
    return cmd_study(rest, out, err);
  if (sub == "--help" || sub == "-h")
  {
    out << usage;
    return exit_ok;
  }
  err << "unknown subcommand '" << sub << "'\n" << usage;
  return exit_config_error;
}

} // namespace goafem::cli
