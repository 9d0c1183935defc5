#include <goafem/study.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace goafem {

namespace {

std::string trim(const std::string &s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(int line, const std::string &v)
{
  if (v == "true" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "0" || v == "no")
    return false;
  throw ConfigError(line, "expected a boolean, got '" + v + "'");
}

long long parse_int(int line, const std::string &v)
{
  std::size_t pos = 0;
  long long out = 0;
  try
  {
    out = std::stoll(v, &pos);
  }
  catch (const std::exception &)
  {
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size())
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  return out;
}

double parse_real(int line, const std::string &v)
{
  std::size_t pos = 0;
  double out = 0.0;
  try
  {
    out = std::stod(v, &pos);
  }
  catch (const std::exception &)
  {
    throw ConfigError(line, "expected a number, got '" + v + "'");
  }
  if (pos != v.size())
    throw ConfigError(line, "expected a number, got '" + v + "'");
  return out;
}

struct PendingRun
{
  StudyRun run;
  int header_line = 0;
  int stop_rules = 0;
};

void finish_run(PendingRun &p, StudySpec &spec)
{
  if (p.run.name.empty())
    throw ConfigError(p.header_line, "run section without a name");
  try
  {
    p.run.config.validate();
  }
  catch (const InvalidArgument &e)
  {
    throw ConfigError(p.header_line, e.what());
  }
  spec.runs.push_back(std::move(p.run));
}

} // namespace

StudySpec parse_study(std::istream &in)
{
  StudySpec spec;
  std::optional<PendingRun> current;
  std::set<std::string> names;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw))
  {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty())
      continue;
    if (text.front() == '[')
    {
      if (text != "[run]")
        throw ConfigError(line, "unknown section '" + text + "'");
      if (current)
        finish_run(*current, spec);
      current.emplace();
      current->header_line = line;
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (value.empty())
      throw ConfigError(line, "missing value for '" + key + "'");

    if (!current)
    {
      if (key == "output_dir")
        spec.output_dir = value;
      else if (key == "emit_vtk")
        spec.emit_vtk = parse_bool(line, value);
      else if (key == "emit_summary")
        spec.emit_summary = parse_bool(line, value);
      else if (key == "workers")
      {
        const long long w = parse_int(line, value);
        if (w < 0)
          throw ConfigError(line, "workers must be nonnegative");
        spec.workers = static_cast<unsigned>(w);
      }
      else
        throw ConfigError(line, "unknown global key '" + key + "'");
      continue;
    }

    RunConfig &cfg = current->run.config;
    auto set_stop = [&](StopRule rule) {
      if (++current->stop_rules > 1)
        throw ConfigError(line, "more than one stop rule in run");
      cfg.stop = rule;
    };
    if (key == "name")
    {
      if (!names.insert(value).second)
        throw ConfigError(line, "duplicate run name '" + value + "'");
      current->run.name = value;
    }
    else if (key == "problem")
    {
      try
      {
        (void)problem_by_name(value);
      }
      catch (const InvalidArgument &e)
      {
        throw ConfigError(line, e.what());
      }
      cfg.problem = value;
    }
    else if (key == "degree")
      cfg.degree = static_cast<int>(parse_int(line, value));
    else if (key == "theta")
      cfg.theta = parse_real(line, value);
    else if (key == "strategy")
    {
      try
      {
        cfg.strategy = parse_strategy(value);
      }
      catch (const InvalidArgument &e)
      {
        throw ConfigError(line, e.what());
      }
    }
    else if (key == "max_dofs")
      set_stop(MaxDofs{static_cast<Index>(parse_int(line, value))});
    else if (key == "max_elements")
      set_stop(MaxElements{static_cast<Index>(parse_int(line, value))});
    else if (key == "max_levels")
      set_stop(MaxLevels{static_cast<int>(parse_int(line, value))});
    else if (key == "product_tol")
      set_stop(ProductTolerance{parse_real(line, value)});
    else
      throw ConfigError(line, "unknown run key '" + key + "'");
  }
  if (current)
    finish_run(*current, spec);
  if (spec.runs.empty())
    throw ConfigError(line == 0 ? 1 : line, "study defines no runs");
  return spec;
}

StudySpec load_study(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidArgument("cannot open study file '" + path + "'");
  return parse_study(in);
}

std::vector<StudyResult> run_study(const StudySpec &spec)
{
  namespace fs = std::filesystem;
  fs::create_directories(spec.output_dir);

  std::vector<StudyResult> results(spec.runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < spec.runs.size(); i = next.fetch_add(1))
    {
      const StudyRun &run = spec.runs[i];
      StudyResult &res = results[i];
      res.name = run.name;
      res.config = run.config;
      std::shared_ptr<const Mesh> last_mesh;
      IndicatorField last_eta;
      IndicatorField last_zeta;
      LevelObserver observer;
      if (spec.emit_vtk)
        observer = [&](const LevelState &s) {
          last_mesh = s.space.mesh_ptr();
          last_eta = s.eta;
          last_zeta = s.zeta;
        };
      try
      {
        res.history = adaptive_solve(run.config, observer);
      }
      catch (const AdaptiveRunError &e)
      {
        res.history = e.history();
        res.error = e.what();
      }
      catch (const std::exception &e)
      {
        res.error = e.what();
      }
      std::ofstream csv(fs::path(spec.output_dir) / (run.name + ".csv"), std::ios::binary);
      write_history_csv(csv, res.history);
      if (spec.emit_vtk && last_mesh)
      {
        std::ofstream vtk(fs::path(spec.output_dir) / (run.name + ".vtk"), std::ios::binary);
        write_vtk(vtk, *last_mesh, {{"eta_sq", last_eta.values}, {"zeta_sq", last_zeta.values}});
      }
    }
  };

  unsigned n_workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, spec.runs.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();

  if (spec.emit_summary)
  {
    std::ofstream summary(fs::path(spec.output_dir) / "summary.csv", std::ios::binary);
    write_summary_csv(summary, results);
  }
  return results;
}

void write_summary_csv(std::ostream &out, const std::vector<StudyResult> &results)
{
  out << "name,problem,strategy,degree,theta,levels,n_elements,n_dofs,goal_value,goal_error,"
         "rate_product,rate_goal_error,status\n";
  for (const StudyResult &r : results)
  {
    out << r.name << ',' << r.config.problem << ',' << to_string(r.config.strategy) << ',' << r.config.degree << ','
        << format_real(r.config.theta) << ',' << r.history.levels.size() << ',';
    if (r.history.levels.empty())
    {
      out << ",,,,,," << (r.error.empty() ? "ok" : "failed") << '\n';
      continue;
    }
    const LevelRecord &last = r.history.levels.back();
    out << last.n_elements << ',' << last.n_dofs << ',' << format_real(last.goal_value) << ','
        << (last.goal_error ? format_real(*last.goal_error) : std::string()) << ',';
    auto rate = [&](const std::string &col) -> std::string {
      if (r.history.levels.size() < 2)
        return {};
      const auto m = mean_last_rates(eoc(r.history, col), summary_rate_window);
      return m ? format_real(*m) : std::string();
    };
    out << rate("product") << ',' << rate("goal_error") << ',' << (r.error.empty() ? "ok" : "failed") << '\n';
  }
}

} // namespace goafem
