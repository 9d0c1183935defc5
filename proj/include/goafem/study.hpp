#pragma once

#include <goafem/driver.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace goafem {

struct StudyRun
{
  std::string name;
  RunConfig config;
};

struct StudySpec
{
  std::vector<StudyRun> runs;
  std::string output_dir = ".";
  bool emit_vtk = false;
  bool emit_summary = true;
  unsigned workers = 0; // 0: one per logical core
};

/// Parse failure with the 1-based line it refers to.
class ConfigError : public InvalidArgument
{
public:
  ConfigError(int line, const std::string &what)
    : InvalidArgument("line " + std::to_string(line) + ": " + what), line_(line)
  {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

/**
 * Flat key = value format. Global keys (output_dir, emit_vtk, emit_summary,
 * workers) come before the first "[run]" header; each "[run]" section sets
 * name, problem, degree, theta, strategy and at most one of max_dofs,
 * max_elements, max_levels, product_tol. '#' starts a comment.
 */
StudySpec parse_study(std::istream &in);
StudySpec load_study(const std::string &path);

struct StudyResult
{
  std::string name;
  RunConfig config;
  AdaptiveHistory history;
  std::string error; // empty on success
};

/// Runs all configurations on a bounded worker pool and writes
/// <output_dir>/<name>.csv per run (plus <name>.vtk of the final mesh when
/// emit_vtk is set) and summary.csv when emit_summary is set.
std::vector<StudyResult> run_study(const StudySpec &spec);

/// Summary rows: final goal values/errors and mean rates over the last five
/// levels.
void write_summary_csv(std::ostream &out, const std::vector<StudyResult> &results);

inline constexpr std::size_t summary_rate_window = 5;

} // namespace goafem
