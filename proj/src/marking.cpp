#include <goafem/marking.hpp>

#include <algorithm>
#include <numeric>

namespace goafem {

Strategy parse_strategy(const std::string &name)
{
  if (name == "goafem")
    return Strategy::goafem;
  if (name == "afem")
    return Strategy::afem;
  if (name == "afem-plus" || name == "afem_plus")
    return Strategy::afem_plus;
  throw InvalidArgument("unknown strategy '" + name + "'");
}

std::string to_string(Strategy s)
{
  switch (s)
  {
  case Strategy::goafem:
    return "goafem";
  case Strategy::afem:
    return "afem";
  case Strategy::afem_plus:
    return "afem-plus";
  }
  return "?";
}

void MarkConfig::validate() const
{
  if (!(theta > 0.0 && theta <= 1.0))
    throw InvalidArgument("theta must lie in (0, 1]");
}

std::vector<Index> doerfler_min(std::span<const double> values, double theta)
{
  if (!(theta > 0.0 && theta <= 1.0))
    throw InvalidArgument("theta must lie in (0, 1]");
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] > values[b]; });

  double sum = 0.0;
  for (Index i : order)
    sum += values[i];
  if (!(sum > 0.0))
    return {};

  std::vector<Index> out;
  if (theta == 1.0)
  {
    for (Index i : order)
      if (values[i] > 0.0)
        out.push_back(i);
    return out;
  }
  const double goal = theta * sum;
  double acc = 0.0;
  for (Index i : order)
  {
    out.push_back(i);
    acc += values[i];
    if (acc >= goal)
      break;
  }
  return out;
}

namespace {

std::vector<Index> sorted_copy(std::vector<Index> v)
{
  std::sort(v.begin(), v.end());
  return v;
}

} // namespace

MarkResult mark(const IndicatorField &eta_sq, const IndicatorField &zeta_sq, const MarkConfig &config)
{
  config.validate();
  if (eta_sq.mesh_id != zeta_sq.mesh_id || eta_sq.size() != zeta_sq.size())
    throw DimensionMismatch("indicator fields belong to different meshes");

  std::vector<double> combined(eta_sq.size());
  for (Index i = 0; i < combined.size(); ++i)
    combined[i] = eta_sq.values[i] + zeta_sq.values[i];

  MarkResult res;
  switch (config.strategy)
  {
  case Strategy::afem: {
    const auto set = doerfler_min(eta_sq.values, config.theta);
    res.set_u = sorted_copy(set);
    res.selected_u = res.set_u;
    res.marked = res.set_u;
    return res;
  }
  case Strategy::afem_plus: {
    const auto set = doerfler_min(combined, config.theta);
    res.set_uz = sorted_copy(set);
    res.selected_uz = res.set_uz;
    res.marked = res.set_uz;
    return res;
  }
  case Strategy::goafem:
    break;
  }

  // Both Doerfler sets come back sorted by decreasing indicator, so the
  // k-prefixes are the k largest members.
  const auto set_u = doerfler_min(eta_sq.values, config.theta);
  const auto set_uz = doerfler_min(combined, config.theta);
  const std::size_t k = std::min(set_u.size(), set_uz.size());
  res.set_u = sorted_copy(set_u);
  res.set_uz = sorted_copy(set_uz);
  res.selected_u = sorted_copy({set_u.begin(), set_u.begin() + static_cast<std::ptrdiff_t>(k)});
  res.selected_uz = sorted_copy({set_uz.begin(), set_uz.begin() + static_cast<std::ptrdiff_t>(k)});
  std::set_union(res.selected_u.begin(), res.selected_u.end(), res.selected_uz.begin(), res.selected_uz.end(),
                 std::back_inserter(res.marked));

  // With eta = 0 but zeta > 0 the primal set is empty and so is k; the
  // combined criterion still asks for refinement. The selected sets keep
  // their equal (zero) cardinality.
  if (res.marked.empty() && !set_uz.empty())
    res.marked = res.set_uz;
  return res;
}

} // namespace goafem
