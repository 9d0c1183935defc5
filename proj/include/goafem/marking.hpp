#pragma once

#include <goafem/estimator.hpp>

#include <span>
#include <string>
#include <vector>

namespace goafem {

enum class Strategy
{
  goafem,   // product-structured marking on eta^2 and eta^2 + zeta^2
  afem,     // Doerfler on eta^2 only
  afem_plus // Doerfler on eta^2 + zeta^2
};

Strategy parse_strategy(const std::string &name); // "goafem", "afem", "afem-plus"
std::string to_string(Strategy s);

struct MarkConfig
{
  double theta = 0.5;
  Strategy strategy = Strategy::goafem;

  void validate() const;
};

/// Marked cell sets. All sets are stored in ascending index order.
struct MarkResult
{
  std::vector<Index> marked;
  std::vector<Index> set_u;       // Doerfler set for eta^2
  std::vector<Index> set_uz;      // Doerfler set for eta^2 + zeta^2
  std::vector<Index> selected_u;  // subset of set_u
  std::vector<Index> selected_uz; // subset of set_uz
};

/// Doerfler set of minimal cardinality: the shortest prefix of the cells
/// sorted by descending value (ties by ascending index) whose sum reaches
/// theta times the total. Returned in that descending order.
std::vector<Index> doerfler_min(std::span<const double> squared_indicators, double theta);

MarkResult mark(const IndicatorField &eta_sq, const IndicatorField &zeta_sq, const MarkConfig &config);

} // namespace goafem
