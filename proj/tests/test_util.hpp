#pragma once

#include <goafem/driver.hpp>

#include <memory>
#include <random>
#include <vector>

namespace testutil {

inline std::shared_ptr<const goafem::Mesh> share(goafem::Mesh m)
{
  return std::make_shared<const goafem::Mesh>(std::move(m));
}

// Random coefficient vector with zero boundary entries.
inline std::vector<double> random_interior(const goafem::FeSpace &space, std::mt19937 &rng, double scale = 1.0)
{
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(space.n_dofs(), 0.0);
  for (goafem::Index i = 0; i < v.size(); ++i)
    if (!space.is_boundary_dof(i))
      v[i] = dist(rng);
  return v;
}

// Uniform refinements of the initial mesh, k times.
inline goafem::Mesh refined_uniformly(goafem::Mesh m, int k)
{
  for (int i = 0; i < k; ++i)
    m = goafem::uniform_refine(m).first;
  return m;
}

// Random marked subset (nonempty) of the cells.
inline std::vector<goafem::Index> random_marks(const goafem::Mesh &m, std::mt19937 &rng, double fraction)
{
  std::bernoulli_distribution pick(fraction);
  std::vector<goafem::Index> out;
  for (goafem::Index c = 0; c < m.n_cells(); ++c)
    if (pick(rng))
      out.push_back(c);
  if (out.empty())
    out.push_back(std::uniform_int_distribution<goafem::Index>(0, m.n_cells() - 1)(rng));
  return out;
}

} // namespace testutil
