#pragma once

// Seeded forward sampling from a DiscreteBn. The only randomness in the
// library; core analyses are fully deterministic. Uniform doubles are
// derived from the mt19937_64 stream directly so that sampled datasets are
// reproducible across standard libraries.

#include <random>

#include "bnv/core.hpp"

namespace bnv {

inline double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int sample_level(std::span<const double> row, std::mt19937_64& rng) {
  const double u = next_uniform(rng);
  double cum = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    cum += row[k];
    if (u < cum) return static_cast<int>(k);
  }
  return static_cast<int>(row.size()) - 1;  // guard against rounding at the tail
}

// One observation in variable-index order, sampled along the topological
// order.
inline std::vector<int> sample_observation(const DiscreteBn& bn, std::mt19937_64& rng) {
  const Dag& dag = bn.dag();
  std::vector<int> obs(static_cast<std::size_t>(dag.size()), -1);
  for (int i : dag.topological_order()) {
    const Cpt& c = bn.cpt(i);
    std::vector<int> pa(c.parents.size());
    for (std::size_t t = 0; t < c.parents.size(); ++t)
      pa[t] = obs[static_cast<std::size_t>(c.parents[t])];
    const std::size_t row = parent_config_index(dag, c, pa);
    obs[static_cast<std::size_t>(i)] = sample_level(c.rows[row], rng);
  }
  return obs;
}

inline Dataset simulate(const DiscreteBn& bn, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset data;
  for (const auto& v : bn.dag().variables()) data.variables.push_back(v.name);
  data.rows.reserve(m);
  for (std::size_t r = 0; r < m; ++r) data.rows.push_back(sample_observation(bn, rng));
  return data;
}

}  // namespace bnv
