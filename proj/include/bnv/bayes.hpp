#pragma once

// Dirichlet-multinomial machinery: priors, count accumulation, posterior
// means, one-step predictive probabilities and the (ordered) sequence
// marginal likelihood. This is the computational substrate of every
// monitor.
//
// The sequence marginal likelihood used throughout is the ORDERED one: it
// equals the prequential product of one-step-ahead predictives and carries
// no multinomial coefficient. Counts are sufficient statistics, so the
// value is invariant under row permutation.

#include <cmath>
#include <cstdint>

#include "bnv/core.hpp"

namespace bnv {

// One (rows x levels) table per node, congruent with the node's CPT shape.
template <class T>
struct NodeTable {
  std::size_t n_rows = 0;
  std::size_t n_levels = 0;
  std::vector<T> cells;  // row-major

  T& at(std::size_t row, std::size_t level) { return cells[row * n_levels + level]; }
  const T& at(std::size_t row, std::size_t level) const {
    return cells[row * n_levels + level];
  }
  T row_total(std::size_t row) const {
    T s{};
    for (std::size_t k = 0; k < n_levels; ++k) s += at(row, k);
    return s;
  }
};

template <class T>
std::vector<NodeTable<T>> make_node_tables(const Dag& dag, T fill = T{}) {
  std::vector<NodeTable<T>> tables;
  tables.reserve(static_cast<std::size_t>(dag.size()));
  for (int i = 0; i < dag.size(); ++i) {
    NodeTable<T> t;
    t.n_rows = row_count(dag, dag.parents(i));
    t.n_levels = static_cast<std::size_t>(dag.cardinality(i));
    t.cells.assign(t.n_rows * t.n_levels, fill);
    tables.push_back(std::move(t));
  }
  return tables;
}

// Hyperparameters alpha_{ijk} > 0, one per CPT cell.
struct DirichletSpec {
  std::vector<NodeTable<double>> nodes;

  double alpha(int node, std::size_t row, std::size_t level) const {
    return nodes[static_cast<std::size_t>(node)].at(row, level);
  }
  double row_total(int node, std::size_t row) const {
    return nodes[static_cast<std::size_t>(node)].row_total(row);
  }
};

inline void validate_prior(const DirichletSpec& prior, const Dag& dag) {
  if (prior.nodes.size() != static_cast<std::size_t>(dag.size()))
    throw ValidationError("prior shape does not match the network");
  for (int i = 0; i < dag.size(); ++i) {
    const auto& t = prior.nodes[static_cast<std::size_t>(i)];
    if (t.n_rows != row_count(dag, dag.parents(i)) ||
        t.n_levels != static_cast<std::size_t>(dag.cardinality(i)))
      throw ValidationError("prior shape mismatch at '" + dag.var(i).name + "'");
    for (double a : t.cells)
      if (!(a > 0.0))
        throw ValidationError("non-positive Dirichlet hyperparameter at '" +
                              dag.var(i).name + "'");
  }
}

// Default prior: every alpha_{ijk} equals the node's cardinality.
inline DirichletSpec default_prior(const Dag& dag) {
  DirichletSpec prior{make_node_tables<double>(dag)};
  for (int i = 0; i < dag.size(); ++i) {
    auto& t = prior.nodes[static_cast<std::size_t>(i)];
    std::fill(t.cells.begin(), t.cells.end(), static_cast<double>(dag.cardinality(i)));
  }
  return prior;
}

// Scalar override: every alpha_{ijk} = alpha, replacing the per-node default.
inline DirichletSpec uniform_prior(const Dag& dag, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("alpha override must be positive");
  DirichletSpec prior{make_node_tables<double>(dag)};
  for (auto& t : prior.nodes) std::fill(t.cells.begin(), t.cells.end(), alpha);
  return prior;
}

// Sufficient statistics N_{ijk}.
struct CountTable {
  std::vector<NodeTable<std::int64_t>> nodes;

  std::int64_t count(int node, std::size_t row, std::size_t level) const {
    return nodes[static_cast<std::size_t>(node)].at(row, level);
  }
  std::int64_t row_total(int node, std::size_t row) const {
    return nodes[static_cast<std::size_t>(node)].row_total(row);
  }
};

inline CountTable empty_counts(const Dag& dag) {
  return CountTable{make_node_tables<std::int64_t>(dag)};
}

// The (row, level) cell of `node` addressed by a full observation.
inline std::pair<std::size_t, std::size_t> observation_cell(const Dag& dag, int node,
                                                            std::span<const int> observation) {
  const auto& parents = dag.parents(node);
  std::vector<int> pa(parents.size());
  for (std::size_t t = 0; t < parents.size(); ++t)
    pa[t] = observation[static_cast<std::size_t>(parents[t])];
  auto cards = dag.cards_of(parents);
  const int k = observation[static_cast<std::size_t>(node)];
  if (k < 0 || k >= dag.cardinality(node))
    throw ValidationError("observation level out of range for '" + dag.var(node).name + "'");
  return {config_index(cards, pa), static_cast<std::size_t>(k)};
}

// Exactly one N_{ijk} per node is incremented.
inline void accumulate(CountTable& counts, const Dag& dag, std::span<const int> observation) {
  if (observation.size() != static_cast<std::size_t>(dag.size()))
    throw ValidationError("observation must cover every variable");
  for (int i = 0; i < dag.size(); ++i) {
    auto [row, level] = observation_cell(dag, i, observation);
    ++counts.nodes[static_cast<std::size_t>(i)].at(row, level);
  }
}

inline void decrement(CountTable& counts, const Dag& dag, std::span<const int> observation) {
  for (int i = 0; i < dag.size(); ++i) {
    auto [row, level] = observation_cell(dag, i, observation);
    auto& cell = counts.nodes[static_cast<std::size_t>(i)].at(row, level);
    if (cell <= 0) throw ValidationError("count decrement below zero");
    --cell;
  }
}

inline CountTable tabulate(const Dag& dag, const Dataset& data) {
  CountTable counts = empty_counts(dag);
  for (const auto& row : data.rows) accumulate(counts, dag, row);
  return counts;
}

// One-step-ahead predictive for a single node value given a parent
// configuration: (alpha + N) / (alpha_row + N_row). Numerically identical
// to the posterior-mean CPT entry; exposed separately because monitors
// evaluate it per observation on evolving counts.
inline double predictive_node_prob(const DirichletSpec& prior, const CountTable& counts,
                                   int node, std::size_t row, std::size_t level) {
  const auto& a = prior.nodes[static_cast<std::size_t>(node)];
  const auto& n = counts.nodes[static_cast<std::size_t>(node)];
  return (a.at(row, level) + static_cast<double>(n.at(row, level))) /
         (a.row_total(row) + static_cast<double>(n.row_total(row)));
}

// Posterior-mean network: theta_{ijk} = (alpha+N)/(alpha_row+N_row).
// Strictly positive for any positive prior, even with zero counts.
inline DiscreteBn posterior_mean_bn(const Dag& dag, const DirichletSpec& prior,
                                    const CountTable& counts) {
  std::vector<Cpt> cpts;
  cpts.reserve(static_cast<std::size_t>(dag.size()));
  for (int i = 0; i < dag.size(); ++i) {
    const auto& a = prior.nodes[static_cast<std::size_t>(i)];
    const auto& n = counts.nodes[static_cast<std::size_t>(i)];
    Cpt c;
    c.node = i;
    c.parents = dag.parents(i);
    c.rows.resize(a.n_rows);
    for (std::size_t j = 0; j < a.n_rows; ++j) {
      const double denom = a.row_total(j) + static_cast<double>(n.row_total(j));
      auto& row = c.rows[j];
      row.resize(a.n_levels);
      for (std::size_t k = 0; k < a.n_levels; ++k)
        row[k] = (a.at(j, k) + static_cast<double>(n.at(j, k))) / denom;
    }
    cpts.push_back(std::move(c));
  }
  return DiscreteBn(dag, std::move(cpts));
}

// Maximum-likelihood network: theta_{ijk} = N/N_row. Rows with no
// observations fall back to uniform; each fallback appends a note.
inline DiscreteBn mle_bn(const Dag& dag, const CountTable& counts,
                         std::vector<std::string>* notes = nullptr) {
  std::vector<Cpt> cpts;
  cpts.reserve(static_cast<std::size_t>(dag.size()));
  for (int i = 0; i < dag.size(); ++i) {
    const auto& n = counts.nodes[static_cast<std::size_t>(i)];
    Cpt c;
    c.node = i;
    c.parents = dag.parents(i);
    c.rows.resize(n.n_rows);
    for (std::size_t j = 0; j < n.n_rows; ++j) {
      const std::int64_t total = n.row_total(j);
      auto& row = c.rows[j];
      row.resize(n.n_levels);
      if (total == 0) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n.n_levels));
        if (notes)
          notes->push_back("unseen parent configuration " + std::to_string(j) + " of '" +
                           dag.var(i).name + "': using a uniform row");
      } else {
        for (std::size_t k = 0; k < n.n_levels; ++k)
          row[k] = static_cast<double>(n.at(j, k)) / static_cast<double>(total);
      }
    }
    cpts.push_back(std::move(c));
  }
  return DiscreteBn(dag, std::move(cpts));
}

// Per-node log of the ordered sequence marginal likelihood:
//   sum_j [ lgamma(a_j) - lgamma(a_j + N_j)
//           + sum_k ( lgamma(a_jk + N_jk) - lgamma(a_jk) ) ]
// The total over nodes equals the log of the prequential product of
// one-step predictives for the whole dataset.
inline std::vector<double> log_marginal_likelihood(const Dag& dag, const Dataset& data,
                                                   const DirichletSpec& prior) {
  validate_dataset(data, dag);
  validate_prior(prior, dag);
  const CountTable counts = tabulate(dag, data);
  std::vector<double> scores(static_cast<std::size_t>(dag.size()), 0.0);
  for (int i = 0; i < dag.size(); ++i) {
    const auto& a = prior.nodes[static_cast<std::size_t>(i)];
    const auto& n = counts.nodes[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (std::size_t j = 0; j < a.n_rows; ++j) {
      const std::int64_t nj = n.row_total(j);
      if (nj == 0) continue;  // empty configuration contributes log 1
      const double aj = a.row_total(j);
      s += std::lgamma(aj) - std::lgamma(aj + static_cast<double>(nj));
      for (std::size_t k = 0; k < a.n_levels; ++k) {
        const std::int64_t njk = n.at(j, k);
        if (njk == 0) continue;
        s += std::lgamma(a.at(j, k) + static_cast<double>(njk)) - std::lgamma(a.at(j, k));
      }
    }
    scores[static_cast<std::size_t>(i)] = s;
  }
  return scores;
}

}  // namespace bnv
