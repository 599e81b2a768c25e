#pragma once

// Network and dataset builders shared by the test suites. All randomness
// is seeded and flows through mt19937_64 only.

#include <random>
#include <string>
#include <vector>

#include "bnv/core.hpp"
#include "bnv/simulate.hpp"

namespace testnets {

using bnv::Cpt;
using bnv::Dag;
using bnv::Dataset;
using bnv::DiscreteBn;
using bnv::Variable;

inline Variable binary(const std::string& name) { return {name, {"low", "high"}}; }

inline std::vector<std::string> levels_for(int card) {
  std::vector<std::string> out;
  for (int k = 0; k < card; ++k) out.push_back("l" + std::to_string(k));
  return out;
}

// A single-variable network with the given root distribution.
inline DiscreteBn single_node(const std::vector<double>& row,
                              const std::string& name = "X") {
  Dag dag({{name, levels_for(static_cast<int>(row.size()))}}, {});
  return DiscreteBn(dag, {Cpt{0, {}, {row}}});
}

// Two independent uniform binary nodes.
inline DiscreteBn two_uniform_binary() {
  Dag dag({binary("A"), binary("B")}, {});
  return DiscreteBn(dag, {Cpt{0, {}, {{0.5, 0.5}}}, Cpt{1, {}, {{0.5, 0.5}}}});
}

// The five-node example DAG with edges (0,2),(0,3),(1,3),(2,4),(3,4).
inline Dag five_node_dag() {
  std::vector<Variable> vars;
  for (int i = 1; i <= 5; ++i) vars.push_back(binary("Y" + std::to_string(i)));
  return Dag(std::move(vars), {{0, 2}, {0, 3}, {1, 3}, {2, 4}, {3, 4}});
}

inline std::vector<double> random_row(std::mt19937_64& rng, int card) {
  // entries bounded away from zero so every joint state has positive mass
  std::vector<double> row(static_cast<std::size_t>(card));
  double sum = 0.0;
  for (double& p : row) {
    p = 0.1 + 0.9 * bnv::next_uniform(rng);
    sum += p;
  }
  for (double& p : row) p /= sum;
  return row;
}

inline DiscreteBn random_cpts(const Dag& dag, std::mt19937_64& rng) {
  std::vector<Cpt> cpts;
  for (int i = 0; i < dag.size(); ++i) {
    Cpt c;
    c.node = i;
    c.parents = dag.parents(i);
    const std::size_t rows = bnv::row_count(dag, c.parents);
    for (std::size_t j = 0; j < rows; ++j)
      c.rows.push_back(random_row(rng, dag.cardinality(i)));
    cpts.push_back(std::move(c));
  }
  return DiscreteBn(dag, std::move(cpts));
}

// Random DAG over n variables with cardinalities in {2,3}; each forward
// pair is an edge with the given probability.
inline Dag random_dag(std::mt19937_64& rng, int n, double edge_prob = 0.4) {
  std::vector<Variable> vars;
  for (int i = 0; i < n; ++i) {
    const int card = bnv::next_uniform(rng) < 0.5 ? 2 : 3;
    vars.push_back({"V" + std::to_string(i), levels_for(card)});
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (bnv::next_uniform(rng) < edge_prob) edges.emplace_back(i, j);
  return Dag(std::move(vars), std::move(edges));
}

inline DiscreteBn random_bn(std::mt19937_64& rng, int n, double edge_prob = 0.4) {
  return random_cpts(random_dag(rng, n, edge_prob), rng);
}

// A fixed 5-node binary network used by the calibration checks. Every
// node's true marginal stays well away from uniform: near-uniform
// marginals have a vanishing log-score variance, which lets the plug-in
// estimation bias dominate the standardization.
inline DiscreteBn calibration_bn() {
  std::vector<Variable> vars;
  for (int i = 0; i < 5; ++i) vars.push_back(binary("N" + std::to_string(i)));
  Dag dag(std::move(vars), {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}});
  std::vector<Cpt> cpts;
  cpts.push_back(Cpt{0, {}, {{0.25, 0.75}}});
  cpts.push_back(Cpt{1, {0}, {{0.8, 0.2}, {0.6, 0.4}}});
  cpts.push_back(Cpt{2, {0}, {{0.9, 0.1}, {0.55, 0.45}}});
  cpts.push_back(Cpt{3, {1, 2}, {{0.85, 0.15}, {0.7, 0.3}, {0.65, 0.35}, {0.4, 0.6}}});
  cpts.push_back(Cpt{4, {3}, {{0.75, 0.25}, {0.35, 0.65}}});
  return DiscreteBn(dag, std::move(cpts));
}

}  // namespace testnets
