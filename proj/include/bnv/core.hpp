#pragma once

// Core model types: variables, DAGs, conditional probability tables,
// networks and datasets. Everything is a value type, immutable after
// construction, and validated on construction. All other headers build
// on these.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bnv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad graph, bad table, bad dataset, bad reference.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Well-formed input on which the requested computation is not defined
// (impossible evidence, degenerate co-variation, order violation).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// Probability rows must sum to 1 within this tolerance.
inline constexpr double kRowSumTol = 1e-9;

struct Variable {
  std::string name;
  std::vector<std::string> levels;  // order is significant: it indexes CPT columns

  int cardinality() const { return static_cast<int>(levels.size()); }

  // Level labels are case-sensitive. Throws if the label is unknown.
  int level_index(const std::string& label) const {
    for (std::size_t k = 0; k < levels.size(); ++k)
      if (levels[k] == label) return static_cast<int>(k);
    throw ValidationError("variable '" + name + "' has no level '" + label + "'");
  }
};

inline void validate_variable(const Variable& v) {
  if (v.name.empty()) throw ValidationError("variable with empty name");
  if (v.levels.empty())
    throw ValidationError("variable '" + v.name + "' has no levels");
  for (std::size_t a = 0; a < v.levels.size(); ++a)
    for (std::size_t b = a + 1; b < v.levels.size(); ++b)
      if (v.levels[a] == v.levels[b])
        throw ValidationError("variable '" + v.name + "' has duplicate level '" +
                              v.levels[a] + "'");
}

// ---------------------------------------------------------------------------
// Mixed-radix configuration indexing.
//
// A configuration over variables with cardinalities (c_0,...,c_{q-1}) is
// mapped to a linear index lexicographically with the LAST variable varying
// fastest: index = ((v_0*c_1 + v_1)*c_2 + v_2)... This one convention is used
// everywhere: CPT rows, factor tables, joint enumerations and file formats.
// ---------------------------------------------------------------------------

inline std::size_t config_count(std::span<const int> cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

inline std::size_t config_index(std::span<const int> cards, std::span<const int> values) {
  if (cards.size() != values.size())
    throw ValidationError("configuration length mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    if (values[i] < 0 || values[i] >= cards[i])
      throw ValidationError("level index " + std::to_string(values[i]) +
                            " out of range for cardinality " + std::to_string(cards[i]));
    idx = idx * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(values[i]);
  }
  return idx;
}

// Inverse of config_index.
inline std::vector<int> config_values(std::span<const int> cards, std::size_t index) {
  std::vector<int> values(cards.size());
  for (std::size_t i = cards.size(); i-- > 0;) {
    values[i] = static_cast<int>(index % static_cast<std::size_t>(cards[i]));
    index /= static_cast<std::size_t>(cards[i]);
  }
  if (index != 0) throw ValidationError("configuration index out of range");
  return values;
}

// ---------------------------------------------------------------------------
// Dag
// ---------------------------------------------------------------------------

class Dag {
 public:
  Dag(std::vector<Variable> variables, std::vector<std::pair<int, int>> edges)
      : vars_(std::move(variables)), edges_(std::move(edges)) {
    const int n = static_cast<int>(vars_.size());
    for (const auto& v : vars_) validate_variable(v);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (vars_[i].name == vars_[j].name)
          throw ValidationError("duplicate variable name '" + vars_[i].name + "'");

    parents_.assign(n, {});
    children_.assign(n, {});
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      auto [p, c] = edges_[e];
      if (p < 0 || p >= n || c < 0 || c >= n)
        throw ValidationError("edge endpoint out of range");
      if (p == c)
        throw ValidationError("self-loop on variable '" + vars_[p].name + "'");
      if (e > 0 && edges_[e] == edges_[e - 1])
        throw ValidationError("duplicate edge " + vars_[p].name + " -> " + vars_[c].name);
      parents_[c].push_back(p);
      children_[p].push_back(c);
    }
    for (auto& ps : parents_) std::sort(ps.begin(), ps.end());
    for (auto& cs : children_) std::sort(cs.begin(), cs.end());

    // Kahn's algorithm; ready nodes taken lowest-index-first so the order
    // is deterministic.
    std::vector<int> indeg(n);
    for (int i = 0; i < n; ++i) indeg[i] = static_cast<int>(parents_[i].size());
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
      if (indeg[i] == 0) ready.push_back(i);
    topo_.reserve(n);
    while (!ready.empty()) {
      std::pop_heap(ready.begin(), ready.end(), std::greater<>());
      int u = ready.back();
      ready.pop_back();
      topo_.push_back(u);
      for (int c : children_[u])
        if (--indeg[c] == 0) {
          ready.push_back(c);
          std::push_heap(ready.begin(), ready.end(), std::greater<>());
        }
    }
    if (static_cast<int>(topo_.size()) != n)
      throw ValidationError("cycle detected in DAG");
  }

  int size() const { return static_cast<int>(vars_.size()); }
  const Variable& var(int i) const { return vars_.at(i); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Parents and children are kept in ascending index order; this is the
  // canonical parent order used by CPTs and file formats.
  const std::vector<int>& parents(int i) const { return parents_.at(i); }
  const std::vector<int>& children(int i) const { return children_.at(i); }
  const std::vector<int>& topological_order() const { return topo_; }

  int cardinality(int i) const { return vars_.at(i).cardinality(); }

  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (vars_[i].name == name) return i;
    throw ValidationError("unknown variable '" + name + "'");
  }

  std::vector<int> cards_of(std::span<const int> vars) const {
    std::vector<int> cards;
    cards.reserve(vars.size());
    for (int v : vars) cards.push_back(cardinality(v));
    return cards;
  }

  // All ancestors of the seed set, seeds included.
  std::vector<bool> ancestral_set(std::span<const int> seeds) const {
    std::vector<bool> in(size(), false);
    std::vector<int> stack(seeds.begin(), seeds.end());
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (u < 0 || u >= size()) throw ValidationError("variable index out of range");
      if (in[u]) continue;
      in[u] = true;
      for (int p : parents_[u]) stack.push_back(p);
    }
    return in;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> topo_;
};

// ---------------------------------------------------------------------------
// Cpt
// ---------------------------------------------------------------------------

struct Cpt {
  int node = -1;
  std::vector<int> parents;               // must equal Dag::parents(node)
  std::vector<std::vector<double>> rows;  // rows[parent config][level]
};

inline std::size_t row_count(const Dag& dag, std::span<const int> parents) {
  auto cards = dag.cards_of(parents);
  return config_count(cards);
}

// Lexicographic row index of a parent configuration, last parent fastest.
inline std::size_t parent_config_index(const Dag& dag, const Cpt& cpt,
                                       std::span<const int> parent_values) {
  auto cards = dag.cards_of(cpt.parents);
  return config_index(cards, parent_values);
}

// Inverse of parent_config_index.
inline std::vector<int> parent_config_values(const Dag& dag, const Cpt& cpt,
                                             std::size_t row) {
  auto cards = dag.cards_of(cpt.parents);
  return config_values(cards, row);
}

inline void validate_cpt(const Dag& dag, const Cpt& cpt) {
  if (cpt.node < 0 || cpt.node >= dag.size())
    throw ValidationError("CPT node index out of range");
  const std::string& name = dag.var(cpt.node).name;
  if (cpt.parents != dag.parents(cpt.node))
    throw ValidationError("CPT parents of '" + name +
                          "' do not match the DAG parents (canonical order)");
  const std::size_t want_rows = row_count(dag, cpt.parents);
  if (cpt.rows.size() != want_rows)
    throw ValidationError("CPT of '" + name + "' has " + std::to_string(cpt.rows.size()) +
                          " rows, expected " + std::to_string(want_rows));
  const std::size_t card = static_cast<std::size_t>(dag.cardinality(cpt.node));
  for (std::size_t j = 0; j < cpt.rows.size(); ++j) {
    const auto& row = cpt.rows[j];
    if (row.size() != card)
      throw ValidationError("CPT row " + std::to_string(j) + " of '" + name +
                            "' has wrong length");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("CPT entry of '" + name + "' outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw ValidationError("CPT row " + std::to_string(j) + " of '" + name +
                            "' sums to " + std::to_string(sum) + ", not 1");
  }
}

// ---------------------------------------------------------------------------
// ParamRef: the address of one CPT entry, the unit of sensitivity analysis.
// ---------------------------------------------------------------------------

struct ParamRef {
  int node = -1;
  int value = -1;                 // level index k
  std::vector<int> parent_config; // one level index per parent, empty for roots

  bool operator==(const ParamRef&) const = default;
};

// ---------------------------------------------------------------------------
// DiscreteBn
// ---------------------------------------------------------------------------

class DiscreteBn {
 public:
  // build_network: validates one CPT per node, parent match, row
  // normalization and cardinalities. Validation is total; there is no
  // silent repair.
  DiscreteBn(Dag dag, std::vector<Cpt> cpts)
      : dag_(std::move(dag)), cpts_(std::move(cpts)) {
    if (cpts_.size() != static_cast<std::size_t>(dag_.size()))
      throw ValidationError("expected one CPT per variable");
    std::vector<bool> seen(dag_.size(), false);
    for (const auto& c : cpts_) {
      validate_cpt(dag_, c);
      if (seen[c.node])
        throw ValidationError("duplicate CPT for '" + dag_.var(c.node).name + "'");
      seen[c.node] = true;
    }
    // store in node order
    std::sort(cpts_.begin(), cpts_.end(),
              [](const Cpt& a, const Cpt& b) { return a.node < b.node; });
  }

  const Dag& dag() const { return dag_; }
  const Cpt& cpt(int node) const { return cpts_.at(node); }
  const std::vector<Cpt>& cpts() const { return cpts_; }

  std::size_t param_row_index(const ParamRef& p) const {
    return parent_config_index(dag_, cpt(p.node), p.parent_config);
  }

  double param(const ParamRef& p) const {
    const Cpt& c = cpt(p.node);
    if (p.value < 0 || p.value >= dag_.cardinality(p.node))
      throw ValidationError("parameter level index out of range");
    return c.rows.at(param_row_index(p)).at(static_cast<std::size_t>(p.value));
  }

  // Copy with one CPT row replaced; the row is validated.
  DiscreteBn with_row(int node, std::size_t row_index, std::vector<double> row) const {
    std::vector<Cpt> cpts = cpts_;
    cpts.at(node).rows.at(row_index) = std::move(row);
    validate_cpt(dag_, cpts.at(node));
    return DiscreteBn(dag_, std::move(cpts));
  }

 private:
  Dag dag_;
  std::vector<Cpt> cpts_;
};

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

struct Dataset {
  std::vector<std::string> variables;   // names, in the owning Dag's order
  std::vector<std::vector<int>> rows;   // level indices; row order is significant

  std::size_t size() const { return rows.size(); }
};

inline void validate_dataset(const Dataset& data, const Dag& dag) {
  if (data.variables.size() != static_cast<std::size_t>(dag.size()))
    throw ValidationError("dataset has " + std::to_string(data.variables.size()) +
                          " columns, DAG has " + std::to_string(dag.size()));
  for (int i = 0; i < dag.size(); ++i)
    if (data.variables[i] != dag.var(i).name)
      throw ValidationError("dataset column '" + data.variables[i] +
                            "' does not match variable '" + dag.var(i).name + "'");
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    if (data.rows[r].size() != static_cast<std::size_t>(dag.size()))
      throw ValidationError("dataset row " + std::to_string(r) + " has wrong length");
    for (int i = 0; i < dag.size(); ++i) {
      int v = data.rows[r][i];
      if (v < 0 || v >= dag.cardinality(i))
        throw ValidationError("dataset cell (" + std::to_string(r) + ", " +
                              dag.var(i).name + ") has invalid level index");
    }
  }
}

}  // namespace bnv
