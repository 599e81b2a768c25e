#pragma once

// Exact probabilistic queries on a DiscreteBn: joint evaluation,
// marginal/conditional queries via variable elimination, a full-joint
// enumeration oracle, and d-separation.
//
// Factors store linear probabilities. Underflow is acceptable at the
// validation scales this library targets (n <= ~30 variables).

#include <limits>
#include <map>
#include <numeric>

#include "bnv/core.hpp"

namespace bnv {

// A nonnegative table over the joint level space of its scope. The scope is
// kept sorted ascending and the table uses the module-wide mixed-radix
// layout (last scope variable fastest).
struct Factor {
  std::vector<int> vars;   // ascending
  std::vector<int> cards;  // cards[i] = cardinality of vars[i]
  std::vector<double> table;

  static Factor unit() { return Factor{{}, {}, {1.0}}; }
};

struct Query {
  std::vector<int> targets;     // output variables O
  std::map<int, int> evidence;  // E: variable -> observed level

  Query() = default;
  Query(std::vector<int> t, std::map<int, int> e)
      : targets(std::move(t)), evidence(std::move(e)) {}
};

// Distribution over the joint level space of `vars` (ascending order,
// last variable fastest).
struct QueryResult {
  std::vector<int> vars;
  std::vector<int> cards;
  std::vector<double> p;

  double at(std::span<const int> values) const {
    return p[config_index(cards, values)];
  }
};

namespace detail {

inline Factor cpt_factor(const DiscreteBn& bn, int node) {
  const Cpt& c = bn.cpt(node);
  Factor f;
  f.vars = c.parents;
  f.vars.push_back(node);
  std::sort(f.vars.begin(), f.vars.end());
  f.cards = bn.dag().cards_of(f.vars);
  f.table.assign(config_count(f.cards), 0.0);

  // native CPT layout is (parents..., node) with node fastest
  std::vector<int> native_vars = c.parents;
  native_vars.push_back(node);
  std::vector<int> native_cards = bn.dag().cards_of(native_vars);
  // position of each native var in the sorted scope
  std::vector<int> pos(native_vars.size());
  for (std::size_t i = 0; i < native_vars.size(); ++i)
    pos[i] = static_cast<int>(std::lower_bound(f.vars.begin(), f.vars.end(),
                                               native_vars[i]) -
                              f.vars.begin());

  const std::size_t total = config_count(native_cards);
  std::vector<int> values(native_vars.size(), 0);
  std::vector<int> scoped(f.vars.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (std::size_t i = 0; i < native_vars.size(); ++i) scoped[pos[i]] = values[i];
    const std::size_t row = idx / native_cards.back();
    const int k = values.back();
    f.table[config_index(f.cards, scoped)] = c.rows[row][static_cast<std::size_t>(k)];
    // advance mixed-radix counter, last digit fastest
    for (std::size_t i = native_vars.size(); i-- > 0;) {
      if (++values[i] < native_cards[i]) break;
      values[i] = 0;
    }
  }
  return f;
}

inline Factor multiply(const Factor& a, const Factor& b, const Dag& dag) {
  Factor out;
  out.vars.resize(a.vars.size() + b.vars.size());
  auto end = std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(),
                            b.vars.end(), out.vars.begin());
  out.vars.resize(static_cast<std::size_t>(end - out.vars.begin()));
  out.cards = dag.cards_of(out.vars);
  out.table.assign(config_count(out.cards), 0.0);

  std::vector<int> apos, bpos;
  for (int v : a.vars)
    apos.push_back(static_cast<int>(std::lower_bound(out.vars.begin(), out.vars.end(), v) -
                                    out.vars.begin()));
  for (int v : b.vars)
    bpos.push_back(static_cast<int>(std::lower_bound(out.vars.begin(), out.vars.end(), v) -
                                    out.vars.begin()));

  std::vector<int> values(out.vars.size(), 0);
  std::vector<int> av(a.vars.size()), bv(b.vars.size());
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    for (std::size_t i = 0; i < apos.size(); ++i) av[i] = values[apos[i]];
    for (std::size_t i = 0; i < bpos.size(); ++i) bv[i] = values[bpos[i]];
    out.table[idx] = a.table[config_index(a.cards, av)] * b.table[config_index(b.cards, bv)];
    for (std::size_t i = values.size(); i-- > 0;) {
      if (++values[i] < out.cards[i]) break;
      values[i] = 0;
    }
  }
  return out;
}

inline Factor sum_out(const Factor& f, int var, const Dag& dag) {
  auto it = std::lower_bound(f.vars.begin(), f.vars.end(), var);
  if (it == f.vars.end() || *it != var) return f;
  const std::size_t d = static_cast<std::size_t>(it - f.vars.begin());

  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(d));
  out.cards = dag.cards_of(out.vars);
  out.table.assign(config_count(out.cards), 0.0);

  std::vector<int> values(f.vars.size(), 0);
  std::vector<int> kept(out.vars.size());
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    std::size_t o = 0;
    for (std::size_t i = 0; i < f.vars.size(); ++i)
      if (i != d) kept[o++] = values[i];
    out.table[config_index(out.cards, kept)] += f.table[idx];
    for (std::size_t i = values.size(); i-- > 0;) {
      if (++values[i] < f.cards[i]) break;
      values[i] = 0;
    }
  }
  return out;
}

inline Factor restrict_to(const Factor& f, int var, int level, const Dag& dag) {
  auto it = std::lower_bound(f.vars.begin(), f.vars.end(), var);
  if (it == f.vars.end() || *it != var) return f;
  const std::size_t d = static_cast<std::size_t>(it - f.vars.begin());

  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(d));
  out.cards = dag.cards_of(out.vars);
  out.table.assign(config_count(out.cards), 0.0);

  std::vector<int> values(f.vars.size(), 0);
  std::vector<int> kept(out.vars.size());
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    if (values[d] == level) {
      std::size_t o = 0;
      for (std::size_t i = 0; i < f.vars.size(); ++i)
        if (i != d) kept[o++] = values[i];
      out.table[config_index(out.cards, kept)] = f.table[idx];
    }
    for (std::size_t i = values.size(); i-- > 0;) {
      if (++values[i] < f.cards[i]) break;
      values[i] = 0;
    }
  }
  return out;
}

// Greedy min-degree ordering over the factor interaction graph; ties broken
// by lowest variable index for determinism.
inline std::vector<int> min_degree_order(const Dag& dag,
                                         const std::vector<Factor>& factors,
                                         const std::vector<bool>& keep) {
  const int n = dag.size();
  std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n),
                                     std::vector<bool>(static_cast<std::size_t>(n), false));
  std::vector<bool> present(static_cast<std::size_t>(n), false);
  for (const auto& f : factors)
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
      present[static_cast<std::size_t>(f.vars[i])] = true;
      for (std::size_t j = i + 1; j < f.vars.size(); ++j) {
        adj[static_cast<std::size_t>(f.vars[i])][static_cast<std::size_t>(f.vars[j])] = true;
        adj[static_cast<std::size_t>(f.vars[j])][static_cast<std::size_t>(f.vars[i])] = true;
      }
    }

  std::vector<int> order;
  std::vector<bool> gone(static_cast<std::size_t>(n), false);
  while (true) {
    int best = -1, best_deg = std::numeric_limits<int>::max();
    for (int v = 0; v < n; ++v) {
      if (!present[static_cast<std::size_t>(v)] || gone[static_cast<std::size_t>(v)] ||
          keep[static_cast<std::size_t>(v)])
        continue;
      int deg = 0;
      for (int u = 0; u < n; ++u)
        if (u != v && !gone[static_cast<std::size_t>(u)] &&
            adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)])
          ++deg;
      if (deg < best_deg) {
        best_deg = deg;
        best = v;
      }
    }
    if (best < 0) break;
    order.push_back(best);
    gone[static_cast<std::size_t>(best)] = true;
    // connect the eliminated variable's neighbours
    std::vector<int> nb;
    for (int u = 0; u < n; ++u)
      if (u != best && !gone[static_cast<std::size_t>(u)] &&
          adj[static_cast<std::size_t>(best)][static_cast<std::size_t>(u)])
        nb.push_back(u);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        adj[static_cast<std::size_t>(nb[i])][static_cast<std::size_t>(nb[j])] = true;
        adj[static_cast<std::size_t>(nb[j])][static_cast<std::size_t>(nb[i])] = true;
      }
  }
  return order;
}

}  // namespace detail

// p_G(y) for a full assignment: the factorization product of one CPT entry
// per variable.
inline double joint_probability(const DiscreteBn& bn, std::span<const int> assignment) {
  const Dag& dag = bn.dag();
  if (assignment.size() != static_cast<std::size_t>(dag.size()))
    throw ValidationError("assignment must cover every variable");
  double p = 1.0;
  for (int i = 0; i < dag.size(); ++i) {
    const Cpt& c = bn.cpt(i);
    std::vector<int> pa(c.parents.size());
    for (std::size_t t = 0; t < c.parents.size(); ++t)
      pa[t] = assignment[static_cast<std::size_t>(c.parents[t])];
    const int k = assignment[static_cast<std::size_t>(i)];
    if (k < 0 || k >= dag.cardinality(i))
      throw ValidationError("assignment level out of range for '" + dag.var(i).name + "'");
    p *= c.rows[parent_config_index(dag, c, pa)][static_cast<std::size_t>(k)];
  }
  return p;
}

inline void validate_query(const Dag& dag, const Query& q) {
  std::vector<bool> is_target(dag.size(), false);
  if (q.targets.empty()) throw ValidationError("query has no target variables");
  for (int t : q.targets) {
    if (t < 0 || t >= dag.size()) throw ValidationError("query target out of range");
    if (is_target[static_cast<std::size_t>(t)])
      throw ValidationError("duplicate query target '" + dag.var(t).name + "'");
    is_target[static_cast<std::size_t>(t)] = true;
  }
  for (const auto& [v, level] : q.evidence) {
    if (v < 0 || v >= dag.size()) throw ValidationError("evidence variable out of range");
    if (is_target[static_cast<std::size_t>(v)])
      throw ValidationError("'" + dag.var(v).name + "' is both target and evidence");
    if (level < 0 || level >= dag.cardinality(v))
      throw ValidationError("evidence level out of range for '" + dag.var(v).name + "'");
  }
}

// Exact conditional p_G(y_O | y_E) by variable elimination with the given
// elimination order (which must cover every non-target, non-evidence
// variable). Exposed for the order-independence property; prefer query().
inline QueryResult query_with_order(const DiscreteBn& bn, const Query& q,
                                    std::span<const int> order) {
  const Dag& dag = bn.dag();
  validate_query(dag, q);

  std::vector<Factor> factors;
  factors.reserve(static_cast<std::size_t>(dag.size()));
  for (int i = 0; i < dag.size(); ++i) {
    Factor f = detail::cpt_factor(bn, i);
    for (const auto& [v, level] : q.evidence) f = detail::restrict_to(f, v, level, dag);
    factors.push_back(std::move(f));
  }

  for (int v : order) {
    Factor prod = Factor::unit();
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::binary_search(f.vars.begin(), f.vars.end(), v))
        prod = detail::multiply(prod, f, dag);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(detail::sum_out(prod, v, dag));
    factors = std::move(rest);
  }

  Factor joint = Factor::unit();
  for (const auto& f : factors) joint = detail::multiply(joint, f, dag);

  // the remaining scope must be exactly the targets
  std::vector<int> want = q.targets;
  std::sort(want.begin(), want.end());
  if (joint.vars != want)
    throw ValidationError("elimination order does not cover all free variables");

  const double z = std::accumulate(joint.table.begin(), joint.table.end(), 0.0);
  if (!(z > 0.0))
    throw DegeneracyError("impossible evidence: the conditioning event has probability 0");
  for (double& p : joint.table) p /= z;
  return QueryResult{joint.vars, joint.cards, std::move(joint.table)};
}

// Exact conditional query via variable elimination, min-degree ordering.
inline QueryResult query(const DiscreteBn& bn, const Query& q) {
  const Dag& dag = bn.dag();
  validate_query(dag, q);

  std::vector<Factor> factors;
  for (int i = 0; i < dag.size(); ++i) {
    Factor f = detail::cpt_factor(bn, i);
    for (const auto& [v, level] : q.evidence) f = detail::restrict_to(f, v, level, dag);
    factors.push_back(std::move(f));
  }
  std::vector<bool> keep(dag.size(), false);
  for (int t : q.targets) keep[static_cast<std::size_t>(t)] = true;
  std::vector<int> order = detail::min_degree_order(dag, factors, keep);
  // variables absent from every factor scope (already restricted away or
  // never mentioned) need no elimination
  return query_with_order(bn, q, order);
}

// Probability of a conjunction of target values given evidence:
// p_G(outcome | evidence).
inline double event_probability(const DiscreteBn& bn, const std::map<int, int>& outcome,
                                const std::map<int, int>& evidence) {
  Query q;
  for (const auto& [v, _] : outcome) q.targets.push_back(v);
  q.evidence = evidence;
  QueryResult r = query(bn, q);
  std::vector<int> values;
  values.reserve(r.vars.size());
  for (int v : r.vars) values.push_back(outcome.at(v));
  return r.at(values);
}

// Full joint table of p_G in mixed-radix order over all variables
// (variable 0 slowest, last variable fastest). Test oracle; also powers
// CD/KL distances on small networks.
inline std::vector<double> enumerate_joint(const DiscreteBn& bn,
                                           std::size_t cap = (std::size_t{1} << 22)) {
  const Dag& dag = bn.dag();
  std::vector<int> cards;
  for (int i = 0; i < dag.size(); ++i) cards.push_back(dag.cardinality(i));
  const std::size_t total = config_count(cards);
  if (total > cap)
    throw ValidationError("joint state space " + std::to_string(total) +
                          " exceeds the enumeration cap " + std::to_string(cap));
  std::vector<double> table(total);
  std::vector<int> values(cards.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    table[idx] = joint_probability(bn, values);
    for (std::size_t i = values.size(); i-- > 0;) {
      if (++values[i] < cards[i]) break;
      values[i] = 0;
    }
  }
  return table;
}

// d-separation of a and b given c, via moralization of the ancestral graph
// and undirected separation.
inline bool d_separated(const Dag& dag, std::span<const int> a, std::span<const int> b,
                        std::span<const int> c) {
  std::vector<int> seen(dag.size(), 0);
  auto mark = [&](std::span<const int> s, int tag) {
    for (int v : s) {
      if (v < 0 || v >= dag.size()) throw ValidationError("variable index out of range");
      if (seen[static_cast<std::size_t>(v)] != 0)
        throw ValidationError("d-separation sets must be pairwise disjoint");
      seen[static_cast<std::size_t>(v)] = tag;
    }
  };
  mark(a, 1);
  mark(b, 2);
  mark(c, 3);

  std::vector<int> seeds;
  seeds.insert(seeds.end(), a.begin(), a.end());
  seeds.insert(seeds.end(), b.begin(), b.end());
  seeds.insert(seeds.end(), c.begin(), c.end());
  std::vector<bool> anc = dag.ancestral_set(seeds);

  // moral graph of the ancestral subgraph
  const int n = dag.size();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  auto connect = [&](int u, int v) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  };
  for (int v = 0; v < n; ++v) {
    if (!anc[static_cast<std::size_t>(v)]) continue;
    const auto& ps = dag.parents(v);
    for (int p : ps)
      if (anc[static_cast<std::size_t>(p)]) connect(p, v);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j)
        if (anc[static_cast<std::size_t>(ps[i])] && anc[static_cast<std::size_t>(ps[j])])
          connect(ps[i], ps[j]);
  }

  // BFS from a avoiding c
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);
  for (int v : c) blocked[static_cast<std::size_t>(v)] = true;
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  for (int v : a)
    if (!blocked[static_cast<std::size_t>(v)]) {
      stack.push_back(v);
      visited[static_cast<std::size_t>(v)] = true;
    }
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(u)] == 2) return false;  // reached b
    for (int w : adj[static_cast<std::size_t>(u)])
      if (!visited[static_cast<std::size_t>(w)] && !blocked[static_cast<std::size_t>(w)]) {
        visited[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
  }
  return true;
}

}  // namespace bnv
