#pragma once

// Prequential robustness monitors: global monitor, sequential marginal and
// conditional node monitors, parent-child monitors and influential
// observations.
//
// Per prequential step the network is instantiated at Dirichlet posterior
// means and node distributions are obtained by exact inference; this is the
// single supported semantics for the node monitors. All logarithms are
// natural (scores are in nats). No burn-in truncation is applied: early
// volatility is left visible.

#include <optional>

#include "bnv/bayes.hpp"
#include "bnv/inference.hpp"

namespace bnv {

enum class MonitorKind { marginal, conditional, parent_child };

struct MonitorStep {
  double s = 0.0;  // logarithmic score of the observed value
  double e = 0.0;  // expected log score under the predictive
  double v = 0.0;  // variance of the log score under the predictive
  std::optional<double> z;  // cumulative standardized score; empty when the
                            // cumulative variance is below tolerance
};

struct MonitorSeries {
  int node = -1;
  MonitorKind kind = MonitorKind::marginal;
  std::vector<MonitorStep> steps;

  // parent-child only: the conditioning configuration and, per step, the
  // original dataset row it came from (the step index is the
  // relevant-subset index)
  std::vector<int> parent_config;
  std::vector<std::size_t> source_rows;
};

struct GlobalMonitorReport {
  std::vector<double> scores;  // one nonnegative score per node, nats
};

struct InfluenceReport {
  std::vector<double> scores;  // one nonnegative score per observation
};

// Cumulative variance below this threshold makes Z undefined.
inline constexpr double kMonitorVarTol = 1e-12;

namespace detail {

// S, E, V of the logarithmic score for one predictive distribution.
inline MonitorStep log_score_step(std::span<const double> predictive, int observed) {
  MonitorStep st;
  st.s = -std::log(predictive[static_cast<std::size_t>(observed)]);
  double e = 0.0, e2 = 0.0;
  for (double p : predictive) {
    if (p <= 0.0) continue;  // lim p->0 of p log p is 0
    const double l = std::log(p);
    e -= p * l;
    e2 += p * l * l;
  }
  st.e = e;
  st.v = e2 - e * e;
  return st;
}

class Standardizer {
 public:
  std::optional<double> push(MonitorStep& st) {
    s_ += st.s;
    e_ += st.e;
    v_ += st.v;
    if (v_ <= kMonitorVarTol)
      st.z = std::nullopt;
    else
      st.z = (s_ - e_) / std::sqrt(v_);
    return st.z;
  }

 private:
  double s_ = 0.0, e_ = 0.0, v_ = 0.0;
};

}  // namespace detail

// Per-node contribution to the negative log marginal likelihood of the
// data (prequential form, order-invariant). With plugin = true the scores
// are instead plug-in log losses of the posterior-mean network fitted to
// the full dataset.
inline GlobalMonitorReport global_monitor(const Dag& dag, const Dataset& data,
                                          const DirichletSpec& prior, bool plugin = false) {
  GlobalMonitorReport report;
  if (!plugin) {
    report.scores = log_marginal_likelihood(dag, data, prior);
    for (double& s : report.scores) s = -s;
    return report;
  }
  validate_dataset(data, dag);
  validate_prior(prior, dag);
  const DiscreteBn bn = posterior_mean_bn(dag, prior, tabulate(dag, data));
  report.scores.assign(static_cast<std::size_t>(dag.size()), 0.0);
  for (const auto& row : data.rows)
    for (int i = 0; i < dag.size(); ++i) {
      auto [j, k] = observation_cell(dag, i, row);
      report.scores[static_cast<std::size_t>(i)] -= std::log(bn.cpt(i).rows[j][k]);
    }
  return report;
}

// Sequential marginal node monitor: at step i the node's marginal under
// the posterior-mean network fitted to rows 1..i-1 scores the observed
// value.
inline MonitorSeries seq_marg_monitor(const Dag& dag, const Dataset& data, int node,
                                      const DirichletSpec& prior) {
  validate_dataset(data, dag);
  validate_prior(prior, dag);
  if (node < 0 || node >= dag.size()) throw ValidationError("monitor node out of range");

  MonitorSeries series;
  series.node = node;
  series.kind = MonitorKind::marginal;
  series.steps.reserve(data.size());

  CountTable counts = empty_counts(dag);
  detail::Standardizer z;
  for (const auto& row : data.rows) {
    const DiscreteBn bn = posterior_mean_bn(dag, prior, counts);
    const QueryResult marginal = query(bn, Query{{node}, {}});
    MonitorStep st = detail::log_score_step(marginal.p, row[static_cast<std::size_t>(node)]);
    z.push(st);
    series.steps.push_back(st);
    accumulate(counts, dag, row);
  }
  return series;
}

// Sequential conditional node monitor: the per-step distribution is the
// conditional of the node given all other variables' observed values.
// Posterior-mean networks are strictly positive, so the evidence can never
// be impossible.
inline MonitorSeries seq_cond_monitor(const Dag& dag, const Dataset& data, int node,
                                      const DirichletSpec& prior) {
  validate_dataset(data, dag);
  validate_prior(prior, dag);
  if (node < 0 || node >= dag.size()) throw ValidationError("monitor node out of range");

  MonitorSeries series;
  series.node = node;
  series.kind = MonitorKind::conditional;
  series.steps.reserve(data.size());

  CountTable counts = empty_counts(dag);
  detail::Standardizer z;
  for (const auto& row : data.rows) {
    const DiscreteBn bn = posterior_mean_bn(dag, prior, counts);
    Query q;
    q.targets = {node};
    for (int other = 0; other < dag.size(); ++other)
      if (other != node) q.evidence.emplace(other, row[static_cast<std::size_t>(other)]);
    const QueryResult cond = query(bn, q);
    MonitorStep st = detail::log_score_step(cond.p, row[static_cast<std::size_t>(node)]);
    z.push(st);
    series.steps.push_back(st);
    accumulate(counts, dag, row);
  }
  return series;
}

// Sequential parent-child monitor: a pure Dirichlet-multinomial sequential
// monitor on the node's values within the subset of rows whose parents
// take the given configuration. No network inference is involved. The
// given parent names may be in any order; values are aligned with them. An
// empty relevant subset yields an empty series.
inline MonitorSeries seq_pa_ch_monitor(const Dag& dag, const Dataset& data, int node,
                                       std::span<const std::string> parent_names,
                                       std::span<const std::string> parent_values,
                                       const DirichletSpec& prior) {
  validate_dataset(data, dag);
  validate_prior(prior, dag);
  if (node < 0 || node >= dag.size()) throw ValidationError("monitor node out of range");
  if (parent_names.size() != parent_values.size())
    throw ValidationError("parent names and values differ in length");

  const auto& parents = dag.parents(node);
  std::vector<int> config(parents.size(), -1);
  for (std::size_t t = 0; t < parent_names.size(); ++t) {
    const int p = dag.index_of(parent_names[t]);
    auto it = std::find(parents.begin(), parents.end(), p);
    if (it == parents.end())
      throw ValidationError("'" + parent_names[t] + "' is not a parent of '" +
                            dag.var(node).name + "'");
    config[static_cast<std::size_t>(it - parents.begin())] =
        dag.var(p).level_index(parent_values[t]);
  }
  for (std::size_t t = 0; t < config.size(); ++t)
    if (config[t] < 0)
      throw ValidationError("parent '" + dag.var(parents[t]).name + "' has no value");

  MonitorSeries series;
  series.node = node;
  series.kind = MonitorKind::parent_child;
  series.parent_config = config;

  const auto cards = dag.cards_of(parents);
  const std::size_t row_idx = config_index(cards, config);
  const auto& alpha = prior.nodes[static_cast<std::size_t>(node)];
  const std::size_t n_levels = alpha.n_levels;

  std::vector<std::int64_t> counts(n_levels, 0);
  std::int64_t total = 0;
  std::vector<double> predictive(n_levels);
  detail::Standardizer z;
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const auto& row = data.rows[r];
    bool match = true;
    for (std::size_t t = 0; t < parents.size(); ++t)
      if (row[static_cast<std::size_t>(parents[t])] != config[t]) {
        match = false;
        break;
      }
    if (!match) continue;

    const double denom = alpha.row_total(row_idx) + static_cast<double>(total);
    for (std::size_t k = 0; k < n_levels; ++k)
      predictive[k] = (alpha.at(row_idx, k) + static_cast<double>(counts[k])) / denom;

    const int observed = row[static_cast<std::size_t>(node)];
    MonitorStep st = detail::log_score_step(predictive, observed);
    z.push(st);
    series.steps.push_back(st);
    series.source_rows.push_back(r);
    ++counts[static_cast<std::size_t>(observed)];
    ++total;
  }
  return series;
}

// Influence of each observation: |log p(y) - log p(y_{-i})| for the
// ordered marginal likelihood. Since p(y) = p(y_{-i}) p(y_i | y_{-i}),
// the difference is the log posterior predictive of the row given all
// other rows, computed from full counts in O(#nodes) per row.
inline InfluenceReport influential_obs(const Dag& dag, const Dataset& data,
                                       const DirichletSpec& prior) {
  validate_dataset(data, dag);
  validate_prior(prior, dag);
  if (data.size() < 2)
    throw ValidationError("influence scores need at least two observations");

  const CountTable counts = tabulate(dag, data);
  InfluenceReport report;
  report.scores.reserve(data.size());
  for (const auto& row : data.rows) {
    double log_pred = 0.0;
    for (int i = 0; i < dag.size(); ++i) {
      auto [j, k] = observation_cell(dag, i, row);
      const auto& a = prior.nodes[static_cast<std::size_t>(i)];
      const auto& n = counts.nodes[static_cast<std::size_t>(i)];
      log_pred += std::log((a.at(j, k) + static_cast<double>(n.at(j, k)) - 1.0) /
                           (a.row_total(j) + static_cast<double>(n.row_total(j)) - 1.0));
    }
    report.scores.push_back(std::abs(log_pred));
  }
  return report;
}

}  // namespace bnv
