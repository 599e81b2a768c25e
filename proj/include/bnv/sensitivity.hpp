#pragma once

// Sensitivity analysis: co-variation schemes, sensitivity functions,
// CD / Kullback-Leibler / Jeffreys distances between the original and a
// single-row-perturbed network, and the inverse "which single parameter
// change achieves this output probability" solver.
//
// Proportional co-variation is the default everywhere. Under it both the
// numerator p(y_O, y_E) and the denominator p(y_E) are affine in the new
// parameter value t, so the sensitivity function is fractional-linear and
// its coefficients follow from evaluations at t = 0 and t = 1.

#include <array>
#include <limits>
#include <map>
#include <optional>

#include "bnv/inference.hpp"

namespace bnv {

enum class CovariationScheme { proportional, uniform, order_preserving };

inline const char* to_string(CovariationScheme s) {
  switch (s) {
    case CovariationScheme::proportional: return "proportional";
    case CovariationScheme::uniform: return "uniform";
    case CovariationScheme::order_preserving: return "order-preserving";
  }
  return "?";
}

// Set entry k of a probability row to t and redistribute the remaining
// mass per the scheme. order_preserving additionally requires the new row
// to rank its entries exactly as the original does (ties broken by
// original position) and rejects t values that break the ranking.
inline std::vector<double> covary(std::span<const double> row, int k, double t,
                                  CovariationScheme scheme) {
  const std::size_t n = row.size();
  if (k < 0 || static_cast<std::size_t>(k) >= n)
    throw ValidationError("co-variation index out of range");
  if (!(t >= 0.0 && t <= 1.0))
    throw ValidationError("new value " + std::to_string(t) + " outside [0,1]");
  const double theta = row[static_cast<std::size_t>(k)];
  std::vector<double> out(row.begin(), row.end());
  if (n == 1) {
    if (t != 1.0) throw DegeneracyError("cannot co-vary a single-level row");
    return out;
  }

  switch (scheme) {
    case CovariationScheme::proportional:
    case CovariationScheme::order_preserving: {
      if (theta == 1.0) {
        if (t == 1.0) return out;
        throw DegeneracyError(
            "degenerate row: entry has probability 1, proportional co-variation "
            "leaves no mass ratio");
      }
      const double scale = (1.0 - t) / (1.0 - theta);
      for (std::size_t v = 0; v < n; ++v)
        if (v != static_cast<std::size_t>(k)) out[v] = row[v] * scale;
      out[static_cast<std::size_t>(k)] = t;
      break;
    }
    case CovariationScheme::uniform: {
      const double share = (1.0 - t) / static_cast<double>(n - 1);
      for (std::size_t v = 0; v < n; ++v)
        if (v != static_cast<std::size_t>(k)) out[v] = share;
      out[static_cast<std::size_t>(k)] = t;
      break;
    }
  }

  // snap floating-point dust at the bounds; anything worse is a real error
  // and is left for row validation to reject
  for (double& p : out) {
    if (p < 0.0 && p > -1e-12) p = 0.0;
    if (p > 1.0 && p < 1.0 + 1e-12) p = 1.0;
  }

  if (scheme == CovariationScheme::order_preserving) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
      if (row[x] != row[y]) return row[x] > row[y];
      return x < y;
    });
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (out[perm[i]] < out[perm[i + 1]] - 1e-12)
        throw DegeneracyError("new value " + std::to_string(t) +
                              " violates the row's rank order");
  }
  return out;
}

// f(t) = (a t + b) / (c t + d)
struct FractionalLinear {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double eval(double t) const { return (a * t + b) / (c * t + d); }

  FractionalLinear normalized() const {
    if (d != 0.0) return {a / d, b / d, c / d, 1.0};
    return *this;
  }
};

struct SensitivityPoint {
  double t = 0.0;
  std::optional<double> value;  // empty when the evidence probability is 0
                                // or the scheme rejects this t
};

struct SensitivityResult {
  ParamRef param;
  std::map<int, int> outcome;   // y_O
  std::map<int, int> evidence;  // y_E
  CovariationScheme scheme = CovariationScheme::proportional;
  std::vector<SensitivityPoint> grid;
  FractionalLinear coef;
};

struct DistanceRow {
  double t = 0.0;
  // distances may be +infinity (e.g. CD at t = 0 or 1); they are empty only
  // when the scheme rejects this t
  std::optional<double> cd, kl, jeffreys;
};

struct DistanceResult {
  ParamRef param;
  CovariationScheme scheme = CovariationScheme::proportional;
  std::vector<DistanceRow> grid;
};

struct SensQueryRow {
  ParamRef param;
  double original = 0.0;
  double suggested = 0.0;
  double cd = 0.0;
};

struct SensQueryResult {
  std::map<int, int> outcome;
  std::map<int, int> evidence;
  double target = 0.0;
  std::vector<SensQueryRow> rows;  // ascending by CD distance
};

// 101 equally spaced points on [0,1].
inline std::vector<double> default_grid() {
  std::vector<double> g(101);
  for (int i = 0; i <= 100; ++i) g[static_cast<std::size_t>(i)] = i / 100.0;
  return g;
}

namespace detail {

inline void validate_param(const DiscreteBn& bn, const ParamRef& p) {
  if (p.node < 0 || p.node >= bn.dag().size())
    throw ValidationError("parameter node out of range");
  if (p.value < 0 || p.value >= bn.dag().cardinality(p.node))
    throw ValidationError("parameter level out of range");
  bn.param_row_index(p);  // validates the parent configuration
}

// Joint probability of a conjunction of variable values, p(values).
inline double conjunction_probability(const DiscreteBn& bn, const std::map<int, int>& values) {
  if (values.empty()) return 1.0;
  Query q;
  for (const auto& [v, _] : values) q.targets.push_back(v);
  const QueryResult r = query(bn, q);
  std::vector<int> pick;
  pick.reserve(r.vars.size());
  for (int v : r.vars) pick.push_back(values.at(v));
  return r.at(pick);
}

// Numerator p(y_O, y_E) and denominator p(y_E) for one perturbed network.
inline std::pair<double, double> outcome_evidence_probs(const DiscreteBn& bn,
                                                        const std::map<int, int>& outcome,
                                                        const std::map<int, int>& evidence) {
  std::map<int, int> both = evidence;
  for (const auto& [v, level] : outcome) {
    if (both.count(v)) throw ValidationError("outcome and evidence overlap");
    both.emplace(v, level);
  }
  if (both.empty()) throw ValidationError("empty outcome");
  Query q;
  for (const auto& [v, _] : both) q.targets.push_back(v);
  const QueryResult r = query(bn, q);

  double num = 0.0, den = 0.0;
  std::vector<int> values(r.vars.size(), 0);
  for (std::size_t idx = 0; idx < r.p.size(); ++idx) {
    bool ev_match = true, all_match = true;
    for (std::size_t i = 0; i < r.vars.size(); ++i) {
      auto it = evidence.find(r.vars[i]);
      if (it != evidence.end() && it->second != values[i]) ev_match = false;
      if (both.at(r.vars[i]) != values[i]) all_match = false;
    }
    if (ev_match) den += r.p[idx];
    if (all_match) num += r.p[idx];
    for (std::size_t i = values.size(); i-- > 0;) {
      if (++values[i] < r.cards[i]) break;
      values[i] = 0;
    }
  }
  if (evidence.empty()) den = 1.0;
  return {num, den};
}

inline DiscreteBn perturbed(const DiscreteBn& bn, const ParamRef& p, double t,
                            CovariationScheme scheme) {
  const std::size_t row_idx = bn.param_row_index(p);
  const auto& row = bn.cpt(p.node).rows[row_idx];
  return bn.with_row(p.node, row_idx, covary(row, p.value, t, scheme));
}

// Fit the affine numerator/denominator from two t evaluations. Falls back
// to interior points when an endpoint is rejected by the scheme.
inline FractionalLinear fit_two_point(const DiscreteBn& bn, const ParamRef& p,
                                      CovariationScheme scheme,
                                      const std::map<int, int>& outcome,
                                      const std::map<int, int>& evidence) {
  std::vector<std::pair<double, std::pair<double, double>>> evals;
  for (double t : {0.0, 1.0, 0.25, 0.75}) {
    if (evals.size() >= 2) break;
    try {
      auto nd = outcome_evidence_probs(perturbed(bn, p, t, scheme), outcome, evidence);
      evals.emplace_back(t, nd);
    } catch (const DegeneracyError&) {
      continue;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (evals.size() < 2) return {nan, nan, nan, nan};
  const auto [t1, nd1] = evals[0];
  const auto [t2, nd2] = evals[1];
  FractionalLinear f;
  f.a = (nd2.first - nd1.first) / (t2 - t1);
  f.b = nd1.first - f.a * t1;
  f.c = (nd2.second - nd1.second) / (t2 - t1);
  f.d = nd1.second - f.c * t1;
  return f;
}

// Marginal probability of the varied row's parent configuration. Constant
// across the perturbation since it involves only the parents.
inline double parent_config_probability(const DiscreteBn& bn, const ParamRef& p) {
  const auto& parents = bn.dag().parents(p.node);
  if (parents.empty()) return 1.0;
  std::map<int, int> values;
  for (std::size_t i = 0; i < parents.size(); ++i)
    values.emplace(parents[i], p.parent_config[i]);
  return conjunction_probability(bn, values);
}

struct LocalDistances {
  double cd = 0.0, kl = 0.0, jeffreys = 0.0;
};

// CD, KL and Jeffreys between the original network and the one with the
// varied row, from the row entries alone plus the parent-configuration
// probability. Exact whenever every joint state consistent with the
// parent configuration has positive probability of the non-varied part.
inline LocalDistances local_distances(std::span<const double> row,
                                      std::span<const double> new_row,
                                      double config_prob) {
  const double inf = std::numeric_limits<double>::infinity();
  double max_ratio = -inf, min_ratio = inf;
  double kl_fwd = 0.0, kl_bwd = 0.0;
  for (std::size_t v = 0; v < row.size(); ++v) {
    const double p = row[v], q = new_row[v];
    if (p == 0.0 && q == 0.0) continue;  // dead in both networks
    if (p == 0.0) {
      max_ratio = inf;  // mass created from nothing
      kl_bwd = inf;
      continue;
    }
    const double ratio = q / p;
    max_ratio = std::max(max_ratio, ratio);
    min_ratio = std::min(min_ratio, ratio);
    if (q == 0.0)
      kl_fwd = inf;
    else {
      kl_fwd += p * std::log(p / q);
      kl_bwd += q * std::log(q / p);
    }
  }
  if (config_prob < 1.0 - 1e-12) {
    // some positive-probability state bypasses the varied row
    max_ratio = std::max(max_ratio, 1.0);
    min_ratio = std::min(min_ratio, 1.0);
  }
  LocalDistances d;
  d.cd = (min_ratio == 0.0 || max_ratio == inf)
             ? inf
             : std::log(max_ratio) - std::log(min_ratio);
  // a zero-probability configuration contributes nothing to the divergences
  d.kl = config_prob == 0.0 ? 0.0 : config_prob * kl_fwd;
  const double kb = config_prob == 0.0 ? 0.0 : config_prob * kl_bwd;
  d.jeffreys = (d.kl == inf || kb == inf) ? inf : d.kl + kb;
  return d;
}

inline void reject_degenerate_proportional(const DiscreteBn& bn, const ParamRef& p,
                                           std::span<const double> row) {
  for (std::size_t v = 0; v < row.size(); ++v) {
    if (row[v] == 0.0 || row[v] == 1.0)
      throw DegeneracyError("CPT entry p(" + bn.dag().var(p.node).name + "=" +
                            bn.dag().var(p.node).levels[v] +
                            " | config) equals " + std::to_string(row[v]) +
                            "; proportional co-variation distances are undefined");
  }
}

}  // namespace detail

// Sensitivity function: the query probability p(y_O | y_E) on a grid of
// new values t for one CPT entry, together with the fitted
// fractional-linear coefficients. An empty `new_values` means the default
// 101-point grid. Grid points where the evidence probability vanishes or
// the scheme rejects t are reported as undefined, not dropped.
inline SensitivityResult sensitivity(const DiscreteBn& bn, const std::map<int, int>& outcome,
                                     const std::map<int, int>& evidence, const ParamRef& param,
                                     std::vector<double> new_values = {},
                                     CovariationScheme scheme = CovariationScheme::proportional) {
  detail::validate_param(bn, param);
  if (outcome.empty()) throw ValidationError("sensitivity needs an outcome value");
  if (new_values.empty()) new_values = default_grid();

  SensitivityResult result;
  result.param = param;
  result.outcome = outcome;
  result.evidence = evidence;
  result.scheme = scheme;
  result.coef = detail::fit_two_point(bn, param, scheme, outcome, evidence);
  result.grid.reserve(new_values.size());

  for (double t : new_values) {
    SensitivityPoint pt;
    pt.t = t;
    try {
      const auto [num, den] =
          detail::outcome_evidence_probs(detail::perturbed(bn, param, t, scheme),
                                         outcome, evidence);
      if (den > 0.0) pt.value = num / den;
    } catch (const DegeneracyError&) {
      // rejected t: leave the point undefined
    }
    result.grid.push_back(pt);
  }
  return result;
}

// CD, KL and Jeffreys distances between the original network and the
// perturbed one, over a grid of new values for one CPT entry. Computed via
// the local row form; exactness against full-joint enumeration is part of
// the test suite.
inline DistanceResult distance_grid(const DiscreteBn& bn, const ParamRef& param,
                                    std::vector<double> new_values = {},
                                    CovariationScheme scheme = CovariationScheme::proportional) {
  detail::validate_param(bn, param);
  if (new_values.empty()) new_values = default_grid();

  const std::size_t row_idx = bn.param_row_index(param);
  const auto& row = bn.cpt(param.node).rows[row_idx];
  if (scheme == CovariationScheme::proportional ||
      scheme == CovariationScheme::order_preserving)
    detail::reject_degenerate_proportional(bn, param, row);
  const double config_prob = detail::parent_config_probability(bn, param);

  DistanceResult result;
  result.param = param;
  result.scheme = scheme;
  result.grid.reserve(new_values.size());
  for (double t : new_values) {
    DistanceRow r;
    r.t = t;
    try {
      const auto new_row = covary(row, param.value, t, scheme);
      const auto d = detail::local_distances(row, new_row, config_prob);
      r.cd = d.cd;
      r.kl = d.kl;
      r.jeffreys = d.jeffreys;
    } catch (const DegeneracyError&) {
      // rejected t: leave the row undefined
    }
    result.grid.push_back(r);
  }
  return result;
}

inline DistanceResult cd_distance(const DiscreteBn& bn, const ParamRef& param,
                                  std::vector<double> new_values = {},
                                  CovariationScheme scheme = CovariationScheme::proportional) {
  return distance_grid(bn, param, std::move(new_values), scheme);
}

inline DistanceResult kl_divergence(const DiscreteBn& bn, const ParamRef& param,
                                    std::vector<double> new_values = {},
                                    CovariationScheme scheme = CovariationScheme::proportional) {
  return distance_grid(bn, param, std::move(new_values), scheme);
}

inline DistanceResult jeffreys(const DiscreteBn& bn, const ParamRef& param,
                               std::vector<double> new_values = {},
                               CovariationScheme scheme = CovariationScheme::proportional) {
  return distance_grid(bn, param, std::move(new_values), scheme);
}

// Inverse sensitivity: enumerate the single-parameter changes (under
// proportional co-variation) that drive p(y_O | y_E) to the target.
// Every solution is verified by re-evaluating the perturbed network; rows
// are sorted ascending by CD distance. For binary nodes the two
// complementary entries of a row describe the same change; the row is
// reported once, keyed by the level whose probability is raised.
inline SensQueryResult sensquery(const DiscreteBn& bn, const std::map<int, int>& outcome,
                                 const std::map<int, int>& evidence, double target) {
  if (!(target > 0.0 && target < 1.0))
    throw ValidationError("target probability must lie strictly inside (0,1)");
  if (outcome.size() != 1)
    throw ValidationError("sensquery expects a single outcome value");

  SensQueryResult result;
  result.outcome = outcome;
  result.evidence = evidence;
  result.target = target;

  const Dag& dag = bn.dag();
  std::vector<SensQueryRow> candidates;
  for (int node = 0; node < dag.size(); ++node) {
    const Cpt& cpt = bn.cpt(node);
    const int card = dag.cardinality(node);
    if (card < 2) continue;
    for (std::size_t j = 0; j < cpt.rows.size(); ++j) {
      ParamRef p;
      p.node = node;
      p.parent_config = parent_config_values(dag, cpt, j);
      for (int k = 0; k < card; ++k) {
        p.value = k;
        const double theta = cpt.rows[j][static_cast<std::size_t>(k)];
        if (theta == 1.0) continue;  // cannot be co-varied proportionally

        const FractionalLinear f =
            detail::fit_two_point(bn, p, CovariationScheme::proportional, outcome, evidence);
        if (!(std::isfinite(f.a) && std::isfinite(f.b) && std::isfinite(f.c) &&
              std::isfinite(f.d)))
          continue;
        // solve (a t + b) = target (c t + d)
        const double denom = f.a - target * f.c;
        const double numer = target * f.d - f.b;
        if (std::abs(denom) < 1e-14) continue;  // constant or parallel: no unique solution
        const double t = numer / denom;
        if (!(t > 0.0 && t < 1.0)) continue;

        double achieved;
        try {
          const auto [num, den] = detail::outcome_evidence_probs(
              detail::perturbed(bn, p, t, CovariationScheme::proportional), outcome, evidence);
          if (!(den > 0.0)) continue;
          achieved = num / den;
        } catch (const DegeneracyError&) {
          continue;
        }
        if (std::abs(achieved - target) > 1e-6) continue;

        const auto new_row = covary(cpt.rows[j], k, t, CovariationScheme::proportional);
        const double config_prob = detail::parent_config_probability(bn, p);
        const double cd = detail::local_distances(cpt.rows[j], new_row, config_prob).cd;
        candidates.push_back({p, theta, t, cd});
      }
    }
  }

  // binary dedup: one report per (node, parent configuration)
  std::vector<SensQueryRow> rows;
  for (const auto& cand : candidates) {
    if (dag.cardinality(cand.param.node) != 2) {
      rows.push_back(cand);
      continue;
    }
    bool duplicate = false;
    for (auto& kept : rows) {
      if (kept.param.node == cand.param.node &&
          kept.param.parent_config == cand.param.parent_config) {
        duplicate = true;
        const bool cand_raises = cand.suggested > cand.original;
        const bool kept_raises = kept.suggested > kept.original;
        if (cand_raises && !kept_raises) kept = cand;
        break;
      }
    }
    if (!duplicate) rows.push_back(cand);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const SensQueryRow& x, const SensQueryRow& y) {
    if (x.cd != y.cd) return x.cd < y.cd;
    if (x.param.node != y.param.node) return x.param.node < y.param.node;
    if (x.param.parent_config != y.param.parent_config)
      return x.param.parent_config < y.param.parent_config;
    return x.param.value < y.param.value;
  });
  result.rows = std::move(rows);
  return result;
}

}  // namespace bnv
