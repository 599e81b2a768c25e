#pragma once

// Report emission. Tables use 6 significant digits; JSON documents carry
// full-precision numbers. Undefined values are empty CSV cells and JSON
// nulls; infinities are written as "inf"/"-inf" in both. Output is
// byte-identical across runs on identical inputs.

#include <cstdio>

#include <json.hpp>

#include "bnv/monitors.hpp"
#include "bnv/sensitivity.hpp"

namespace bnv {

using Json = nlohmann::ordered_json;

inline std::string format_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

inline Json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline Json json_number(const std::optional<double>& x) {
  return x ? json_number(*x) : Json(nullptr);
}

inline std::string format_cell(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string();
}

// parent configuration as "low,high" in canonical parent order
inline std::string config_label(const Dag& dag, int node, std::span<const int> config) {
  const auto& parents = dag.parents(node);
  std::string out;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (i) out += ",";
    out += dag.var(parents[i]).levels[static_cast<std::size_t>(config[i])];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Global monitor
// ---------------------------------------------------------------------------

inline std::string to_csv(const GlobalMonitorReport& r, const Dag& dag) {
  std::string out = "vertex,score\n";
  for (int i = 0; i < dag.size(); ++i)
    out += dag.var(i).name + "," + format_number(r.scores[static_cast<std::size_t>(i)]) + "\n";
  return out;
}

inline Json to_json(const GlobalMonitorReport& r, const Dag& dag) {
  Json doc = Json::array();
  for (int i = 0; i < dag.size(); ++i)
    doc.push_back({{"vertex", dag.var(i).name},
                   {"score", json_number(r.scores[static_cast<std::size_t>(i)])}});
  return doc;
}

// ---------------------------------------------------------------------------
// Monitor series. Indices are 1-based in reports; for parent-child series
// the `row` column maps each step back to its original dataset row.
// ---------------------------------------------------------------------------

inline std::string to_csv(const MonitorSeries& m) {
  const bool pa_ch = m.kind == MonitorKind::parent_child;
  std::string out = pa_ch ? "index,row,s,e,v,z\n" : "index,s,e,v,z\n";
  for (std::size_t i = 0; i < m.steps.size(); ++i) {
    const auto& st = m.steps[i];
    out += std::to_string(i + 1) + ",";
    if (pa_ch) out += std::to_string(m.source_rows[i] + 1) + ",";
    out += format_number(st.s) + "," + format_number(st.e) + "," + format_number(st.v) +
           "," + format_cell(st.z) + "\n";
  }
  return out;
}

inline Json to_json(const MonitorSeries& m, const Dag& dag) {
  Json doc;
  doc["node"] = dag.var(m.node).name;
  switch (m.kind) {
    case MonitorKind::marginal: doc["kind"] = "marginal"; break;
    case MonitorKind::conditional: doc["kind"] = "conditional"; break;
    case MonitorKind::parent_child: doc["kind"] = "parent-child"; break;
  }
  if (m.kind == MonitorKind::parent_child)
    doc["parent_config"] = config_label(dag, m.node, m.parent_config);
  Json steps = Json::array();
  for (std::size_t i = 0; i < m.steps.size(); ++i) {
    const auto& st = m.steps[i];
    Json s{{"index", i + 1},
           {"s", json_number(st.s)},
           {"e", json_number(st.e)},
           {"v", json_number(st.v)},
           {"z", json_number(st.z)}};
    if (m.kind == MonitorKind::parent_child) s["row"] = m.source_rows[i] + 1;
    steps.push_back(std::move(s));
  }
  doc["steps"] = std::move(steps);
  return doc;
}

// ---------------------------------------------------------------------------
// Influence
// ---------------------------------------------------------------------------

inline std::string to_csv(const InfluenceReport& r) {
  std::string out = "row,score\n";
  for (std::size_t i = 0; i < r.scores.size(); ++i)
    out += std::to_string(i + 1) + "," + format_number(r.scores[i]) + "\n";
  return out;
}

inline Json to_json(const InfluenceReport& r) {
  Json doc = Json::array();
  for (std::size_t i = 0; i < r.scores.size(); ++i)
    doc.push_back({{"row", i + 1}, {"score", json_number(r.scores[i])}});
  return doc;
}

// ---------------------------------------------------------------------------
// Query result: one row per configuration of the result's variables.
// ---------------------------------------------------------------------------

inline std::string to_csv(const QueryResult& r, const Dag& dag) {
  std::string out;
  for (int v : r.vars) out += dag.var(v).name + ",";
  out += "probability\n";
  std::vector<int> values(r.vars.size(), 0);
  for (std::size_t idx = 0; idx < r.p.size(); ++idx) {
    for (std::size_t i = 0; i < r.vars.size(); ++i)
      out += dag.var(r.vars[i]).levels[static_cast<std::size_t>(values[i])] + ",";
    out += format_number(r.p[idx]) + "\n";
    for (std::size_t i = values.size(); i-- > 0;) {
      if (++values[i] < r.cards[i]) break;
      values[i] = 0;
    }
  }
  return out;
}

inline Json to_json(const QueryResult& r, const Dag& dag) {
  Json doc = Json::array();
  std::vector<int> values(r.vars.size(), 0);
  for (std::size_t idx = 0; idx < r.p.size(); ++idx) {
    Json entry = Json::object();
    for (std::size_t i = 0; i < r.vars.size(); ++i)
      entry[dag.var(r.vars[i]).name] =
          dag.var(r.vars[i]).levels[static_cast<std::size_t>(values[i])];
    entry["probability"] = json_number(r.p[idx]);
    doc.push_back(std::move(entry));
    for (std::size_t i = values.size(); i-- > 0;) {
      if (++values[i] < r.cards[i]) break;
      values[i] = 0;
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Sensitivity and distances
// ---------------------------------------------------------------------------

inline std::string to_csv(const SensitivityResult& r) {
  std::string out = "new_value,probability\n";
  for (const auto& pt : r.grid)
    out += format_number(pt.t) + "," + format_cell(pt.value) + "\n";
  return out;
}

inline Json to_json(const SensitivityResult& r, const Dag& dag) {
  Json doc;
  doc["node"] = dag.var(r.param.node).name;
  doc["value"] = dag.var(r.param.node).levels[static_cast<std::size_t>(r.param.value)];
  doc["value_parents"] = config_label(dag, r.param.node, r.param.parent_config);
  doc["covariation"] = to_string(r.scheme);
  doc["coefficients"] = {{"a", json_number(r.coef.a)},
                         {"b", json_number(r.coef.b)},
                         {"c", json_number(r.coef.c)},
                         {"d", json_number(r.coef.d)}};
  Json grid = Json::array();
  for (const auto& pt : r.grid)
    grid.push_back({{"new_value", json_number(pt.t)}, {"probability", json_number(pt.value)}});
  doc["grid"] = std::move(grid);
  return doc;
}

enum class DistanceColumns { cd_only, kl_and_jeffreys, all };

inline std::string to_csv(const DistanceResult& r,
                          DistanceColumns cols = DistanceColumns::all) {
  std::string out = "new_value";
  if (cols != DistanceColumns::kl_and_jeffreys) out += ",cd";
  if (cols != DistanceColumns::cd_only) out += ",kl,jeffreys";
  out += "\n";
  for (const auto& row : r.grid) {
    out += format_number(row.t);
    if (cols != DistanceColumns::kl_and_jeffreys) out += "," + format_cell(row.cd);
    if (cols != DistanceColumns::cd_only)
      out += "," + format_cell(row.kl) + "," + format_cell(row.jeffreys);
    out += "\n";
  }
  return out;
}

inline Json to_json(const DistanceResult& r, const Dag& dag) {
  Json doc;
  doc["node"] = dag.var(r.param.node).name;
  doc["value"] = dag.var(r.param.node).levels[static_cast<std::size_t>(r.param.value)];
  doc["value_parents"] = config_label(dag, r.param.node, r.param.parent_config);
  doc["covariation"] = to_string(r.scheme);
  Json grid = Json::array();
  for (const auto& row : r.grid)
    grid.push_back({{"new_value", json_number(row.t)},
                    {"cd", json_number(row.cd)},
                    {"kl", json_number(row.kl)},
                    {"jeffreys", json_number(row.jeffreys)}});
  doc["grid"] = std::move(grid);
  return doc;
}

// ---------------------------------------------------------------------------
// sensquery
// ---------------------------------------------------------------------------

inline std::string to_csv(const SensQueryResult& r, const Dag& dag) {
  std::string out = "node,value,value_parents,original,suggested,cd\n";
  for (const auto& row : r.rows) {
    out += dag.var(row.param.node).name + "," +
           dag.var(row.param.node).levels[static_cast<std::size_t>(row.param.value)] + "," +
           config_label(dag, row.param.node, row.param.parent_config) + "," +
           format_number(row.original) + "," + format_number(row.suggested) + "," +
           format_number(row.cd) + "\n";
  }
  return out;
}

inline Json to_json(const SensQueryResult& r, const Dag& dag) {
  Json doc = Json::array();
  for (const auto& row : r.rows)
    doc.push_back(
        {{"node", dag.var(row.param.node).name},
         {"value", dag.var(row.param.node).levels[static_cast<std::size_t>(row.param.value)]},
         {"value_parents", config_label(dag, row.param.node, row.param.parent_config)},
         {"original", json_number(row.original)},
         {"suggested", json_number(row.suggested)},
         {"cd", json_number(row.cd)}});
  return doc;
}

}  // namespace bnv
