#pragma once

// File formats: the JSON network document, dataset CSV ingestion and
// emission, and the raw Pima preprocessing pipeline.
//
// Network document layout:
//   {
//     "variables": [{"name": "A", "levels": ["low", "high"]}, ...],
//     "edges":     [["A", "B"], ...],
//     "cpts":      {"B": {"parents": ["A"], "rows": [[...], [...]]}, ...}
//   }
// "cpts" is optional (a DAG-only document). CPT parents must be listed in
// canonical order (ascending variable index) and rows in the module-wide
// lexicographic order, last parent fastest-varying. Parsing and
// serialization round-trip losslessly.

#include <array>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "bnv/core.hpp"

namespace bnv {

struct NetworkFile {
  Dag dag;
  std::optional<std::vector<Cpt>> cpts;

  bool has_cpts() const { return cpts.has_value(); }
  DiscreteBn to_bn() const {
    if (!cpts) throw ValidationError("network document carries no CPTs");
    return DiscreteBn(dag, *cpts);
  }
};

namespace detail {

// Rows missing 1 by no more than the tolerance are renormalized exactly
// once, with a note; anything worse is an error in validate_cpt.
inline void renormalize_row(std::vector<double>& row, const std::string& node,
                            std::size_t j, std::vector<std::string>* notes) {
  double sum = 0.0;
  for (double p : row) sum += p;
  // rows within rounding of 1 are left untouched so that round-trips are
  // bit-exact; anything beyond the row-sum tolerance is an error later
  if (std::abs(sum - 1.0) <= 1e-15 || std::abs(sum - 1.0) > kRowSumTol) return;
  for (double& p : row) p /= sum;
  if (notes)
    notes->push_back("renormalized row " + std::to_string(j) + " of '" + node +
                     "' (sum was off by " + std::to_string(sum - 1.0) + ")");
}

}  // namespace detail

inline NetworkFile parse_network(const nlohmann::json& doc,
                                 std::vector<std::string>* notes = nullptr) {
  if (!doc.is_object()) throw ValidationError("network document must be a JSON object");
  if (!doc.contains("variables") || !doc["variables"].is_array())
    throw ValidationError("network document needs a 'variables' array");

  std::vector<Variable> vars;
  for (const auto& v : doc["variables"]) {
    Variable var;
    var.name = v.at("name").get<std::string>();
    for (const auto& l : v.at("levels")) var.levels.push_back(l.get<std::string>());
    vars.push_back(std::move(var));
  }

  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == name) return static_cast<int>(i);
    throw ValidationError("edge references unknown variable '" + name + "'");
  };

  std::vector<std::pair<int, int>> edges;
  if (doc.contains("edges"))
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2)
        throw ValidationError("each edge must be a [parent, child] pair");
      edges.emplace_back(index_of(e[0].get<std::string>()), index_of(e[1].get<std::string>()));
    }

  Dag dag(std::move(vars), std::move(edges));

  NetworkFile file{std::move(dag), std::nullopt};
  if (!doc.contains("cpts")) return file;

  const auto& cpts_doc = doc["cpts"];
  std::vector<Cpt> cpts;
  for (int i = 0; i < file.dag.size(); ++i) {
    const std::string& name = file.dag.var(i).name;
    if (!cpts_doc.contains(name))
      throw ValidationError("missing CPT for variable '" + name + "'");
    const auto& c = cpts_doc[name];
    Cpt cpt;
    cpt.node = i;
    for (const auto& p : c.at("parents"))
      cpt.parents.push_back(file.dag.index_of(p.get<std::string>()));
    for (const auto& r : c.at("rows")) {
      std::vector<double> row;
      for (const auto& x : r) row.push_back(x.get<double>());
      detail::renormalize_row(row, name, cpt.rows.size(), notes);
      cpt.rows.push_back(std::move(row));
    }
    cpts.push_back(std::move(cpt));
  }
  for (const auto& [key, _] : cpts_doc.items()) {
    bool known = false;
    for (int i = 0; i < file.dag.size(); ++i)
      if (file.dag.var(i).name == key) known = true;
    if (!known) throw ValidationError("CPT for unknown variable '" + key + "'");
  }
  // full validation happens in the DiscreteBn constructor
  DiscreteBn bn(file.dag, cpts);
  file.cpts = bn.cpts();
  return file;
}

inline nlohmann::ordered_json serialize_network(const Dag& dag,
                                                const std::vector<Cpt>* cpts = nullptr) {
  nlohmann::ordered_json doc;
  doc["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : dag.variables())
    doc["variables"].push_back({{"name", v.name}, {"levels", v.levels}});
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& [p, c] : dag.edges())
    doc["edges"].push_back({dag.var(p).name, dag.var(c).name});
  if (cpts) {
    auto& out = doc["cpts"] = nlohmann::ordered_json::object();
    for (const auto& c : *cpts) {
      nlohmann::ordered_json entry;
      entry["parents"] = nlohmann::ordered_json::array();
      for (int p : c.parents) entry["parents"].push_back(dag.var(p).name);
      entry["rows"] = c.rows;
      out[dag.var(c.node).name] = std::move(entry);
    }
  }
  return doc;
}

inline NetworkFile load_network(const std::string& path,
                                std::vector<std::string>* notes = nullptr) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open network file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cannot parse '" + path + "': " + e.what());
  }
  return parse_network(doc, notes);
}

inline void save_network(const std::string& path, const Dag& dag,
                         const std::vector<Cpt>* cpts = nullptr) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write network file '" + path + "'");
  out << serialize_network(dag, cpts).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Dataset CSV: UTF-8, comma separated, header row of variable names, cells
// are level labels. Labels are case-sensitive and must not contain commas.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace detail

inline Dataset load_dataset(std::istream& in, const std::vector<Variable>& schema) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset is empty (no header row)");
  const auto header = detail::split_csv_line(line);
  if (header.size() != schema.size())
    throw ValidationError("dataset has " + std::to_string(header.size()) +
                          " columns, expected " + std::to_string(schema.size()));

  // columns may come in any order; map them onto the schema
  std::vector<int> col_of(schema.size(), -1);
  for (std::size_t c = 0; c < header.size(); ++c) {
    int hit = -1;
    for (std::size_t s = 0; s < schema.size(); ++s)
      if (schema[s].name == header[c]) hit = static_cast<int>(s);
    if (hit < 0) throw ValidationError("unknown dataset column '" + header[c] + "'");
    if (col_of[static_cast<std::size_t>(hit)] != -1)
      throw ValidationError("duplicate dataset column '" + header[c] + "'");
    col_of[static_cast<std::size_t>(hit)] = static_cast<int>(c);
  }

  Dataset data;
  for (const auto& v : schema) data.variables.push_back(v.name);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != schema.size())
      throw ValidationError("row " + std::to_string(lineno) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(schema.size()));
    std::vector<int> row(schema.size());
    for (std::size_t s = 0; s < schema.size(); ++s) {
      const std::string& cell = cells[static_cast<std::size_t>(col_of[s])];
      if (cell.empty())
        throw ValidationError("missing value at row " + std::to_string(lineno) +
                              ", column '" + schema[s].name + "'");
      bool found = false;
      for (std::size_t k = 0; k < schema[s].levels.size(); ++k)
        if (schema[s].levels[k] == cell) {
          row[s] = static_cast<int>(k);
          found = true;
          break;
        }
      if (!found)
        throw ValidationError("unknown level '" + cell + "' at row " +
                              std::to_string(lineno) + ", column '" + schema[s].name + "'");
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

inline Dataset load_dataset(const std::string& path, const std::vector<Variable>& schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset '" + path + "'");
  return load_dataset(in, schema);
}

inline void write_dataset_csv(std::ostream& out, const std::vector<Variable>& schema,
                              const Dataset& data) {
  for (std::size_t s = 0; s < schema.size(); ++s)
    out << (s ? "," : "") << schema[s].name;
  out << '\n';
  for (const auto& row : data.rows) {
    for (std::size_t s = 0; s < schema.size(); ++s)
      out << (s ? "," : "") << schema[s].levels[static_cast<std::size_t>(row[s])];
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Raw Pima preprocessing: drop rows with zero-coded missing values in the
// five physiological columns, binarize every numeric column at its median
// over the retained rows (<= median -> low, > median -> high), and map the
// outcome to neg/pos.
// ---------------------------------------------------------------------------

inline const std::array<const char*, 9> kPimaNames = {
    "PREG", "GLUC", "PRES", "TRIC", "INS", "MASS", "PED", "AGE", "DIAB"};

inline std::pair<std::vector<Variable>, Dataset> prepare_pima(std::istream& in) {
  std::vector<std::array<double, 9>> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 9)
      throw ValidationError("raw row " + std::to_string(lineno) + " has " +
                            std::to_string(cells.size()) + " columns, expected 9");
    std::array<double, 9> row{};
    bool numeric = true;
    for (std::size_t c = 0; c < 9; ++c) {
      try {
        std::size_t used = 0;
        row[c] = std::stod(cells[c], &used);
        if (used != cells[c].size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (lineno == 1) continue;  // header row
      throw ValidationError("non-numeric cell in raw row " + std::to_string(lineno));
    }
    raw.push_back(row);
  }

  // zero-coded missing: glucose, blood pressure, skin thickness, insulin, BMI
  std::vector<std::array<double, 9>> kept;
  for (const auto& row : raw) {
    bool complete = true;
    for (std::size_t c : {1u, 2u, 3u, 4u, 5u})
      if (row[c] == 0.0) complete = false;
    if (complete) kept.push_back(row);
  }

  std::array<double, 8> median{};
  for (std::size_t c = 0; c < 8; ++c) {
    std::vector<double> col;
    col.reserve(kept.size());
    for (const auto& row : kept) col.push_back(row[c]);
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    if (n == 0) throw ValidationError("no complete rows in the raw file");
    median[c] = (n % 2 == 1) ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }

  std::vector<Variable> schema;
  for (std::size_t c = 0; c < 9; ++c) {
    Variable v;
    v.name = kPimaNames[c];
    v.levels = (c == 8) ? std::vector<std::string>{"neg", "pos"}
                        : std::vector<std::string>{"low", "high"};
    schema.push_back(std::move(v));
  }

  Dataset data;
  for (const auto& v : schema) data.variables.push_back(v.name);
  for (const auto& row : kept) {
    std::vector<int> out(9);
    for (std::size_t c = 0; c < 8; ++c) out[c] = row[c] <= median[c] ? 0 : 1;
    if (row[8] != 0.0 && row[8] != 1.0)
      throw ValidationError("outcome column must be 0 or 1");
    out[8] = row[8] == 1.0 ? 1 : 0;
    data.rows.push_back(std::move(out));
  }
  return {std::move(schema), std::move(data)};
}

inline std::pair<std::vector<Variable>, Dataset> prepare_pima(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open raw file '" + path + "'");
  return prepare_pima(in);
}

}  // namespace bnv
