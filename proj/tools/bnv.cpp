// bnv: validate discrete Bayesian networks against data.
//
// Subcommands mirror the library: query, fit, monitor
// global|marginal|conditional|pa-ch, influence, sensitivity, cd, kl,
// sensquery, prep-pima, simulate. Every subcommand is a thin shell around
// one library call; outputs are deterministic and byte-identical across
// runs on identical inputs.
//
// Exit codes: 0 success, 2 input/validation error, 3 computation
// degeneracy.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bnv/io.hpp"
#include "bnv/monitors.hpp"
#include "bnv/report.hpp"
#include "bnv/sensitivity.hpp"
#include "bnv/simulate.hpp"
#include "bnv/svg.hpp"

namespace {

using namespace bnv;

struct CommonOpts {
  std::string dag_path;
  std::string data_path;
  double alpha = 0.0;  // 0 means the per-node default
  std::string format = "csv";
  std::string out_path;
  std::string plot_path;
  bool comment_header = false;
};

void add_output_flags(CLI::App* cmd, CommonOpts& opt, bool with_plot = false) {
  cmd->add_option("--format", opt.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", opt.out_path, "Write the report to this file (default stdout)");
  if (with_plot)
    cmd->add_option("--plot", opt.plot_path, "Also render an SVG line chart to this file");
  cmd->add_flag("--comment-header", opt.comment_header,
                "Prepend a '# bnv <subcommand>' comment line to the report");
}

void add_model_flags(CLI::App* cmd, CommonOpts& opt, bool need_data) {
  cmd->add_option("--dag", opt.dag_path, "Network document (JSON)")->required();
  auto* d = cmd->add_option("--data", opt.data_path, "Dataset (CSV with a header row)");
  if (need_data) d->required();
  cmd->add_option("--alpha", opt.alpha,
                  "Scalar Dirichlet hyperparameter overriding the per-node default");
}

DirichletSpec prior_for(const Dag& dag, const CommonOpts& opt) {
  return opt.alpha > 0.0 ? uniform_prior(dag, opt.alpha) : default_prior(dag);
}

void print_notes(const std::vector<std::string>& notes) {
  for (const auto& n : notes) std::cerr << "note: " << n << "\n";
}

// A network with CPTs: either the document carries them, or they are
// fitted from --data (method mle by default, bayes with --fit bayes).
DiscreteBn load_or_fit_bn(const CommonOpts& opt, const std::string& fit_method) {
  std::vector<std::string> notes;
  const NetworkFile file = load_network(opt.dag_path, &notes);
  print_notes(notes);
  if (file.has_cpts()) return file.to_bn();
  if (opt.data_path.empty())
    throw ValidationError("'" + opt.dag_path +
                          "' has no CPTs; provide --data to fit them");
  const Dataset data = load_dataset(opt.data_path, file.dag.variables());
  const CountTable counts = tabulate(file.dag, data);
  if (fit_method == "bayes") return posterior_mean_bn(file.dag, prior_for(file.dag, opt), counts);
  notes.clear();
  DiscreteBn bn = mle_bn(file.dag, counts, &notes);
  print_notes(notes);
  return bn;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

std::string with_header(const CommonOpts& opt, const std::string& name, std::string body) {
  if (!opt.comment_header) return body;
  return "# bnv " + name + "\n" + body;
}

void emit(const CommonOpts& opt, const std::string& name, const std::string& csv,
          const Json& json) {
  if (opt.format == "json")
    write_text(opt.out_path, with_header(opt, name, json.dump(2) + "\n"));
  else
    write_text(opt.out_path, with_header(opt, name, csv));
}

std::map<int, int> parse_assignments(const Dag& dag, const std::string& text,
                                     const char* what) {
  std::map<int, int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ValidationError(std::string(what) + " '" + item + "' must look like NAME=level");
    const int v = dag.index_of(item.substr(0, eq));
    const int level = dag.var(v).level_index(item.substr(eq + 1));
    if (out.count(v)) throw ValidationError("duplicate " + std::string(what) + " for '" +
                                            item.substr(0, eq) + "'");
    out[v] = level;
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<double> parse_new_values(const std::string& text) {
  if (text.empty() || text == "all") return {};  // default grid
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("--new-value entry '" + item + "' is not a number");
    }
  }
  return out;
}

CovariationScheme parse_scheme(const std::string& name) {
  if (name == "proportional") return CovariationScheme::proportional;
  if (name == "uniform") return CovariationScheme::uniform;
  if (name == "order-preserving") return CovariationScheme::order_preserving;
  throw ValidationError("unknown co-variation scheme '" + name + "'");
}

ParamRef parse_param(const DiscreteBn& bn, const std::string& node_name,
                     const std::string& value_label, const std::string& value_parents) {
  ParamRef p;
  p.node = bn.dag().index_of(node_name);
  p.value = bn.dag().var(p.node).level_index(value_label);
  const auto& parents = bn.dag().parents(p.node);
  const auto labels = split_list(value_parents);
  if (labels.size() != parents.size())
    throw ValidationError("--value-parents needs " + std::to_string(parents.size()) +
                          " values for '" + node_name + "' (canonical parent order)");
  for (std::size_t i = 0; i < parents.size(); ++i)
    p.parent_config.push_back(bn.dag().var(parents[i]).level_index(labels[i]));
  return p;
}

std::optional<double> monitor_plot_value(const MonitorStep& st) { return st.z; }

void plot_series(const CommonOpts& opt, const MonitorSeries& m, const Dag& dag) {
  if (opt.plot_path.empty()) return;
  std::vector<double> x;
  std::vector<std::optional<double>> y;
  for (std::size_t i = 0; i < m.steps.size(); ++i) {
    x.push_back(static_cast<double>(i + 1));
    y.push_back(monitor_plot_value(m.steps[i]));
  }
  ChartOptions chart;
  chart.title = dag.var(m.node).name;
  chart.x_label = m.kind == MonitorKind::parent_child ? "relevant-subset index" : "index";
  chart.y_label = "Z";
  chart.reference_lines = {1.96, -1.96};
  write_text(opt.plot_path, render_line_chart(x, y, chart));
}

void plot_grid(const CommonOpts& opt, const std::vector<double>& x,
               const std::vector<std::optional<double>>& y, const std::string& ylabel) {
  if (opt.plot_path.empty()) return;
  ChartOptions chart;
  chart.x_label = "new value";
  chart.y_label = ylabel;
  write_text(opt.plot_path, render_line_chart(x, y, chart));
}

// query: distribution over targets given fixed evidence; --type conditional
// tabulates the targets against every configuration of the evidence
// variables instead.
int run_query(const CommonOpts& opt, const std::string& fit_method,
              const std::string& targets_text, const std::string& evidence_text,
              const std::string& type) {
  const DiscreteBn bn = load_or_fit_bn(opt, fit_method);
  const Dag& dag = bn.dag();
  Query q;
  for (const auto& name : split_list(targets_text)) q.targets.push_back(dag.index_of(name));
  // conditional tables span every configuration of the evidence variables,
  // so bare names are accepted there; level values are required otherwise
  for (const auto& item : split_list(evidence_text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (type != "conditional")
        throw ValidationError("evidence '" + item + "' must look like NAME=level");
      q.evidence[dag.index_of(item)] = 0;
    } else {
      const int v = dag.index_of(item.substr(0, eq));
      q.evidence[v] = dag.var(v).level_index(item.substr(eq + 1));
    }
  }

  if (type == "conditional") {
    std::vector<int> evars;
    for (const auto& [v, _] : q.evidence) evars.push_back(v);
    if (evars.empty()) throw ValidationError("--type conditional needs --evidence");
    std::vector<int> tvars = q.targets;
    std::sort(tvars.begin(), tvars.end());
    const auto ecards = dag.cards_of(evars);
    const auto tcards = dag.cards_of(tvars);

    std::string csv;
    for (int v : evars) csv += dag.var(v).name + ",";
    std::vector<std::string> tlabels;
    for (std::size_t tc = 0; tc < config_count(tcards); ++tc) {
      const auto values = config_values(tcards, tc);
      std::string label;
      for (std::size_t i = 0; i < tvars.size(); ++i) {
        if (i) label += "/";
        label += dag.var(tvars[i]).name + "=" +
                 dag.var(tvars[i]).levels[static_cast<std::size_t>(values[i])];
      }
      tlabels.push_back(label);
      csv += label + (tc + 1 < config_count(tcards) ? "," : "\n");
    }
    Json json = Json::array();
    for (std::size_t ec = 0; ec < config_count(ecards); ++ec) {
      const auto evalues = config_values(ecards, ec);
      Query qc;
      qc.targets = tvars;
      for (std::size_t i = 0; i < evars.size(); ++i) qc.evidence[evars[i]] = evalues[i];
      std::optional<QueryResult> r;
      try {
        r = query(bn, qc);
      } catch (const DegeneracyError&) {
        // impossible evidence configuration: reported as empty cells
      }
      Json jrow = Json::object();
      for (std::size_t i = 0; i < evars.size(); ++i) {
        const auto& label = dag.var(evars[i]).levels[static_cast<std::size_t>(evalues[i])];
        csv += (i ? "," : "") + label;
        jrow[dag.var(evars[i]).name] = label;
      }
      for (std::size_t tc = 0; tc < config_count(tcards); ++tc) {
        csv += "," + (r ? format_number(r->p[tc]) : std::string());
        jrow[tlabels[tc]] = r ? json_number(r->p[tc]) : Json(nullptr);
      }
      csv += "\n";
      json.push_back(std::move(jrow));
    }
    emit(opt, "query", csv, json);
    return 0;
  }

  const QueryResult r = query(bn, q);
  emit(opt, "query", to_csv(r, dag), to_json(r, dag));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validation of discrete Bayesian networks against data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bnv 0.1.0");

  // ---- query ----
  CommonOpts q_opt;
  std::string q_fit = "mle", q_targets, q_evidence, q_type;
  auto* q_cmd = app.add_subcommand("query", "Exact marginal/conditional probabilities");
  add_model_flags(q_cmd, q_opt, false);
  q_cmd->add_option("--target", q_targets, "Target variable name(s), comma separated")
      ->required();
  q_cmd->add_option("--evidence", q_evidence, "Evidence as NAME=level[,NAME=level...]");
  q_cmd->add_option("--type", q_type, "Empty (given evidence values) or 'conditional'")
      ->check(CLI::IsMember({"", "conditional"}));
  q_cmd->add_option("--fit", q_fit, "CPT fit when the document has none: mle or bayes")
      ->check(CLI::IsMember({"mle", "bayes"}));
  add_output_flags(q_cmd, q_opt);

  // ---- fit ----
  CommonOpts f_opt;
  std::string f_method = "mle";
  auto* f_cmd = app.add_subcommand("fit", "Fit CPTs from data and write a network document");
  add_model_flags(f_cmd, f_opt, true);
  f_cmd->add_option("--method", f_method, "mle or bayes")
      ->check(CLI::IsMember({"mle", "bayes"}));
  f_cmd->add_option("--out", f_opt.out_path, "Output network document")->required();

  // ---- monitor ----
  auto* m_cmd = app.add_subcommand("monitor", "Prequential robustness monitors");
  m_cmd->require_subcommand(1);

  CommonOpts mg_opt;
  bool mg_plugin = false;
  auto* mg_cmd = m_cmd->add_subcommand("global", "Per-node negative log predictive score");
  add_model_flags(mg_cmd, mg_opt, true);
  mg_cmd->add_flag("--plugin", mg_plugin,
                   "Score with the full-data posterior-mean network instead of the "
                   "prequential predictive");
  add_output_flags(mg_cmd, mg_opt);

  CommonOpts mm_opt;
  std::string mm_node;
  auto* mm_cmd = m_cmd->add_subcommand("marginal", "Sequential marginal node monitor");
  add_model_flags(mm_cmd, mm_opt, true);
  mm_cmd->add_option("--node", mm_node, "Monitored variable")->required();
  add_output_flags(mm_cmd, mm_opt, true);

  CommonOpts mc_opt;
  std::string mc_node;
  auto* mc_cmd = m_cmd->add_subcommand("conditional", "Sequential conditional node monitor");
  add_model_flags(mc_cmd, mc_opt, true);
  mc_cmd->add_option("--node", mc_node, "Monitored variable")->required();
  add_output_flags(mc_cmd, mc_opt, true);

  CommonOpts mp_opt;
  std::string mp_node, mp_parents, mp_values;
  auto* mp_cmd = m_cmd->add_subcommand("pa-ch", "Sequential parent-child monitor");
  add_model_flags(mp_cmd, mp_opt, true);
  mp_cmd->add_option("--node", mp_node, "Monitored variable")->required();
  mp_cmd->add_option("--parents", mp_parents,
                     "Parent names (default: canonical order of the node's parents)");
  mp_cmd->add_option("--value-parents", mp_values, "Parent levels, aligned with --parents");
  add_output_flags(mp_cmd, mp_opt, true);

  // ---- influence ----
  CommonOpts i_opt;
  auto* i_cmd = app.add_subcommand("influence", "Leave-one-out influence of each observation");
  add_model_flags(i_cmd, i_opt, true);
  add_output_flags(i_cmd, i_opt, true);

  // ---- sensitivity ----
  CommonOpts s_opt;
  std::string s_fit = "mle", s_node, s_value_node, s_value_parents, s_interest_node,
              s_interest_value, s_evidence, s_new_value = "all",
              s_scheme = "proportional";
  auto* s_cmd = app.add_subcommand("sensitivity",
                                   "Query probability as a function of one CPT entry");
  add_model_flags(s_cmd, s_opt, false);
  s_cmd->add_option("--node", s_node, "Varied variable")->required();
  s_cmd->add_option("--value-node", s_value_node, "Varied level")->required();
  s_cmd->add_option("--value-parents", s_value_parents,
                    "Parent levels of the varied row (canonical order)");
  s_cmd->add_option("--interest-node", s_interest_node, "Output variable")->required();
  s_cmd->add_option("--interest-value", s_interest_value, "Output level")->required();
  s_cmd->add_option("--evidence", s_evidence, "Evidence as NAME=level[,...]");
  s_cmd->add_option("--new-value", s_new_value, "'all' or a comma list of values in [0,1]");
  s_cmd->add_option("--covariation", s_scheme,
                    "proportional, uniform or order-preserving");
  s_cmd->add_option("--fit", s_fit, "CPT fit when the document has none: mle or bayes")
      ->check(CLI::IsMember({"mle", "bayes"}));
  add_output_flags(s_cmd, s_opt, true);

  // ---- cd / kl ----
  auto make_distance_cmd = [&](const char* name, const char* help) {
    return app.add_subcommand(name, help);
  };
  CommonOpts cd_opt;
  std::string cd_fit = "mle", cd_node, cd_value_node, cd_value_parents,
              cd_new_value = "all", cd_scheme = "proportional";
  auto* cd_cmd = make_distance_cmd("cd", "CD distance under a one-entry change");
  CommonOpts kl_opt;
  std::string kl_fit = "mle", kl_node, kl_value_node, kl_value_parents,
              kl_new_value = "all", kl_scheme = "proportional";
  auto* kl_cmd =
      make_distance_cmd("kl", "KL divergence and Jeffreys distance under a one-entry change");
  for (auto [cmd, opt, fit, node, value_node, value_parents, new_value, scheme] :
       {std::tuple{cd_cmd, &cd_opt, &cd_fit, &cd_node, &cd_value_node, &cd_value_parents,
                   &cd_new_value, &cd_scheme},
        std::tuple{kl_cmd, &kl_opt, &kl_fit, &kl_node, &kl_value_node, &kl_value_parents,
                   &kl_new_value, &kl_scheme}}) {
    add_model_flags(cmd, *opt, false);
    cmd->add_option("--node", *node, "Varied variable")->required();
    cmd->add_option("--value-node", *value_node, "Varied level")->required();
    cmd->add_option("--value-parents", *value_parents,
                    "Parent levels of the varied row (canonical order)");
    cmd->add_option("--new-value", *new_value, "'all' or a comma list of values in [0,1]");
    cmd->add_option("--covariation", *scheme, "proportional, uniform or order-preserving");
    cmd->add_option("--fit", *fit, "CPT fit when the document has none: mle or bayes")
        ->check(CLI::IsMember({"mle", "bayes"}));
    add_output_flags(cmd, *opt, true);
  }

  // ---- sensquery ----
  CommonOpts sq_opt;
  std::string sq_fit = "mle", sq_interest_node, sq_interest_value, sq_evidence, sq_target;
  double sq_target_value = -1.0;
  auto* sq_cmd = app.add_subcommand(
      "sensquery", "Single-parameter changes achieving a target query probability");
  add_model_flags(sq_cmd, sq_opt, false);
  sq_cmd->add_option("--interest-node", sq_interest_node, "Output variable");
  sq_cmd->add_option("--interest-value", sq_interest_value, "Output level");
  sq_cmd->add_option("--target", sq_target,
                     "Shorthand for --interest-node/--interest-value as NAME=level");
  sq_cmd->add_option("--evidence", sq_evidence, "Evidence as NAME=level[,...]");
  sq_cmd->add_option("--target-value,--value", sq_target_value,
                     "Desired probability, strictly inside (0,1)")
      ->required();
  sq_cmd->add_option("--fit", sq_fit, "CPT fit when the document has none: mle or bayes")
      ->check(CLI::IsMember({"mle", "bayes"}));
  add_output_flags(sq_cmd, sq_opt);

  // ---- prep-pima ----
  std::string pp_raw, pp_out;
  auto* pp_cmd = app.add_subcommand(
      "prep-pima", "Discretize the raw Pima diabetes file into the 9-column binary dataset");
  pp_cmd->add_option("--raw", pp_raw, "Raw CSV (768 rows, 8 numeric features + outcome)")
      ->required();
  pp_cmd->add_option("--out", pp_out, "Output dataset CSV (default stdout)");

  // ---- simulate ----
  CommonOpts sim_opt;
  std::size_t sim_rows = 0;
  std::uint64_t sim_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Forward-sample a dataset from a network");
  sim_cmd->add_option("--dag", sim_opt.dag_path, "Network document with CPTs")->required();
  sim_cmd->add_option("--rows,-m", sim_rows, "Number of observations")->required();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_opt.out_path, "Output dataset CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    app.exit(e);
    return 2;
  }

  try {
    if (*q_cmd) return run_query(q_opt, q_fit, q_targets, q_evidence, q_type);

    if (*f_cmd) {
      std::vector<std::string> notes;
      const NetworkFile file = load_network(f_opt.dag_path, &notes);
      print_notes(notes);
      const Dataset data = load_dataset(f_opt.data_path, file.dag.variables());
      const CountTable counts = tabulate(file.dag, data);
      DiscreteBn bn = [&] {
        if (f_method == "bayes")
          return posterior_mean_bn(file.dag, prior_for(file.dag, f_opt), counts);
        std::vector<std::string> fit_notes;
        DiscreteBn fitted = mle_bn(file.dag, counts, &fit_notes);
        print_notes(fit_notes);
        return fitted;
      }();
      save_network(f_opt.out_path, bn.dag(), &bn.cpts());
      return 0;
    }

    if (*mg_cmd) {
      const NetworkFile file = load_network(mg_opt.dag_path);
      const Dataset data = load_dataset(mg_opt.data_path, file.dag.variables());
      const auto r = global_monitor(file.dag, data, prior_for(file.dag, mg_opt), mg_plugin);
      emit(mg_opt, "monitor global", to_csv(r, file.dag), to_json(r, file.dag));
      return 0;
    }

    for (auto [cmd, opt, node, conditional] :
         {std::tuple{mm_cmd, &mm_opt, &mm_node, false},
          std::tuple{mc_cmd, &mc_opt, &mc_node, true}}) {
      if (!*cmd) continue;
      const NetworkFile file = load_network(opt->dag_path);
      const Dataset data = load_dataset(opt->data_path, file.dag.variables());
      const int n = file.dag.index_of(*node);
      const DirichletSpec prior = prior_for(file.dag, *opt);
      const MonitorSeries m = conditional ? seq_cond_monitor(file.dag, data, n, prior)
                                          : seq_marg_monitor(file.dag, data, n, prior);
      emit(*opt, conditional ? "monitor conditional" : "monitor marginal", to_csv(m),
           to_json(m, file.dag));
      plot_series(*opt, m, file.dag);
      return 0;
    }

    if (*mp_cmd) {
      const NetworkFile file = load_network(mp_opt.dag_path);
      const Dataset data = load_dataset(mp_opt.data_path, file.dag.variables());
      const int n = file.dag.index_of(mp_node);
      std::vector<std::string> names = split_list(mp_parents);
      if (names.empty())
        for (int p : file.dag.parents(n)) names.push_back(file.dag.var(p).name);
      const std::vector<std::string> values = split_list(mp_values);
      const MonitorSeries m =
          seq_pa_ch_monitor(file.dag, data, n, names, values, prior_for(file.dag, mp_opt));
      emit(mp_opt, "monitor pa-ch", to_csv(m), to_json(m, file.dag));
      plot_series(mp_opt, m, file.dag);
      return 0;
    }

    if (*i_cmd) {
      const NetworkFile file = load_network(i_opt.dag_path);
      const Dataset data = load_dataset(i_opt.data_path, file.dag.variables());
      const auto r = influential_obs(file.dag, data, prior_for(file.dag, i_opt));
      emit(i_opt, "influence", to_csv(r), to_json(r));
      if (!i_opt.plot_path.empty()) {
        std::vector<double> x;
        std::vector<std::optional<double>> y;
        for (std::size_t i = 0; i < r.scores.size(); ++i) {
          x.push_back(static_cast<double>(i + 1));
          y.push_back(r.scores[i]);
        }
        ChartOptions chart;
        chart.x_label = "row";
        chart.y_label = "influence";
        write_text(i_opt.plot_path, render_line_chart(x, y, chart));
      }
      return 0;
    }

    if (*s_cmd) {
      const DiscreteBn bn = load_or_fit_bn(s_opt, s_fit);
      const ParamRef param = parse_param(bn, s_node, s_value_node, s_value_parents);
      const int on = bn.dag().index_of(s_interest_node);
      const std::map<int, int> outcome{
          {on, bn.dag().var(on).level_index(s_interest_value)}};
      const auto evidence = parse_assignments(bn.dag(), s_evidence, "evidence");
      const auto r = sensitivity(bn, outcome, evidence, param, parse_new_values(s_new_value),
                                 parse_scheme(s_scheme));
      emit(s_opt, "sensitivity", to_csv(r), to_json(r, bn.dag()));
      std::vector<double> x;
      std::vector<std::optional<double>> y;
      for (const auto& pt : r.grid) {
        x.push_back(pt.t);
        y.push_back(pt.value);
      }
      plot_grid(s_opt, x, y, "probability");
      return 0;
    }

    for (auto [cmd, opt, fit, node, value_node, value_parents, new_value, scheme, cd_only] :
         {std::tuple{cd_cmd, &cd_opt, &cd_fit, &cd_node, &cd_value_node, &cd_value_parents,
                     &cd_new_value, &cd_scheme, true},
          std::tuple{kl_cmd, &kl_opt, &kl_fit, &kl_node, &kl_value_node, &kl_value_parents,
                     &kl_new_value, &kl_scheme, false}}) {
      if (!*cmd) continue;
      const DiscreteBn bn = load_or_fit_bn(*opt, *fit);
      const ParamRef param = parse_param(bn, *node, *value_node, *value_parents);
      const auto r = distance_grid(bn, param, parse_new_values(*new_value),
                                   parse_scheme(*scheme));
      emit(*opt, cd_only ? "cd" : "kl",
           to_csv(r, cd_only ? DistanceColumns::cd_only : DistanceColumns::kl_and_jeffreys),
           to_json(r, bn.dag()));
      std::vector<double> x;
      std::vector<std::optional<double>> y;
      for (const auto& row : r.grid) {
        x.push_back(row.t);
        auto v = cd_only ? row.cd : row.kl;
        y.push_back(v && std::isfinite(*v) ? v : std::nullopt);
      }
      plot_grid(*opt, x, y, cd_only ? "CD distance" : "KL divergence");
      return 0;
    }

    if (*sq_cmd) {
      const DiscreteBn bn = load_or_fit_bn(sq_opt, sq_fit);
      std::string node = sq_interest_node, value = sq_interest_value;
      if (!sq_target.empty()) {
        if (!node.empty())
          throw ValidationError("--target and --interest-node are mutually exclusive");
        const auto eq = sq_target.find('=');
        if (eq == std::string::npos)
          throw ValidationError("--target must look like NAME=level");
        node = sq_target.substr(0, eq);
        value = sq_target.substr(eq + 1);
      }
      if (node.empty() || value.empty())
        throw ValidationError("sensquery needs --interest-node/--interest-value or --target");
      const int on = bn.dag().index_of(node);
      const std::map<int, int> outcome{{on, bn.dag().var(on).level_index(value)}};
      const auto evidence = parse_assignments(bn.dag(), sq_evidence, "evidence");
      const auto r = sensquery(bn, outcome, evidence, sq_target_value);
      emit(sq_opt, "sensquery", to_csv(r, bn.dag()), to_json(r, bn.dag()));
      return 0;
    }

    if (*pp_cmd) {
      const auto [schema, data] = prepare_pima(pp_raw);
      std::ostringstream out;
      write_dataset_csv(out, schema, data);
      write_text(pp_out, out.str());
      return 0;
    }

    if (*sim_cmd) {
      const NetworkFile file = load_network(sim_opt.dag_path);
      const DiscreteBn bn = file.to_bn();
      const Dataset data = simulate(bn, sim_rows, sim_seed);
      std::ostringstream out;
      write_dataset_csv(out, bn.dag().variables(), data);
      write_text(sim_opt.out_path, out.str());
      return 0;
    }
  } catch (const DegeneracyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
