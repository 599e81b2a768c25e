// End-to-end checks of the bnv binary: every subcommand is a thin shell
// whose output numbers equal the library results exactly, runs are
// byte-identical, and error exit codes follow the documented mapping
// (2 validation, 3 degeneracy).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "bnv/io.hpp"
#include "bnv/monitors.hpp"
#include "bnv/report.hpp"
#include "bnv/sensitivity.hpp"
#include "bnv/simulate.hpp"
#include "support/testnets.hpp"

using namespace bnv;

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(BNV_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("bnv_cli_test_" + std::to_string(getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

// one fixed model + dataset reused by most sections
const DiscreteBn& model() {
  static const DiscreteBn bn = [] {
    std::mt19937_64 rng(404);
    return testnets::random_cpts(testnets::five_node_dag(), rng);
  }();
  return bn;
}

const Dataset& data() {
  static const Dataset d = simulate(model(), 40, 2024);
  return d;
}

}  // namespace

TEST_CASE("cli end to end") {
  Workspace ws;
  const std::string net = ws.path("net.json");
  const std::string dag_only = ws.path("dag.json");
  const std::string csv = ws.path("data.csv");
  save_network(net, model().dag(), &model().cpts());
  save_network(dag_only, model().dag());
  {
    std::ofstream out(csv);
    write_dataset_csv(out, model().dag().variables(), data());
  }

  SECTION("query equals the library result exactly") {
    const auto r = run("query --dag " + net + " --target Y5 --evidence Y1=low");
    REQUIRE(r.exit_code == 0);
    const QueryResult want = query(model(), Query{{4}, {{0, 0}}});
    REQUIRE(r.out == to_csv(want, model().dag()));
  }

  SECTION("query --type conditional tabulates the evidence configurations") {
    const auto r = run("query --dag " + net + " --target Y5 --evidence Y1 --type conditional");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    REQUIRE(header == "Y1,Y5=low,Y5=high");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    REQUIRE(rows == 2);
  }

  SECTION("fit writes a loadable document matching the library fit") {
    const std::string fitted = ws.path("fitted.json");
    const auto r = run("fit --dag " + dag_only + " --data " + csv + " --out " + fitted);
    REQUIRE(r.exit_code == 0);
    const DiscreteBn got = load_network(fitted).to_bn();
    const DiscreteBn want = mle_bn(model().dag(), tabulate(model().dag(), data()));
    for (int i = 0; i < model().dag().size(); ++i)
      REQUIRE(got.cpt(i).rows == want.cpt(i).rows);
  }

  SECTION("monitor global output is byte-identical across runs and to the library") {
    const std::string args = "monitor global --dag " + dag_only + " --data " + csv;
    const auto r1 = run(args);
    const auto r2 = run(args);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r1.out == r2.out);
    const auto want =
        global_monitor(model().dag(), data(), default_prior(model().dag()));
    REQUIRE(r1.out == to_csv(want, model().dag()));
  }

  SECTION("monitor marginal renders a plot and matches the library") {
    const std::string svg = ws.path("z.svg");
    const auto r = run("monitor marginal --dag " + dag_only + " --data " + csv +
                       " --node Y4 --plot " + svg);
    REQUIRE(r.exit_code == 0);
    const auto want =
        seq_marg_monitor(model().dag(), data(), 3, default_prior(model().dag()));
    REQUIRE(r.out == to_csv(want));
    const std::string rendered = read_file(svg);
    REQUIRE(rendered.rfind("<?xml", 0) == 0);
    REQUIRE(rendered.find("stroke-dasharray") != std::string::npos);
  }

  SECTION("monitor pa-ch with explicit parents") {
    const auto r = run("monitor pa-ch --dag " + dag_only + " --data " + csv +
                       " --node Y5 --parents Y4,Y3 --value-parents high,low");
    REQUIRE(r.exit_code == 0);
    const auto want = seq_pa_ch_monitor(model().dag(), data(), 4,
                                        std::vector<std::string>{"Y4", "Y3"},
                                        std::vector<std::string>{"high", "low"},
                                        default_prior(model().dag()));
    REQUIRE(r.out == to_csv(want));
  }

  SECTION("influence with a custom alpha") {
    const auto r = run("influence --dag " + dag_only + " --data " + csv + " --alpha 1");
    REQUIRE(r.exit_code == 0);
    const auto want =
        influential_obs(model().dag(), data(), uniform_prior(model().dag(), 1.0));
    REQUIRE(r.out == to_csv(want));
  }

  SECTION("sensitivity in json format carries the fitted coefficients") {
    const auto r = run("sensitivity --dag " + net +
                       " --node Y1 --value-node high --interest-node Y5 "
                       "--interest-value high --evidence Y2=low --format json");
    REQUIRE(r.exit_code == 0);
    const Json doc = Json::parse(r.out);
    const auto want = sensitivity(model(), {{4, 1}}, {{1, 0}}, ParamRef{0, 1, {}});
    REQUIRE(doc["coefficients"]["a"].get<double>() == want.coef.a);
    REQUIRE(doc["grid"].size() == 101);
    REQUIRE(doc["grid"][50]["probability"].get<double>() == *want.grid[50].value);
  }

  SECTION("cd and kl emit their documented columns") {
    const auto cd = run("cd --dag " + net + " --node Y3 --value-node low "
                        "--value-parents high --new-value 0.2,0.5");
    REQUIRE(cd.exit_code == 0);
    REQUIRE(cd.out.rfind("new_value,cd\n", 0) == 0);
    const auto kl = run("kl --dag " + net + " --node Y3 --value-node low "
                        "--value-parents high --new-value 0.2,0.5");
    REQUIRE(kl.exit_code == 0);
    REQUIRE(kl.out.rfind("new_value,kl,jeffreys\n", 0) == 0);
    const auto want = distance_grid(model(), ParamRef{2, 0, {1}}, {0.2, 0.5});
    REQUIRE(cd.out == to_csv(want, DistanceColumns::cd_only));
    REQUIRE(kl.out == to_csv(want, DistanceColumns::kl_and_jeffreys));
  }

  SECTION("sensquery accepts both flag spellings") {
    const double current = event_probability(model(), {{4, 1}}, {{2, 0}});
    const double target = std::min(0.9, current + 0.05);
    std::ostringstream t;
    t << std::setprecision(17) << target;
    const auto a = run("sensquery --dag " + net + " --target Y5=high --evidence Y3=low "
                       "--value " + t.str());
    const auto b = run("sensquery --dag " + net +
                       " --interest-node Y5 --interest-value high --evidence Y3=low "
                       "--target-value " + t.str());
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
    const auto want = sensquery(model(), {{4, 1}}, {{2, 0}}, target);
    REQUIRE(a.out == to_csv(want, model().dag()));
  }

  SECTION("prep-pima produces the 392-row dataset") {
    const std::string out = ws.path("diabetes.csv");
    const auto r = run(std::string("prep-pima --raw ") + BNV_FIXTURES_DIR +
                       "/pima_synthetic_raw.csv --out " + out);
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(read_file(out));
    std::string header;
    std::getline(lines, header);
    REQUIRE(header == "PREG,GLUC,PRES,TRIC,INS,MASS,PED,AGE,DIAB");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    REQUIRE(rows == 392);
  }

  SECTION("simulate is seed-deterministic") {
    const auto a = run("simulate --dag " + net + " --rows 20 --seed 7");
    const auto b = run("simulate --dag " + net + " --rows 20 --seed 7");
    const auto c = run("simulate --dag " + net + " --rows 20 --seed 8");
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
    REQUIRE(a.out != c.out);
  }

  SECTION("comment header is opt-in") {
    const auto plain = run("monitor global --dag " + dag_only + " --data " + csv);
    const auto commented =
        run("monitor global --dag " + dag_only + " --data " + csv + " --comment-header");
    REQUIRE(commented.out == "# bnv monitor global\n" + plain.out);
  }

  SECTION("exit code 2 for validation errors") {
    REQUIRE(run("query --dag " + ws.path("missing.json") + " --target Y5").exit_code == 2);
    REQUIRE(run("query --dag " + dag_only + " --target Y5").exit_code == 2);  // no CPTs, no data
    REQUIRE(run("query --dag " + net + " --target NOPE").exit_code == 2);
    REQUIRE(run("nonsense-subcommand").exit_code == 2);
  }

  SECTION("exit code 3 for impossible evidence") {
    // a deterministic root makes Y1=high impossible
    Dag dag({testnets::binary("A"), testnets::binary("B")}, {{0, 1}});
    const DiscreteBn degen(dag, {Cpt{0, {}, {{1.0, 0.0}}},
                                 Cpt{1, {0}, {{0.5, 0.5}, {0.2, 0.8}}}});
    const std::string dpath = ws.path("degen.json");
    save_network(dpath, degen.dag(), &degen.cpts());
    REQUIRE(run("query --dag " + dpath + " --target B --evidence A=high").exit_code == 3);
  }
}
