#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "bnv/sensitivity.hpp"
#include "support/oracles.hpp"
#include "support/testnets.hpp"

using namespace bnv;
using Catch::Approx;

TEST_CASE("co-variation schemes") {
  SECTION("binary complement") {
    const auto out = covary(std::vector<double>{0.3, 0.7}, 0, 0.5,
                            CovariationScheme::proportional);
    REQUIRE(out[0] == Approx(0.5).margin(1e-15));
    REQUIRE(out[1] == Approx(0.5).margin(1e-15));
  }
  SECTION("proportional scales the others by the mass ratio") {
    const auto out = covary(std::vector<double>{0.2, 0.3, 0.5}, 0, 0.4,
                            CovariationScheme::proportional);
    REQUIRE(out[0] == Approx(0.4).margin(1e-15));
    REQUIRE(out[1] == Approx(0.225).margin(1e-15));
    REQUIRE(out[2] == Approx(0.375).margin(1e-15));
  }
  SECTION("uniform splits the remaining mass equally") {
    const auto out =
        covary(std::vector<double>{0.2, 0.3, 0.5}, 0, 0.4, CovariationScheme::uniform);
    REQUIRE(out[0] == Approx(0.4).margin(1e-15));
    REQUIRE(out[1] == Approx(0.3).margin(1e-15));
    REQUIRE(out[2] == Approx(0.3).margin(1e-15));
  }
  SECTION("degenerate proportional row") {
    REQUIRE_THROWS_AS(
        covary(std::vector<double>{1.0, 0.0}, 0, 0.5, CovariationScheme::proportional),
        DegeneracyError);
    REQUIRE_NOTHROW(
        covary(std::vector<double>{1.0, 0.0}, 0, 1.0, CovariationScheme::proportional));
  }
  SECTION("order-preserving rejects rank flips") {
    // raising the smallest entry above the others flips the order
    REQUIRE_THROWS_AS(covary(std::vector<double>{0.1, 0.9}, 0, 0.8,
                             CovariationScheme::order_preserving),
                      DegeneracyError);
    // a modest raise keeps it
    const auto ok =
        covary(std::vector<double>{0.1, 0.9}, 0, 0.3, CovariationScheme::order_preserving);
    const auto prop =
        covary(std::vector<double>{0.1, 0.9}, 0, 0.3, CovariationScheme::proportional);
    REQUIRE(ok == prop);
  }
  SECTION("every scheme yields a valid probability row") {
    std::mt19937_64 rng(211);
    for (int rep = 0; rep < 200; ++rep) {
      const int card = 2 + static_cast<int>(next_uniform(rng) * 3);
      const auto row = testnets::random_row(rng, card);
      const int k = static_cast<int>(next_uniform(rng) * card);
      const double t = next_uniform(rng);
      for (auto scheme : {CovariationScheme::proportional, CovariationScheme::uniform,
                          CovariationScheme::order_preserving}) {
        std::vector<double> out;
        try {
          out = covary(row, k, t, scheme);
        } catch (const DegeneracyError&) {
          continue;  // order-preserving may reject t
        }
        double sum = 0.0;
        for (double p : out) {
          REQUIRE(p >= -1e-15);
          REQUIRE(p <= 1.0 + 1e-12);
          sum += p;
        }
        REQUIRE(sum == Approx(1.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("sensitivity functions") {
  SECTION("a root's own marginal is the identity line") {
    std::mt19937_64 rng(223);
    const DiscreteBn bn = testnets::random_bn(rng, 4, 0.5);
    int root = -1;
    for (int i = 0; i < bn.dag().size(); ++i)
      if (bn.dag().parents(i).empty()) root = i;
    REQUIRE(root >= 0);
    const ParamRef p{root, 0, {}};
    const auto r = sensitivity(bn, {{root, 0}}, {}, p);
    for (const auto& pt : r.grid) {
      REQUIRE(pt.value.has_value());
      REQUIRE(*pt.value == Approx(pt.t).margin(1e-9));
    }
  }
  SECTION("a d-separated query is constant in the parameter") {
    // A -> B, C isolated: varying C leaves p(B | A) untouched
    Dag dag({testnets::binary("A"), testnets::binary("B"), testnets::binary("C")},
            {{0, 1}});
    std::mt19937_64 rng(227);
    const DiscreteBn bn = testnets::random_cpts(dag, rng);
    const auto r = sensitivity(bn, {{1, 1}}, {{0, 0}}, ParamRef{2, 0, {}});
    const double first = *r.grid.front().value;
    for (const auto& pt : r.grid) REQUIRE(*pt.value == Approx(first).margin(1e-12));
  }
  SECTION("grid values match enumeration and the fractional-linear fit") {
    std::mt19937_64 rng(229);
    for (int rep = 0; rep < 25; ++rep) {
      const DiscreteBn bn = testnets::random_bn(rng, 5, 0.5);
      const Dag& dag = bn.dag();
      const int node = static_cast<int>(next_uniform(rng) * dag.size());
      const Cpt& cpt = bn.cpt(node);
      const std::size_t j =
          static_cast<std::size_t>(next_uniform(rng) * static_cast<double>(cpt.rows.size()));
      ParamRef param{node, static_cast<int>(next_uniform(rng) * dag.cardinality(node)),
                     parent_config_values(dag, cpt, j)};

      int target = static_cast<int>(next_uniform(rng) * dag.size());
      if (target == node) target = (target + 1) % dag.size();
      int evidence_var = static_cast<int>(next_uniform(rng) * dag.size());
      std::map<int, int> evidence;
      if (evidence_var != target && evidence_var != node) evidence[evidence_var] = 0;
      const std::map<int, int> outcome{{target, 0}};

      const auto r = sensitivity(bn, outcome, evidence, param);
      for (const auto& pt : r.grid) {
        REQUIRE(pt.value.has_value());
        const auto bn2 = detail::perturbed(bn, param, pt.t, CovariationScheme::proportional);
        std::map<int, int> both = evidence;
        both.insert(outcome.begin(), outcome.end());
        const double num = oracles::event_prob_from_joint(bn2, both);
        const double den =
            evidence.empty() ? 1.0 : oracles::event_prob_from_joint(bn2, evidence);
        REQUIRE(*pt.value == Approx(num / den).margin(1e-9));
        REQUIRE(r.coef.eval(pt.t) == Approx(*pt.value).margin(1e-9));
      }
    }
  }
  SECTION("no evidence makes the function affine") {
    std::mt19937_64 rng(233);
    const DiscreteBn bn = testnets::random_bn(rng, 5, 0.5);
    const auto r = sensitivity(bn, {{3, 0}}, {}, ParamRef{0, 0, {}});
    const FractionalLinear f = r.coef.normalized();
    REQUIRE(std::abs(f.c) < 1e-12);
    REQUIRE(f.d == 1.0);
  }
}

TEST_CASE("distance grids") {
  std::mt19937_64 rng(239);
  const DiscreteBn bn = testnets::random_bn(rng, 4, 0.5);
  const ParamRef param{1, 0, parent_config_values(bn.dag(), bn.cpt(1), 0)};
  const double original = bn.param(param);

  SECTION("zero exactly at the original value") {
    const auto r = distance_grid(bn, param, {original});
    REQUIRE(*r.grid[0].cd == 0.0);
    REQUIRE(*r.grid[0].kl == 0.0);
    REQUIRE(*r.grid[0].jeffreys == 0.0);
  }
  SECTION("nonnegative everywhere, zero only at the identity, infinite at the endpoints") {
    const auto r = distance_grid(bn, param);
    for (const auto& row : r.grid) {
      REQUIRE(row.cd.has_value());
      REQUIRE(*row.cd >= 0.0);
      REQUIRE(*row.kl >= 0.0);
      REQUIRE(*row.jeffreys >= *row.kl);
      if (std::abs(row.t - original) > 1e-6) {
        REQUIRE(*row.cd > 0.0);
        REQUIRE(*row.kl > 0.0);
      }
    }
    REQUIRE(std::isinf(*r.grid.front().cd));  // t = 0 kills a positive entry
    REQUIRE(std::isinf(*r.grid.back().cd));   // t = 1 kills the others
  }
  SECTION("local form equals enumeration") {
    for (int rep = 0; rep < 25; ++rep) {
      const DiscreteBn net = testnets::random_bn(rng, 5, 0.5);
      const Dag& dag = net.dag();
      const int node = static_cast<int>(next_uniform(rng) * dag.size());
      const Cpt& cpt = net.cpt(node);
      const std::size_t j =
          static_cast<std::size_t>(next_uniform(rng) * static_cast<double>(cpt.rows.size()));
      const ParamRef p{node, static_cast<int>(next_uniform(rng) * dag.cardinality(node)),
                       parent_config_values(dag, cpt, j)};
      const std::vector<double> ts{0.12, 0.5, 0.93};
      const auto r = distance_grid(net, p, ts);
      for (std::size_t g = 0; g < ts.size(); ++g) {
        const auto net2 = detail::perturbed(net, p, ts[g], CovariationScheme::proportional);
        REQUIRE(*r.grid[g].cd == Approx(oracles::cd_by_enumeration(net, net2)).margin(1e-9));
        REQUIRE(*r.grid[g].kl == Approx(oracles::kl_by_enumeration(net, net2)).margin(1e-9));
        REQUIRE(*r.grid[g].jeffreys ==
                Approx(oracles::kl_by_enumeration(net, net2) +
                       oracles::kl_by_enumeration(net2, net))
                    .margin(1e-9));
      }
    }
  }
  SECTION("CD is symmetric in its arguments") {
    const auto bn2 = detail::perturbed(bn, param, 0.37, CovariationScheme::proportional);
    REQUIRE(oracles::cd_by_enumeration(bn, bn2) ==
            Approx(oracles::cd_by_enumeration(bn2, bn)).margin(1e-12));
  }
  SECTION("degenerate entries are rejected with a named error") {
    Dag dag({testnets::binary("A"), testnets::binary("B")}, {{0, 1}});
    const DiscreteBn degen(dag, {Cpt{0, {}, {{1.0, 0.0}}},
                                 Cpt{1, {0}, {{0.5, 0.5}, {0.2, 0.8}}}});
    REQUIRE_THROWS_AS(distance_grid(degen, ParamRef{0, 0, {}}), DegeneracyError);
  }
}

TEST_CASE("sensquery") {
  SECTION("target equal to the current probability returns zero-change rows") {
    std::mt19937_64 rng(241);
    const DiscreteBn bn = testnets::random_bn(rng, 4, 0.6);
    const std::map<int, int> outcome{{3, 0}};
    const std::map<int, int> evidence{{0, 0}};
    const double current = event_probability(bn, outcome, evidence);
    const auto r = sensquery(bn, outcome, evidence, current);
    REQUIRE_FALSE(r.rows.empty());
    // every parameter that moves the query has its own no-op suggestion
    for (const auto& row : r.rows) {
      REQUIRE(row.suggested == Approx(row.original).margin(1e-7));
      REQUIRE(row.cd == Approx(0.0).margin(1e-7));
    }
  }
  SECTION("solutions match the grid-search oracle and verify on re-evaluation") {
    std::mt19937_64 rng(251);
    for (int rep = 0; rep < 6; ++rep) {
      const DiscreteBn bn = testnets::random_bn(rng, 4, 0.5);
      const Dag& dag = bn.dag();
      const std::map<int, int> outcome{{dag.size() - 1, 0}};
      const std::map<int, int> evidence{{0, 0}};
      const double current = event_probability(bn, outcome, evidence);
      const double target = std::min(0.95, std::max(0.05, current + 0.07));
      if (std::abs(target - current) < 0.02) continue;

      const auto r = sensquery(bn, outcome, evidence, target);

      // sorted ascending by CD
      for (std::size_t i = 1; i < r.rows.size(); ++i)
        REQUIRE(r.rows[i - 1].cd <= r.rows[i].cd + 1e-12);

      // each suggestion reproduces the target (checked via enumeration)
      for (const auto& row : r.rows) {
        const auto bn2 = detail::perturbed(bn, row.param, row.suggested,
                                           CovariationScheme::proportional);
        std::map<int, int> both = evidence;
        both.insert(outcome.begin(), outcome.end());
        const double achieved = oracles::event_prob_from_joint(bn2, both) /
                                oracles::event_prob_from_joint(bn2, evidence);
        REQUIRE(achieved == Approx(target).margin(1e-6));
      }

      // agreement with the brute-force scan over every parameter
      for (int node = 0; node < dag.size(); ++node) {
        const Cpt& cpt = bn.cpt(node);
        for (std::size_t j = 0; j < cpt.rows.size(); ++j) {
          for (int k = 0; k < dag.cardinality(node); ++k) {
            const ParamRef p{node, k, parent_config_values(dag, cpt, j)};
            const auto gs =
                oracles::grid_search_solution(bn, p, outcome, evidence, target);
            // find the matching emitted row (binary rows are deduplicated,
            // so accept the complementary key too)
            bool emitted = false;
            for (const auto& row : r.rows) {
              if (row.param.node != node || row.param.parent_config != p.parent_config)
                continue;
              if (row.param.value == k && std::abs(row.suggested - (gs.found ? gs.t : -1)) < 5e-4)
                emitted = true;
              if (dag.cardinality(node) == 2 && row.param.value == 1 - k && gs.found &&
                  std::abs(row.suggested - (1.0 - gs.t)) < 5e-4)
                emitted = true;
            }
            REQUIRE(emitted == gs.found);
          }
        }
      }
    }
  }
  SECTION("binary rows are reported once") {
    std::mt19937_64 rng(257);
    Dag dag = testnets::five_node_dag();
    const DiscreteBn bn = testnets::random_cpts(dag, rng);
    const std::map<int, int> outcome{{4, 1}};
    const double current = event_probability(bn, outcome, {});
    const auto r = sensquery(bn, outcome, {}, std::min(0.9, current + 0.1));
    std::set<std::pair<int, std::vector<int>>> seen;
    for (const auto& row : r.rows) {
      const auto key = std::make_pair(row.param.node, row.param.parent_config);
      REQUIRE_FALSE(seen.count(key));
      seen.insert(key);
    }
  }
  SECTION("rejects targets outside (0,1)") {
    const DiscreteBn bn = testnets::two_uniform_binary();
    REQUIRE_THROWS_AS(sensquery(bn, {{0, 0}}, {}, 0.0), ValidationError);
    REQUIRE_THROWS_AS(sensquery(bn, {{0, 0}}, {}, 1.0), ValidationError);
  }
}
