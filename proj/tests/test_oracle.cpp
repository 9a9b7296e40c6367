#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <sstream>

#include "vrp/equilibrium.hpp"
#include "vrp/mechanism.hpp"
#include "vrp/numerics.hpp"
#include "vrp/oracle.hpp"

using namespace vrp;

namespace {

std::size_t type_node(const DiscreteGame& g, double theta) {
  return static_cast<std::size_t>(
      std::lround(theta * static_cast<double>(g.type_count() - 1)));
}

std::vector<TypeDistribution> test_laws() {
  return {TypeDistribution::uniform(), TypeDistribution::beta(4, 2),
          TypeDistribution::beta(20, 2), TypeDistribution::beta(0.3, 0.2)};
}

}  // namespace

TEST(DiscreteGame, UniformSmall) {
  const DiscreteGame g = build_discrete_game(TypeDistribution::uniform(), 11, 11, 2);
  ASSERT_EQ(g.grid.size(), 11u);
  for (std::size_t i = 0; i < 11; ++i) EXPECT_NEAR(g.grid[i], 0.1 * i, 1e-15);
  for (std::size_t i = 0; i < 11; ++i) {
    EXPECT_NEAR(g.panel[i], (2.0 * i + 1) / 22.0, 1e-9);
  }
  EXPECT_EQ(g.snapped_theta_mu, 0.5);
  double mass = 0.0;
  for (double w : g.type_weights) mass += w;
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(DiscreteGame, SnappedMedianBeta20) {
  const DiscreteGame g = build_discrete_game(TypeDistribution::beta(20, 2), 201, 1001, 3);
  EXPECT_NEAR(g.snapped_theta_mu, 0.92, 1e-15);
  EXPECT_EQ(g.panel[500], g.snapped_theta_mu);
  EXPECT_TRUE(std::is_sorted(g.panel.begin(), g.panel.end()));
}

TEST(DiscreteGame, MinimalAndInvalid) {
  const DiscreteGame g = build_discrete_game(TypeDistribution::beta(4, 2), 3, 1, 1);
  EXPECT_EQ(g.grid_size(), 3u);
  const ValueTable table = backward_induction(g);
  EXPECT_EQ(table.rounds(), 1);
  EXPECT_THROW(build_discrete_game(TypeDistribution::uniform(), 2, 1, 1), ArgumentError);
  EXPECT_THROW(build_discrete_game(TypeDistribution::uniform(), 11, 10, 1), ArgumentError);
  EXPECT_THROW(build_discrete_game(TypeDistribution::uniform(), 11, 11, 0), ArgumentError);
  EXPECT_THROW(build_discrete_game(TypeDistribution::uniform(), 11, 11, 1, 1), ArgumentError);
}

TEST(BackwardInduction, UniformFinalRoundExample) {
  const DiscreteGame g = build_discrete_game(TypeDistribution::uniform(), 11, 11, 1, 11);
  const ValueTable table = backward_induction(g);
  const std::size_t k = type_node(g, 0.9);
  const std::size_t q = g.snap(0.3);
  EXPECT_NEAR(g.grid[table.proposal(1, q, k)], 0.7, 1e-12);
  EXPECT_NEAR(g.grid[table.winner(1, q, k)], 0.7, 1e-12);
}

TEST(BackwardInduction, UniformIntermediateAlwaysMedian) {
  const DiscreteGame g = build_discrete_game(TypeDistribution::uniform(), 11, 11, 2, 21);
  const ValueTable table = backward_induction(g);
  for (std::size_t q = 0; q < g.grid_size(); ++q) {
    for (std::size_t k = 0; k < g.type_count(); ++k) {
      EXPECT_NEAR(g.grid[table.winner(1, q, k)], 0.5, 1e-12) << q << "," << k;
    }
  }
}

TEST(BackwardInduction, FinalRoundMatchesClosedForm) {
  for (const auto& d : test_laws()) {
    const DiscreteGame g = build_discrete_game(d, 101, 501, 2, 101);
    const ValueTable table = backward_induction(g, 4);
    for (std::size_t q = 0; q < g.grid_size(); ++q) {
      for (std::size_t k = 0; k < g.type_count(); ++k) {
        const double expected = final_round_winner(g.snapped_theta_mu, g.type_grid[k], g.grid[q]);
        ASSERT_EQ(table.winner(2, q, k), g.snap(expected))
            << d.describe() << " q=" << g.grid[q] << " type=" << g.type_grid[k];
      }
    }
  }
}

TEST(BackwardInduction, Beta20SpecExample) {
  const auto d = TypeDistribution::beta(20, 2);
  const DiscreteGame g = build_discrete_game(d, 201, 1001, 2);
  const ValueTable table = backward_induction(g, 4);
  EXPECT_NEAR(g.grid[table.winner(1, g.snap(0.5), type_node(g, 0.3))], 0.5, g.cell() + 1e-12);
}

TEST(BackwardInduction, ThreadCountDoesNotMatter) {
  const DiscreteGame g = build_discrete_game(TypeDistribution::beta(0.3, 0.2), 51, 101, 3, 51);
  const ValueTable a = backward_induction(g, 1);
  const ValueTable b = backward_induction(g, 8);
  for (int t = 1; t <= 3; ++t) {
    EXPECT_EQ(a.round(t).winner, b.round(t).winner);
    EXPECT_EQ(a.round(t).value, b.round(t).value);
  }
}

TEST(Oracle, AnalyticWinner) {
  const auto th = solve_thresholds(TypeDistribution::beta(20, 2));
  EXPECT_EQ(analytic_intermediate_winner(th, 0.3, 0.5), 0.5);
  EXPECT_EQ(analytic_intermediate_winner(th, 0.6, 0.5), 0.6);
  EXPECT_EQ(analytic_intermediate_winner(th, 0.3, 0.8), th.theta_mu);
}

TEST(Oracle, UniformPasses) {
  const auto d = TypeDistribution::uniform();
  const auto th = solve_thresholds(d);
  const DiscreteGame g = build_discrete_game(d, 51, 101, 2);
  const TheoremReport rep = verify_theorem(g, backward_induction(g), th);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.checked + rep.excluded, 51u * g.type_count());
  const DiscreteGame g21 = build_discrete_game(d, 21, 101, 2);
  EXPECT_TRUE(verify_strategy_proofness(g21, th).passed());
}

// The remaining oracle properties are stated for every test law.

class OracleLaw : public ::testing::TestWithParam<int> {};

TEST_P(OracleLaw, TheoremAgreement) {
  const auto d = test_laws()[static_cast<std::size_t>(GetParam())];
  const auto th = solve_thresholds(d);
  for (int rounds : {2, 3}) {
    const DiscreteGame g = build_discrete_game(d, 201, 1001, rounds);
    const TheoremReport rep = verify_theorem(g, backward_induction(g, 4), th);
    EXPECT_TRUE(rep.passed()) << d.describe() << " T=" << rounds << ": "
                              << rep.violations.size() << " violations";
  }
}

TEST_P(OracleLaw, StrategyProof) {
  const auto d = test_laws()[static_cast<std::size_t>(GetParam())];
  const auto th = solve_thresholds(d);
  for (int rounds : {2, 3}) {
    const DiscreteGame g = build_discrete_game(d, 201, 1001, rounds);
    const StrategyProofnessReport rep = verify_strategy_proofness(g, th, 4);
    EXPECT_GT(rep.proposer_checks, 0u);
    EXPECT_GT(rep.voter_checks, 0u);
    EXPECT_TRUE(rep.passed()) << d.describe() << " T=" << rounds << ": max gain "
                              << rep.max_gain;
  }
}

TEST_P(OracleLaw, WinnerNearCaseCandidates) {
  const auto d = test_laws()[static_cast<std::size_t>(GetParam())];
  const DiscreteGame g = build_discrete_game(d, 201, 1001, 2);
  const ValueTable table = backward_induction(g, 4);
  const double mu = g.snapped_theta_mu;
  const double cell = g.cell() + 1e-12;
  std::size_t misses = 0;
  for (std::size_t q = 0; q < g.grid_size(); ++q) {
    for (std::size_t k = 0; k < g.type_count(); ++k) {
      const double s = g.type_grid[k];
      const double w = g.grid[table.winner(1, q, k)];
      bool near = std::fabs(w - mu) <= cell;
      if (2 * mu - 1 >= 0) near = near || std::fabs(w - std::min(2 * mu - 1, s)) <= cell;
      if (2 * mu <= 1) near = near || std::fabs(w - std::max(2 * mu, s)) <= cell;
      // Keeping the status quo is always reachable.
      near = near || std::fabs(w - g.grid[q]) <= cell;
      if (!near) ++misses;
    }
  }
  EXPECT_EQ(misses, 0u) << d.describe();
}

TEST_P(OracleLaw, InBoundWinnersBeatMedian) {
  const auto d = test_laws()[static_cast<std::size_t>(GetParam())];
  const auto th = solve_thresholds(d);
  const DiscreteGame g = build_discrete_game(d, 201, 1001, 2);
  const ValueTable table = backward_induction(g, 4);
  const double band = 2.0 * g.cell();
  for (std::size_t k = 0; k < g.type_count(); ++k) {
    const double s = g.type_grid[k];
    if (s >= th.theta_lower - band) break;
    const double median_value = table.continuation_value(g, 1, g.median_index, s);
    for (std::size_t w = g.snap(s); w < g.grid_size() && g.grid[w] <= th.theta_lower; ++w) {
      EXPECT_GE(table.continuation_value(g, 1, w, s), median_value - 1e-9)
          << d.describe() << " type=" << s << " w=" << g.grid[w];
    }
  }
}

TEST_P(OracleLaw, RefinementDoesNotAddViolations) {
  const auto d = test_laws()[static_cast<std::size_t>(GetParam())];
  const auto th = solve_thresholds(d);
  std::size_t previous = 0;
  for (std::size_t n : {51u, 101u, 201u}) {
    const DiscreteGame g = build_discrete_game(d, n, 1001, 2);
    const std::size_t count = verify_theorem(g, backward_induction(g, 4), th).violations.size();
    if (n > 51) EXPECT_LE(count, previous) << d.describe() << " N=" << n;
    previous = count;
  }
}

std::string law_name(const ::testing::TestParamInfo<int>& info) {
  static const char* const names[] = {"Uniform", "Beta4_2", "Beta20_2", "Beta03_02"};
  return names[info.param];
}

INSTANTIATE_TEST_SUITE_P(Laws, OracleLaw, ::testing::Values(0, 1, 2, 3), law_name);

TEST(OwnTypeGap, SignScan) {
  for (const auto& d : test_laws()) {
    EXPECT_TRUE(verify_lemma1_sign(d, solve_thresholds(d), 401)) << d.describe();
  }
  EXPECT_THROW(verify_lemma1_sign(TypeDistribution::uniform(),
                                  solve_thresholds(TypeDistribution::uniform()), 5),
               ArgumentError);
}

TEST(Oracle, ViolationLines) {
  TheoremReport rep;
  rep.violations.push_back({1, 3, 4, 0.5, 0.25, 0.25});
  rep.violations.push_back({2, 10, 0, 0.1, 0.2, 0.1});
  std::ostringstream out;
  write_violations(out, rep);
  EXPECT_EQ(out.str(),
            "round,type_index,q_index,analytic,oracle,gap\n"
            "1,3,4,0.5,0.25,0.25\n"
            "2,10,0,0.10000000000000001,0.20000000000000001,0.10000000000000001\n");
}
