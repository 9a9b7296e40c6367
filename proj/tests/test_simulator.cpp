#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "vrp/equilibrium.hpp"
#include "vrp/numerics.hpp"
#include "vrp/rng.hpp"
#include "vrp/simulator.hpp"

using namespace vrp;

namespace {

GameConfig make(TypeDistribution d, int rounds, double q1, std::uint64_t reps,
                std::uint64_t seed = 1) {
  GameConfig c;
  c.distribution = std::move(d);
  c.rounds = rounds;
  c.initial_status_quo = q1;
  c.replications = reps;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Rng, CounterStreamIsPure) {
  const CounterStream a(42, 7);
  const CounterStream b(42, 7);
  const CounterStream c(42, 8);
  EXPECT_EQ(a.bits(3), b.bits(3));
  EXPECT_NE(a.bits(3), c.bits(3));
  EXPECT_NE(a.bits(3), a.bits(4));
  double sum = 0.0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = a.uniform(i);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Simulator, UniformHighStatusQuoGoesToMedian) {
  const Simulator sim(make(TypeDistribution::uniform(), 2, 0.9, 100));
  for (std::uint64_t r = 0; r < 100; ++r) {
    const Trajectory tr = sim.run_trajectory(r);
    EXPECT_EQ(tr.rounds[0].proposal, 0.5);
    EXPECT_EQ(tr.rounds[0].winner, 0.5);
    EXPECT_EQ(tr.final_winner, 0.5);
  }
}

TEST(Simulator, Beta20OwnTypeRegime) {
  // Proposer types in (0.5, θ̲) propose themselves and win against q1 = 0.5.
  const Simulator sim(make(TypeDistribution::beta(20, 2), 2, 0.5, 1, 5));
  const double lo = sim.thresholds().theta_lower;
  int seen = 0;
  for (std::uint64_t r = 0; r < 200000 && seen < 5; ++r) {
    const Trajectory tr = sim.run_trajectory(r);
    const RoundRecord& first = tr.rounds[0];
    if (first.proposer_type > 0.5 && first.proposer_type < lo) {
      EXPECT_EQ(first.proposal, first.proposer_type);
      EXPECT_EQ(first.winner, first.proposer_type);
      ++seen;
    }
  }
  EXPECT_GT(seen, 0);
}

TEST(Simulator, SingleRoundIsFinalRound) {
  for (const auto& d : {TypeDistribution::uniform(), TypeDistribution::beta(20, 2)}) {
    const Simulator sim(make(d, 1, 0.3, 1));
    for (std::uint64_t r = 0; r < 500; ++r) {
      const Trajectory tr = sim.run_trajectory(r);
      ASSERT_EQ(tr.rounds.size(), 1u);
      EXPECT_NEAR(tr.final_winner,
                  final_round_winner(sim.thresholds().theta_mu, tr.rounds[0].proposer_type, 0.3),
                  1e-12);
    }
    const SimulationReport rep = sim.run_monte_carlo();
    EXPECT_FALSE(rep.closed_form.has_value());
    EXPECT_FALSE(rep.z_score.has_value());
  }
}

TEST(Simulator, ChainInvariantsAndAbsorption) {
  for (const auto& d : {TypeDistribution::beta(20, 2), TypeDistribution::beta(0.3, 0.2),
                        TypeDistribution::beta(4, 2)}) {
    for (VoterMode vm : {VoterMode::Sophisticated, VoterMode::Myopic}) {
      GameConfig c = make(d, 4, 0.0, 1, 9);
      c.status_quo_range = std::make_pair(0.0, 1.0);
      c.voter_mode = vm;
      const Simulator sim(c);
      const double mu = sim.thresholds().theta_mu;
      for (std::uint64_t r = 0; r < 2000; ++r) {
        const Trajectory tr = sim.run_trajectory(r);
        ASSERT_EQ(tr.rounds.size(), 4u);
        bool absorbed = false;
        for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
          const RoundRecord& rec = tr.rounds[i];
          EXPECT_EQ(rec.t, static_cast<int>(i) + 1);
          EXPECT_TRUE(rec.winner == rec.proposal || rec.winner == rec.status_quo);
          if (i + 1 < tr.rounds.size()) EXPECT_EQ(tr.rounds[i + 1].status_quo, rec.winner);
          if (absorbed) EXPECT_NEAR(rec.winner, mu, tol::win);
          if (std::fabs(rec.winner - mu) <= tol::win) absorbed = true;
        }
        EXPECT_EQ(tr.final_winner, tr.rounds.back().winner);
      }
    }
  }
}

TEST(Simulator, FailureIffAllEarlyDrawsExtreme) {
  struct Case {
    TypeDistribution d;
    double q1;
  };
  const std::vector<Case> cases = {{TypeDistribution::beta(20, 2), 0.5},
                                   {TypeDistribution::beta(0.3, 0.2), 0.1},
                                   {TypeDistribution::beta(0.3, 0.2).mirrored(), 0.9}};
  for (const Case& cs : cases) {
    for (int rounds : {2, 3}) {
      const Simulator sim(make(cs.d, rounds, cs.q1, 1, 4));
      const auto& th = sim.thresholds();
      for (std::uint64_t r = 0; r < 5000; ++r) {
        const Trajectory tr = sim.run_trajectory(r);
        bool all_extreme = true;
        for (int t = 0; t + 1 < rounds; ++t) {
          const double s = tr.rounds[static_cast<std::size_t>(t)].proposer_type;
          all_extreme = all_extreme &&
                        (th.theta_mu >= 0.5 ? s < th.theta_lower : s > th.theta_upper);
        }
        const bool failed = std::fabs(tr.final_winner - th.theta_mu) > tol::win;
        EXPECT_EQ(failed, all_extreme) << cs.d.describe() << " r=" << r;
      }
    }
  }
}

TEST(Simulator, MonteCarloUniformExact) {
  const SimulationReport rep = run_monte_carlo(make(TypeDistribution::uniform(), 2, 0.2, 10000));
  EXPECT_EQ(rep.p_hat, 1.0);
  EXPECT_EQ(rep.standard_error, 0.0);
  EXPECT_FALSE(rep.z_score.has_value());
  EXPECT_EQ(rep.successes, 10000u);
}

TEST(Simulator, MonteCarloBeta20) {
  GameConfig c = make(TypeDistribution::beta(20, 2), 2, 0.5, 100000, 7);
  c.threads = 4;
  const SimulationReport rep = run_monte_carlo(c);
  ASSERT_TRUE(rep.closed_form.has_value());
  EXPECT_NEAR(*rep.closed_form, 0.967892, 2e-4);
  EXPECT_LE(std::fabs(rep.p_hat - *rep.closed_form), 3 * rep.standard_error);
  EXPECT_DOUBLE_EQ(rep.standard_error,
                   std::sqrt(rep.p_hat * (1 - rep.p_hat) / static_cast<double>(rep.replications)));
  c.rounds = 5;
  EXPECT_GE(run_monte_carlo(c).p_hat, 0.9999);
}

TEST(Simulator, DeterministicAcrossThreadCounts) {
  GameConfig c = make(TypeDistribution::beta(0.3, 0.2), 3, 0.1, 20000, 99);
  c.threads = 1;
  const SimulationReport a = run_monte_carlo(c);
  c.threads = 8;
  const SimulationReport b = run_monte_carlo(c);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.p_hat, b.p_hat);
  EXPECT_EQ(a.standard_error, b.standard_error);
  EXPECT_EQ(a.mean_final_distance_to_median, b.mean_final_distance_to_median);
  EXPECT_EQ(a.z_score, b.z_score);
}

TEST(Simulator, VoterModesAgree) {
  GameConfig c = make(TypeDistribution::uniform(), 3, 0.4, 1000);
  EXPECT_TRUE(compare_voter_modes(c));
  c = make(TypeDistribution::beta(20, 2), 3, 0.5, 10000);
  EXPECT_TRUE(compare_voter_modes(c));
  c = make(TypeDistribution::beta(0.3, 0.2), 4, 0.1, 10000);
  EXPECT_TRUE(compare_voter_modes(c));
  c.proposer_mode = ProposerMode::OwnPeakNaive;
  EXPECT_THROW(compare_voter_modes(c), ArgumentError);
}

TEST(Simulator, NaiveProposersUseOwnPeakAndMyopicVotes) {
  GameConfig c = make(TypeDistribution::beta(20, 2), 3, 0.5, 1, 2);
  c.proposer_mode = ProposerMode::OwnPeakNaive;
  const Simulator sim(c);
  for (std::uint64_t r = 0; r < 300; ++r) {
    for (const RoundRecord& rec : sim.run_trajectory(r).rounds) {
      EXPECT_EQ(rec.proposal, rec.proposer_type);
    }
    EXPECT_EQ(sim.run_trajectory(r, VoterMode::Sophisticated).final_winner,
              sim.run_trajectory(r, VoterMode::Myopic).final_winner);
  }
}

TEST(Simulator, InvalidConfigs) {
  EXPECT_THROW(Simulator(make(TypeDistribution::uniform(), 0, 0.5, 1)), ArgumentError);
  EXPECT_THROW(Simulator(make(TypeDistribution::uniform(), 2, 1.5, 1)), DomainError);
  EXPECT_THROW(Simulator(make(TypeDistribution::uniform(), 2, 0.5, 0)), ArgumentError);
  GameConfig c = make(TypeDistribution::uniform(), 2, 0.5, 1);
  c.status_quo_range = std::make_pair(0.7, 0.2);
  EXPECT_THROW(Simulator{c}, ArgumentError);
}

TEST(Simulator, TrajectoryDump) {
  const Simulator sim(make(TypeDistribution::beta(4, 2), 3, 0.2, 10, 3));
  std::ostringstream out;
  sim.write_trajectories_csv(out, 2);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "replication,t,proposer_type,proposal,status_quo,winner");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
  }
  EXPECT_EQ(rows, 6);
  const Trajectory tr = sim.run_trajectory(1);
  std::istringstream again(out.str());
  for (int i = 0; i < 5; ++i) std::getline(again, line);
  // Row for replication 1, round 1: values round-trip exactly.
  double vals[4];
  int rep = 0;
  int t = 0;
  ASSERT_EQ(std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf", &rep, &t, &vals[0], &vals[1],
                        &vals[2], &vals[3]),
            6);
  EXPECT_EQ(rep, 1);
  EXPECT_EQ(t, 1);
  EXPECT_EQ(vals[0], tr.rounds[0].proposer_type);
  EXPECT_EQ(vals[3], tr.rounds[0].winner);
}
