#include "vrp/simulator.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <string>

#include "parallel.hpp"
#include "vrp/equilibrium.hpp"
#include "vrp/mechanism.hpp"
#include "vrp/numerics.hpp"
#include "vrp/rng.hpp"

namespace vrp {

namespace {

constexpr std::uint64_t kBlockSize = 1024;

void validate(const GameConfig& c) {
  if (c.rounds < 1) {
    throw ArgumentError("rounds must be at least 1");
  }
  require_unit(c.initial_status_quo, "initial status quo");
  if (c.status_quo_range) {
    const auto [lo, hi] = *c.status_quo_range;
    require_unit(lo, "status quo range start");
    require_unit(hi, "status quo range end");
    if (lo > hi) throw ArgumentError("status quo range is empty");
  }
  if (c.replications < 1) {
    throw ArgumentError("replications must be positive");
  }
}

struct BlockTally {
  std::uint64_t successes = 0;
  double distance_sum = 0.0;
};

}  // namespace

Simulator::Simulator(GameConfig config) : config_(std::move(config)) {
  validate(config_);
  thresholds_ = solve_thresholds(config_.distribution);
}

double Simulator::round_winner(int t, double type, double proposal, double status_quo,
                               VoterMode voters) const {
  const bool final_round = t == config_.rounds;
  if (!final_round && voters == VoterMode::Sophisticated &&
      config_.proposer_mode == ProposerMode::Equilibrium &&
      in_own_type_regime(thresholds_, type, status_quo)) {
    // Voters anticipate that the final winner stays on the far side of
    // whichever alternative is nearer the median.
    return std::max(status_quo, proposal) < thresholds_.theta_lower
               ? std::max(status_quo, proposal)
               : std::min(status_quo, proposal);
  }
  return pairwise_vote(config_.distribution, proposal, status_quo).winner;
}

Trajectory Simulator::run_trajectory(std::uint64_t replication) const {
  return run_trajectory(replication, config_.voter_mode);
}

Trajectory Simulator::run_trajectory(std::uint64_t replication, VoterMode voters) const {
  const CounterStream stream(config_.seed, replication);
  const TypeDistribution& d = config_.distribution;
  const double mu = thresholds_.theta_mu;

  double q = config_.initial_status_quo;
  if (config_.status_quo_range) {
    const auto [lo, hi] = *config_.status_quo_range;
    q = lo + (hi - lo) * stream.uniform(0);
  }

  Trajectory tr;
  tr.rounds.reserve(static_cast<std::size_t>(config_.rounds));
  for (int t = 1; t <= config_.rounds; ++t) {
    const double type = d.quantile(stream.uniform(static_cast<std::uint64_t>(t)));
    double proposal = type;
    if (config_.proposer_mode == ProposerMode::Equilibrium) {
      proposal = t < config_.rounds ? optimal_proposal_intermediate(thresholds_, type, q).proposal
                                    : optimal_proposal_final(mu, type, q).proposal;
    }
    const double w = round_winner(t, type, proposal, q, voters);
    tr.rounds.push_back({t, type, proposal, q, w});
    q = w;
  }
  tr.final_winner = q;
  return tr;
}

SimulationReport Simulator::run_monte_carlo() const {
  const std::uint64_t n = config_.replications;
  const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<BlockTally> tallies(blocks);
  const double mu = thresholds_.theta_mu;

  detail::parallel_blocks(blocks, config_.threads, [&](std::size_t b) {
    BlockTally tally;
    const std::uint64_t begin = b * kBlockSize;
    const std::uint64_t end = std::min(n, begin + kBlockSize);
    for (std::uint64_t r = begin; r < end; ++r) {
      const double dist = std::fabs(run_trajectory(r).final_winner - mu);
      if (dist <= tol::win) ++tally.successes;
      tally.distance_sum += dist;
    }
    tallies[b] = tally;
  });

  SimulationReport rep;
  rep.config = config_;
  rep.replications = n;
  double distance_sum = 0.0;
  for (const BlockTally& t : tallies) {
    rep.successes += t.successes;
    distance_sum += t.distance_sum;
  }
  const double nd = static_cast<double>(n);
  rep.p_hat = static_cast<double>(rep.successes) / nd;
  rep.standard_error = std::sqrt(rep.p_hat * (1.0 - rep.p_hat) / nd);
  rep.mean_final_distance_to_median = distance_sum / nd;
  if (config_.rounds >= 2) {
    rep.closed_form = closed_form_probability(config_.distribution, thresholds_, config_.rounds);
    if (rep.standard_error > 0.0) {
      rep.z_score = (rep.p_hat - *rep.closed_form) / rep.standard_error;
    }
  }
  return rep;
}

bool Simulator::compare_voter_modes() const {
  const std::uint64_t n = config_.replications;
  const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<char> agree(blocks, 1);
  detail::parallel_blocks(blocks, config_.threads, [&](std::size_t b) {
    const std::uint64_t begin = b * kBlockSize;
    const std::uint64_t end = std::min(n, begin + kBlockSize);
    for (std::uint64_t r = begin; r < end; ++r) {
      const double a = run_trajectory(r, VoterMode::Sophisticated).final_winner;
      const double m = run_trajectory(r, VoterMode::Myopic).final_winner;
      if (std::fabs(a - m) > tol::win) {
        agree[b] = 0;
        return;
      }
    }
  });
  return std::all_of(agree.begin(), agree.end(), [](char c) { return c != 0; });
}

void Simulator::write_trajectories_csv(std::ostream& out, std::uint64_t count) const {
  out << "replication,t,proposer_type,proposal,status_quo,winner\n";
  char line[256];
  for (std::uint64_t r = 0; r < count; ++r) {
    for (const RoundRecord& rec : run_trajectory(r).rounds) {
      std::snprintf(line, sizeof line, "%" PRIu64 ",%d,%.17g,%.17g,%.17g,%.17g\n", r, rec.t,
                    rec.proposer_type, rec.proposal, rec.status_quo, rec.winner);
      out << line;
    }
  }
}

Trajectory run_trajectory(const GameConfig& config, std::uint64_t replication) {
  return Simulator(config).run_trajectory(replication);
}

SimulationReport run_monte_carlo(const GameConfig& config) {
  return Simulator(config).run_monte_carlo();
}

bool compare_voter_modes(const GameConfig& config) {
  if (config.proposer_mode != ProposerMode::Equilibrium) {
    throw ArgumentError("compare_voter_modes requires equilibrium proposers");
  }
  return Simulator(config).compare_voter_modes();
}

const char* to_string(VoterMode m) {
  return m == VoterMode::Sophisticated ? "sophisticated" : "myopic";
}

const char* to_string(ProposerMode m) {
  return m == ProposerMode::Equilibrium ? "equilibrium" : "naive";
}

}  // namespace vrp
