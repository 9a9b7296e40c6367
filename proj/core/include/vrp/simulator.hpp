// simulator.hpp
//
// Seeded Monte Carlo of the T-round game under equilibrium (or naive)
// proposals and sophisticated or myopic voting.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "vrp/distributions.hpp"
#include "vrp/thresholds.hpp"

namespace vrp {

enum class VoterMode { Sophisticated, Myopic };
enum class ProposerMode { Equilibrium, OwnPeakNaive };

struct GameConfig {
  TypeDistribution distribution = TypeDistribution::uniform();
  int rounds = 2;
  double initial_status_quo = 0.5;
  /// When set, each replication draws q1 uniformly from [first, second]
  /// instead of using initial_status_quo.
  std::optional<std::pair<double, double>> status_quo_range;
  VoterMode voter_mode = VoterMode::Sophisticated;
  ProposerMode proposer_mode = ProposerMode::Equilibrium;
  std::uint64_t seed = 0;
  std::uint64_t replications = 1;
  /// Worker threads; results do not depend on this.
  unsigned threads = 1;
};

struct RoundRecord {
  int t = 0;
  double proposer_type = 0.0;
  double proposal = 0.0;
  double status_quo = 0.0;
  double winner = 0.0;
};

struct Trajectory {
  std::vector<RoundRecord> rounds;
  double final_winner = 0.0;
};

struct SimulationReport {
  GameConfig config;
  std::uint64_t replications = 0;
  std::uint64_t successes = 0;
  double p_hat = 0.0;
  double standard_error = 0.0;
  /// Absent for T = 1.
  std::optional<double> closed_form;
  /// Absent when the closed form is absent or the standard error is zero.
  std::optional<double> z_score;
  double mean_final_distance_to_median = 0.0;
};

class Simulator {
 public:
  /// Validates the configuration and solves the thresholds once.
  explicit Simulator(GameConfig config);

  const GameConfig& config() const { return config_; }
  const EquilibriumThresholds& thresholds() const { return thresholds_; }

  /// Deterministic in (seed, replication).
  Trajectory run_trajectory(std::uint64_t replication) const;
  Trajectory run_trajectory(std::uint64_t replication, VoterMode voters) const;

  SimulationReport run_monte_carlo() const;

  /// Replays every replication under both voter modes; true iff all final
  /// winners agree within tol::win.
  bool compare_voter_modes() const;

  /// CSV `replication,t,proposer_type,proposal,status_quo,winner` for the
  /// first `count` replications, 17 significant digits.
  void write_trajectories_csv(std::ostream& out, std::uint64_t count) const;

 private:
  double round_winner(int t, double type, double proposal, double status_quo,
                      VoterMode voters) const;

  GameConfig config_;
  EquilibriumThresholds thresholds_;
};

Trajectory run_trajectory(const GameConfig& config, std::uint64_t replication);
SimulationReport run_monte_carlo(const GameConfig& config);
bool compare_voter_modes(const GameConfig& config);

const char* to_string(VoterMode m);
const char* to_string(ProposerMode m);

}  // namespace vrp
