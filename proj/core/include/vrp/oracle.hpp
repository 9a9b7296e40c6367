// oracle.hpp
//
// Brute-force check of the closed-form equilibrium. The continuum game is
// replaced by N equally spaced alternatives, an odd panel of M quantile-placed
// voters and a K-node grid of proposer types; backward induction then solves
// the finite game exactly.
//
// Utilities are quadratic, so an agent's continuation utility from a status
// quo depends only on the first two moments of the final-outcome lottery it
// induces. The tables store those moments per status quo and round.

#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "vrp/distributions.hpp"
#include "vrp/thresholds.hpp"

namespace vrp {

struct DiscreteGame {
  std::vector<double> grid;  // {0, 1/(N-1), ..., 1}
  TypeDistribution distribution = TypeDistribution::uniform();
  int rounds = 1;
  std::vector<double> panel;  // sorted voter peaks
  double theta_mu = 0.5;
  std::size_t median_index = 0;  // grid point nearest θμ
  double snapped_theta_mu = 0.5;
  std::vector<double> type_grid;     // K proposer-type nodes on [0, 1]
  std::vector<double> type_weights;  // probability mass of each node's cell

  std::size_t grid_size() const { return grid.size(); }
  std::size_t type_count() const { return type_grid.size(); }
  double cell() const { return 1.0 / static_cast<double>(grid.size() - 1); }
  /// Nearest grid index (halves round up).
  std::size_t snap(double x) const;
};

inline constexpr std::size_t kDefaultTypeNodes = 401;

/// Throws ArgumentError unless N ≥ 3, M ≥ 1 odd, T ≥ 1 and K ≥ 2.
DiscreteGame build_discrete_game(const TypeDistribution& d, std::size_t grid_points,
                                 std::size_t panel_size, int rounds,
                                 std::size_t type_nodes = kDefaultTypeNodes);

/// Play in one round, for every status quo index q and type node k.
struct RoundPolicy {
  std::vector<std::uint32_t> proposal;  // [q * K + k]
  std::vector<std::uint32_t> winner;    // [q * K + k]
  std::vector<double> value;            // proposer's continuation utility, [q * K + k]
  std::vector<std::uint8_t> accepts;    // proposal p beats status quo q, [p * N + q]
  std::vector<double> outcome_mean;     // final-outcome moments given q entering the round
  std::vector<double> outcome_second;
};

class ValueTable {
 public:
  ValueTable(std::size_t grid_size, std::size_t type_count, int rounds);

  int rounds() const { return static_cast<int>(policy_.size()); }
  std::size_t grid_size() const { return grid_size_; }
  std::size_t type_count() const { return type_count_; }

  RoundPolicy& round(int t) { return policy_.at(static_cast<std::size_t>(t - 1)); }
  const RoundPolicy& round(int t) const { return policy_.at(static_cast<std::size_t>(t - 1)); }

  std::size_t winner(int t, std::size_t q, std::size_t k) const {
    return round(t).winner[q * type_count_ + k];
  }
  std::size_t proposal(int t, std::size_t q, std::size_t k) const {
    return round(t).proposal[q * type_count_ + k];
  }
  double value(int t, std::size_t q, std::size_t k) const {
    return round(t).value[q * type_count_ + k];
  }

  /// Continuation utility of an agent with peak `theta` when grid[w] wins
  /// round t.
  double continuation_value(const DiscreteGame& g, int t, std::size_t w, double theta) const;

 private:
  std::size_t grid_size_;
  std::size_t type_count_;
  std::vector<RoundPolicy> policy_;
};

/// Exact backward induction. Round T: truthful panel vote, proposer picks
/// the best grid proposal. Rounds t < T: panel voters compare continuation
/// values of the two possible winners (ties to the proposal); proposers
/// maximize continuation value, ties broken toward the outcome nearest their
/// peak, then the proposal nearest their peak, then the lower index.
ValueTable backward_induction(const DiscreteGame& g, unsigned threads = 1);

struct TheoremViolation {
  int round = 0;
  std::size_t type_index = 0;
  std::size_t q_index = 0;
  double analytic = 0.0;
  double oracle = 0.0;
  double gap = 0.0;
};

struct TheoremReport {
  std::size_t checked = 0;
  std::size_t excluded = 0;  // inside the indifference band
  std::vector<TheoremViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Closed-form round winner for t < T: own-type regime → the alternative
/// nearer the median side (max below θ̲, min above θ̄), else θμ.
double analytic_intermediate_winner(const EquilibriumThresholds& th, double proposer_type,
                                    double status_quo);

/// Compares the oracle's round-t winners (t < T) with the closed form for
/// every (type node, status quo) pair; a violation is a gap above one grid
/// cell for a type more than two cells away from θ̲ and θ̄.
TheoremReport verify_theorem(const DiscreteGame& g, const ValueTable& table,
                             const EquilibriumThresholds& th);

struct DeviationViolation {
  int round = 0;
  bool voter = false;
  std::size_t agent_index = 0;  // type node (proposer) or panel index (voter)
  std::size_t q_index = 0;
  std::size_t equilibrium_choice = 0;  // proposal index; for voters the ballot's proposal
  std::size_t deviation_choice = 0;    // proposal index; for voters the winner after the flip
  double gain = 0.0;
};

struct StrategyProofnessReport {
  std::size_t proposer_checks = 0;
  std::size_t voter_checks = 0;
  double max_gain = 0.0;
  std::vector<DeviationViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Evaluates the closed-form strategy profile on the grid (proposals from
/// optimal_proposal_intermediate snapped to the grid, best final-round
/// proposals, truthful voting) and searches for one-shot deviations: any grid
/// proposal for every proposer, and a vote flip for every pivotal voter on
/// every equilibrium ballot. Gains above tol::dev are violations.
StrategyProofnessReport verify_strategy_proofness(const DiscreteGame& g,
                                                  const EquilibriumThresholds& th,
                                                  unsigned threads = 1);

/// Sign pattern of EU_s(θs) - u(θs, θμ) on K points: ≥ -1e-9 below θ̲ and
/// above θ̄, ≤ 1e-9 on [θ̲, θ̄].
bool verify_lemma1_sign(const TypeDistribution& d, const EquilibriumThresholds& th,
                        std::size_t points);

/// `round,type_index,q_index,analytic,oracle,gap` lines (17 significant digits).
void write_violations(std::ostream& out, const TheoremReport& report);

}  // namespace vrp
