// equilibrium.hpp
//
// Closed-form equilibrium play: proposals in intermediate and final rounds,
// the final-round winner map, the proposer's expected utility from a given
// intermediate winner, and the probability that the median is implemented.

#pragma once

#include "vrp/distributions.hpp"
#include "vrp/thresholds.hpp"

namespace vrp {

enum class RoundKind { Intermediate, Final };
enum class ProposalRationale { OwnType, CondorcetWinner, ClampedToReflection };

struct ProposalDecision {
  RoundKind round_kind = RoundKind::Intermediate;
  double proposal = 0.0;
  ProposalRationale rationale = ProposalRationale::CondorcetWinner;
};

/// True when a proposer of `proposer_type` facing `status_quo` in a round
/// t < T proposes its own peak: both lie strictly below θ̲ or strictly
/// above θ̄.
bool in_own_type_regime(const EquilibriumThresholds& th, double proposer_type,
                        double status_quo);

/// Rounds 1..T-1: own peak in the own-type regime, otherwise the median.
ProposalDecision optimal_proposal_intermediate(const EquilibriumThresholds& th,
                                               double proposer_type, double status_quo);

/// Round T: min(type, c(q)) if q ≤ θμ, max(type, c(q)) otherwise.
ProposalDecision optimal_proposal_final(double theta_mu, double proposer_type,
                                        double status_quo);

/// Proposer type clamped into [min(q, c(q)), max(q, c(q))].
double final_round_winner(double theta_mu, double proposer_type, double status_quo);

/// Expected utility of a type-θs proposer when w wins round T-1 and round T
/// is played in equilibrium:
///   w ≤ θμ:  u(w) F(w) + ∫_w^{c(w)} u f + u(c(w)) (1 - F(c(w)))
///   w > θμ:  u(c(w)) F(c(w)) + ∫_{c(w)}^w u f + u(w) (1 - F(w))
double expected_utility_of_winner(const TypeDistribution& d, double proposer_type, double w);

/// Argmax of expected_utility_of_winner over the candidates
/// {min(2θμ - 1, θs), θμ, max(2θμ, θs)} (infeasible candidates dropped);
/// near-ties (1e-12) go to θμ.
double optimal_intermediate_winner(const TypeDistribution& d, const EquilibriumThresholds& th,
                                   double proposer_type);

/// 1 - F(θ̲)^{T-1} if θμ ≥ 1/2, else 1 - (1 - F(θ̄))^{T-1}. Requires T ≥ 2.
double closed_form_probability(const TypeDistribution& d, const EquilibriumThresholds& th,
                               int rounds);

const char* to_string(ProposalRationale r);

}  // namespace vrp
