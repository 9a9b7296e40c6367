#include "vrp/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vrp/mechanism.hpp"
#include "vrp/numerics.hpp"

namespace vrp {

namespace {

double integrated_utility(const TypeDistribution& d, double theta, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const double m0 = d.partial_moment(0, lo, hi);
  const double m1 = d.partial_moment(1, lo, hi);
  const double m2 = d.partial_moment(2, lo, hi);
  return -(m2 - 2.0 * theta * m1 + theta * theta * m0);
}

constexpr double kCandidateTie = 1e-12;

}  // namespace

bool in_own_type_regime(const EquilibriumThresholds& th, double proposer_type,
                        double status_quo) {
  return std::max(status_quo, proposer_type) < th.theta_lower ||
         std::min(status_quo, proposer_type) > th.theta_upper;
}

ProposalDecision optimal_proposal_intermediate(const EquilibriumThresholds& th,
                                               double proposer_type, double status_quo) {
  require_unit(proposer_type, "proposer type");
  require_unit(status_quo, "status quo");
  if (in_own_type_regime(th, proposer_type, status_quo)) {
    return {RoundKind::Intermediate, proposer_type, ProposalRationale::OwnType};
  }
  return {RoundKind::Intermediate, th.theta_mu, ProposalRationale::CondorcetWinner};
}

ProposalDecision optimal_proposal_final(double theta_mu, double proposer_type,
                                        double status_quo) {
  require_unit(proposer_type, "proposer type");
  const double c = reflect(theta_mu, status_quo);
  const double p = status_quo <= theta_mu ? std::min(proposer_type, c)
                                          : std::max(proposer_type, c);
  const auto why = p == proposer_type ? ProposalRationale::OwnType
                                      : ProposalRationale::ClampedToReflection;
  return {RoundKind::Final, p, why};
}

double final_round_winner(double theta_mu, double proposer_type, double status_quo) {
  require_unit(proposer_type, "proposer type");
  const double c = reflect(theta_mu, status_quo);
  const double a = std::min(status_quo, c);
  const double b = std::max(status_quo, c);
  if (proposer_type < a) return a;
  if (proposer_type > b) return b;
  return proposer_type;
}

double expected_utility_of_winner(const TypeDistribution& d, double proposer_type, double w) {
  require_unit(proposer_type, "proposer type");
  const double mu = d.median();
  const double c = reflect(mu, w);
  // Final winners: the lower end of [lo, hi] if the next type falls below it,
  // the next type itself inside, the upper end above.
  const double lo = std::min(w, c);
  const double hi = std::max(w, c);
  const double u_lo = utility(proposer_type, lo);
  const double u_hi = utility(proposer_type, hi);
  if (lo == hi) {
    return u_lo;
  }
  // Split the middle integral at θμ so each piece has a smooth integrand.
  double middle = 0.0;
  if (mu > lo && mu < hi) {
    middle = integrated_utility(d, proposer_type, lo, mu) +
             integrated_utility(d, proposer_type, mu, hi);
  } else {
    middle = integrated_utility(d, proposer_type, lo, hi);
  }
  return u_lo * d.cdf(lo) + middle + u_hi * (1.0 - d.cdf(hi));
}

double optimal_intermediate_winner(const TypeDistribution& d, const EquilibriumThresholds& th,
                                   double proposer_type) {
  require_unit(proposer_type, "proposer type");
  const double mu = th.theta_mu;
  double best = mu;
  double best_eu = expected_utility_of_winner(d, proposer_type, mu);
  const auto consider = [&](double w) {
    const double eu = expected_utility_of_winner(d, proposer_type, w);
    if (eu > best_eu + kCandidateTie) {
      best = w;
      best_eu = eu;
    }
  };
  if (2.0 * mu - 1.0 >= 0.0) {
    consider(std::min(2.0 * mu - 1.0, proposer_type));
  }
  if (2.0 * mu <= 1.0) {
    consider(std::max(2.0 * mu, proposer_type));
  }
  return best;
}

double closed_form_probability(const TypeDistribution& d, const EquilibriumThresholds& th,
                               int rounds) {
  if (rounds < 2) {
    throw ArgumentError("closed_form_probability requires T >= 2, got " + std::to_string(rounds));
  }
  const double fail = th.theta_mu >= 0.5 ? d.cdf(th.theta_lower) : 1.0 - d.cdf(th.theta_upper);
  return 1.0 - std::pow(fail, rounds - 1);
}

const char* to_string(ProposalRationale r) {
  switch (r) {
    case ProposalRationale::OwnType:
      return "OwnType";
    case ProposalRationale::CondorcetWinner:
      return "CondorcetWinner";
    case ProposalRationale::ClampedToReflection:
      return "ClampedToReflection";
  }
  return "?";
}

}  // namespace vrp
