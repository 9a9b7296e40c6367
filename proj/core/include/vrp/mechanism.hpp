// mechanism.hpp
//
// One round of the procedure: quadratic single-peaked utility, the median
// reflection map, and a majority vote between a proposal and the status quo,
// either over the continuum of voters or over a finite panel.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vrp/distributions.hpp"

namespace vrp {

struct VoteOutcome {
  double winner = 0.0;
  /// Mass (or panel fraction) of voters weakly preferring the proposal.
  double proposal_share = 0.0;
  /// The proposal won only through the tie rule.
  bool tie_broken = false;
};

/// -(x - theta)^2.
double utility(double theta, double x);

/// clamp(2 theta_mu - x, 0, 1): the farthest alternative the median voter
/// likes at least as much as x.
double reflect(double theta_mu, double x);

/// Majority vote of the continuum of voters distributed as `d`. Voters at or
/// beyond the midpoint on the proposal's side support it; a share of exactly
/// one half (within tol::cdf) is resolved for the proposal.
VoteOutcome pairwise_vote(const TypeDistribution& d, double proposal, double status_quo);

/// A voter at `peak` is at least as close to the proposal as to the status
/// quo (distances within tol::dist count as equal).
bool weakly_prefers(double peak, double proposal, double status_quo);

/// Majority vote of a finite panel of peaks. Equidistant voters and an even
/// split both count for the proposal. Throws ArgumentError on an empty panel.
VoteOutcome panel_vote(std::span<const double> panel, double proposal, double status_quo);

/// Peaks F^{-1}((i - 1/2)/M), i = 1..M, in increasing order.
std::vector<double> quantile_panel(const TypeDistribution& d, std::size_t size);

}  // namespace vrp
