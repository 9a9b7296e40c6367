#include "vrp/mechanism.hpp"

#include <algorithm>
#include <cmath>

#include "vrp/numerics.hpp"

namespace vrp {

double utility(double theta, double x) {
  require_unit(theta, "utility: type");
  require_unit(x, "utility: alternative");
  const double d = x - theta;
  return -d * d;
}

double reflect(double theta_mu, double x) {
  require_unit(theta_mu, "reflect: median");
  require_unit(x, "reflect: alternative");
  return std::min(std::max(2.0 * theta_mu - x, 0.0), 1.0);
}

VoteOutcome pairwise_vote(const TypeDistribution& d, double proposal, double status_quo) {
  require_unit(proposal, "pairwise_vote: proposal");
  require_unit(status_quo, "pairwise_vote: status quo");
  if (proposal == status_quo) {
    // Every voter is indifferent; the ballot is a pure tie.
    return {proposal, 0.5, true};
  }
  const double mid = 0.5 * (proposal + status_quo);
  const double below = d.cdf(mid);
  const double share = proposal > status_quo ? 1.0 - below : below;
  VoteOutcome out;
  out.proposal_share = share;
  if (std::fabs(share - 0.5) <= tol::cdf) {
    out.winner = proposal;
    out.tie_broken = true;
  } else {
    out.winner = share > 0.5 ? proposal : status_quo;
  }
  return out;
}

bool weakly_prefers(double peak, double proposal, double status_quo) {
  return std::fabs(peak - proposal) <= std::fabs(peak - status_quo) + tol::dist;
}

VoteOutcome panel_vote(std::span<const double> panel, double proposal, double status_quo) {
  if (panel.empty()) {
    throw ArgumentError("panel_vote: empty panel");
  }
  std::size_t strict_for = 0;
  std::size_t indifferent = 0;
  for (double peak : panel) {
    const double dp = std::fabs(peak - proposal);
    const double dq = std::fabs(peak - status_quo);
    if (dp < dq - tol::dist) {
      ++strict_for;
    } else if (dp <= dq + tol::dist) {
      ++indifferent;
    }
  }
  const std::size_t n = panel.size();
  const std::size_t weak_for = strict_for + indifferent;
  VoteOutcome out;
  out.proposal_share = static_cast<double>(weak_for) / static_cast<double>(n);
  const bool wins = 2 * weak_for >= n;
  out.winner = wins ? proposal : status_quo;
  // Without indifferent voters or the even-split rule the proposal would lose.
  out.tie_broken = wins && 2 * strict_for <= n;
  return out;
}

std::vector<double> quantile_panel(const TypeDistribution& d, std::size_t size) {
  if (size == 0) {
    throw ArgumentError("quantile_panel: size must be positive");
  }
  std::vector<double> peaks(size);
  const double m = static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double level = (static_cast<double>(i) + 0.5) / m;
    peaks[i] = (2 * i + 1 == size) ? d.median() : d.quantile(level);
  }
  std::sort(peaks.begin(), peaks.end());
  return peaks;
}

}  // namespace vrp
