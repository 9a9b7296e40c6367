// thresholds.hpp
//
// Threshold types: the most extreme proposers who still prefer the median to
// gambling on their own peak, and the two-round implementation condition.

#pragma once

#include "vrp/distributions.hpp"

namespace vrp {

struct EquilibriumThresholds {
  double theta_mu = 0.5;
  double theta_lower = 0.0;
  double theta_upper = 1.0;
  bool lower_root_found = false;
  bool upper_root_found = false;
  /// Result of check_admissibility; thresholds of inadmissible laws are
  /// still reported but carry no equilibrium guarantee.
  bool admissible = true;
};

struct TwoRoundCertificate {
  MedianBranch branch = MedianBranch::MedianHigh;
  double lhs_variance = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ∫_θ^1 u_θ(v) f(v) dv - u_θ(θμ): positive when type θ prefers the lottery of
/// final winners above its own peak to the median.
double indifference_gap_low(const TypeDistribution& d, double theta);

/// ∫_0^θ u_θ(v) f(v) dv - u_θ(θμ), the mirror image of indifference_gap_low.
double indifference_gap_high(const TypeDistribution& d, double theta);

/// Lower threshold on (0, 2θμ - 1) and upper threshold on (2θμ, 1) by
/// bisection of the (monotone) indifference gaps. Degenerate sides clamp to
/// 0 and 1. When the gap keeps one sign across the whole interval the
/// threshold sits at the interval end (minus/plus tol::root) and the
/// corresponding *_root_found flag stays false.
EquilibriumThresholds solve_thresholds(const TypeDistribution& d);

/// Var ≥ Med² - Mean² (θμ ≥ 1/2) or Var ≥ (1 - Med)² - (1 - Mean)² (θμ < 1/2),
/// tested with slack tol::mom.
TwoRoundCertificate two_round_condition(const TypeDistribution& d);

}  // namespace vrp
