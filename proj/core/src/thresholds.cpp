#include "vrp/thresholds.hpp"

#include "vrp/numerics.hpp"

namespace vrp {

namespace {

// ∫_lo^hi -(v - theta)^2 f(v) dv from the first three partial moments.
double expected_loss(const TypeDistribution& d, double theta, double lo, double hi) {
  const double m0 = d.partial_moment(0, lo, hi);
  const double m1 = d.partial_moment(1, lo, hi);
  const double m2 = d.partial_moment(2, lo, hi);
  return -(m2 - 2.0 * theta * m1 + theta * theta * m0);
}

constexpr double kBracketInset = 1e-12;

}  // namespace

double indifference_gap_low(const TypeDistribution& d, double theta) {
  require_unit(theta, "indifference_gap_low: type");
  const double dm = d.median() - theta;
  return expected_loss(d, theta, theta, 1.0) + dm * dm;
}

double indifference_gap_high(const TypeDistribution& d, double theta) {
  require_unit(theta, "indifference_gap_high: type");
  const double dm = d.median() - theta;
  return expected_loss(d, theta, 0.0, theta) + dm * dm;
}

EquilibriumThresholds solve_thresholds(const TypeDistribution& d) {
  EquilibriumThresholds th;
  th.theta_mu = d.median();
  th.admissible = check_admissibility(d).admissible;

  if (th.theta_mu > 0.5) {
    const double end = 2.0 * th.theta_mu - 1.0;
    const double lo = kBracketInset;
    const double hi = end - kBracketInset;
    const auto gap = [&d](double t) { return indifference_gap_low(d, t); };
    if (hi <= lo || gap(lo) <= 0.0) {
      th.theta_lower = 0.0;
    } else if (gap(hi) > 0.0) {
      th.theta_lower = end - tol::root;
    } else {
      th.theta_lower = bisect(gap, lo, hi, tol::root);
      th.lower_root_found = true;
    }
  } else if (th.theta_mu < 0.5) {
    const double start = 2.0 * th.theta_mu;
    const double lo = start + kBracketInset;
    const double hi = 1.0 - kBracketInset;
    const auto gap = [&d](double t) { return indifference_gap_high(d, t); };
    if (hi <= lo || gap(hi) <= 0.0) {
      th.theta_upper = 1.0;
    } else if (gap(lo) > 0.0) {
      th.theta_upper = start + tol::root;
    } else {
      th.theta_upper = bisect(gap, lo, hi, tol::root);
      th.upper_root_found = true;
    }
  }
  return th;
}

TwoRoundCertificate two_round_condition(const TypeDistribution& d) {
  TwoRoundCertificate c;
  const double med = d.median();
  const double mean = d.mean();
  c.lhs_variance = d.variance();
  if (med >= 0.5) {
    c.branch = MedianBranch::MedianHigh;
    c.rhs = med * med - mean * mean;
  } else {
    c.branch = MedianBranch::MedianLow;
    c.rhs = (1.0 - med) * (1.0 - med) - (1.0 - mean) * (1.0 - mean);
  }
  c.holds = c.lhs_variance >= c.rhs - tol::mom;
  return c;
}

}  // namespace vrp
