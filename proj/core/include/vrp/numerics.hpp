// numerics.hpp
//
// Numerical building blocks shared by the VRP modules: tolerances, error
// types, adaptive Simpson quadrature, bracketing bisection and the
// regularized incomplete beta function.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace vrp {

/// Argument outside the unit interval (or another mathematical domain).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or out-of-range input parameters.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace tol {
inline constexpr double cdf = 1e-10;   // |F(x) - target| for CDF-level comparisons
inline constexpr double quad = 1e-10;  // default absolute quadrature tolerance
inline constexpr double root = 1e-9;   // threshold bisection width
inline constexpr double mom = 1e-9;    // slack on moment inequalities
inline constexpr double win = 1e-9;    // "winner equals the median" classification
inline constexpr double dev = 1e-9;    // profitable-deviation threshold in the oracle
inline constexpr double dist = 1e-12;  // distances closer than this count as equal
}  // namespace tol

/// Absolute quadrature tolerance; `VRP_QUAD_TOL` overrides tol::quad.
double quad_tolerance();

/// Maximum number of Simpson panels a single integration may create.
inline constexpr std::size_t kMaxQuadIntervals = std::size_t{1} << 20;

namespace detail {

template <class F>
struct SimpsonState {
  const F& f;
  std::size_t intervals = 0;
};

template <class F>
double simpson_step(SimpsonState<F>& st, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double eps, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  ++st.intervals;
  if (depth <= 0 || st.intervals >= kMaxQuadIntervals || std::fabs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return simpson_step(st, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1) +
         simpson_step(st, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance `abs_tol`.
///
/// The interval is first cut into four panels so that narrow features near
/// the midpoint are not missed; refinement stops once the global panel budget
/// (kMaxQuadIntervals) is spent.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = quad_tolerance()) {
  if (!(b > a)) {
    return 0.0;
  }
  detail::SimpsonState<F> st{f};
  constexpr int kPanels = 4;
  const double width = (b - a) / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == kPanels) ? b : lo + width;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo);
    const double fmid = f(mid);
    const double fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::simpson_step(st, lo, flo, hi, fhi, mid, fmid, whole, abs_tol / kPanels, 48);
  }
  return total;
}

/// Bisection for a sign change of `g` on [lo, hi]; returns the bracket
/// midpoint once its width drops below `x_tol`. The caller guarantees
/// g(lo) and g(hi) have opposite signs (or one is zero).
template <class G>
double bisect(const G& g, double lo, double hi, double x_tol) {
  double glo = g(lo);
  if (glo == 0.0) {
    return lo;
  }
  for (int it = 0; it < 200 && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double gm = g(mid);
    if (gm == 0.0) {
      return mid;
    }
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// log B(a, b).
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
/// `log_beta_ab` must equal log_beta(a, b); callers cache it.
double incomplete_beta(double a, double b, double x, double log_beta_ab);

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double clamp_unit(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

/// Throws DomainError unless x lies in [0, 1].
void require_unit(double x, const char* what);

}  // namespace vrp
