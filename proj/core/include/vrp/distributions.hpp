// distributions.hpp
//
// Voter-peak distributions on [0, 1]. Every family is conditioned onto the
// unit interval and has a strictly positive density there.

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace vrp {

enum class Family { Uniform, Beta, TruncatedNormal, TruncatedLogistic, Empirical, Mirrored };

enum class MedianBranch { MedianLow, MedianHigh };

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

namespace detail {

/// Family-specific evaluation. Implementations are immutable.
class DistributionModel {
 public:
  virtual ~DistributionModel() = default;
  virtual double cdf(double x) const = 0;
  virtual double pdf(double x) const = 0;
  /// Inverse CDF by safeguarded Newton iteration on cdf/pdf.
  virtual double quantile(double u) const;
  /// ∫_lo^hi v^k f(v) dv for k in {0, 1, 2}. The generic version integrates
  /// by parts against the CDF, which stays bounded where f does not.
  virtual double partial_moment(int k, double lo, double hi) const;
  virtual Moments moments() const;
  virtual Family family() const = 0;
  virtual std::string describe() const = 0;
};

}  // namespace detail

/// A distribution of voter peaks on [0, 1] (the society's type distribution).
///
/// Cheap to copy; the underlying model is shared and immutable, so a value can
/// be used from any number of threads. The median and first two moments are
/// computed once at construction.
class TypeDistribution {
 public:
  static TypeDistribution uniform();
  static TypeDistribution beta(double alpha, double beta);
  /// Normal(mu, sigma) conditioned on [0, 1].
  static TypeDistribution truncated_normal(double mu, double sigma);
  /// Logistic(mu, s) conditioned on [0, 1].
  static TypeDistribution truncated_logistic(double mu, double s);
  /// Piecewise-linear ECDF of `samples`, mixed as (1 - eps) ECDF + eps U(0,1).
  /// Samples outside [0, 1] are clamped.
  static TypeDistribution empirical(std::vector<double> samples, double eps = 0.01);
  static TypeDistribution empirical_from_file(const std::filesystem::path& path,
                                              double eps = 0.01);

  /// Distribution of 1 - θ for θ ~ *this.
  TypeDistribution mirrored() const;

  double cdf(double x) const;
  double pdf(double x) const;
  double quantile(double u) const;
  /// ∫_lo^hi v^k f(v) dv, k in {0, 1, 2}; lo and hi are clamped to [0, 1].
  double partial_moment(int k, double lo, double hi) const;

  double median() const { return median_; }
  double mean() const { return moments_.mean; }
  double variance() const { return moments_.variance; }
  Moments moments() const { return moments_; }

  Family family() const { return model_->family(); }
  std::string describe() const { return model_->describe(); }

  /// Number of samples clamped into [0, 1] (Empirical only, else 0).
  std::size_t clamped_samples() const { return clamped_; }

 private:
  explicit TypeDistribution(std::shared_ptr<const detail::DistributionModel> model,
                            std::size_t clamped = 0);

  std::shared_ptr<const detail::DistributionModel> model_;
  double median_ = 0.5;
  Moments moments_{};
  std::size_t clamped_ = 0;
};

/// Parses `uniform`, `beta:A,B`, `tnormal:MU,SIGMA`, `tlogistic:MU,S`,
/// `empirical:PATH[,EPS]`. Throws ArgumentError on malformed specs.
TypeDistribution parse_distribution(std::string_view spec);

struct EmpiricalSample {
  std::vector<double> values;
  std::size_t clamped = 0;
};

/// Reads one real per line; blank lines are skipped, values outside [0, 1]
/// are clamped and counted.
EmpiricalSample load_samples(const std::filesystem::path& path);

// Free-function surface mirroring the member functions.
double cdf(const TypeDistribution& d, double x);
double pdf(const TypeDistribution& d, double x);
double median(const TypeDistribution& d);
Moments moments(const TypeDistribution& d);

/// Result of the skewness (admissibility) check on a distribution.
struct AdmissibilityReport {
  double median = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  MedianBranch branch = MedianBranch::MedianLow;
  double integral_value = 0.0;
  bool admissible = false;
};

/// Integrates 1 - F(θμ + t) - F(θμ - t) over t in [0, θμ] (θμ ≤ 0.5) or
/// [0, 1 - θμ] (θμ > 0.5), with F extended by 0 below 0 and 1 above 1.
/// Admissible iff the integral is ≥ 0 on the low branch, ≤ 0 on the high one.
AdmissibilityReport check_admissibility(const TypeDistribution& d);

const char* to_string(MedianBranch b);
const char* to_string(Family f);

}  // namespace vrp
