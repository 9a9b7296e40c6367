#include "vrp/distributions.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <cctype>
#include <utility>

#include "vrp/numerics.hpp"

namespace vrp {

namespace detail {

double DistributionModel::quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  double x = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double resid = cdf(x) - u;
    if (resid == 0.0) {
      return x;
    }
    if (resid < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dens = pdf(x);
    double next = x - resid / dens;
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      next = 0.5 * (lo + hi);
    }
    if (std::fabs(next - x) <= 1e-15 || hi - lo <= 1e-15) {
      return next;
    }
    x = next;
  }
  return x;
}

double DistributionModel::partial_moment(int k, double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  const double flo = cdf(lo);
  const double fhi = cdf(hi);
  switch (k) {
    case 0:
      return fhi - flo;
    case 1:
      return hi * fhi - lo * flo - integrate([this](double v) { return cdf(v); }, lo, hi);
    case 2:
      return hi * hi * fhi - lo * lo * flo -
             integrate([this](double v) { return 2.0 * v * cdf(v); }, lo, hi);
    default:
      throw ArgumentError("partial_moment supports k in {0, 1, 2}");
  }
}

Moments DistributionModel::moments() const {
  const double m1 = partial_moment(1, 0.0, 1.0);
  const double m2 = partial_moment(2, 0.0, 1.0);
  return {m1, std::max(0.0, m2 - m1 * m1)};
}

}  // namespace detail

namespace {

std::string fmt_num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class UniformModel final : public detail::DistributionModel {
 public:
  double cdf(double x) const override { return x; }
  double pdf(double) const override { return 1.0; }
  double quantile(double u) const override { return clamp_unit(u); }
  double partial_moment(int k, double lo, double hi) const override {
    if (!(hi > lo)) return 0.0;
    return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
  }
  Moments moments() const override { return {0.5, 1.0 / 12.0}; }
  Family family() const override { return Family::Uniform; }
  std::string describe() const override { return "uniform"; }
};

class BetaModel final : public detail::DistributionModel {
 public:
  BetaModel(double a, double b) : a_(a), b_(b) {
    for (int k = 0; k < 3; ++k) {
      log_beta_[k] = log_beta(a_ + k, b_);
    }
  }

  double cdf(double x) const override { return incomplete_beta(a_, b_, x, log_beta_[0]); }

  double pdf(double x) const override {
    if (x <= 0.0) return a_ < 1.0 ? HUGE_VAL : (a_ == 1.0 ? std::exp(-log_beta_[0]) : 0.0);
    if (x >= 1.0) return b_ < 1.0 ? HUGE_VAL : (b_ == 1.0 ? std::exp(-log_beta_[0]) : 0.0);
    return std::exp((a_ - 1.0) * std::log(x) + (b_ - 1.0) * std::log1p(-x) - log_beta_[0]);
  }

  double partial_moment(int k, double lo, double hi) const override {
    if (!(hi > lo)) return 0.0;
    if (k < 0 || k > 2) throw ArgumentError("partial_moment supports k in {0, 1, 2}");
    const double scale = std::exp(log_beta_[k] - log_beta_[0]);
    const double ak = a_ + k;
    return scale * (incomplete_beta(ak, b_, hi, log_beta_[k]) -
                    incomplete_beta(ak, b_, lo, log_beta_[k]));
  }

  Moments moments() const override {
    const double s = a_ + b_;
    return {a_ / s, a_ * b_ / (s * s * (s + 1.0))};
  }

  Family family() const override { return Family::Beta; }
  std::string describe() const override { return "beta:" + fmt_num(a_) + "," + fmt_num(b_); }

 private:
  double a_;
  double b_;
  std::array<double, 3> log_beta_{};
};

// Conditioning of a continuous law with CDF G and density g onto [0, 1].
class TruncatedNormalModel final : public detail::DistributionModel {
 public:
  TruncatedNormalModel(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    g0_ = normal_cdf(-mu_ / sigma_);
    mass_ = normal_cdf((1.0 - mu_) / sigma_) - g0_;
    if (!(mass_ > 0.0)) {
      throw ArgumentError("tnormal: no probability mass on [0, 1]");
    }
  }
  double cdf(double x) const override {
    return clamp_unit((normal_cdf((x - mu_) / sigma_) - g0_) / mass_);
  }
  double pdf(double x) const override {
    const double z = (x - mu_) / sigma_;
    return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi) * mass_);
  }
  Family family() const override { return Family::TruncatedNormal; }
  std::string describe() const override {
    return "tnormal:" + fmt_num(mu_) + "," + fmt_num(sigma_);
  }

 private:
  double mu_;
  double sigma_;
  double g0_ = 0.0;
  double mass_ = 1.0;
};

class TruncatedLogisticModel final : public detail::DistributionModel {
 public:
  TruncatedLogisticModel(double mu, double s) : mu_(mu), s_(s) {
    g0_ = logistic(0.0);
    mass_ = logistic(1.0) - g0_;
    if (!(mass_ > 0.0)) {
      throw ArgumentError("tlogistic: no probability mass on [0, 1]");
    }
  }
  double cdf(double x) const override { return clamp_unit((logistic(x) - g0_) / mass_); }
  double pdf(double x) const override {
    const double l = logistic(x);
    return l * (1.0 - l) / (s_ * mass_);
  }
  Family family() const override { return Family::TruncatedLogistic; }
  std::string describe() const override {
    return "tlogistic:" + fmt_num(mu_) + "," + fmt_num(s_);
  }

 private:
  double logistic(double x) const { return 1.0 / (1.0 + std::exp(-(x - mu_) / s_)); }

  double mu_;
  double s_;
  double g0_ = 0.0;
  double mass_ = 1.0;
};

// Piecewise-linear ECDF through (x_(i), (i - 1/2)/n), pinned at (0,0) and
// (1,1), then mixed with the uniform law. Density is piecewise constant.
class EmpiricalModel final : public detail::DistributionModel {
 public:
  EmpiricalModel(std::vector<double> samples, double eps) : eps_(eps), n_(samples.size()) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    knots_x_.push_back(0.0);
    knots_y_.push_back(0.0);
    for (std::size_t i = 0; i < samples.size();) {
      std::size_t j = i;
      double level_sum = 0.0;
      while (j < samples.size() && samples[j] == samples[i]) {
        level_sum += (static_cast<double>(j) + 0.5) / n;
        ++j;
      }
      const double x = samples[i];
      if (x > 0.0 && x < 1.0) {
        knots_x_.push_back(x);
        knots_y_.push_back(level_sum / static_cast<double>(j - i));
      }
      i = j;
    }
    knots_x_.push_back(1.0);
    knots_y_.push_back(1.0);
  }

  double cdf(double x) const override {
    return clamp_unit((1.0 - eps_) * ecdf(x) + eps_ * x);
  }

  double pdf(double x) const override { return (1.0 - eps_) * slope(segment(x)) + eps_; }

  double partial_moment(int k, double lo, double hi) const override {
    if (!(hi > lo)) return 0.0;
    if (k < 0 || k > 2) throw ArgumentError("partial_moment supports k in {0, 1, 2}");
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < knots_x_.size(); ++s) {
      const double a = std::max(lo, knots_x_[s]);
      const double b = std::min(hi, knots_x_[s + 1]);
      if (b <= a) continue;
      const double dens = (1.0 - eps_) * slope(s) + eps_;
      total += dens * (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
    }
    return total;
  }

  Family family() const override { return Family::Empirical; }
  std::string describe() const override {
    return "empirical:n=" + std::to_string(n_) + ",eps=" + fmt_num(eps_);
  }

 private:
  std::size_t segment(double x) const {
    const auto it = std::upper_bound(knots_x_.begin(), knots_x_.end(), x);
    const auto idx = static_cast<std::size_t>(it - knots_x_.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, knots_x_.size() - 2);
  }
  double slope(std::size_t s) const {
    return (knots_y_[s + 1] - knots_y_[s]) / (knots_x_[s + 1] - knots_x_[s]);
  }
  double ecdf(double x) const {
    const std::size_t s = segment(x);
    return knots_y_[s] + slope(s) * (x - knots_x_[s]);
  }

  double eps_;
  std::size_t n_;
  std::vector<double> knots_x_;
  std::vector<double> knots_y_;
};

class MirroredModel final : public detail::DistributionModel {
 public:
  explicit MirroredModel(std::shared_ptr<const detail::DistributionModel> base)
      : base_(std::move(base)) {}
  double cdf(double x) const override { return clamp_unit(1.0 - base_->cdf(1.0 - x)); }
  double pdf(double x) const override { return base_->pdf(1.0 - x); }
  double quantile(double u) const override { return 1.0 - base_->quantile(1.0 - u); }
  double partial_moment(int k, double lo, double hi) const override {
    if (!(hi > lo)) return 0.0;
    const double a = 1.0 - hi;
    const double b = 1.0 - lo;
    const double m0 = base_->partial_moment(0, a, b);
    switch (k) {
      case 0:
        return m0;
      case 1:
        return m0 - base_->partial_moment(1, a, b);
      case 2:
        return m0 - 2.0 * base_->partial_moment(1, a, b) + base_->partial_moment(2, a, b);
      default:
        throw ArgumentError("partial_moment supports k in {0, 1, 2}");
    }
  }
  Moments moments() const override {
    const Moments m = base_->moments();
    return {1.0 - m.mean, m.variance};
  }
  Family family() const override { return Family::Mirrored; }
  std::string describe() const override { return "mirror(" + base_->describe() + ")"; }

 private:
  std::shared_ptr<const detail::DistributionModel> base_;
};

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<double> parse_params(std::string_view body, std::string_view spec, std::size_t count) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t comma = body.find(',', start);
    const std::string_view tok =
        body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    double v = 0.0;
    if (!parse_double(tok, v)) {
      throw ArgumentError("malformed number '" + std::string(tok) + "' in distribution spec '" +
                          std::string(spec) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.size() != count) {
    throw ArgumentError("distribution spec '" + std::string(spec) + "' expects " +
                        std::to_string(count) + " parameters");
  }
  return out;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ArgumentError(std::string(what) + " must be positive");
  }
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ArgumentError("empirical smoothing eps must lie in (0, 1)");
  }
}

}  // namespace

TypeDistribution::TypeDistribution(std::shared_ptr<const detail::DistributionModel> model,
                                   std::size_t clamped)
    : model_(std::move(model)), clamped_(clamped) {
  if (model_->family() == Family::Uniform) {
    median_ = 0.5;
  } else {
    median_ = bisect([this](double x) { return model_->cdf(x) - 0.5; }, 0.0, 1.0, 0.0);
  }
  moments_ = model_->moments();
}

TypeDistribution TypeDistribution::uniform() {
  return TypeDistribution(std::make_shared<UniformModel>());
}

TypeDistribution TypeDistribution::beta(double alpha, double beta) {
  require_positive(alpha, "beta: alpha");
  require_positive(beta, "beta: beta");
  return TypeDistribution(std::make_shared<BetaModel>(alpha, beta));
}

TypeDistribution TypeDistribution::truncated_normal(double mu, double sigma) {
  if (!std::isfinite(mu)) throw ArgumentError("tnormal: mu must be finite");
  require_positive(sigma, "tnormal: sigma");
  return TypeDistribution(std::make_shared<TruncatedNormalModel>(mu, sigma));
}

TypeDistribution TypeDistribution::truncated_logistic(double mu, double s) {
  if (!std::isfinite(mu)) throw ArgumentError("tlogistic: mu must be finite");
  require_positive(s, "tlogistic: s");
  return TypeDistribution(std::make_shared<TruncatedLogisticModel>(mu, s));
}

TypeDistribution TypeDistribution::empirical(std::vector<double> samples, double eps) {
  require_eps(eps);
  if (samples.empty()) {
    throw ArgumentError("empirical: no samples");
  }
  std::size_t clamped = 0;
  for (double& v : samples) {
    if (!std::isfinite(v)) throw ArgumentError("empirical: non-finite sample");
    if (v < 0.0 || v > 1.0) {
      v = clamp_unit(v);
      ++clamped;
    }
  }
  return TypeDistribution(std::make_shared<EmpiricalModel>(std::move(samples), eps), clamped);
}

TypeDistribution TypeDistribution::empirical_from_file(const std::filesystem::path& path,
                                                       double eps) {
  EmpiricalSample s = load_samples(path);
  auto d = empirical(std::move(s.values), eps);
  d.clamped_ = s.clamped;
  return d;
}

TypeDistribution TypeDistribution::mirrored() const {
  return TypeDistribution(std::make_shared<MirroredModel>(model_), clamped_);
}

double TypeDistribution::cdf(double x) const {
  require_unit(x, "cdf argument");
  return model_->cdf(x);
}

double TypeDistribution::pdf(double x) const {
  require_unit(x, "pdf argument");
  return model_->pdf(x);
}

double TypeDistribution::quantile(double u) const {
  require_unit(u, "quantile level");
  return model_->quantile(u);
}

double TypeDistribution::partial_moment(int k, double lo, double hi) const {
  return model_->partial_moment(k, clamp_unit(lo), clamp_unit(hi));
}

EmpiricalSample load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ArgumentError("cannot open sample file '" + path.string() + "'");
  }
  EmpiricalSample out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    double v = 0.0;
    if (!parse_double(line, v)) {
      throw ArgumentError("sample file '" + path.string() + "' line " + std::to_string(lineno) +
                          ": not a number");
    }
    if (v < 0.0 || v > 1.0) {
      v = clamp_unit(v);
      ++out.clamped;
    }
    out.values.push_back(v);
  }
  if (out.values.empty()) {
    throw ArgumentError("sample file '" + path.string() + "' holds no samples");
  }
  return out;
}

TypeDistribution parse_distribution(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  std::string name(spec.substr(0, colon));
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::string_view body =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  if (name == "uniform") {
    if (colon != std::string_view::npos) throw ArgumentError("uniform takes no parameters");
    return TypeDistribution::uniform();
  }
  if (colon == std::string_view::npos) {
    throw ArgumentError("unknown or incomplete distribution spec '" + std::string(spec) + "'");
  }
  if (name == "beta") {
    const auto p = parse_params(body, spec, 2);
    return TypeDistribution::beta(p[0], p[1]);
  }
  if (name == "tnormal") {
    const auto p = parse_params(body, spec, 2);
    return TypeDistribution::truncated_normal(p[0], p[1]);
  }
  if (name == "tlogistic") {
    const auto p = parse_params(body, spec, 2);
    return TypeDistribution::truncated_logistic(p[0], p[1]);
  }
  if (name == "empirical") {
    std::string_view path = body;
    double eps = 0.01;
    const std::size_t comma = body.rfind(',');
    if (comma != std::string_view::npos && parse_double(body.substr(comma + 1), eps)) {
      path = body.substr(0, comma);
    } else {
      eps = 0.01;
    }
    if (path.empty()) throw ArgumentError("empirical spec needs a sample path");
    require_eps(eps);
    return TypeDistribution::empirical_from_file(std::filesystem::path(std::string(path)), eps);
  }
  throw ArgumentError("unknown distribution family '" + name + "'");
}

double cdf(const TypeDistribution& d, double x) { return d.cdf(x); }
double pdf(const TypeDistribution& d, double x) { return d.pdf(x); }
double median(const TypeDistribution& d) { return d.median(); }
Moments moments(const TypeDistribution& d) { return d.moments(); }

AdmissibilityReport check_admissibility(const TypeDistribution& d) {
  AdmissibilityReport r;
  r.median = d.median();
  r.mean = d.mean();
  r.variance = d.variance();
  r.branch = r.median <= 0.5 ? MedianBranch::MedianLow : MedianBranch::MedianHigh;
  const double upper = r.branch == MedianBranch::MedianLow ? r.median : 1.0 - r.median;
  const auto ext_cdf = [&d](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return d.cdf(x);
  };
  r.integral_value = integrate(
      [&](double t) { return 1.0 - ext_cdf(r.median + t) - ext_cdf(r.median - t); }, 0.0, upper);
  // Slack absorbs quadrature noise for exactly symmetric laws.
  r.admissible = r.branch == MedianBranch::MedianLow ? r.integral_value >= -tol::mom
                                                      : r.integral_value <= tol::mom;
  return r;
}

const char* to_string(MedianBranch b) {
  return b == MedianBranch::MedianLow ? "MedianLow" : "MedianHigh";
}

const char* to_string(Family f) {
  switch (f) {
    case Family::Uniform:
      return "Uniform";
    case Family::Beta:
      return "Beta";
    case Family::TruncatedNormal:
      return "TruncatedNormal";
    case Family::TruncatedLogistic:
      return "TruncatedLogistic";
    case Family::Empirical:
      return "Empirical";
    case Family::Mirrored:
      return "Mirrored";
  }
  return "?";
}

}  // namespace vrp
