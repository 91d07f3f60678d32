#include "hplb/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hplb/errors.hpp"

namespace hplb {

namespace {

constexpr int kLogSpaceThreshold = 10000;

// Walks k = 0, 1, ... accumulating Binomial(p, m) probabilities. binom_cdf and
// binom_quantile share it so the two agree to the last bit.
class BinomialAccumulator {
 public:
  explicit BinomialAccumulator(const BinomialParams& params)
      : m_(params.m), log_ratio_(std::log(params.p) - std::log1p(-params.p)) {
    log_pmf_ = static_cast<double>(m_) * std::log1p(-params.p);
    log_space_ = m_ > kLogSpaceThreshold || log_pmf_ < -700.0;
    if (!log_space_) {
      pmf_ = std::exp(log_pmf_);
      ratio_ = params.p / (1.0 - params.p);
    }
    cdf_ = current_pmf();
  }

  double cdf() const { return cdf_; }
  int k() const { return k_; }

  void advance() {
    const double factor = static_cast<double>(m_ - k_) / static_cast<double>(k_ + 1);
    if (log_space_) {
      log_pmf_ += std::log(factor) + log_ratio_;
    } else {
      pmf_ *= factor * ratio_;
    }
    ++k_;
    cdf_ += current_pmf();
    if (cdf_ > 1.0) cdf_ = 1.0;
  }

 private:
  double current_pmf() const { return log_space_ ? std::exp(log_pmf_) : pmf_; }

  int m_;
  int k_ = 0;
  bool log_space_;
  double log_ratio_;
  double log_pmf_;
  double pmf_ = 0.0;
  double ratio_ = 0.0;
  double cdf_ = 0.0;
};

}  // namespace

void BinomialParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "binomial: success probability " << p << " outside [0,1]";
    throw ParameterError(os.str());
  }
  if (m < 0) throw ParameterError("binomial: negative trial count");
}

void HypergeomParams::validate() const {
  if (N < 1) throw ParameterError("hypergeometric: population must be positive");
  if (z < 0 || z > N) throw ParameterError("hypergeometric: draws outside [0, N]");
  if (m < 0 || m > N) throw ParameterError("hypergeometric: successes outside [0, N]");
}

double binom_cdf(long k, const BinomialParams& params) {
  params.validate();
  if (k < 0) return 0.0;
  if (k >= params.m) return 1.0;
  if (params.p == 0.0) return 1.0;
  if (params.p == 1.0) return 0.0;
  BinomialAccumulator acc(params);
  while (acc.k() < k) acc.advance();
  return acc.cdf();
}

int binom_quantile(double alpha, const BinomialParams& params) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("binom_quantile: alpha must lie in (0,1)");
  params.validate();
  if (params.p == 0.0 || params.m == 0) return 0;
  if (params.p == 1.0) return params.m;
  BinomialAccumulator acc(params);
  while (acc.cdf() < alpha && acc.k() < params.m) acc.advance();
  return acc.k();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("normal_quantile: alpha must lie in (0,1)");
  if (alpha == 0.5) return 0.0;

  // Acklam's rational approximation, relative error ~1e-9 before refinement.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (alpha < p_low) {
    const double q = std::sqrt(-2.0 * std::log(alpha));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (alpha <= 1.0 - p_low) {
    const double q = alpha - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-alpha));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the erfc-based CDF. Work in the lower tail for accuracy.
  const bool upper = x > 0.0;
  const double xt = upper ? -x : x;
  const double target = upper ? 1.0 - alpha : alpha;
  const double e = normal_cdf(xt) - target;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * xt * xt);
  const double refined = xt - u / (1.0 + 0.5 * xt * u);
  return upper ? -refined : refined;
}

int hypergeom_step_draw(RngStream& rng, long remaining_successes, long remaining_population) {
  if (remaining_population < 1 || remaining_successes < 0 ||
      remaining_successes > remaining_population) {
    throw ParameterError("hypergeom_step_draw: need 0 <= successes <= population, population >= 1");
  }
  if (remaining_successes == 0) return 0;
  if (remaining_successes == remaining_population) return 1;
  // exact integer comparison: draw in [0, population) and test against successes
  return rng.below(static_cast<std::uint64_t>(remaining_population)) <
                 static_cast<std::uint64_t>(remaining_successes)
             ? 1
             : 0;
}

double hypergeom_pmf(int k, const HypergeomParams& params) {
  params.validate();
  const int n_fail = params.N - params.m;
  if (k < 0 || k > params.z || k > params.m || params.z - k > n_fail) return 0.0;
  auto log_choose = [](int a, int b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
  };
  return std::exp(log_choose(params.m, k) + log_choose(n_fail, params.z - k) -
                  log_choose(params.N, params.z));
}

}  // namespace hplb
