#include "hplb/bounding.hpp"

#include <algorithm>
#include <limits>

#include "hplb/distributions.hpp"
#include "hplb/errors.hpp"

namespace hplb {

void BoundSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("BoundSpec: alpha must lie in (0,1)");
  if (sims < 100) throw ParameterError("BoundSpec: sims must be at least 100");
}

EffectiveSizes effective_sizes(double lambda_tilde, int m, int n, const BoundSpec& spec) {
  if (m < 1 || n < 1) throw ParameterError("effective_sizes: m and n must be positive");
  if (!(lambda_tilde >= 0.0 && lambda_tilde <= 1.0)) {
    throw ParameterError("effective_sizes: lambda outside [0,1]");
  }
  const double level = 1.0 - spec.alpha / 3.0;
  EffectiveSizes s;
  s.q_m = binom_quantile(level, {lambda_tilde, m});
  s.q_n = binom_quantile(level, {lambda_tilde, n});
  s.m_eff = m - s.q_m;
  s.n_eff = n - s.q_n;
  return s;
}

BoundingFunction::BoundingFunction(double lambda_tilde, int m, int n, const BoundSpec& spec)
    : BoundingFunction(m, n, effective_sizes(lambda_tilde, m, n, spec), spec) {}

BoundingFunction::BoundingFunction(int m, int n, const EffectiveSizes& sizes, const BoundSpec& spec)
    : m_(m), n_(n), sizes_(sizes) {
  spec.validate();
  if (sizes_.m_eff < 1 || sizes_.n_eff < 1) return;
  has_band_ = true;
  const double band_level = spec.alpha / 3.0;
  if (spec.band == BandKind::analytic && std::min(sizes_.m_eff, sizes_.n_eff) >= 8) {
    band_ = analytic_band(band_level, sizes_.m_eff, sizes_.n_eff);
  } else {
    band_ = cached_simulated_band(band_level, sizes_.m_eff, sizes_.n_eff, spec.sims, spec.seed);
  }
}

double BoundingFunction::operator()(long z) const {
  if (z < 1 || z > static_cast<long>(m_) + n_ - 1) {
    throw ParameterError("bounding function: z outside {1, ..., N-1}");
  }
  if (z <= sizes_.q_m) return static_cast<double>(z);
  if (z >= static_cast<long>(m_) + sizes_.n_eff) return static_cast<double>(m_);
  if (!has_band_) return static_cast<double>(std::max<long>(z, m_));
  return sizes_.q_m + band_value(band_, z - sizes_.q_m);
}

double q_bound(long z, double lambda_tilde, int m, int n, const BoundSpec& spec) {
  return BoundingFunction(lambda_tilde, m, n, spec)(z);
}

bool exceeds(const CountingPath& path, const BoundingFunction& bound) {
  if (!bound.has_band()) return false;  // max(z, m) dominates every path
  const auto& s = bound.sizes();
  const long hi = static_cast<long>(path.m) + s.n_eff - 1;
  for (long z = s.q_m + 1; z <= hi; ++z) {
    if (path.at(static_cast<int>(z)) - (s.q_m + band_value(bound.band(), z - s.q_m)) > 0.0) return true;
  }
  return false;
}

Violation is_violated(const CountingPath& path, double lambda_tilde, const BoundSpec& spec) {
  const BoundingFunction bound(lambda_tilde, path.m, path.n, spec);
  Violation out;
  out.excess = -std::numeric_limits<double>::infinity();
  const int N = path.size();
  for (int z = 1; z <= N - 1; ++z) {
    const double excess = path.at(z) - bound(z);
    if (excess > out.excess) {
      out.excess = excess;
      out.argmax_z = z;
    }
  }
  out.violated = out.excess > 0.0;
  return out;
}

}  // namespace hplb
