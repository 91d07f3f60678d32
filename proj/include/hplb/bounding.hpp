#pragma once

#include <cstdint>

#include "hplb/counting.hpp"

namespace hplb {

/// Configuration of the bounding function Q_{m,n,alpha}. The level is split
/// into alpha/3 for each binomial witness quantile and alpha/3 for the band.
struct BoundSpec {
  double alpha = 0.05;
  BandKind band = BandKind::simulated;
  int sims = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EffectiveSizes {
  int q_m = 0;  // q_{1-alpha/3}(lambda, m)
  int q_n = 0;  // q_{1-alpha/3}(lambda, n)
  int m_eff = 0;
  int n_eff = 0;
};

EffectiveSizes effective_sizes(double lambda_tilde, int m, int n, const BoundSpec& spec);

/// Q_{m,n,alpha}(., lambda_tilde) with the witness quantiles and the band
/// constant resolved once, so evaluating all z costs O(N).
///
///   z <= q_m           -> z
///   z >= m + n_eff     -> m
///   otherwise          -> q_m + band_value(band, z - q_m)
///
/// When m_eff * n_eff == 0 the middle region is filled with max(z, m).
/// An analytic band whose size falls below the guard is replaced by the
/// simulated band at the same level.
class BoundingFunction {
 public:
  BoundingFunction(double lambda_tilde, int m, int n, const BoundSpec& spec);
  /// Same, with the witness quantiles already resolved.
  BoundingFunction(int m, int n, const EffectiveSizes& sizes, const BoundSpec& spec);

  double operator()(long z) const;

  const EffectiveSizes& sizes() const { return sizes_; }
  bool has_band() const { return has_band_; }
  const BandConstant& band() const { return band_; }

 private:
  int m_;
  int n_;
  EffectiveSizes sizes_;
  bool has_band_ = false;
  BandConstant band_;
};

double q_bound(long z, double lambda_tilde, int m, int n, const BoundSpec& spec);

struct Violation {
  bool violated = false;
  int argmax_z = 0;     // z attaining sup_z [V_z - Q(z)]
  double excess = 0.0;  // that supremum
};

/// True iff some z has V_z > Q(z). Only the middle branch can be exceeded, so
/// only q_m < z < m + n_eff is scanned, stopping at the first excess.
bool exceeds(const CountingPath& path, const BoundingFunction& bound);

/// Whether the path leaves the envelope: sup_{z in J} [V_z - Q(z, lambda_tilde)] > 0.
Violation is_violated(const CountingPath& path, double lambda_tilde, const BoundSpec& spec);

}  // namespace hplb
