#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hplb/rng.hpp"

namespace hplb {

/// Two-sample dataset of projection scores. Label 0 marks the first sample
/// (size m, drawn from P), label 1 the second (size n, drawn from Q).
class LabeledScores {
 public:
  LabeledScores(std::vector<double> scores, std::vector<std::uint8_t> labels,
                std::uint64_t tie_seed = 0);

  std::span<const double> scores() const { return scores_; }
  std::span<const std::uint8_t> labels() const { return labels_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int size() const { return m_ + n_; }
  std::uint64_t tie_seed() const { return tie_seed_; }

 private:
  std::vector<double> scores_;
  std::vector<std::uint8_t> labels_;
  int m_ = 0;
  int n_ = 0;
  std::uint64_t tie_seed_ = 0;
};

/// z -> V_{m,z}: the number of label-0 observations among the z smallest
/// scores. Stored for z = 0..N with V_0 = 0 and V_N = m; the process is
/// indexed by J = {1, ..., N-1}.
struct CountingPath {
  std::vector<int> v;
  int m = 0;
  int n = 0;

  int size() const { return m + n; }
  int at(int z) const { return v[static_cast<std::size_t>(z)]; }

  /// Throws InternalError unless the unit-step and range invariants hold.
  void check_invariants() const;
};

enum class BandKind { analytic, simulated };

/// Threshold c of a simultaneous upper band for the null hypergeometric
/// process of sizes (m_eff, n_eff): z*m/N + c*w(z).
struct BandConstant {
  BandKind kind = BandKind::analytic;
  double c = 0.0;
  int m_eff = 1;
  int n_eff = 1;
  double alpha = 0.05;
  int sims = 0;
};

/// Sorts by score; ties are broken by a uniform permutation seeded with
/// data.tie_seed(), which keeps the null law hypergeometric.
CountingPath build_counting_path(const LabeledScores& data);

/// Standard deviation of Hypergeometric(z, m+n, m).
double w_scale(long z, long m, long n);

/// Finner-type asymptotic threshold. Requires m_eff >= 8 (DomainError otherwise).
double beta_threshold(double alpha, long m_eff);

/// Analytic band at level alpha. The size argument of the threshold is
/// min(m_eff, n_eff). Throws DomainError when that is below 8.
BandConstant analytic_band(double alpha, int m_eff, int n_eff);

/// Null path of sizes (m, n) drawn by sequential urn steps.
CountingPath simulate_null_path(int m, int n, RngStream& rng);

/// Normalized sup statistic max_z (V_z - z m/N) / w(z, m, n) over 1 <= z <= N-1.
double normalized_sup(const CountingPath& path);

/// Empirical ceil((1-alpha)*sims)-th order statistic of the normalized sup
/// statistic over sims null paths.
BandConstant simulate_null_sup_quantile(double alpha, int m_eff, int n_eff, int sims,
                                        RngStream& rng);

/// Memoized simulated band keyed by (m_eff, n_eff, alpha, sims, seed). The
/// simulation stream is derived from (seed, m_eff, n_eff), so the result does
/// not depend on call order. Safe to call from several threads.
BandConstant cached_simulated_band(double alpha, int m_eff, int n_eff, int sims,
                                   std::uint64_t seed);

/// Number of entries currently memoized.
std::size_t simulated_band_cache_size();

/// z*m_eff/(m_eff+n_eff) + c*w(z, m_eff, n_eff) for 1 <= z <= m_eff+n_eff-1.
double band_value(const BandConstant& band, long z);

}  // namespace hplb
