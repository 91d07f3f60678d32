#pragma once

#include <cstdint>

#include "hplb/rng.hpp"

namespace hplb {

struct BinomialParams {
  double p = 0.0;  // success probability in [0, 1]
  int m = 0;       // number of trials

  void validate() const;
};

struct HypergeomParams {
  int z = 0;  // draws
  int N = 1;  // population
  int m = 0;  // successes in the population

  void validate() const;
};

/// P(X <= k) for X ~ Binomial(p, m), by cumulative summation of the PMF.
/// Direct recursion for m <= 10^4 when (1-p)^m is representable; otherwise
/// the recursion runs in log space.
double binom_cdf(long k, const BinomialParams& params);

/// inf{k in {0..m} : binom_cdf(k) >= alpha}. alpha must lie in (0, 1).
int binom_quantile(double alpha, const BinomialParams& params);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (|error| <= 1e-9). alpha must lie in (0, 1).
double normal_quantile(double alpha);

/// One urn step: returns 1 with probability remaining_successes/remaining_population.
/// Composing z steps, decrementing both counts as balls are removed, yields a
/// Hypergeometric(z, N, m) count.
int hypergeom_step_draw(RngStream& rng, long remaining_successes, long remaining_population);

/// Hypergeometric(z, N, m) PMF at k, via log-gamma.
double hypergeom_pmf(int k, const HypergeomParams& params);

}  // namespace hplb
