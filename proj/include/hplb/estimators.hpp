#pragma once

#include <optional>
#include <string_view>

#include "hplb/bounding.hpp"
#include "hplb/counting.hpp"

namespace hplb {

enum class Method { c, bayes, oracle_t, adapt };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);
std::string_view to_string(BandKind kind);
BandKind band_from_string(std::string_view name);

struct Diagnostics {
  int argmax_z = 0;    // witness of the last violated candidate, 0 if none
  int evaluations = 0; // number of lambda candidates checked
  BandKind band = BandKind::simulated;
};

/// A high-probability lower bound on TV(P, Q), clamped to [0, 1].
struct HPLBResult {
  double value = 0.0;
  Method method = Method::adapt;
  double alpha = 0.05;
  std::optional<Diagnostics> diagnostics;
};

/// Empirical in-class accuracies of the cutoff classifier 1{score > t}:
/// a0_hat counts label-0 scores <= t, a1_hat label-1 scores > t.
struct AccuracyPair {
  double a0_hat = 0.0;
  double a1_hat = 0.0;
  double t = 0.5;
};

AccuracyPair in_class_accuracies(const LabeledScores& data, double t);

/// Overall-accuracy bound at cutoff 1/2: 2A - 1 - 2 z_{1-alpha} sqrt(A(1-A)/N).
/// Scores must lie in [0, 1] (DomainError otherwise).
HPLBResult lambda_c(const LabeledScores& data, double alpha);

/// A0 + A1 - 1 - z_{1-alpha} sigma_hat at cutoff 1/2.
/// Scores must lie in [0, 1] (DomainError otherwise).
HPLBResult lambda_bayes(const LabeledScores& data, double alpha);

/// Fixed-cutoff bound F_m(t) - G_n(t) - z_{1-alpha} sigma_true, with
/// sigma_true the known standard deviation of F_m(t) - G_n(t).
HPLBResult lambda_oracle_t(const LabeledScores& data, double t, double sigma_true, double alpha);

enum class SearchMode {
  bisection,  // O(log N) candidates plus an 8-point downward safety scan
  exhaustive  // every grid candidate from 0 upwards: the exact infimum
};

/// inf{lambda on {k/(2N)} : the counting path stays below Q(., lambda)}.
HPLBResult lambda_adapt(const LabeledScores& data, const BoundSpec& spec,
                        SearchMode mode = SearchMode::exhaustive);
HPLBResult lambda_adapt(const CountingPath& path, const BoundSpec& spec,
                        SearchMode mode = SearchMode::exhaustive);

/// Dispatch on method; oracle_t is not available here (needs sigma_true).
HPLBResult estimate(Method method, const LabeledScores& data, const BoundSpec& spec);

}  // namespace hplb
