#include "hplb/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <string>

#include "hplb/distributions.hpp"
#include "hplb/errors.hpp"

namespace hplb {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::c: return "c";
    case Method::bayes: return "bayes";
    case Method::oracle_t: return "oracle_t";
    case Method::adapt: return "adapt";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "c") return Method::c;
  if (name == "bayes") return Method::bayes;
  if (name == "oracle_t") return Method::oracle_t;
  if (name == "adapt") return Method::adapt;
  throw ParameterError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(BandKind kind) {
  return kind == BandKind::analytic ? "analytic" : "simulated";
}

BandKind band_from_string(std::string_view name) {
  if (name == "analytic") return BandKind::analytic;
  if (name == "simulated") return BandKind::simulated;
  throw ParameterError("unknown band kind '" + std::string(name) + "'");
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0,1)");
}

void require_probability_scores(const LabeledScores& data) {
  for (double s : data.scores()) {
    if (s < 0.0 || s > 1.0) {
      throw DomainError("scores must lie in [0,1] for the cutoff-1/2 estimators");
    }
  }
}

}  // namespace

AccuracyPair in_class_accuracies(const LabeledScores& data, double t) {
  const auto scores = data.scores();
  const auto labels = data.labels();
  long correct0 = 0;
  long correct1 = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 0) {
      correct0 += scores[i] <= t ? 1 : 0;
    } else {
      correct1 += scores[i] > t ? 1 : 0;
    }
  }
  return {static_cast<double>(correct0) / data.m(), static_cast<double>(correct1) / data.n(), t};
}

HPLBResult lambda_c(const LabeledScores& data, double alpha) {
  check_alpha(alpha);
  require_probability_scores(data);
  const AccuracyPair acc = in_class_accuracies(data, 0.5);
  const double N = data.size();
  const double overall = (acc.a0_hat * data.m() + acc.a1_hat * data.n()) / N;
  const double penalty = 2.0 * normal_quantile(1.0 - alpha) * std::sqrt(overall * (1.0 - overall) / N);
  return {clamp01(2.0 * overall - 1.0 - penalty), Method::c, alpha, std::nullopt};
}

HPLBResult lambda_bayes(const LabeledScores& data, double alpha) {
  check_alpha(alpha);
  require_probability_scores(data);
  const AccuracyPair acc = in_class_accuracies(data, 0.5);
  const double sigma = std::sqrt(acc.a0_hat * (1.0 - acc.a0_hat) / data.m() +
                                 acc.a1_hat * (1.0 - acc.a1_hat) / data.n());
  const double raw = acc.a0_hat + acc.a1_hat - 1.0 - normal_quantile(1.0 - alpha) * sigma;
  return {clamp01(raw), Method::bayes, alpha, std::nullopt};
}

HPLBResult lambda_oracle_t(const LabeledScores& data, double t, double sigma_true, double alpha) {
  check_alpha(alpha);
  if (!(sigma_true >= 0.0)) throw ParameterError("lambda_oracle_t: sigma_true must be nonnegative");
  const AccuracyPair acc = in_class_accuracies(data, t);
  // F_m(t) = a0_hat and G_n(t) = 1 - a1_hat
  const double gap = acc.a0_hat - (1.0 - acc.a1_hat);
  return {clamp01(gap - normal_quantile(1.0 - alpha) * sigma_true), Method::oracle_t, alpha,
          std::nullopt};
}

HPLBResult lambda_adapt(const LabeledScores& data, const BoundSpec& spec, SearchMode mode) {
  return lambda_adapt(build_counting_path(data), spec, mode);
}

HPLBResult lambda_adapt(const CountingPath& path, const BoundSpec& spec, SearchMode mode) {
  spec.validate();
  const long grid = 2L * path.size();  // candidates k/(2N), k = 0..2N
  Diagnostics diag;
  diag.band = spec.band;

  // Candidates sharing both witness quantiles share the whole envelope.
  std::optional<std::pair<int, int>> last_key;
  bool last_result = false;
  auto violated = [&](long k) {
    const EffectiveSizes sizes = effective_sizes(static_cast<double>(k) / grid, path.m, path.n, spec);
    const std::pair<int, int> key{sizes.q_m, sizes.q_n};
    if (last_key && *last_key == key) return last_result;
    ++diag.evaluations;
    last_key = key;
    last_result = exceeds(path, BoundingFunction(path.m, path.n, sizes, spec));
    return last_result;
  };

  long answer = -1;
  if (mode == SearchMode::exhaustive || !violated(0)) {
    for (long k = 0; k <= grid; ++k) {
      if (!violated(k)) {
        answer = k;
        break;
      }
    }
  } else {
    long lo = 0;      // violated
    long hi = grid;   // never violated: Q(., 1) dominates every path
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      (violated(mid) ? lo : hi) = mid;
    }
    answer = hi;
    for (long k = std::max(0L, hi - 8); k < hi; ++k) {
      if (k != lo && !violated(k)) {
        answer = k;
        break;
      }
    }
  }
  if (answer < 0) throw InternalError("lambda_adapt: no violation-free candidate in [0,1]");
  if (answer > 0) {
    diag.argmax_z = is_violated(path, static_cast<double>(answer - 1) / grid, spec).argmax_z;
  }
  return {clamp01(static_cast<double>(answer) / grid), Method::adapt, spec.alpha, diag};
}

HPLBResult estimate(Method method, const LabeledScores& data, const BoundSpec& spec) {
  switch (method) {
    case Method::c: return lambda_c(data, spec.alpha);
    case Method::bayes: return lambda_bayes(data, spec.alpha);
    case Method::adapt: return lambda_adapt(data, spec);
    case Method::oracle_t:
      throw ParameterError("oracle_t needs the true standard deviation; use lambda_oracle_t");
  }
  throw InternalError("estimate: unhandled method");
}

}  // namespace hplb
