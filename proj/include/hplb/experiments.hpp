#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hplb/bounding.hpp"
#include "hplb/counting.hpp"
#include "hplb/estimators.hpp"
#include "hplb/mixtures.hpp"
#include "hplb/rng.hpp"

namespace hplb {

enum class ExampleId { zero, one, two, toy };

std::string_view to_string(ExampleId id);
ExampleId example_from_string(std::string_view name);

/// Parameters of one of the reference examples.
///
///   zero: P = p U[-1,0) + (1-p) U[0,1), Q mirrored;           lambda = 2p - 1
///   one : P = (1-delta) U[0,1) + delta U[1,2), Q = U[0,1);     lambda = delta
///   two : three-part mixture with p1 = c N^gamma and p2 = 1/2 + N^-1.5
///   toy : P = N(0, I_12), Q = (1-eps) P + eps N((3,3,0,...), I_12)
///
/// `strength` sets the leading parameter (2p-1, delta, p1 or eps) directly and
/// overrides c N^gamma. Zero is allowed and yields P = Q.
struct ExampleSpec {
  ExampleId id = ExampleId::one;
  std::optional<double> gamma;
  double c = 1.0;
  int N = 1000;
  double balance = 0.5;
  std::optional<double> strength;

  void validate() const;
  /// 2p-1, delta, p1 or eps.
  double leading_parameter() const;
  int m() const;
  int n() const { return N - m(); }
};

/// Default scale constant per example (0.9 for example two, 1 otherwise).
double default_scale(ExampleId id);

MixtureModel example_model(const ExampleSpec& spec);
double example_true_lambda(const ExampleSpec& spec);

struct GeneratedExample {
  LabeledScores data;
  double true_lambda;
  MixtureModel model;
};

/// m = floor(balance N) draws from P (label 0), n = N - m from Q (label 1),
/// each scored with the Bayes projection of the example model.
GeneratedExample gen_example(const ExampleSpec& spec, RngStream& rng);

/// Estimator applied inside the experiment drivers. oracle_t uses t = 1/2 and
/// the exact sigma(1/2) of the model (one-dimensional examples only).
double run_estimator(Method method, const GeneratedExample& ex, const BoundSpec& bound);

/// Frequency of lambda_hat > true lambda over reps replications. Replication r
/// draws from RngStream(root_seed, r).
double run_level_study(const ExampleSpec& spec, Method method, const BoundSpec& bound, int reps,
                       std::uint64_t root_seed);

struct PowerGridCell {
  double gamma = 0.0;
  int N = 0;
  double freq = 0.0;
  double mean_lambda = 0.0;
};

struct PowerGridResult {
  ExampleId example = ExampleId::one;
  Method method = Method::adapt;
  int reps = 0;
  double epsilon = 1.0;
  double c = 1.0;
  std::vector<PowerGridCell> grid;  // N-major, gammas in the order given
  double slope = 0.0;               // NaN when fewer than two rows are uncensored
  std::vector<std::pair<int, double>> boundary;  // (N, boundary gamma) per uncensored row
};

/// Detection frequency of {lambda_hat > (1 - epsilon) lambda_true} per (gamma, N).
/// The data of cell (i, j), replication r come from a stream keyed by
/// (root_seed, i, j, r) only, so different methods see identical samples.
PowerGridResult run_power_grid(ExampleId example, Method method, const std::vector<double>& gammas,
                               const std::vector<int>& ns, int reps, double epsilon,
                               const BoundSpec& bound, std::uint64_t root_seed,
                               std::optional<double> c = std::nullopt);

/// Per N: the weakest gamma whose frequency is still >= 1/2, linearly
/// interpolated towards the next gamma. Rows that never cross are censored.
/// Fills result.boundary and returns the least-squares slope of
/// log lambda_true(boundary gamma, N) against log N.
double fit_boundary_slope(PowerGridResult& result);

struct OrderedObservation {
  double t = 0.0;
  double score = 0.0;
};

struct SplitScanResult {
  std::vector<double> splits;
  std::vector<HPLBResult> bounds;
  std::vector<std::pair<int, int>> m_n;
  std::vector<std::string> warnings;
};

/// For each split s, observations with t <= s get label 0 and the rest label 1;
/// reports lambda_adapt on that two-sample problem. Splits leaving fewer than
/// two observations on a side are skipped with a warning.
SplitScanResult split_scan(const std::vector<OrderedObservation>& data,
                           const std::vector<double>& splits, const BoundSpec& bound);

/// Ordered stream of N points with t_i = (i + 1/2)/N, drawn from P for t <= s_star
/// and from Q afterwards, scored with the regression projection at s_star.
std::vector<OrderedObservation> ordered_stream(const MixtureModel& model, int N, double s_star,
                                               RngStream& rng);

struct MulticlassTable {
  int K = 0;
  std::vector<int> labels;                   // 0..K-1
  std::vector<std::vector<double>> probs;    // one K-vector per observation
};

/// Entry (i, j) is lambda_adapt on classes {j -> label 0, i -> label 1} with
/// score p_i - p_j; the matrix is then symmetrized by max. Diagonal is 0.
std::vector<std::vector<double>> pairwise_matrix(const MulticlassTable& table,
                                                 const BoundSpec& bound);

/// per_class draws from each class density, scored with the exact class
/// posteriors under equal priors.
MulticlassTable multiclass_sample(const std::vector<Density>& classes, int per_class,
                                  RngStream& rng);

}  // namespace hplb
