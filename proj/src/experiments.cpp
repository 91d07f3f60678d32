#include "hplb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hplb/distributions.hpp"
#include "hplb/errors.hpp"
#include "hplb/parallel.hpp"

namespace hplb {

namespace {

constexpr int kToyDim = 12;

Kernel1D unif(double a, double b) { return {Kernel1D::Kind::uniform, a, b}; }

// Mixture of 1-D uniforms, dropping zero-weight pieces.
Density uniform_mix(std::initializer_list<std::pair<double, Kernel1D>> parts) {
  std::vector<Density::Component> comps;
  for (const auto& [w, k] : parts) {
    if (w > 0.0) comps.push_back({w, {k}});
  }
  return Density(std::move(comps));
}

double p2_of(int N) { return 0.5 + std::pow(static_cast<double>(N), -1.5); }

double lambda_two(double p1, int N) { return p1 + (1.0 - p1) * (2.0 * p2_of(N) - 1.0); }

double toy_separation() { return 2.0 * normal_cdf(3.0 * std::sqrt(2.0) / 2.0) - 1.0; }

}  // namespace

std::string_view to_string(ExampleId id) {
  switch (id) {
    case ExampleId::zero: return "0";
    case ExampleId::one: return "1";
    case ExampleId::two: return "2";
    case ExampleId::toy: return "toy";
  }
  return "?";
}

ExampleId example_from_string(std::string_view name) {
  if (name == "0") return ExampleId::zero;
  if (name == "1") return ExampleId::one;
  if (name == "2") return ExampleId::two;
  if (name == "toy") return ExampleId::toy;
  throw ParameterError("unknown example '" + std::string(name) + "' (expected 0, 1, 2 or toy)");
}

double default_scale(ExampleId id) { return id == ExampleId::two ? 0.9 : 1.0; }

double ExampleSpec::leading_parameter() const {
  if (strength) return *strength;
  if (id == ExampleId::toy && !gamma) return 0.01;
  if (!gamma) throw ParameterError("example needs either gamma or an explicit strength");
  return c * std::pow(static_cast<double>(N), *gamma);
}

int ExampleSpec::m() const { return static_cast<int>(std::floor(balance * N)); }

void ExampleSpec::validate() const {
  if (N < 4) throw ParameterError("example: N must be at least 4");
  if (!(balance > 0.0 && balance < 1.0)) throw ParameterError("example: balance must lie in (0,1)");
  if (m() < 1 || n() < 1) throw ParameterError("example: both samples must be nonempty");
  if (!(c > 0.0)) throw ParameterError("example: scale constant c must be positive");
  if (gamma && !(*gamma > -1.0 && *gamma < 0.0)) {
    throw ParameterError("example: gamma must lie in (-1, 0)");
  }
  const double s = leading_parameter();
  const bool from_rate = !strength;
  const double upper = id == ExampleId::two ? 1.0 : 1.0 + 1e-15;
  if (!(s >= 0.0 && s < upper) || (from_rate && !(s > 0.0))) {
    throw ParameterError("example: derived parameter " + std::to_string(s) + " out of range");
  }
  if (id == ExampleId::one && from_rate && !(s < 1.0)) {
    throw ParameterError("example: delta must lie in (0,1)");
  }
}

MixtureModel example_model(const ExampleSpec& spec) {
  spec.validate();
  const double s = spec.leading_parameter();
  switch (spec.id) {
    case ExampleId::zero: {
      const double p = 0.5 * (1.0 + s);
      return {uniform_mix({{p, unif(-1, 0)}, {1 - p, unif(0, 1)}}),
              uniform_mix({{1 - p, unif(-1, 0)}, {p, unif(0, 1)}}), "example0", s};
    }
    case ExampleId::one:
      return {uniform_mix({{1 - s, unif(0, 1)}, {s, unif(1, 2)}}), Density::uniform(0, 1),
              "example1", s};
    case ExampleId::two: {
      const double p1 = s;
      const double p2 = p2_of(spec.N);
      return {uniform_mix({{p1, unif(-2, -1)},
                           {(1 - p1) * p2, unif(-1, 0)},
                           {(1 - p1) * (1 - p2), unif(0, 1)}}),
              uniform_mix({{p1, unif(1, 2)},
                           {(1 - p1) * p2, unif(0, 1)},
                           {(1 - p1) * (1 - p2), unif(-1, 0)}}),
              "example2", lambda_two(p1, spec.N)};
    }
    case ExampleId::toy: {
      const std::vector<double> zero(kToyDim, 0.0);
      std::vector<double> shifted(kToyDim, 0.0);
      shifted[0] = shifted[1] = 3.0;
      const Density p = Density::product_gaussian(zero, 1.0);
      const std::vector<Density> parts{p, Density::product_gaussian(shifted, 1.0)};
      const std::vector<double> weights{1.0 - s, s};
      return {p, s > 0.0 ? Density::mixture(weights, parts) : p, "toy", s * toy_separation()};
    }
  }
  throw InternalError("example_model: unknown id");
}

double example_true_lambda(const ExampleSpec& spec) {
  spec.validate();
  const double s = spec.leading_parameter();
  switch (spec.id) {
    case ExampleId::zero:
    case ExampleId::one: return s;
    case ExampleId::two: return lambda_two(s, spec.N);
    case ExampleId::toy: return s * toy_separation();
  }
  return 0.0;
}

GeneratedExample gen_example(const ExampleSpec& spec, RngStream& rng) {
  MixtureModel model = example_model(spec);
  const int m = spec.m();
  const int n = spec.n();
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  scores.reserve(static_cast<std::size_t>(spec.N));
  labels.reserve(static_cast<std::size_t>(spec.N));
  std::vector<double> x(static_cast<std::size_t>(model.p.dim()));
  for (int i = 0; i < spec.N; ++i) {
    const bool from_p = i < m;
    (from_p ? model.p : model.q).sample(rng, x);
    scores.push_back(bayes_projection(model, x));
    labels.push_back(from_p ? 0 : 1);
  }
  (void)n;
  const double lambda = example_true_lambda(spec);
  return {LabeledScores(std::move(scores), std::move(labels), rng.next_u64()), lambda,
          std::move(model)};
}

double run_estimator(Method method, const GeneratedExample& ex, const BoundSpec& bound) {
  switch (method) {
    case Method::c: return lambda_c(ex.data, bound.alpha).value;
    case Method::bayes: return lambda_bayes(ex.data, bound.alpha).value;
    case Method::adapt: return lambda_adapt(ex.data, bound).value;
    case Method::oracle_t: {
      if (ex.model.p.dim() != 1) throw ParameterError("oracle_t needs a one-dimensional model");
      auto rho = [&](double z) { return bayes_projection(ex.model, z); };
      const double F = projected_cdf(ex.model, Source::P, rho, 0.5);
      const double G = projected_cdf(ex.model, Source::Q, rho, 0.5);
      const double sigma = sigma_from_cdfs(F, G, ex.data.m(), ex.data.n());
      return lambda_oracle_t(ex.data, 0.5, sigma, bound.alpha).value;
    }
  }
  throw InternalError("run_estimator: unknown method");
}

double run_level_study(const ExampleSpec& spec, Method method, const BoundSpec& bound, int reps,
                       std::uint64_t root_seed) {
  if (reps < 100) throw ParameterError("level study needs at least 100 replications");
  spec.validate();
  bound.validate();
  std::vector<std::uint8_t> exceeded(static_cast<std::size_t>(reps), 0);
  parallel_for(exceeded.size(), [&](std::size_t r) {
    RngStream rng(root_seed, r);
    const GeneratedExample ex = gen_example(spec, rng);
    exceeded[r] = run_estimator(method, ex, bound) > ex.true_lambda ? 1 : 0;
  });
  const long hits = std::accumulate(exceeded.begin(), exceeded.end(), 0L);
  return static_cast<double>(hits) / reps;
}

PowerGridResult run_power_grid(ExampleId example, Method method, const std::vector<double>& gammas,
                               const std::vector<int>& ns, int reps, double epsilon,
                               const BoundSpec& bound, std::uint64_t root_seed,
                               std::optional<double> c) {
  if (gammas.empty() || ns.empty()) throw ParameterError("power grid: empty grid");
  if (reps < 1) throw ParameterError("power grid: reps must be positive");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ParameterError("power grid: epsilon must lie in (0,1]");
  bound.validate();

  PowerGridResult result;
  result.example = example;
  result.method = method;
  result.reps = reps;
  result.epsilon = epsilon;
  result.c = c.value_or(default_scale(example));

  std::vector<ExampleSpec> specs;
  for (int N : ns) {
    for (double g : gammas) {
      ExampleSpec spec{example, g, result.c, N, 0.5, std::nullopt};
      spec.validate();
      specs.push_back(spec);
    }
  }
  const std::size_t cells = specs.size();
  const auto R = static_cast<std::size_t>(reps);
  std::vector<double> values(cells * R);
  std::vector<std::uint8_t> detected(cells * R);
  parallel_for(cells * R, [&](std::size_t task) {
    const std::size_t cell = task / R;
    const std::size_t r = task % R;
    const std::uint64_t gi = cell % gammas.size();
    const std::uint64_t ni = cell / gammas.size();
    RngStream rng(root_seed, (gi << 48) ^ (ni << 32) ^ r);
    const GeneratedExample ex = gen_example(specs[cell], rng);
    values[task] = run_estimator(method, ex, bound);
    detected[task] = values[task] > (1.0 - epsilon) * ex.true_lambda ? 1 : 0;
  });
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double sum = 0.0;
    long hits = 0;
    for (std::size_t r = 0; r < R; ++r) {
      sum += values[cell * R + r];
      hits += detected[cell * R + r];
    }
    result.grid.push_back({*specs[cell].gamma, specs[cell].N, static_cast<double>(hits) / reps,
                           sum / reps});
  }
  fit_boundary_slope(result);
  return result;
}

double fit_boundary_slope(PowerGridResult& result) {
  result.boundary.clear();
  std::vector<int> ns;
  for (const auto& cell : result.grid) {
    if (std::find(ns.begin(), ns.end(), cell.N) == ns.end()) ns.push_back(cell.N);
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (int N : ns) {
    std::vector<PowerGridCell> row;
    for (const auto& cell : result.grid) {
      if (cell.N == N) row.push_back(cell);
    }
    // strongest signal first
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.gamma > b.gamma; });
    int last = -1;
    for (int k = 0; k < static_cast<int>(row.size()); ++k) {
      if (row[k].freq >= 0.5) last = k;
    }
    if (last < 0 || last + 1 >= static_cast<int>(row.size())) continue;
    const auto& a = row[last];
    const auto& b = row[last + 1];
    const double frac = (a.freq - 0.5) / (a.freq - b.freq);
    const double g = a.gamma + frac * (b.gamma - a.gamma);
    ExampleSpec spec{result.example, g, result.c, N, 0.5, std::nullopt};
    double lambda = 0.0;
    try {
      lambda = example_true_lambda(spec);
    } catch (const ParameterError&) {
      continue;
    }
    result.boundary.emplace_back(N, g);
    xs.push_back(std::log(static_cast<double>(N)));
    ys.push_back(std::log(lambda));
  }
  if (xs.size() < 2) {
    result.slope = std::numeric_limits<double>::quiet_NaN();
    return result.slope;
  }
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  result.slope = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  return result.slope;
}

SplitScanResult split_scan(const std::vector<OrderedObservation>& data,
                           const std::vector<double>& splits, const BoundSpec& bound) {
  bound.validate();
  for (std::size_t i = 1; i < splits.size(); ++i) {
    if (!(splits[i] > splits[i - 1])) throw ParameterError("split_scan: splits must be strictly increasing");
  }
  SplitScanResult out;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  scores.reserve(data.size());
  for (const auto& obs : data) scores.push_back(obs.score);
  for (std::size_t k = 0; k < splits.size(); ++k) {
    const double s = splits[k];
    labels.clear();
    int m = 0;
    for (const auto& obs : data) {
      const bool before = obs.t <= s;
      labels.push_back(before ? 0 : 1);
      m += before ? 1 : 0;
    }
    const int n = static_cast<int>(data.size()) - m;
    if (m < 2 || n < 2) {
      out.warnings.push_back("split " + std::to_string(s) + " skipped: sides of size " +
                             std::to_string(m) + " and " + std::to_string(n));
      continue;
    }
    const LabeledScores two(scores, labels, mix64(bound.seed ^ (0x5CA11ULL + k)));
    out.splits.push_back(s);
    out.bounds.push_back(lambda_adapt(two, bound));
    out.m_n.emplace_back(m, n);
  }
  return out;
}

std::vector<OrderedObservation> ordered_stream(const MixtureModel& model, int N, double s_star,
                                               RngStream& rng) {
  if (N < 1) throw ParameterError("ordered_stream: N must be positive");
  if (model.p.dim() != 1) throw ParameterError("ordered_stream: one-dimensional model required");
  std::vector<OrderedObservation> out(static_cast<std::size_t>(N));
  double x = 0.0;
  for (int i = 0; i < N; ++i) {
    const double t = (i + 0.5) / N;
    (t <= s_star ? model.p : model.q).sample(rng, std::span<double>(&x, 1));
    out[i] = {t, regression_projection(model, s_star, x)};
  }
  return out;
}

std::vector<std::vector<double>> pairwise_matrix(const MulticlassTable& table,
                                                 const BoundSpec& bound) {
  const int K = table.K;
  if (K < 2) throw ParameterError("pairwise_matrix: need at least two classes");
  if (table.labels.size() != table.probs.size()) throw ParameterError("pairwise_matrix: size mismatch");
  bound.validate();
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int label : table.labels) {
    if (label < 0 || label >= K) throw ParameterError("pairwise_matrix: label out of range");
    ++counts[label];
  }
  for (int k = 0; k < K; ++k) {
    if (counts[k] == 0) throw ParameterError("pairwise_matrix: class " + std::to_string(k) + " is empty");
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  std::vector<double> raw(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    for (std::size_t r = 0; r < table.labels.size(); ++r) {
      const int label = table.labels[r];
      if (label != i && label != j) continue;
      scores.push_back(table.probs[r][i] - table.probs[r][j]);
      labels.push_back(label == i ? 1 : 0);
    }
    const LabeledScores two(std::move(scores), std::move(labels), mix64(bound.seed ^ (0x9A1ULL + p)));
    raw[p] = lambda_adapt(two, bound).value;
  });
  std::vector<std::vector<double>> out(static_cast<std::size_t>(K), std::vector<double>(K, 0.0));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    out[i][j] = std::max(out[i][j], raw[p]);
    out[j][i] = std::max(out[j][i], raw[p]);
  }
  return out;
}

MulticlassTable multiclass_sample(const std::vector<Density>& classes, int per_class,
                                  RngStream& rng) {
  const int K = static_cast<int>(classes.size());
  if (K < 2 || per_class < 1) throw ParameterError("multiclass_sample: need K >= 2 and per_class >= 1");
  MulticlassTable table;
  table.K = K;
  std::vector<double> x(static_cast<std::size_t>(classes.front().dim()));
  for (int k = 0; k < K; ++k) {
    for (int r = 0; r < per_class; ++r) {
      classes[k].sample(rng, x);
      std::vector<double> p(static_cast<std::size_t>(K));
      double total = 0.0;
      for (int l = 0; l < K; ++l) total += (p[l] = classes[l].pdf(x));
      for (double& v : p) v = total > 0.0 ? v / total : 1.0 / K;
      table.labels.push_back(k);
      table.probs.push_back(std::move(p));
    }
  }
  return table;
}

}  // namespace hplb
