#include "hplb/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <tuple>

#include "hplb/distributions.hpp"
#include "hplb/errors.hpp"

namespace hplb {

LabeledScores::LabeledScores(std::vector<double> scores, std::vector<std::uint8_t> labels,
                             std::uint64_t tie_seed)
    : scores_(std::move(scores)), labels_(std::move(labels)), tie_seed_(tie_seed) {
  if (scores_.size() != labels_.size()) {
    throw ParameterError("LabeledScores: scores and labels differ in length");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] > 1) {
      std::ostringstream os;
      os << "LabeledScores: label at index " << i << " is not 0/1";
      throw ParameterError(os.str());
    }
    if (!std::isfinite(scores_[i])) {
      std::ostringstream os;
      os << "LabeledScores: non-finite score at index " << i;
      throw ParameterError(os.str());
    }
    (labels_[i] == 0 ? m_ : n_) += 1;
  }
  if (m_ < 1 || n_ < 1) throw ParameterError("LabeledScores: both classes must be nonempty");
}

void CountingPath::check_invariants() const {
  const int N = size();
  if (static_cast<int>(v.size()) != N + 1 || v.front() != 0 || v.back() != m) {
    throw InternalError("CountingPath: malformed endpoints");
  }
  for (int z = 1; z <= N; ++z) {
    const int step = v[z] - v[z - 1];
    if (step != 0 && step != 1) throw InternalError("CountingPath: step outside {0,1}");
    if (v[z] > std::min(z, m) || v[z] < z - n) throw InternalError("CountingPath: value out of range");
  }
}

CountingPath build_counting_path(const LabeledScores& data) {
  const auto scores = data.scores();
  const auto labels = data.labels();
  const std::size_t N = scores.size();

  RngStream rng(data.tie_seed(), 0x7469655F62726B);  // "tie_brk"
  std::vector<std::uint64_t> tie_key(N);
  for (auto& k : tie_key) k = rng.next_u64();

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    if (tie_key[a] != tie_key[b]) return tie_key[a] < tie_key[b];
    return a < b;
  });

  CountingPath path;
  path.m = data.m();
  path.n = data.n();
  path.v.resize(N + 1);
  path.v[0] = 0;
  for (std::size_t z = 1; z <= N; ++z) {
    path.v[z] = path.v[z - 1] + (labels[order[z - 1]] == 0 ? 1 : 0);
  }
  return path;
}

double w_scale(long z, long m, long n) {
  const double N = static_cast<double>(m + n);
  if (N < 2) throw ParameterError("w_scale: need m + n >= 2");
  if (z < 0 || z > m + n) throw ParameterError("w_scale: z outside [0, N]");
  const double var = (m / N) * (n / N) * ((N - z) / (N - 1.0)) * static_cast<double>(z);
  return std::sqrt(std::max(var, 0.0));
}

double beta_threshold(double alpha, long m_eff) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("beta_threshold: alpha must lie in (0,1)");
  if (m_eff < 8) throw DomainError("beta_threshold: m_eff < 8; use the simulated band");
  const double L = std::log(std::log(static_cast<double>(m_eff)));
  const double x_alpha = -std::log(-std::log1p(-alpha) / 2.0);
  const double root = std::sqrt(2.0 * L);
  return root + (std::log(L) - std::log(std::numbers::pi) + 2.0 * x_alpha) / (2.0 * root);
}

BandConstant analytic_band(double alpha, int m_eff, int n_eff) {
  if (m_eff < 1 || n_eff < 1) throw ParameterError("analytic_band: sizes must be positive");
  BandConstant band;
  band.kind = BandKind::analytic;
  band.c = beta_threshold(alpha, std::min(m_eff, n_eff));
  band.m_eff = m_eff;
  band.n_eff = n_eff;
  band.alpha = alpha;
  band.sims = 0;
  return band;
}

CountingPath simulate_null_path(int m, int n, RngStream& rng) {
  if (m < 0 || n < 0 || m + n < 1) throw ParameterError("simulate_null_path: invalid sizes");
  CountingPath path;
  path.m = m;
  path.n = n;
  const int N = m + n;
  path.v.resize(static_cast<std::size_t>(N) + 1);
  path.v[0] = 0;
  long succ = m;
  long pop = N;
  for (int z = 1; z <= N; ++z) {
    const int drawn = hypergeom_step_draw(rng, succ, pop);
    succ -= drawn;
    --pop;
    path.v[z] = path.v[z - 1] + drawn;
  }
  return path;
}

double normalized_sup(const CountingPath& path) {
  const int N = path.size();
  const double frac = static_cast<double>(path.m) / N;
  double best = -std::numeric_limits<double>::infinity();
  for (int z = 1; z <= N - 1; ++z) {
    const double w = w_scale(z, path.m, path.n);
    if (w <= 0.0) continue;
    best = std::max(best, (path.at(z) - z * frac) / w);
  }
  return best;
}

BandConstant simulate_null_sup_quantile(double alpha, int m_eff, int n_eff, int sims,
                                        RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("simulated band: alpha must lie in (0,1)");
  if (m_eff < 1 || n_eff < 1) throw ParameterError("simulated band: sizes must be positive");
  if (sims < 100) throw ParameterError("simulated band: need at least 100 simulations");

  std::vector<double> stats(static_cast<std::size_t>(sims));
  for (auto& t : stats) {
    const CountingPath path = simulate_null_path(m_eff, n_eff, rng);
    t = normalized_sup(path);
  }
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * sims));
  rank = std::clamp<std::size_t>(rank, 1, stats.size());
  std::nth_element(stats.begin(), stats.begin() + static_cast<long>(rank - 1), stats.end());

  BandConstant band;
  band.kind = BandKind::simulated;
  band.c = stats[rank - 1];
  band.m_eff = m_eff;
  band.n_eff = n_eff;
  band.alpha = alpha;
  band.sims = sims;
  return band;
}

namespace {

using BandKey = std::tuple<int, int, double, int, std::uint64_t>;

struct BandCache {
  std::mutex mutex;
  std::map<BandKey, BandConstant> entries;
};

BandCache& band_cache() {
  static BandCache cache;
  return cache;
}

}  // namespace

BandConstant cached_simulated_band(double alpha, int m_eff, int n_eff, int sims,
                                   std::uint64_t seed) {
  const BandKey key{m_eff, n_eff, alpha, sims, seed};
  auto& cache = band_cache();
  {
    std::lock_guard lock(cache.mutex);
    if (auto it = cache.entries.find(key); it != cache.entries.end()) return it->second;
  }
  const std::uint64_t stream =
      mix64((static_cast<std::uint64_t>(m_eff) << 32) ^ static_cast<std::uint64_t>(n_eff));
  RngStream rng(seed, stream);
  const BandConstant band = simulate_null_sup_quantile(alpha, m_eff, n_eff, sims, rng);
  std::lock_guard lock(cache.mutex);
  cache.entries.emplace(key, band);
  return band;
}

std::size_t simulated_band_cache_size() {
  auto& cache = band_cache();
  std::lock_guard lock(cache.mutex);
  return cache.entries.size();
}

double band_value(const BandConstant& band, long z) {
  const long N = static_cast<long>(band.m_eff) + band.n_eff;
  if (z < 1 || z > N - 1) throw ParameterError("band_value: z outside {1, ..., N-1}");
  return static_cast<double>(z) * band.m_eff / static_cast<double>(N) +
         band.c * w_scale(z, band.m_eff, band.n_eff);
}

}  // namespace hplb
