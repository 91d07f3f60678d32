// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hplb/bounding.hpp"
#include "hplb/distributions.hpp"
#include "hplb/estimators.hpp"
#include "hplb/experiments.hpp"
#include "hplb/mixtures.hpp"
#include "support/oracles.hpp"

using namespace hplb;

namespace tol {
constexpr double level_slack = 0.014;       // criterion 1: alpha + 0.014
constexpr double slope_half_width = 0.15;   // criteria 2, 3
constexpr double adapt_point_min = 0.8;     // criterion 2 at (gamma=-0.7, N=8000)
constexpr double bayes_point_max = 0.25;
constexpr double example_two_scale = 3.0;   // c in p1 = c N^gamma for criterion 2
constexpr double toy_bayes_zero = 0.90;     // criterion 4
constexpr double toy_adapt_positive = 0.50;
constexpr double toy_adapt_valid = 0.95;
constexpr double toy_band_slack = 0.0;
constexpr double witness_freq = 0.005;      // criterion 5
constexpr double test_level = 0.01;
constexpr double sigma_identity = 1e-12;    // criterion 6
constexpr double reconstruction = 1e-8;
constexpr double tv_identity = 1e-4;
constexpr double contraction = 1e-4;
constexpr double null_slack = 0.02;         // criterion 7
}  // namespace tol

namespace {

constexpr double kAlpha = 0.05;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = body();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %d: %s | %s | %.1fs\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
  failures += o.pass ? 0 : 1;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<double> kGammas{-0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9};
const std::vector<int> kNs{500, 1000, 2000, 4000, 8000, 16000};

BoundSpec analytic() {
  BoundSpec s;
  s.band = BandKind::analytic;
  return s;
}

Outcome level_guarantee() {
  const int reps = 1000;
  const double ceiling = kAlpha + tol::level_slack;
  bool ok = true;
  std::string detail;
  for (double lam : {0.0, 0.1, 0.3}) {
    const ExampleSpec spec{ExampleId::one, std::nullopt, 1.0, 600, 0.5, lam};
    struct Arm {
      const char* name;
      Method method;
      BandKind band;
    };
    for (const Arm& arm : {Arm{"c", Method::c, BandKind::simulated}, Arm{"bayes", Method::bayes, BandKind::simulated},
                           Arm{"adapt/analytic", Method::adapt, BandKind::analytic},
                           Arm{"adapt/simulated", Method::adapt, BandKind::simulated}}) {
      BoundSpec s;
      s.band = arm.band;
      const double f = run_level_study(spec, arm.method, s, reps, 1000 + static_cast<int>(lam * 10));
      ok = ok && f <= ceiling;
      detail += std::string(arm.name) + fmt("@%.1f=", lam) + fmt("%.3f ", f);
    }
  }
  return {ok, detail + fmt("(max %.3f)", ceiling)};
}

PowerGridResult grid(ExampleId id, Method m, double c) {
  return run_power_grid(id, m, kGammas, kNs, 100, 1.0, analytic(), 2024, c);
}

double cell(const PowerGridResult& r, double gamma, int N) {
  for (const auto& c : r.grid) {
    if (c.N == N && std::abs(c.gamma - gamma) < 1e-12) return c.freq;
  }
  return std::nan("");
}

Outcome rate_separation() {
  const auto adapt = grid(ExampleId::two, Method::adapt, tol::example_two_scale);
  const auto bayes = grid(ExampleId::two, Method::bayes, tol::example_two_scale);
  const double fa = cell(adapt, -0.7, 8000);
  const double fb = cell(bayes, -0.7, 8000);
  const bool ok = std::abs(adapt.slope + 1.0) <= tol::slope_half_width &&
                  std::abs(bayes.slope + 0.5) <= tol::slope_half_width && fa >= tol::adapt_point_min &&
                  fb <= tol::bayes_point_max;
  return {ok, fmt("adapt slope %.3f", adapt.slope) + fmt(" (target -1), bayes slope %.3f", bayes.slope) +
                  fmt(" (target -0.5), at (-0.7, 8000): adapt %.2f", fa) + fmt(", bayes %.2f", fb) +
                  fmt(", c=%.1f", tol::example_two_scale)};
}

Outcome oracle_rate() {
  const auto adapt = grid(ExampleId::one, Method::adapt, 1.0);
  const auto bayes = grid(ExampleId::one, Method::bayes, 1.0);
  const bool ok = std::abs(adapt.slope + 1.0) <= tol::slope_half_width &&
                  std::abs(bayes.slope + 1.0) <= tol::slope_half_width;
  return {ok, fmt("adapt slope %.3f", adapt.slope) + fmt(", bayes slope %.3f (target -1)", bayes.slope)};
}

Outcome toy_example() {
  const int seeds = 50;
  const ExampleSpec spec{ExampleId::toy, std::nullopt, 1.0, 20000, 0.5, 0.01};
  const double lambda = example_true_lambda(spec);
  int bayes_zero = 0;
  int adapt_pos = 0;
  int adapt_valid = 0;
  double mean_bayes = 0.0;
  double mean_adapt = 0.0;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(4242, static_cast<std::uint64_t>(s));
    const auto ex = gen_example(spec, rng);
    const double b = lambda_bayes(ex.data, kAlpha).value;
    const double a = lambda_adapt(ex.data, BoundSpec{}).value;
    bayes_zero += b == 0.0;
    adapt_pos += a > 0.0;
    adapt_valid += a <= lambda + tol::toy_band_slack;
    mean_bayes += b / seeds;
    mean_adapt += a / seeds;
  }
  const double fz = static_cast<double>(bayes_zero) / seeds;
  const double fp = static_cast<double>(adapt_pos) / seeds;
  const double fv = static_cast<double>(adapt_valid) / seeds;
  const bool ok = fz >= tol::toy_bayes_zero && fp >= tol::toy_adapt_positive && fv >= tol::toy_adapt_valid;
  return {ok, fmt("bayes=0 in %.2f", fz) + fmt(" (need %.2f)", tol::toy_bayes_zero) +
                  fmt(", adapt>0 in %.2f", fp) + fmt(", adapt<=lambda in %.2f", fv) +
                  fmt(", mean bayes %.5f", mean_bayes) + fmt(", mean adapt %.5f", mean_adapt) +
                  fmt(", lambda %.5f", lambda)};
}

Outcome witness_machinery() {
  const MixtureModel model{Density::gaussian(0.0, 0.5), Density::gaussian(1.0, 0.75), "gauss", std::nullopt};
  const double lambda = tv_exact(model);
  const int n = 100000;
  RngStream rng(55, 0);
  const auto draws = sample_with_witness(model, Source::P, n, rng);
  std::vector<double> wit;
  std::vector<double> common;
  for (const auto& d : draws) (d.w ? wit : common).push_back(d.x[0]);
  const double freq = static_cast<double>(wit.size()) / n;

  // conditional CDFs by quadrature, tabulated
  auto tabulate = [&](const std::function<double(double)>& density, double mass) {
    std::vector<double> xs;
    std::vector<double> cdf;
    double acc = 0.0;
    double prev = -4.0;
    const double h = 0.002;
    for (double x = -4.0; x <= 5.0 + 1e-12; x += h) {
      if (x > prev) acc += integrate(density, prev, x, 1e-12);
      xs.push_back(x);
      cdf.push_back(acc / mass);
      prev = x;
    }
    return [xs, cdf, h](double x) {
      if (x <= xs.front()) return 0.0;
      if (x >= xs.back()) return 1.0;
      const auto i = static_cast<std::size_t>((x - xs.front()) / h);
      const std::size_t j = std::min(i + 1, cdf.size() - 1);
      return cdf[i] + (x - xs[i]) / h * (cdf[j] - cdf[i]);
    };
  };
  const auto h_p = tabulate([&](double x) { return std::max(model.p.pdf(x) - model.q.pdf(x), 0.0); }, lambda);
  const auto h_pq = tabulate([&](double x) { return std::min(model.p.pdf(x), model.q.pdf(x)); }, 1 - lambda);
  const double ks_w = oracle::ks_statistic(wit, h_p);
  const double ks_c = oracle::ks_statistic(common, h_pq);
  const double crit_w = oracle::ks_critical(static_cast<long>(wit.size()), tol::test_level);
  const double crit_c = oracle::ks_critical(static_cast<long>(common.size()), tol::test_level);

  // bounding operation on example-one samples
  const auto ex1 = example_model({ExampleId::one, std::nullopt, 1.0, 100, 0.5, 0.3});
  const int m = 60;
  const int nn = 60;
  const int bar_p = 32;
  const int bar_q = 32;
  const int zc = 60;
  const int reps = 1000;
  int dominated = 0;
  std::vector<double> observed(m + 1, 0.0);
  for (int r = 0; r < reps; ++r) {
    RngStream g(56, static_cast<std::uint64_t>(r));
    auto s = sample_with_witness(ex1, Source::P, m, g);
    const auto q = sample_with_witness(ex1, Source::Q, nn, g);
    s.insert(s.end(), q.begin(), q.end());
    std::stable_sort(s.begin(), s.end(), [&](const auto& a, const auto& b) {
      const double ra = bayes_projection(ex1, a.x[0]);
      const double rb = bayes_projection(ex1, b.x[0]);
      return ra < rb || (ra == rb && a.x[0] < b.x[0]);
    });
    const auto v = counting_path_of(s);
    const auto vbar = bounding_operation(s, bar_p, bar_q, g);
    bool ok = true;
    for (int z = 0; z <= m + nn; ++z) ok = ok && vbar.at(z) >= v.at(z);
    dominated += ok;
    observed[vbar.at(zc) - bar_p] += 1;
  }
  std::vector<double> expected(m + 1);
  for (int k = 0; k <= m; ++k) {
    expected[k] = reps * oracle::hypergeom_pmf(k, zc - bar_p, m + nn - bar_p - bar_q, m - bar_p);
  }
  const double pval = oracle::chi_square_pvalue(observed, expected);

  const bool ok = std::abs(freq - 0.590) <= tol::witness_freq && ks_w < crit_w && ks_c < crit_c &&
                  dominated == reps && pval > tol::test_level;
  return {ok, fmt("P(w=1)=%.4f", freq) + fmt(", KS w=1 %.4f", ks_w) + fmt("/%.4f", crit_w) +
                  fmt(", KS w=0 %.4f", ks_c) + fmt("/%.4f", crit_c) + ", dominance " +
                  std::to_string(dominated) + "/" + std::to_string(reps) + fmt(", chi-square p=%.3f", pval)};
}

Outcome identities() {
  std::vector<MixtureModel> models;
  models.push_back(example_model({ExampleId::zero, std::nullopt, 1.0, 100, 0.5, 0.4}));
  models.push_back(example_model({ExampleId::one, std::nullopt, 1.0, 100, 0.5, 0.3}));
  models.push_back(example_model({ExampleId::two, std::nullopt, 1.0, 100, 0.5, 0.1}));
  models.push_back({Density::gaussian(0.0, 0.5), Density::gaussian(1.0, 0.75), "gauss", std::nullopt});

  double sigma_gap = 0.0;
  RngStream rng(66, 0);
  for (int i = 0; i < 100; ++i) {
    const auto& model = models[i % models.size()];
    const double t = rng.uniform();
    const auto rho = [&](double x) { return bayes_projection(model, x); };
    const double F = projected_cdf(model, Source::P, rho, t);
    const double G = projected_cdf(model, Source::Q, rho, t);
    const int m = 10 + static_cast<int>(rng.below(1000));
    const int n = 10 + static_cast<int>(rng.below(1000));
    sigma_gap = std::max(sigma_gap, std::abs(sigma_from_cdfs(F, G, m, n) - sigma_from_accuracies(F, 1 - G, m, n)));
  }

  double recon_gap = 0.0;
  double sym_gap = 0.0;
  double contraction_excess = -1.0;
  double bayes_gap = 0.0;
  for (auto model : models) {
    model.closed_form_tv.reset();
    const auto d = decompose(model);
    const auto [plo, phi] = model.p.effective_support();
    const auto [qlo, qhi] = model.q.effective_support();
    for (int i = 0; i < 1000; ++i) {
      const double x = std::min(plo, qlo) + (std::max(phi, qhi) - std::min(plo, qlo)) * (i + 0.5) / 1000;
      const double common = d.h_pq ? (1 - d.lambda) * d.h_pq->pdf(x) : 0.0;
      recon_gap = std::max(recon_gap, std::abs((d.h_p ? d.lambda * d.h_p->pdf(x) : 0.0) + common - model.p.pdf(x)));
      recon_gap = std::max(recon_gap, std::abs((d.h_q ? d.lambda * d.h_q->pdf(x) : 0.0) + common - model.q.pdf(x)));
    }
    const double tv = tv_exact(model);
    sym_gap = std::max(sym_gap, std::abs(tv - tv_exact({model.q, model.p, "", std::nullopt})));
    const std::vector<double> edge{0.5};
    for (auto proj : std::vector<std::function<double(double)>>{
             [](double x) { return x; }, [](double x) { return std::cos(2 * x); },
             [](double x) { return x * x; }, [](double x) { return std::round(3 * x); },
             [&](double x) { return bayes_projection(model, x); }}) {
      contraction_excess = std::max(contraction_excess, pushforward_tv(model, proj, edge) - tv);
    }
    bayes_gap = std::max(bayes_gap, std::abs(pushforward_tv(model, [&](double x) { return bayes_projection(model, x); }, edge) - tv));
    bayes_gap = std::max(bayes_gap, std::abs(pushforward_tv(model, [&](double x) { return regression_projection(model, 0.5, x); }, edge) - tv));
  }
  const bool ok = sigma_gap <= tol::sigma_identity && recon_gap <= tol::reconstruction &&
                  sym_gap <= tol::tv_identity && contraction_excess <= tol::contraction &&
                  bayes_gap <= tol::tv_identity;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "sigma gap %.1e, reconstruction %.1e, symmetry %.1e, contraction excess %.1e, bayes TV gap %.1e",
                sigma_gap, recon_gap, sym_gap, contraction_excess, bayes_gap);
  return {ok, buf};
}

Outcome null_band() {
  const int reps = 2000;
  bool ok = true;
  std::string detail;
  for (int m : {50, 200}) {
    for (BandKind kind : {BandKind::analytic, BandKind::simulated}) {
      BoundSpec s;
      s.band = kind;
      int hits = 0;
      for (int r = 0; r < reps; ++r) {
        RngStream rng(77, static_cast<std::uint64_t>(r) + 100000ULL * m);
        hits += is_violated(simulate_null_path(m, m, rng), 0.0, s).violated;
      }
      const double f = static_cast<double>(hits) / reps;
      ok = ok && f <= kAlpha + tol::null_slack;
      detail += std::string(to_string(kind)) + "@" + std::to_string(m) + fmt("=%.4f ", f);
    }
  }
  return {ok, detail + fmt("(max %.2f)", kAlpha + tol::null_slack)};
}

}  // namespace

int main() {
  report(1, "level guarantee on example one", level_guarantee);
  report(2, "rate separation on example two", rate_separation);
  report(3, "oracle rate on example one", oracle_rate);
  report(4, "toy example", toy_example);
  report(5, "witness machinery", witness_machinery);
  report(6, "identities", identities);
  report(7, "null band calibration", null_band);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures;
}
