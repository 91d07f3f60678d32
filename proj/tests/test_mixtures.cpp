#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hplb/distributions.hpp"
#include "hplb/errors.hpp"
#include "hplb/experiments.hpp"
#include "hplb/mixtures.hpp"
#include "support/oracles.hpp"

using namespace hplb;

namespace {

MixtureModel witness_model() {
  return {Density::gaussian(0.0, 0.5), Density::gaussian(1.0, 0.75), "gauss", std::nullopt};
}

MixtureModel example0(double p) {
  ExampleSpec s{ExampleId::zero, std::nullopt, 1.0, 100, 0.5, 2 * p - 1};
  return example_model(s);
}

std::vector<MixtureModel> one_dim_models() {
  std::vector<MixtureModel> out;
  out.push_back(example0(0.7));
  out.push_back(example_model({ExampleId::one, std::nullopt, 1.0, 100, 0.5, 0.3}));
  out.push_back(example_model({ExampleId::two, std::nullopt, 1.0, 100, 0.5, 0.1}));
  out.push_back(witness_model());
  return out;
}

MixtureModel without_closed_form(MixtureModel m) {
  m.closed_form_tv.reset();
  return m;
}

MixtureModel swapped(const MixtureModel& m) { return {m.q, m.p, m.label, m.closed_form_tv}; }

}  // namespace

TEST_CASE("density construction checks normalization") {
  CHECK_NOTHROW(Density::uniform(0, 2));
  CHECK_THROWS_AS(Density({{0.5, {{Kernel1D::Kind::uniform, 0, 1}}}}), ParameterError);
  CHECK_THROWS_AS(Density::uniform(1, 1), ParameterError);
  const std::vector<double> breaks{0, 1, 3};
  const std::vector<double> heights{0.5, 0.25};
  const Density pw = Density::piecewise_uniform(breaks, heights);
  CHECK(pw.pdf(0.5) == doctest::Approx(0.5));
  CHECK(pw.pdf(2.0) == doctest::Approx(0.25));
  CHECK(pw.cdf(1.0) == doctest::Approx(0.5));
  const std::vector<double> bad{0.5, 0.5};
  CHECK_THROWS_AS(Density::piecewise_uniform(breaks, bad), ParameterError);
}

TEST_CASE("tv_exact examples") {
  const MixtureModel same{Density::gaussian(0, 1), Density::gaussian(0, 1), "same", std::nullopt};
  CHECK(tv_exact(same) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(tv_exact(without_closed_form(example0(0.7))) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(std::abs(tv_exact(witness_model()) - 0.590) <= 0.001);
  CHECK(std::abs(tv_exact(witness_model()) - 0.5901137) < 1e-6);
  const MixtureModel shifted{Density::gaussian(0, 1), Density::gaussian(1.5, 1), "", std::nullopt};
  CHECK(tv_exact(shifted) == doctest::Approx(2 * oracle::normal_cdf(0.75) - 1).epsilon(1e-7));
}

TEST_CASE("tv_exact symmetry and closed forms") {
  for (const auto& m : one_dim_models()) {
    const auto plain = without_closed_form(m);
    CHECK(tv_exact(plain) == doctest::Approx(tv_exact(swapped(plain))).epsilon(1e-9));
    if (m.closed_form_tv) CHECK(tv_exact(plain) == doctest::Approx(*m.closed_form_tv).epsilon(1e-8));
  }
  const auto toy = example_model({ExampleId::toy, std::nullopt, 1.0, 100, 0.5, 0.01});
  CHECK(std::abs(tv_exact(toy) - 0.009661051) < 1e-8);
  std::vector<double> mu(12, 0.0);
  mu[0] = mu[1] = 3.0;
  const MixtureModel pair{Density::product_gaussian(std::vector<double>(12, 0.0), 1.0),
                          Density::product_gaussian(mu, 1.0), "", std::nullopt};
  CHECK(tv_exact(pair) == doctest::Approx(2 * oracle::normal_cdf(3 * std::sqrt(2.0) / 2) - 1).epsilon(1e-12));
}

TEST_CASE("decompose") {
  const MixtureModel disjoint{Density::uniform(0, 1), Density::uniform(1, 2), "", std::nullopt};
  const auto d = decompose(disjoint);
  CHECK(d.lambda == doctest::Approx(1.0));
  CHECK_FALSE(d.h_pq);
  REQUIRE(d.h_p);
  CHECK(d.h_p->pdf(0.5) == doctest::Approx(1.0));
  CHECK(d.h_q->pdf(1.5) == doctest::Approx(1.0));

  const MixtureModel same{Density::uniform(0, 1), Density::uniform(0, 1), "", std::nullopt};
  const auto e = decompose(same);
  CHECK(e.lambda == 0.0);
  CHECK_FALSE(e.h_p);
  CHECK_FALSE(e.h_q);
  REQUIRE(e.h_pq);
  CHECK(e.h_pq->pdf(0.3) == doctest::Approx(1.0));

  const auto two = decompose(example_model({ExampleId::two, std::nullopt, 1.0, 100, 0.5, 0.1}));
  const double p2 = 0.5 + std::pow(100.0, -1.5);
  CHECK(two.lambda == doctest::Approx(0.1 + 0.9 * (2 * p2 - 1)).epsilon(1e-12));
  CHECK(example_true_lambda({ExampleId::two, std::nullopt, 1.0, 100, 0.5, 0.1}) ==
        doctest::Approx(two.lambda).epsilon(1e-12));
}

TEST_CASE("decompose reconstructs both densities") {
  for (const auto& m : one_dim_models()) {
    const auto d = decompose(m);
    const auto [plo, phi] = m.p.effective_support();
    const auto [qlo, qhi] = m.q.effective_support();
    const double lo = std::min(plo, qlo);
    const double hi = std::max(phi, qhi);
    for (int i = 0; i < 1000; ++i) {
      const double x = lo + (hi - lo) * (i + 0.5) / 1000;
      const double common = d.h_pq ? (1 - d.lambda) * d.h_pq->pdf(x) : 0.0;
      const double fp = d.h_p ? d.lambda * d.h_p->pdf(x) : 0.0;
      const double fq = d.h_q ? d.lambda * d.h_q->pdf(x) : 0.0;
      CHECK(std::abs(fp + common - m.p.pdf(x)) < 1e-8);
      CHECK(std::abs(fq + common - m.q.pdf(x)) < 1e-8);
    }
  }
}

TEST_CASE("witness sampler trivial cases") {
  RngStream r(1, 1);
  const MixtureModel same{Density::gaussian(0, 1), Density::gaussian(0, 1), "", std::nullopt};
  for (const auto& s : sample_with_witness(same, Source::P, 1000, r)) CHECK(s.w == 0);
  const MixtureModel disjoint{Density::uniform(0, 1), Density::uniform(1, 2), "", std::nullopt};
  for (const auto& s : sample_with_witness(disjoint, Source::Q, 1000, r)) {
    CHECK(s.w == 1);
    CHECK(s.source == Source::Q);
  }
}

TEST_CASE("witness sampler marginals and conditionals") {
  const auto model = witness_model();
  const double lambda = tv_exact(model);
  const int n = 100000;
  RngStream r(2, 2);
  const auto draws = sample_with_witness(model, Source::P, n, r);
  std::vector<double> all;
  std::vector<double> common;
  int witnesses = 0;
  for (const auto& s : draws) {
    all.push_back(s.x[0]);
    witnesses += s.w;
    if (s.w == 0) common.push_back(s.x[0]);
  }
  CHECK(std::abs(static_cast<double>(witnesses) / n - 0.590) <= 3 * std::sqrt(0.59 * 0.41 / n));
  const auto F = [&](double x) { return model.p.cdf(x); };
  CHECK(oracle::ks_statistic(all, F) < oracle::ks_critical(n, 0.01));

  // CDF of min(f,g)/(1-lambda) by quadrature
  const auto common_cdf = [&](double x) {
    const auto mn = [&](double t) { return std::min(model.p.pdf(t), model.q.pdf(t)); };
    return integrate_over_support({model.p, model.q, "", std::nullopt},
                                  [&](double t) { return t <= x ? mn(t) : 0.0; }, 1e-9) /
           (1 - lambda);
  };
  // tabulate once on a grid to keep the KS loop cheap
  std::vector<double> grid;
  std::vector<double> cdf;
  for (double x = -2.5; x <= 3.5; x += 0.01) {
    grid.push_back(x);
    cdf.push_back(common_cdf(x));
  }
  const auto interp = [&](double x) {
    if (x <= grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    const auto i = static_cast<std::size_t>((x - grid.front()) / 0.01);
    const double t = (x - grid[i]) / 0.01;
    return cdf[i] + t * (cdf[std::min(i + 1, cdf.size() - 1)] - cdf[i]);
  };
  CHECK(oracle::ks_statistic(common, interp) < oracle::ks_critical(static_cast<long>(common.size()), 0.01));
}

TEST_CASE("projections") {
  const MixtureModel same{Density::gaussian(0, 1), Density::gaussian(0, 1), "", std::nullopt};
  CHECK(bayes_projection(same, 0.3) == doctest::Approx(0.5));
  const MixtureModel disjoint{Density::uniform(0, 1), Density::uniform(1, 2), "", std::nullopt};
  CHECK(bayes_projection(disjoint, 1.5) == 1.0);
  CHECK(bayes_projection(disjoint, 5.0) == 0.5);
  const auto e0 = example0(0.7);
  CHECK(bayes_projection(e0, -0.5) == doctest::Approx(0.3));
  CHECK(regression_projection(e0, 0.5, 0.5) == doctest::Approx(0.6));
  CHECK(regression_projection(same, 0.5, 0.1) == doctest::Approx(0.5));
  CHECK(regression_projection(same, 0.3, 0.1) == doctest::Approx(0.5));

  const std::vector<std::vector<double>> x{{0.0}};
  const std::vector<std::vector<double>> y{{1.0}};
  const std::vector<double> z{1.0};
  CHECK(mmd_projection(x, y, 1.0, z) == doctest::Approx(1 - std::exp(-0.5)).epsilon(1e-12));
  CHECK(std::abs(mmd_projection(x, y, 1.0, z) - 0.393469) < 1e-6);
  CHECK(mmd_projection(y, x, 1.0, z) == doctest::Approx(-mmd_projection(x, y, 1.0, z)));
  CHECK(mmd_projection(x, x, 0.7, z) == 0.0);
  CHECK_THROWS_AS(mmd_projection(x, y, 0.0, z), ParameterError);
}

TEST_CASE("sigma identity") {
  RngStream r(3, 3);
  const auto models = one_dim_models();
  for (int i = 0; i < 100; ++i) {
    const auto& model = models[i % models.size()];
    const double t = r.uniform();
    const auto rho = [&](double x) { return bayes_projection(model, x); };
    const double F = projected_cdf(model, Source::P, rho, t);
    const double G = projected_cdf(model, Source::Q, rho, t);
    const int m = 10 + static_cast<int>(r.below(500));
    const int n = 10 + static_cast<int>(r.below(500));
    CHECK(std::abs(sigma_from_cdfs(F, G, m, n) - sigma_from_accuracies(F, 1 - G, m, n)) < 1e-12);
  }
}

TEST_CASE("oracle sigma at one half on example zero") {
  const auto model = example0(0.7);
  const auto rho = [&](double x) { return bayes_projection(model, x); };
  const double F = projected_cdf(model, Source::P, rho, 0.5);
  const double G = projected_cdf(model, Source::Q, rho, 0.5);
  CHECK(F == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(G == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(sigma_from_cdfs(F, G, 100, 100) == doctest::Approx(std::sqrt(2 * 0.21 / 100)).epsilon(1e-12));
}

TEST_CASE("projections contract TV and the Bayes projection preserves it") {
  for (const auto& model : one_dim_models()) {
    const double tv = tv_exact(model);
    const std::vector<double> edge{0.5};
    const auto bayes = [&](double x) { return bayes_projection(model, x); };
    CHECK(pushforward_tv(model, bayes, edge) <= tv + 1e-6);
    CHECK(std::abs(pushforward_tv(model, bayes, edge) - tv) <= 1e-4);
    const auto reg = [&](double x) { return regression_projection(model, 0.5, x); };
    CHECK(std::abs(pushforward_tv(model, reg, edge) - tv) <= 1e-4);
    for (auto proj : std::vector<std::function<double(double)>>{
             [](double x) { return x; }, [](double x) { return std::sin(3 * x); },
             [](double x) { return x * x; }, [](double x) { return std::floor(2 * x); }}) {
      CHECK(pushforward_tv(model, proj, edge) <= tv + 1e-6);
    }
  }
}

TEST_CASE("bounding operation trivial cases") {
  RngStream r(4, 4);
  // witnesses already at the extremes with bar equal to the true counts
  std::vector<WitnessSample> s;
  for (int i = 0; i < 3; ++i) s.push_back({{double(i)}, 1, Source::P});
  for (int i = 0; i < 4; ++i) s.push_back({{3.0 + i}, 0, i % 2 ? Source::P : Source::Q});
  for (int i = 0; i < 2; ++i) s.push_back({{7.0 + i}, 1, Source::Q});
  const auto before = counting_path_of(s);
  const auto after = bounding_operation(s, 3, 2, r);
  CHECK(after.v == before.v);

  const auto full = bounding_operation(s, before.m, 2, r);
  for (int z = 0; z <= before.m; ++z) CHECK(full.at(z) == z);
  CHECK_THROWS_AS(bounding_operation(s, before.m + 1, 2, r), ParameterError);
  CHECK_THROWS_AS(bounding_operation(s, 2, 2, r), ParameterError);
}

TEST_CASE("bounding operation dominates and its middle is hypergeometric") {
  const auto model = example_model({ExampleId::one, std::nullopt, 1.0, 100, 0.5, 0.3});
  const int m = 60;
  const int n = 60;
  const int bar_p = 32;
  const int bar_q = 32;
  const int reps = 1000;
  const int zc = 60;  // inside the middle segment
  std::vector<double> observed(m + 1, 0.0);
  int dominated = 0;
  for (int rep = 0; rep < reps; ++rep) {
    RngStream r(5, static_cast<std::uint64_t>(rep));
    auto s = sample_with_witness(model, Source::P, m, r);
    auto q = sample_with_witness(model, Source::Q, n, r);
    s.insert(s.end(), q.begin(), q.end());
    std::sort(s.begin(), s.end(), [&](const auto& a, const auto& b) {
      return bayes_projection(model, a.x[0]) < bayes_projection(model, b.x[0]) ||
             (bayes_projection(model, a.x[0]) == bayes_projection(model, b.x[0]) && a.x[0] < b.x[0]);
    });
    int lp = 0;
    int lq = 0;
    for (const auto& w : s) (w.source == Source::P ? lp : lq) += w.w;
    REQUIRE(lp <= bar_p);
    REQUIRE(lq <= bar_q);
    const auto v = counting_path_of(s);
    const auto vbar = bounding_operation(s, bar_p, bar_q, r);
    bool ok = true;
    for (int z = 0; z <= m + n; ++z) ok = ok && vbar.at(z) >= v.at(z);
    dominated += ok;
    for (int z = 0; z <= bar_p; ++z) CHECK(vbar.at(z) == z);
    for (int z = m + n - bar_q; z <= m + n; ++z) CHECK(vbar.at(z) == m);
    observed[vbar.at(zc) - bar_p] += 1;
  }
  CHECK(dominated == reps);
  std::vector<double> expected(m + 1);
  for (int k = 0; k <= m; ++k) {
    expected[k] = reps * oracle::hypergeom_pmf(k, zc - bar_p, m + n - bar_p - bar_q, m - bar_p);
  }
  CHECK(oracle::chi_square_pvalue(observed, expected) > 0.01);
}

TEST_CASE("witness quantile gap scales like m p eps") {
  for (int m : {100, 1000, 10000, 100000}) {
    const double p = 0.3;
    const double eps = 0.5;
    const double ratio = (m * p - binom_quantile(0.95, {(1 - eps) * p, m})) / (m * p * eps);
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 1.5);
  }
}
