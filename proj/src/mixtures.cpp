#include "hplb/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "hplb/distributions.hpp"
#include "hplb/errors.hpp"

namespace hplb {

// ---------------------------------------------------------------- kernels

double Kernel1D::pdf(double x) const {
  if (kind == Kind::uniform) return (x >= a && x < b) ? 1.0 / (b - a) : 0.0;
  const double u = (x - a) / b;
  return std::exp(-0.5 * u * u) / (b * std::sqrt(2.0 * std::numbers::pi));
}

double Kernel1D::cdf(double x) const {
  if (kind == Kind::uniform) return std::clamp((x - a) / (b - a), 0.0, 1.0);
  return normal_cdf((x - a) / b);
}

double Kernel1D::sample(RngStream& rng) const {
  if (kind == Kind::uniform) return a + (b - a) * rng.uniform();
  return a + b * rng.normal();
}

// ---------------------------------------------------------------- density

Density::Density(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw ParameterError("Density: no components");
  dim_ = static_cast<int>(components_.front().margins.size());
  if (dim_ < 1) throw ParameterError("Density: zero-dimensional component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (static_cast<int>(c.margins.size()) != dim_) throw ParameterError("Density: dimension mismatch");
    if (!(c.weight >= 0.0)) throw ParameterError("Density: negative weight");
    for (const auto& k : c.margins) {
      if (!(k.b > (k.kind == Kernel1D::Kind::uniform ? k.a : 0.0))) {
        throw ParameterError("Density: degenerate kernel");
      }
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("Density: weights do not sum to 1");
  if (dim_ == 1) {
    const auto [lo, hi] = effective_support();
    std::vector<double> cuts = breakpoints();
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] > cuts[i]) {
        mass += integrate([this](double x) { return pdf(x); }, cuts[i], cuts[i + 1], 1e-12);
      }
    }
    if (std::abs(mass - 1.0) > 1e-9) throw ParameterError("Density: does not integrate to 1");
  }
}

Density Density::uniform(double a, double b) {
  return Density({{1.0, {{Kernel1D::Kind::uniform, a, b}}}});
}

Density Density::gaussian(double mean, double sd) {
  return Density({{1.0, {{Kernel1D::Kind::gaussian, mean, sd}}}});
}

Density Density::piecewise_uniform(std::span<const double> breaks, std::span<const double> heights) {
  if (breaks.size() != heights.size() + 1) throw ParameterError("piecewise_uniform: size mismatch");
  std::vector<Component> comps;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    const double width = breaks[i + 1] - breaks[i];
    if (!(width > 0.0) || heights[i] < 0.0) throw ParameterError("piecewise_uniform: bad piece");
    if (heights[i] == 0.0) continue;
    comps.push_back({heights[i] * width, {{Kernel1D::Kind::uniform, breaks[i], breaks[i + 1]}}});
  }
  return Density(std::move(comps));
}

Density Density::product_gaussian(std::vector<double> means, double sd) {
  Component c;
  for (double mu : means) c.margins.push_back({Kernel1D::Kind::gaussian, mu, sd});
  return Density({c});
}

Density Density::mixture(std::span<const double> weights, std::span<const Density> parts) {
  if (weights.size() != parts.size()) throw ParameterError("mixture: size mismatch");
  std::vector<Component> comps;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (weights[i] == 0.0) continue;
    for (auto c : parts[i].components()) {
      c.weight *= weights[i];
      comps.push_back(std::move(c));
    }
  }
  return Density(std::move(comps));
}

double Density::pdf(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw ParameterError("Density::pdf: dimension mismatch");
  double total = 0.0;
  for (const auto& c : components_) {
    double prod = c.weight;
    for (int d = 0; d < dim_ && prod > 0.0; ++d) prod *= c.margins[d].pdf(x[d]);
    total += prod;
  }
  return total;
}

double Density::pdf(double x) const { return pdf(std::span<const double>(&x, 1)); }

double Density::cdf(double x) const {
  if (dim_ != 1) throw ParameterError("Density::cdf: only defined in one dimension");
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.margins.front().cdf(x);
  return total;
}

void Density::sample(RngStream& rng, std::span<double> out) const {
  if (static_cast<int>(out.size()) != dim_) throw ParameterError("Density::sample: dimension mismatch");
  const double u = rng.uniform();
  double acc = 0.0;
  const Component* chosen = &components_.back();
  for (const auto& c : components_) {
    acc += c.weight;
    if (u < acc) {
      chosen = &c;
      break;
    }
  }
  for (int d = 0; d < dim_; ++d) out[d] = chosen->margins[d].sample(rng);
}

std::pair<double, double> Density::effective_support() const {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& c : components_) {
    const auto& k = c.margins.front();
    if (k.kind == Kernel1D::Kind::uniform) {
      lo = std::min(lo, k.a);
      hi = std::max(hi, k.b);
    } else {
      lo = std::min(lo, k.a - 10.0 * k.b);
      hi = std::max(hi, k.a + 10.0 * k.b);
    }
  }
  return {lo, hi};
}

std::vector<double> Density::breakpoints() const {
  std::vector<double> out;
  for (const auto& c : components_) {
    const auto& k = c.margins.front();
    if (k.kind == Kernel1D::Kind::uniform) {
      out.push_back(k.a);
      out.push_back(k.b);
    } else {
      for (int s = -3; s <= 3; ++s) out.push_back(k.a + s * k.b);
    }
  }
  return out;
}

// ---------------------------------------------------------------- quadrature

namespace {

double simpson_step(const std::function<double(double)>& fn, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(fn, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_step(fn, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Sorted cut points covering both supports.
std::vector<double> joint_cuts(const MixtureModel& model) {
  if (model.p.dim() != 1 || model.q.dim() != 1) {
    throw ParameterError("one-dimensional model required");
  }
  const auto [plo, phi] = model.p.effective_support();
  const auto [qlo, qhi] = model.q.effective_support();
  const double lo = std::min(plo, qlo);
  const double hi = std::max(phi, qhi);
  std::vector<double> cuts = model.p.breakpoints();
  const auto qb = model.q.breakpoints();
  cuts.insert(cuts.end(), qb.begin(), qb.end());
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::erase_if(cuts, [&](double c) { return c < lo || c > hi; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

bool all_uniform(const Density& d) {
  return std::all_of(d.components().begin(), d.components().end(), [](const auto& c) {
    return c.margins.front().kind == Kernel1D::Kind::uniform;
  });
}

struct Cell {
  double mid;
  double p_mass;
  double q_mass;
};

// Partition of the joint support into cells with exact P and Q masses.
std::vector<Cell> support_cells(const MixtureModel& model, int per_segment) {
  const std::vector<double> cuts = joint_cuts(model);
  std::vector<Cell> cells;
  cells.reserve(cuts.size() * static_cast<std::size_t>(per_segment));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double h = (cuts[i + 1] - a) / per_segment;
    double pa = model.p.cdf(a);
    double qa = model.q.cdf(a);
    for (int k = 0; k < per_segment; ++k) {
      const double x1 = (k + 1 == per_segment) ? cuts[i + 1] : a + (k + 1) * h;
      const double pb = model.p.cdf(x1);
      const double qb = model.q.cdf(x1);
      cells.push_back({a + (k + 0.5) * h, pb - pa, qb - qa});
      pa = pb;
      qa = qb;
    }
  }
  return cells;
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double fa = fn(a);
  const double fb = fn(b);
  const double fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(fn, a, b, fa, fm, fb, whole, tol, 50);
}

double integrate_over_support(const MixtureModel& model, const std::function<double(double)>& fn,
                              double tol) {
  const std::vector<double> cuts = joint_cuts(model);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // keep the integrand's jump points at segment ends, never at interior samples
    const double eps = 1e-12 * std::max(1.0, std::abs(cuts[i + 1] - cuts[i]));
    total += integrate(fn, cuts[i] + eps, cuts[i + 1] - eps, tol / static_cast<double>(cuts.size()));
  }
  return total;
}

// ---------------------------------------------------------------- TV

double tv_exact(const MixtureModel& model) {
  if (model.closed_form_tv) return *model.closed_form_tv;
  if (model.p.dim() != model.q.dim()) throw ParameterError("tv_exact: dimension mismatch");

  if (model.p.dim() == 1) {
    if (all_uniform(model.p) && all_uniform(model.q)) {
      const std::vector<double> cuts = joint_cuts(model);
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        total += std::abs(model.p.pdf(mid) - model.q.pdf(mid)) * (cuts[i + 1] - cuts[i]);
      }
      return 0.5 * total;
    }
    return std::clamp(
        integrate_over_support(
            model, [&](double x) { return 0.5 * std::abs(model.p.pdf(x) - model.q.pdf(x)); }, 1e-10),
        0.0, 1.0);
  }

  // equal-covariance Gaussian products: 2 Phi(delta/2) - 1
  const auto& pc = model.p.components();
  const auto& qc = model.q.components();
  if (pc.size() == 1 && qc.size() == 1) {
    double delta2 = 0.0;
    bool ok = true;
    for (int d = 0; d < model.p.dim() && ok; ++d) {
      const auto& a = pc[0].margins[d];
      const auto& b = qc[0].margins[d];
      ok = a.kind == Kernel1D::Kind::gaussian && b.kind == Kernel1D::Kind::gaussian && a.b == b.b;
      if (ok) delta2 += std::pow((a.a - b.a) / a.b, 2);
    }
    if (ok) return 2.0 * normal_cdf(0.5 * std::sqrt(delta2)) - 1.0;
  }
  throw ParameterError("tv_exact: no closed form for this multivariate model");
}

// ---------------------------------------------------------------- decomposition

PartDensity::PartDensity(const MixtureModel& model, Part part, double scale)
    : f_(model.p), g_(model.q), part_(part), scale_(scale) {}

double PartDensity::pdf(std::span<const double> x) const {
  const double f = f_.pdf(x);
  const double g = g_.pdf(x);
  switch (part_) {
    case Part::p_only: return std::max(f - g, 0.0) * scale_;
    case Part::q_only: return std::max(g - f, 0.0) * scale_;
    case Part::common: return std::min(f, g) * scale_;
  }
  return 0.0;
}

double PartDensity::pdf(double x) const { return pdf(std::span<const double>(&x, 1)); }

WitnessDecomposition decompose(const MixtureModel& model) {
  constexpr double kEdge = 1e-12;
  WitnessDecomposition out;
  out.lambda = tv_exact(model);
  if (out.lambda > kEdge) {
    out.h_p.emplace(model, PartDensity::Part::p_only, 1.0 / out.lambda);
    out.h_q.emplace(model, PartDensity::Part::q_only, 1.0 / out.lambda);
  }
  if (out.lambda < 1.0 - kEdge) {
    out.h_pq.emplace(model, PartDensity::Part::common, 1.0 / (1.0 - out.lambda));
  }
  return out;
}

std::vector<WitnessSample> sample_with_witness(const MixtureModel& model, Source source, int count,
                                               RngStream& rng) {
  if (count < 0) throw ParameterError("sample_with_witness: negative count");
  const Density& own = source == Source::P ? model.p : model.q;
  const Density& other = source == Source::P ? model.q : model.p;
  std::vector<WitnessSample> out(static_cast<std::size_t>(count));
  for (auto& s : out) {
    s.source = source;
    s.x.resize(static_cast<std::size_t>(own.dim()));
    own.sample(rng, s.x);
    const double f = own.pdf(s.x);
    const double g = other.pdf(s.x);
    const double ratio = f > 0.0 ? std::max(f - g, 0.0) / f : 0.0;
    s.w = rng.uniform_open() <= ratio ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------------- projections

double bayes_projection(const MixtureModel& model, std::span<const double> z, double s) {
  const double f = model.p.pdf(z);
  const double g = model.q.pdf(z);
  const double denom = s * f + (1.0 - s) * g;
  if (!(denom > 0.0)) return 0.5;
  return (1.0 - s) * g / denom;
}

double bayes_projection(const MixtureModel& model, double z, double s) {
  return bayes_projection(model, std::span<const double>(&z, 1), s);
}

double regression_projection(const MixtureModel& model, double s_star, std::span<const double> z) {
  return 0.5 * (s_star + bayes_projection(model, z, s_star));
}

double regression_projection(const MixtureModel& model, double s_star, double z) {
  return regression_projection(model, s_star, std::span<const double>(&z, 1));
}

double mmd_projection(std::span<const std::vector<double>> x_sample,
                      std::span<const std::vector<double>> y_sample, double bandwidth,
                      std::span<const double> z) {
  if (!(bandwidth > 0.0)) throw ParameterError("mmd_projection: bandwidth must be positive");
  if (x_sample.empty() || y_sample.empty()) throw ParameterError("mmd_projection: empty sample");
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  auto mean_kernel = [&](std::span<const std::vector<double>> pts) {
    double acc = 0.0;
    for (const auto& p : pts) {
      if (p.size() != z.size()) throw ParameterError("mmd_projection: dimension mismatch");
      double d2 = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) d2 += (p[i] - z[i]) * (p[i] - z[i]);
      acc += std::exp(-d2 * inv);
    }
    return acc / static_cast<double>(pts.size());
  };
  return mean_kernel(y_sample) - mean_kernel(x_sample);
}

// ---------------------------------------------------------------- bounding operation

CountingPath counting_path_of(std::span<const WitnessSample> samples) {
  CountingPath path;
  path.v.resize(samples.size() + 1);
  path.v[0] = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool from_p = samples[i].source == Source::P;
    path.v[i + 1] = path.v[i] + (from_p ? 1 : 0);
    (from_p ? path.m : path.n) += 1;
  }
  return path;
}

CountingPath bounding_operation(std::span<const WitnessSample> samples, int bar_p, int bar_q,
                                RngStream& rng) {
  enum Role : std::uint8_t { p_wit, q_wit, p_non, q_non };
  const int N = static_cast<int>(samples.size());
  std::vector<Role> role(static_cast<std::size_t>(N));
  int m = 0;
  int n = 0;
  int lambda_p = 0;
  int lambda_q = 0;
  for (int i = 0; i < N; ++i) {
    const auto& s = samples[i];
    if (s.source == Source::P) {
      ++m;
      lambda_p += s.w;
      role[i] = s.w ? p_wit : p_non;
    } else {
      ++n;
      lambda_q += s.w;
      role[i] = s.w ? q_wit : q_non;
    }
  }
  if (bar_p > m || bar_q > n) throw ParameterError("bounding_operation: bar exceeds class size");
  if (bar_p < lambda_p || bar_q < lambda_q) {
    throw ParameterError("bounding_operation: bar below the observed witness count");
  }

  // precleaning: promote uniformly chosen non-witnesses
  auto promote = [&](Role from, Role to, int extra) {
    std::vector<int> pool;
    for (int i = 0; i < N; ++i) {
      if (role[i] == from) pool.push_back(i);
    }
    for (int k = 0; k < extra; ++k) {
      const auto j = k + static_cast<int>(rng.below(pool.size() - static_cast<std::size_t>(k)));
      std::swap(pool[k], pool[j]);
      role[pool[k]] = to;
    }
  };
  promote(p_non, p_wit, bar_p - lambda_p);
  promote(q_non, q_wit, bar_q - lambda_q);

  // each slot carries its source label along when swapped
  std::vector<std::uint8_t> is_p(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) is_p[i] = (role[i] == p_wit || role[i] == p_non) ? 1 : 0;

  auto swap_slots = [&](int a, int b) {
    std::swap(role[a], role[b]);
    std::swap(is_p[a], is_p[b]);
  };
  std::vector<int> candidates;
  for (int i = 0; i < std::max(bar_p, bar_q); ++i) {
    if (i < bar_p && role[i] != p_wit) {
      candidates.clear();
      for (int j = i + 1; j < N; ++j) {
        if (role[j] == p_wit) candidates.push_back(j);
      }
      if (candidates.empty()) throw InternalError("bounding_operation: ran out of P witnesses");
      swap_slots(i, candidates[rng.below(candidates.size())]);
    }
    const int r = N - 1 - i;
    if (i < bar_q && role[r] != q_wit) {
      candidates.clear();
      for (int j = 0; j < r; ++j) {
        if (role[j] == q_wit) candidates.push_back(j);
      }
      if (candidates.empty()) throw InternalError("bounding_operation: ran out of Q witnesses");
      swap_slots(r, candidates[rng.below(candidates.size())]);
    }
  }

  CountingPath path;
  path.m = m;
  path.n = n;
  path.v.resize(static_cast<std::size_t>(N) + 1);
  path.v[0] = 0;
  for (int i = 0; i < N; ++i) path.v[i + 1] = path.v[i] + is_p[i];
  return path;
}

// ---------------------------------------------------------------- sigma(t) and push-forwards

double sigma_from_cdfs(double F_t, double G_t, int m, int n) {
  return std::sqrt(F_t * (1.0 - F_t) / m + G_t * (1.0 - G_t) / n);
}

double sigma_from_accuracies(double A0, double A1, int m, int n) {
  return std::sqrt(A0 * (1.0 - A0) / m + A1 * (1.0 - A1) / n);
}

double projected_cdf(const MixtureModel& model, Source source,
                     const std::function<double(double)>& projection, double t) {
  double total = 0.0;
  for (const Cell& c : support_cells(model, 4000)) {
    if (projection(c.mid) <= t) total += source == Source::P ? c.p_mass : c.q_mass;
  }
  return std::clamp(total, 0.0, 1.0);
}

double pushforward_tv(const MixtureModel& model, const std::function<double(double)>& projection,
                      std::span<const double> edges, int bins) {
  if (bins < 1) throw ParameterError("pushforward_tv: need at least one bin");
  const std::vector<Cell> cells = support_cells(model, 4000);
  std::vector<double> scores(cells.size());
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    scores[i] = projection(cells[i].mid);
    lo = std::min(lo, scores[i]);
    hi = std::max(hi, scores[i]);
  }
  std::vector<double> cuts(edges.begin(), edges.end());
  std::sort(cuts.begin(), cuts.end());
  const double width = hi > lo ? (hi - lo) / bins : 1.0;

  // bin key: (number of forced edges <= score, regular bin index)
  std::map<std::pair<long, long>, std::pair<double, double>> mass;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const long forced = std::upper_bound(cuts.begin(), cuts.end(), scores[i]) - cuts.begin();
    const long regular = std::min<long>(bins - 1, static_cast<long>((scores[i] - lo) / width));
    auto& slot = mass[{forced, regular}];
    slot.first += cells[i].p_mass;
    slot.second += cells[i].q_mass;
  }
  double total = 0.0;
  for (const auto& [key, pq] : mass) total += std::abs(pq.first - pq.second);
  return 0.5 * total;
}

}  // namespace hplb
