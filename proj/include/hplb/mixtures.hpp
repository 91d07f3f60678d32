#pragma once

#include <functional>
#include <utility>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hplb/counting.hpp"
#include "hplb/rng.hpp"

namespace hplb {

/// One-dimensional building block: uniform on [a, b) or Gaussian(mean a, sd b).
struct Kernel1D {
  enum class Kind { uniform, gaussian };
  Kind kind = Kind::uniform;
  double a = 0.0;
  double b = 1.0;

  double pdf(double x) const;
  double cdf(double x) const;
  double sample(RngStream& rng) const;
};

/// Finite mixture of product kernels in dimension d. Piecewise-uniform
/// densities, Gaussians and their mixtures are all special cases.
class Density {
 public:
  struct Component {
    double weight = 1.0;
    std::vector<Kernel1D> margins;
  };

  explicit Density(std::vector<Component> components);

  static Density uniform(double a, double b);
  static Density gaussian(double mean, double sd);
  /// Heights are densities on [breaks[i], breaks[i+1]).
  static Density piecewise_uniform(std::span<const double> breaks, std::span<const double> heights);
  static Density product_gaussian(std::vector<double> means, double sd);
  static Density mixture(std::span<const double> weights, std::span<const Density> parts);

  int dim() const { return dim_; }
  const std::vector<Component>& components() const { return components_; }

  double pdf(std::span<const double> x) const;
  double pdf(double x) const;  // dim() == 1
  double cdf(double x) const;  // dim() == 1
  void sample(RngStream& rng, std::span<double> out) const;

  /// Interval outside which the 1-D density is negligible (Gaussians cut at +-10 sd).
  std::pair<double, double> effective_support() const;
  /// Points where the 1-D density or its derivative may jump.
  std::vector<double> breakpoints() const;

 private:
  std::vector<Component> components_;
  int dim_ = 1;
};

struct MixtureModel {
  Density p;
  Density q;
  std::string label;
  /// Exact TV known in closed form from the construction.
  std::optional<double> closed_form_tv;
};

enum class Source { P, Q };

struct WitnessSample {
  std::vector<double> x;
  int w = 0;  // 1 if drawn from the source-specific component
  Source source = Source::P;
};

/// Density built pointwise from (f, g): (f-g)_+/lambda, (g-f)_+/lambda or
/// min(f,g)/(1-lambda).
class PartDensity {
 public:
  enum class Part { p_only, q_only, common };
  PartDensity(const MixtureModel& model, Part part, double scale);
  double pdf(std::span<const double> x) const;
  double pdf(double x) const;

 private:
  Density f_;
  Density g_;
  Part part_;
  double scale_;
};

/// P = lambda H_P + (1-lambda) H_PQ and Q = lambda H_Q + (1-lambda) H_PQ.
struct WitnessDecomposition {
  double lambda = 0.0;
  std::optional<PartDensity> h_p;
  std::optional<PartDensity> h_q;
  std::optional<PartDensity> h_pq;
};

/// Adaptive Simpson integration of a smooth integrand on [a, b].
double integrate(const std::function<double(double)>& fn, double a, double b, double tol);

/// Integral of fn over the model's joint 1-D support, split at breakpoints.
double integrate_over_support(const MixtureModel& model, const std::function<double(double)>& fn,
                              double tol = 1e-10);

/// TV(P, Q). Closed forms where known; exact piecewise sums for uniform
/// mixtures; adaptive Simpson otherwise (1-D only).
double tv_exact(const MixtureModel& model);

WitnessDecomposition decompose(const MixtureModel& model);

/// Draw x from the source law, then flag it as a witness with probability
/// (f(x) - g(x))_+ / f(x) (roles swapped for source Q).
std::vector<WitnessSample> sample_with_witness(const MixtureModel& model, Source source, int count,
                                               RngStream& rng);

/// (1-s) g / (s f + (1-s) g); s = 1/2 gives g / (f + g). Returns 1/2 where f + g = 0.
double bayes_projection(const MixtureModel& model, std::span<const double> z, double s = 0.5);
double bayes_projection(const MixtureModel& model, double z, double s = 0.5);

/// (s* + rho_{1,s*}(z)) / 2: the regression of the index on z under a single change at s*.
double regression_projection(const MixtureModel& model, double s_star, std::span<const double> z);
double regression_projection(const MixtureModel& model, double s_star, double z);

/// Empirical MMD witness with Gaussian kernel: mean_j k(y_j, z) - mean_i k(x_i, z).
double mmd_projection(std::span<const std::vector<double>> x_sample,
                      std::span<const std::vector<double>> y_sample, double bandwidth,
                      std::span<const double> z);

/// Precleaning plus extreme-position alignment of witnesses. samples must be
/// sorted by projection value; P-sourced samples are the label-0 class.
/// Returns the dominating path: V_z = z for z <= bar_p, V_z = m for
/// z >= N - bar_q, reduced hypergeometric process in between.
CountingPath bounding_operation(std::span<const WitnessSample> samples, int bar_p, int bar_q,
                                RngStream& rng);

/// Counting path of the samples in their given order (label 0 = source P).
CountingPath counting_path_of(std::span<const WitnessSample> samples);

/// sigma(t) from the true score CDFs F(t), G(t).
double sigma_from_cdfs(double F_t, double G_t, int m, int n);
/// sigma(t) from the in-class accuracies A0 = F(t), A1 = 1 - G(t).
double sigma_from_accuracies(double A0, double A1, int m, int n);

/// P(rho(X) <= t) for X from the given source, rho an arbitrary 1-D projection.
double projected_cdf(const MixtureModel& model, Source source,
                     const std::function<double(double)>& projection, double t);

/// TV between the push-forwards of P and Q under a 1-D projection, computed
/// by binning score values (with a bin edge at each of `edges`) and
/// integrating each density over the preimage of every bin.
double pushforward_tv(const MixtureModel& model, const std::function<double(double)>& projection,
                      std::span<const double> edges, int bins = 2000);

}  // namespace hplb
