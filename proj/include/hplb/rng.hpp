#pragma once

#include <cstdint>
#include <limits>
#include <optional>

namespace hplb {

/// Counter-based random stream keyed by (root_seed, stream_id).
///
/// The n-th draw of a stream is a pure function of (root_seed, stream_id, n),
/// so replications keyed by their index produce the same numbers regardless
/// of which thread runs them or in which order. The generator is SplitMix64
/// with a per-stream state offset and a per-stream odd increment.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t root_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on (0, 1); never returns an endpoint.
  double uniform_open();

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Child stream, independent of this one and of other children.
  RngStream split(std::uint64_t child_id) const;

  std::uint64_t root_seed() const { return root_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  std::uint64_t root_;
  std::uint64_t stream_;
  std::uint64_t state_;
  std::uint64_t gamma_;
  std::optional<double> spare_normal_;
};

/// SplitMix64 finalizer; exposed for seed derivation.
std::uint64_t mix64(std::uint64_t z);

}  // namespace hplb
