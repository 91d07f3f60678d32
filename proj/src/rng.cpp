#include "hplb/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "hplb/errors.hpp"

namespace hplb {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix_gamma(std::uint64_t z) {
  z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDULL;
  z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ULL;
  z = (z ^ (z >> 33)) | 1ULL;
  // weak increments (too few bit transitions) are patched as in SplittableRandom
  if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xAAAAAAAAAAAAAAAAULL;
  return z;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t stream_id)
    : root_(root_seed), stream_(stream_id) {
  const std::uint64_t key = mix64(root_seed + kGolden * (mix64(stream_id) | 1ULL));
  state_ = mix64(key ^ 0x5851F42D4C957F2DULL);
  gamma_ = mix_gamma(key + stream_id * kGolden);
}

std::uint64_t RngStream::next_u64() {
  state_ += gamma_;
  return mix64(state_);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw ParameterError("RngStream::below: bound must be positive");
  // Lemire's multiply-shift with rejection
  std::uint64_t x = next_u64();
  __uint128_t prod = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(prod);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      prod = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<std::uint64_t>(prod >> 64);
}

RngStream RngStream::split(std::uint64_t child_id) const {
  return RngStream(root_, mix64(stream_ ^ mix64(child_id + kGolden)));
}

}  // namespace hplb
