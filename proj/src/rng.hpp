#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mtcs {

namespace detail {

// SplitMix64 finalizer; full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

// Derives a child key from (key, tag); used to split independent streams.
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t tag) {
  return detail::mix64(key ^ (detail::mix64(tag + detail::kGolden) + detail::kGolden));
}

// Counter-based random stream.  Every draw is a pure hash of
// (key, counter), so streams forked with distinct tags are independent
// and the order in which different streams are consumed is irrelevant.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed)
      : key_(detail::mix64(seed + detail::kGolden)) {}

  KeyedRng fork(std::uint64_t tag) const {
    return KeyedRng(RawKey{}, derive_key(key_, tag));
  }

  std::uint64_t stream_key() const { return key_; }

  std::uint64_t next_u64() {
    return detail::mix64(key_ + (++counter_) * detail::kGolden);
  }

  // Uniform on (0, 1]; never returns 0, so log() is safe below.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached so consecutive draws consume uniforms at a fixed rate.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Rademacher +-1.
  double next_sign() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

 private:
  struct RawKey {};
  KeyedRng(RawKey, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable tags for the independent streams used across the toolkit.
namespace rng_tag {
inline constexpr std::uint64_t kSensing = 0x53454E53;       // sensing matrices
inline constexpr std::uint64_t kSignalFactor = 0x46414354;  // Tucker factors
inline constexpr std::uint64_t kSignalCore = 0x434F5245;    // Tucker core
inline constexpr std::uint64_t kNoise = 0x4E4F4953;         // additive noise
inline constexpr std::uint64_t kTrial = 0x5452494C;         // Monte Carlo trials
}  // namespace rng_tag

}  // namespace mtcs
