#pragma once

#include <cmath>
#include <cstdint>

namespace ers {

/// Deterministic substream domains. Every random draw in a run comes from a
/// stream keyed by (root seed, domain, entity index), so draws for one
/// purpose stay stable when unrelated parameters change.
enum class RngDomain : std::uint32_t {
  ArrivalGap = 0,
  VehicleClass = 1,
  TargetSpeed = 2,
  LateralOffset = 3,
  EntrySoc = 4,
  Forecast = 5,
  Harness = 6,
};

namespace detail {
inline std::uint64_t splitmix_step(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
} // namespace detail

/// SplitMix64 stream seeded from (root, domain, index). Cheap to construct;
/// streams for distinct keys are statistically independent.
class RngStream {
public:
  RngStream(std::uint64_t root_seed, RngDomain domain, std::uint64_t index) {
    std::uint64_t s = root_seed;
    std::uint64_t a = detail::splitmix_step(s);
    s ^= (static_cast<std::uint64_t>(domain) + 1) * 0xD6E8FEB86659FD93ull;
    std::uint64_t b = detail::splitmix_step(s);
    s ^= (index + 1) * 0xCA5A826395121157ull;
    std::uint64_t c = detail::splitmix_step(s);
    state_ = a ^ (b << 1) ^ c;
  }

  std::uint64_t next_u64() { return detail::splitmix_step(state_); }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Exponential with the given mean (mean = 1/rate).
  double exponential(double mean) { return -mean * std::log(1.0 - next_double()); }

  /// Box-Muller; always consumes exactly two uniforms.
  double normal(double mean, double sigma) {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Rejection-sampled truncated normal; bounds must bracket nonzero mass.
  double truncated_normal(double mean, double sigma, double lo, double hi) {
    for (;;) {
      double x = normal(mean, sigma);
      if (x >= lo && x <= hi) return x;
    }
  }

private:
  std::uint64_t state_;
};

} // namespace ers
