#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace graspaff {

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// splitmix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for the stream named `purpose` under a master seed, e.g.
/// derive_seed(master, "test-sample/17"). Depends only on its arguments, so
/// trials may be evaluated in any order or concurrently.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose) noexcept;

/// Deterministic random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; every derived variate below is computed
/// here rather than with <random> distributions, whose algorithms are
/// implementation-defined. Streams are cheap to copy and never shared.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : engine_(seed) {}
  SeedStream(std::uint64_t master_seed, std::string_view purpose) : engine_(derive_seed(master_seed, purpose)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform double in (0, 1).
  double uniform_open01();
  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Standard normal via Box-Muller (one value per call, no caching).
  double standard_normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang, with the shape < 1 boost.
  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
};

}  // namespace graspaff
