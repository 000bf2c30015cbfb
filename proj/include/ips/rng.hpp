#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ips {

/// SplitMix64 finalizer. Good avalanche, used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives the seed of sub-stream `stream` from a master seed.
///
/// This is the documented seed-split used everywhere randomness fans out:
/// replicate k of a run uses seed_split(master, k), the candidate stream of
/// vertex v uses seed_split(run_seed, v), permutation p of a test uses
/// seed_split(test_seed, p). Both arguments pass through the SplitMix64
/// finalizer before mixing, so streams for distinct ids are statistically
/// independent and stable across platforms.
inline std::uint64_t seed_split(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^
                    splitmix64(stream * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
}

/// mt19937_64 engine with hand-rolled output transforms.
///
/// The engine's 64-bit output sequence is specified by the standard, but
/// std::uniform_real_distribution and friends are not; drawing through raw
/// bits keeps every stream bit-identical across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform on the open interval (0,1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Strictly positive exponential variate.
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  /// Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ips
