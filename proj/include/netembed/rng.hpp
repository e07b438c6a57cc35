#pragma once

#include <cmath>
#include <cstdint>

namespace netembed::rng {

// Counter-mode random stream. Every variate is a pure function of
// (master_seed, stream_id, counter); nothing is stateful, so parallel
// callers addressing disjoint counters always reproduce the serial result.
//
// Construction: the (seed, stream) pair is hashed to a 64-bit subkey, and
// word i is the SplitMix64 output function applied to subkey + i*gamma.
// Uses only integer ops and libm sqrt/log/cos, identical across platforms
// that share an IEEE-754 libm.

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t h = mix64(seed + 0x243F6A8885A308D3ull);
  h = mix64(h ^ (stream + 0xB7E151628AED2A6Bull));
  return h;
}

inline std::uint64_t word_at(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) {
  return mix64(stream_key(seed, stream) + counter * kGamma);
}

// Uniform in (0,1]; never 0, so log() of it is finite.
inline double uniform_at(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t counter) {
  return static_cast<double>((word_at(seed, stream, counter) >> 11) + 1) *
         0x1.0p-53;
}

// Standard normal via Box-Muller; one variate per counter (the sine partner
// is discarded to keep the counter addressing one-to-one).
inline double gaussian_at(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t counter) {
  const double u1 = uniform_at(seed, stream, 2 * counter);
  const double u2 = uniform_at(seed, stream, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  constexpr double two_pi = 6.283185307179586476925286766559;
  return r * std::cos(two_pi * u2);
}

// Derives an independent child seed, e.g. one per replicate or trial.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index = 0) {
  return mix64(stream_key(seed, tag) + index * kGamma);
}

// Stream ids (purpose tags). Distinct ids give statistically independent
// streams even under the same seed.
namespace stream {
inline constexpr std::uint64_t kModelBasis = 1;
inline constexpr std::uint64_t kModelCenter = 2;
inline constexpr std::uint64_t kSampleComponent = 3;
inline constexpr std::uint64_t kSampleCoeff = 4;
inline constexpr std::uint64_t kLayerMatrix = 5;
inline constexpr std::uint64_t kWidthProbe = 6;
}  // namespace stream

// Seed-derivation tags used by multi-run drivers.
namespace tag {
inline constexpr std::uint64_t kReplicate = 101;
inline constexpr std::uint64_t kTrialPoint = 102;
inline constexpr std::uint64_t kTrialLayer = 103;
inline constexpr std::uint64_t kWidth = 104;
}  // namespace tag

}  // namespace netembed::rng
