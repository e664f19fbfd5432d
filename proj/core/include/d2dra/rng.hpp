#pragma once

#include <cstdint>
#include <random>

namespace d2dra {

// Reproducible random stream with explicit value transforms.
//
// std::mt19937_64 is bit-exact across conforming standard libraries, but the
// standard <random> distributions are not. Every transform used here is
// therefore hand-specified, so a dataset header carrying the generator id and
// a 64-bit seed pins the byte-exact stream:
//
//   engine      mt19937_64 seeded with one 64-bit value
//   uniform01   (u >> 11) * 2^-53                in [0, 1)
//   open01      ((u >> 12) + 0.5) * 2^-52        in (0, 1)
//   exponential -log1p(-open01()), mean 1, strictly positive
//
// Sub-stream k of master seed s is seeded with
// splitmix64(s ^ 0x9E3779B97F4A7C15 * (k + 1)), which makes per-sample
// generation order-independent (parallel == serial).
class RandomStream {
 public:
  static constexpr const char* kGeneratorId = "mt19937_64/sm64sub/u53-v1";

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t derive_substream_seed(std::uint64_t master_seed, std::uint64_t index);
  static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
    return RandomStream(derive_substream_seed(master_seed, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double open01() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unit-mean exponential; equals |f|^2 for f ~ CSCG(0, 1).
  double exponential();

  // Uniform integer in [0, n), n >= 1. Rejection-free modulo of a 64-bit draw;
  // bias is negligible (n << 2^64) and the mapping is part of the stream contract.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace d2dra
