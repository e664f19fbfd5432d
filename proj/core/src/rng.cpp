#include "d2dra/rng.hpp"

#include <cmath>

namespace d2dra {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t RandomStream::derive_substream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

double RandomStream::exponential() {
  // open01() never returns 0 or 1, so the result is finite and > 0.
  return -std::log1p(-open01());
}

}  // namespace d2dra
