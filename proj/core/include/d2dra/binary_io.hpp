#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "d2dra/errors.hpp"

namespace d2dra {

// Little-endian primitives for the container payloads.
static_assert(sizeof(double) == 8);

inline std::uint64_t to_le64(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
    return r;
  }
  return v;
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  const std::uint64_t le = to_le64(v);
  out.write(reinterpret_cast<const char*>(&le), 8);
}

inline void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

inline void write_f64_span(std::ostream& out, std::span<const double> v) {
  for (double x : v) write_f64(out, x);
}

inline std::uint64_t read_u64(std::istream& in) {
  std::uint64_t le = 0;
  in.read(reinterpret_cast<char*>(&le), 8);
  if (!in) throw IoError("unexpected end of file while reading u64");
  return to_le64(le);
}

inline double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void read_f64_span(std::istream& in, std::span<double> v) {
  for (double& x : v) x = read_f64(in);
}

}  // namespace d2dra
