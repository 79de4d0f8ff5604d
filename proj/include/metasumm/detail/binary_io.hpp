#pragma once

// Little-endian primitives for the binary model containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include "metasumm/error.hpp"

namespace metasumm::detail {

template <class UInt>
void write_le(std::ostream& out, UInt v) {
  unsigned char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
}

template <class UInt>
UInt read_le(std::istream& in) {
  unsigned char bytes[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof bytes)) throw DataError("truncated model file");
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in, std::size_t max_len = (1u << 30)) {
  const auto n = read_le<std::uint32_t>(in);
  if (n > max_len) throw DataError("corrupt model file: string length " + std::to_string(n));
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw DataError("truncated model file");
  return s;
}

inline void write_f32(std::ostream& out, std::span<const float> values) {
  for (float v : values) write_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
}

inline void read_f32(std::istream& in, std::span<float> values) {
  for (float& v : values) v = std::bit_cast<float>(read_le<std::uint32_t>(in));
}

inline void write_f64(std::ostream& out, std::span<const double> values) {
  for (double v : values) write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

inline void read_f64(std::istream& in, std::span<double> values) {
  for (double& v : values) v = std::bit_cast<double>(read_le<std::uint64_t>(in));
}

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw DataError(std::string("bad magic header, expected '") + magic + "'");
  }
}

}  // namespace metasumm::detail
