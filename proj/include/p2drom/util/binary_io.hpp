// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace p2drom::bin {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), 8);
}
inline void put_i64(std::ostream& os, std::int64_t v) { put_u64(os, static_cast<std::uint64_t>(v)); }
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
inline void put_str(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 8)) throw std::runtime_error("unexpected end of binary file");
  return to_little(v);
}
inline std::int64_t get_i64(std::istream& is) { return static_cast<std::int64_t>(get_u64(is)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }
inline std::string get_str(std::istream& is, std::size_t max_len = 1u << 20) {
  const auto n = get_u64(is);
  if (n > max_len) throw std::runtime_error("string field too long in binary file");
  std::string s(n, '\0');
  if (!is.read(s.data(), static_cast<std::streamsize>(n))) throw std::runtime_error("unexpected end of binary file");
  return s;
}

}  // namespace p2drom::bin
