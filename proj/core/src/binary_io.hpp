#pragma once

// Little-endian primitive I/O shared by the model, field and kernel files.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "iedd/error.hpp"
#include "iedd/grid.hpp"

namespace iedd::io {

template <class T>
void put(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8 || sizeof(T) == 4);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), bytes.size());
}

template <class T>
T get(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), bytes.size())) raise(ErrorCode::Io, "unexpected end of file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

inline void put_grid(std::ostream& os, const Grid& g) {
  for (int a = 0; a < 3; ++a) put<std::int64_t>(os, g.n(a));
  for (int a = 0; a < 3; ++a) put<double>(os, g.h(a));
  for (int a = 0; a < 3; ++a) put<double>(os, g.origin()[a]);
}

inline Grid get_grid(std::istream& is) {
  Index3 n{};
  Vec3 h{}, o{};
  for (int a = 0; a < 3; ++a) n[a] = get<std::int64_t>(is);
  for (int a = 0; a < 3; ++a) h[a] = get<double>(is);
  for (int a = 0; a < 3; ++a) o[a] = get<double>(is);
  return Grid(n, h, o);
}

}  // namespace iedd::io
