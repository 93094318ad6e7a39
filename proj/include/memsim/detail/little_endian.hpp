#pragma once

#include <bit>
#include <cstdint>
#include <cstring>

namespace memsim::detail {

inline void store_u32_le(unsigned char* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFFu);
}

inline std::uint32_t load_u32_le(const unsigned char* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return v;
}

inline void store_f32_le(unsigned char* out, float f) { store_u32_le(out, std::bit_cast<std::uint32_t>(f)); }

inline float load_f32_le(const unsigned char* in) { return std::bit_cast<float>(load_u32_le(in)); }

}  // namespace memsim::detail
