#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace gmlm {

// Spin configurations are bit masks: bit i set means x_i = +1, clear means
// x_i = -1. Completion indices are little-endian over a block's members taken
// in ascending coordinate order.
using SpinConfig = std::uint32_t;

inline int spin(SpinConfig x, int i) { return (x >> i) & 1u ? +1 : -1; }

// Scatter the low popcount(mask) bits of `value` into the set positions of
// `mask`, ascending.
inline std::uint32_t deposit_bits(std::uint32_t value, std::uint32_t mask) {
  std::uint32_t out = 0;
  int b = 0;
  while (mask) {
    std::uint32_t lowest = mask & (~mask + 1);
    if ((value >> b) & 1u) out |= lowest;
    mask ^= lowest;
    ++b;
  }
  return out;
}

// Inverse of deposit_bits: gather the bits of x at the set positions of
// `mask` into a little-endian index.
inline std::uint32_t extract_bits(std::uint32_t x, std::uint32_t mask) {
  std::uint32_t out = 0;
  int b = 0;
  while (mask) {
    std::uint32_t lowest = mask & (~mask + 1);
    if (x & lowest) out |= 1u << b;
    mask ^= lowest;
    ++b;
  }
  return out;
}

// All size-k subsets of {0,...,n-1} as bit masks, ascending numeric order
// (Gosper's hack).
inline std::vector<std::uint32_t> all_blocks_of_size(int n, int k) {
  std::vector<std::uint32_t> out;
  if (k <= 0 || k > n) return out;
  std::uint32_t v = (k == 32) ? ~0u : ((1u << k) - 1u);
  const std::uint32_t limit = (n == 32) ? ~0u : ((1u << n) - 1u);
  while (v <= limit) {
    out.push_back(v);
    std::uint32_t t = v | (v - 1);
    if (t == ~0u) break;
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

inline std::vector<int> mask_members(std::uint32_t mask) {
  std::vector<int> m;
  while (mask) {
    int i = std::countr_zero(mask);
    m.push_back(i);
    mask &= mask - 1;
  }
  return m;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace gmlm
