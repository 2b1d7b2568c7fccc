#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "fockforge/fock.hpp"

namespace fockforge {

// Packed occupation vector: 4 bits per mode, up to 32 modes, counts <= 15.
// This is the workhorse representation for device pattern enumeration,
// where millions of sparse terms flow through beamsplitter chains.
using PackedState = unsigned __int128;

constexpr int kPackedMaxModes = 32;
constexpr int kPackedMaxCount = 15;

inline int packed_get(PackedState s, int mode) {
  return int((s >> (4 * mode)) & 0xF);
}

inline PackedState packed_set(PackedState s, int mode, int count) {
  PackedState mask = PackedState(0xF) << (4 * mode);
  return (s & ~mask) | (PackedState(count) << (4 * mode));
}

inline PackedState pack(const std::vector<int>& occ) {
  PackedState s = 0;
  for (size_t i = 0; i < occ.size(); ++i) s |= PackedState(occ[i] & 0xF) << (4 * i);
  return s;
}

inline std::vector<int> unpack(PackedState s, int modes) {
  std::vector<int> occ(modes);
  for (int i = 0; i < modes; ++i) occ[i] = packed_get(s, i);
  return occ;
}

struct PackedHash {
  size_t operator()(PackedState s) const {
    uint64_t x = uint64_t(s) ^ (uint64_t(s >> 64) * 0x9E3779B97F4A7C15ULL);
    x ^= x >> 30; x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27; x *= 0x94D049BB133111EBULL;
    return size_t(x ^ (x >> 31));
  }
};

using PackedMap = std::unordered_map<PackedState, Complex, PackedHash>;

// Applies the 50:50 beamsplitter on modes (i, j) to every term.
void packed_apply_beamsplitter(PackedMap& state, int i, int j);

// Applies a chain of beamsplitters in order.
void packed_apply_chain(PackedMap& state, const std::vector<std::pair<int, int>>& bs);

FockSuperposition packed_to_superposition(const PackedMap& state, int modes);
PackedMap superposition_to_packed(const FockSuperposition& state);

}  // namespace fockforge
