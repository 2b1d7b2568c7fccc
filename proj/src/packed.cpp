#include "fockforge/packed.hpp"

#include <cmath>

namespace fockforge {

void packed_apply_beamsplitter(PackedMap& state, int i, int j) {
  PackedMap next;
  next.reserve(state.size() * 2);
  for (const auto& [s, amp] : state) {
    const int p = packed_get(s, i), q = packed_get(s, j);
    const int total = p + q;
    if (total == 0) {
      next[s] += amp;
      continue;
    }
    for (int p2 = 0; p2 <= total; ++p2) {
      double el = bs_element(p2, total - p2, p, q);
      if (el == 0.0) continue;
      PackedState t = packed_set(packed_set(s, i, p2), j, total - p2);
      next[t] += amp * el;
    }
  }
  for (auto it = next.begin(); it != next.end();) {
    if (std::abs(it->second) < kPruneTol) it = next.erase(it);
    else ++it;
  }
  state = std::move(next);
}

void packed_apply_chain(PackedMap& state, const std::vector<std::pair<int, int>>& bs) {
  for (const auto& [i, j] : bs) packed_apply_beamsplitter(state, i, j);
}

FockSuperposition packed_to_superposition(const PackedMap& state, int modes) {
  FockSuperposition out(modes);
  for (const auto& [s, amp] : state) out.add(FockState(unpack(s, modes)), amp);
  return out;
}

PackedMap superposition_to_packed(const FockSuperposition& state) {
  PackedMap out;
  out.reserve(state.terms().size());
  for (const auto& [s, amp] : state.terms()) out[pack(s.occ)] = amp;
  return out;
}

}  // namespace fockforge
