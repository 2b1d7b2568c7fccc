#include "fockforge/dualrail.hpp"

#include <stdexcept>

namespace fockforge {

QubitString QubitString::from_index(unsigned idx, int n) {
  std::vector<int> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = (idx >> (n - 1 - i)) & 1u;
  return QubitString(std::move(bits));
}

unsigned QubitString::index() const {
  unsigned idx = 0;
  for (int b : bits) idx = (idx << 1) | unsigned(b);
  return idx;
}

QubitString QubitString::complemented() const {
  QubitString c = *this;
  for (int& b : c.bits) b ^= 1;
  return c;
}

FockState encode(const QubitString& x) {
  FockState f;
  f.occ.resize(2 * x.n());
  for (int i = 0; i < x.n(); ++i) {
    f.occ[2 * i] = x.bits[i] == 0 ? 1 : 0;
    f.occ[2 * i + 1] = x.bits[i] == 0 ? 0 : 1;
  }
  return f;
}

std::optional<QubitString> decode(const FockState& f) {
  if (f.modes() % 2 != 0) throw std::invalid_argument("decode: odd mode count");
  QubitString x;
  x.bits.resize(f.modes() / 2);
  for (int i = 0; i < x.n(); ++i) {
    int a = f.occ[2 * i], b = f.occ[2 * i + 1];
    if (a == 1 && b == 0) x.bits[i] = 0;
    else if (a == 0 && b == 1) x.bits[i] = 1;
    else return std::nullopt;
  }
  return x;
}

FockSuperposition project_dr(const FockSuperposition& state, int n) {
  if (state.modes() != 2 * n) throw std::invalid_argument("project_dr: mode mismatch");
  FockSuperposition out(state.modes());
  for (const auto& [s, amp] : state.terms())
    if (decode(s)) out.add(s, amp);
  return out;
}

}  // namespace fockforge
