#pragma once

#include <optional>
#include <vector>

#include "fockforge/fock.hpp"

namespace fockforge {

// Computational basis string of an n-qubit register.
struct QubitString {
  std::vector<int> bits;

  QubitString() = default;
  explicit QubitString(std::vector<int> b) : bits(std::move(b)) {}
  static QubitString from_index(unsigned idx, int n);

  int n() const { return (int)bits.size(); }
  unsigned index() const;  // bit 0 is the most significant
  QubitString complemented() const;

  bool operator<(const QubitString& o) const { return bits < o.bits; }
  bool operator==(const QubitString& o) const { return bits == o.bits; }
};

// Dual-rail encoding: qubit i owns modes (2i, 2i+1); bit 0 -> (1,0), bit 1 -> (0,1).
FockState encode(const QubitString& x);

// Inverse of encode; nullopt when any mode pair is not (1,0) or (0,1).
std::optional<QubitString> decode(const FockState& f);

// Restriction to the n-qubit dual-rail subspace: drops every term whose
// occupation is not a valid encoding, amplitudes unchanged.
FockSuperposition project_dr(const FockSuperposition& state, int n);

}  // namespace fockforge
