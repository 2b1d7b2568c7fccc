#include <algorithm>
#include <bit>
#include <boost/container/small_vector.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "fockforge/devices.hpp"
#include "fockforge/packed.hpp"

namespace fockforge {
namespace {

// One matrix element of the heralded functional: amplitude of the term
// <pattern| (x) <out| U |encode(x), aux>. `out` packs the occupation of the
// (at most two) surviving output modes into two nibbles; 0 when the device
// detects everything.
struct Entry {
  uint16_t x;
  uint8_t out;
  Complex amp;
};
using Entries = boost::container::small_vector<Entry, 2>;

bool entry_order(const Entry& a, const Entry& b) {
  return a.x != b.x ? a.x < b.x : a.out < b.out;
}

int qubit_bit(int x, int qubit, int n) { return (x >> (n - 1 - qubit)) & 1; }

// ---------------------------------------------------------------------------
// Evolution through the device network. The qubit register only meets the
// auxiliary photons at the final coupling beamsplitters, so the state stays a
// product (core-evolved qubits) x (NOON preparations) until that last layer.

class Evolver {
 public:
  explicit Evolver(const Device& d) : d_(d), couplings_(), phase_mask_(0) {
    if (d.n < 1 || d.n > 8 || (int)d.qubit_rails.size() != d.n)
      throw std::invalid_argument("device has a malformed qubit register");
    if (d.modes > kPackedMaxModes)
      throw std::invalid_argument("device exceeds the 32 mode enumeration limit");
    for (int m : d.detected_modes) detected_mask_ |= PackedState(0xF) << (4 * m);
    if (!d.output_rails.empty()) {
      if (d.output_rails.size() > 1)
        throw std::invalid_argument("at most one output rail pair is supported");
      out0_ = d.output_rails[0].first;
      out1_ = d.output_rails[0].second;
    }
    std::vector<bool> owned(d.aux_inputs.size(), false);
    for (const Booster& b : d.boosters) {
      couplings_.push_back(b.couple0);
      couplings_.push_back(b.couple1);
      for (size_t k = 0; k < d.aux_inputs.size(); ++k)
        if (d.aux_inputs[k].first == b.mode_a || d.aux_inputs[k].first == b.mode_b)
          owned[k] = true;
    }
    for (size_t k = 0; k < d.aux_inputs.size(); ++k)
      if (!owned[k]) free_aux_.push_back(d.aux_inputs[k]);
    noon_.resize(d.boosters.size());
    for (int m : d.phase_pi_modes) phase_mask_ |= PackedState(0xF) << (4 * m);
  }

  const Device& device() const { return d_; }

  uint8_t out_occ(PackedState s) const {
    if (out0_ < 0) return 0;
    return uint8_t(packed_get(s, out0_) | (packed_get(s, out1_) << 4));
  }

  PackedState pattern_key(PackedState s) const { return s & detected_mask_; }

  // Evolves |encode(x), aux> through the full network.
  PackedMap run(int x) {
    PackedState init = 0;
    for (int i = 0; i < d_.n; ++i) {
      auto [r0, r1] = d_.qubit_rails[i];
      init = packed_set(init, qubit_bit(x, i, d_.n) ? r1 : r0, 1);
    }
    for (auto [mode, count] : free_aux_) init = packed_set(init, mode, count);
    const TermList& core = core_states(init);

    PackedMap joint;
    if (d_.boosters.empty()) {
      joint.reserve(core.size());
      for (const auto& [k, a] : core) joint[k] += a;
    } else {
      std::vector<const TermList*> lists;
      lists.reserve(d_.boosters.size());
      size_t hint = core.size();
      for (size_t bi = 0; bi < d_.boosters.size(); ++bi) {
        lists.push_back(&noon_states(bi));
        hint *= std::max<size_t>(1, lists.back()->size());
      }
      joint.reserve(hint);
      for (const auto& [ck, ca] : core)
        build_joint(joint, lists, 0, ck, ca);
      packed_apply_chain(joint, couplings_);
    }
    if (phase_mask_) {
      for (auto& [s, amp] : joint) {
        int parity = 0;
        PackedState masked = s & phase_mask_;
        while (masked) {
          parity ^= (int)(masked & 0xF);
          masked >>= 4;
        }
        if (parity & 1) amp = -amp;
      }
    }
    return joint;
  }

 private:
  using TermList = std::vector<std::pair<PackedState, Complex>>;

  const TermList& core_states(PackedState init) {
    auto it = core_cache_.find(init);
    if (it != core_cache_.end()) return it->second;
    PackedMap m;
    m[init] = 1.0;
    packed_apply_chain(m, d_.core_network);
    TermList out(m.begin(), m.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return core_cache_.emplace(init, std::move(out)).first->second;
  }

  const TermList& noon_states(size_t bi) {
    TermList& cached = noon_[bi];
    if (!cached.empty()) return cached;
    const Booster& b = d_.boosters[bi];
    PackedState init = 0;
    init = packed_set(init, b.mode_a, 1);
    init = packed_set(init, b.mode_b, 1);
    PackedMap m;
    m[init] = 1.0;
    std::vector<std::pair<int, int>> prep = {b.internal};
    packed_apply_chain(m, prep);
    cached.assign(m.begin(), m.end());
    std::sort(cached.begin(), cached.end(),
              [](const auto& a, const auto& b2) { return a.first < b2.first; });
    return cached;
  }

  void build_joint(PackedMap& joint, const std::vector<const TermList*>& lists,
                   size_t depth, PackedState key, Complex amp) {
    if (depth == lists.size()) {
      joint[key] += amp;
      return;
    }
    for (const auto& [k, a] : *lists[depth]) {
      Complex next = amp * a;
      if (std::abs(next) < kPruneTol) continue;
      build_joint(joint, lists, depth + 1, key | k, next);
    }
  }

  const Device& d_;
  PackedState detected_mask_ = 0;
  int out0_ = -1, out1_ = -1;
  std::vector<std::pair<int, int>> couplings_;
  PackedState phase_mask_;
  std::vector<std::pair<int, int>> free_aux_;
  std::vector<TermList> noon_;
  std::unordered_map<PackedState, TermList, PackedHash> core_cache_;
};

// ---------------------------------------------------------------------------
// Functional normalization, hashing and classification.

// Scales so the largest-magnitude entry has |amp| = 1. With projective = true
// the pivot phase is divided out as well (ray comparison across loss
// hypotheses); otherwise phases are kept, so two functionals get the same
// normal form exactly when they differ by a positive real factor.
Entries normalize_entries(const Entries& es, bool projective) {
  double maxmag = 0;
  for (const Entry& e : es) maxmag = std::max(maxmag, std::abs(e.amp));
  const Entry* pivot = &es[0];
  for (const Entry& e : es)
    if (std::abs(e.amp) >= maxmag * (1 - 1e-9)) { pivot = &e; break; }
  Complex scale = projective ? 1.0 / pivot->amp : Complex(1.0 / std::abs(pivot->amp));
  Entries out;
  out.reserve(es.size());
  for (const Entry& e : es) out.push_back({e.x, e.out, e.amp * scale});
  return out;
}

uint64_t ray_hash(const Entries& norm) {
  uint64_t h = 0x243F6A8885A308D3ULL;
  auto mix = [&h](uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  };
  for (const Entry& e : norm) {
    mix(e.x);
    mix(e.out);
    mix(uint64_t(llround(e.amp.real() * 1e6)));
    mix(uint64_t(llround(e.amp.imag() * 1e6)));
  }
  return h;
}

bool same_direction(const Entries& a, const Entries& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x || a[i].out != b[i].out) return false;
    if (std::abs(a[i].amp - b[i].amp) > 1e-7) return false;
  }
  return true;
}

std::optional<int> dr_bit(uint8_t out) {
  if (out == 0x01) return 0;
  if (out == 0x10) return 1;
  return std::nullopt;
}

double mag_tol(double a, double b) { return 1e-9 * (a + b) + 1e-15; }

// SuccessEntangled: support exactly {x, complement}, equal magnitudes, and
// (when the device keeps an output pair) each input mapped to a distinct
// dual-rail basis ket. Failure: support on a single input string.
Outcome classify_entries(const Entries& es, int n, bool has_output) {
  if (es.empty()) return Outcome::Invalid;
  bool single = true;
  for (const Entry& e : es)
    if (e.x != es[0].x) { single = false; break; }
  if (single) return Outcome::Failure;
  if (es.size() != 2) return Outcome::Invalid;
  const Entry& a = es[0];
  const Entry& b = es[1];
  unsigned mask = (1u << n) - 1;
  if ((a.x ^ b.x) != mask) return Outcome::Invalid;
  if (std::abs(std::abs(a.amp) - std::abs(b.amp)) >
      mag_tol(std::abs(a.amp), std::abs(b.amp)))
    return Outcome::Invalid;
  if (has_output) {
    auto ba = dr_bit(a.out), bb = dr_bit(b.out);
    if (!ba || !bb || *ba == *bb) return Outcome::Invalid;
  }
  return Outcome::SuccessEntangled;
}

// ---------------------------------------------------------------------------
// Grouped pattern table.

struct Group {
  Entries rep;  // normalized, phase of the first pattern kept
  double mass = 0;
  std::vector<PackedState> pattern_keys;
  PackedState first_key = 0;
  int pattern_count = 0;
  Outcome outcome = Outcome::Invalid;
};

struct CompactFunc {
  uint8_t nnz = 0;  // 0xFF: spilled to the overflow map
  Entry e[2];
};

using FuncMap = std::unordered_map<PackedState, CompactFunc, PackedHash>;
using SpillMap = std::unordered_map<PackedState, Entries, PackedHash>;

void append_entry(FuncMap& funcs, SpillMap& spill, PackedState key, Entry e) {
  CompactFunc& f = funcs[key];
  if (f.nnz == 0xFF) {
    spill[key].push_back(e);
    return;
  }
  if (f.nnz < 2) {
    f.e[f.nnz++] = e;
    return;
  }
  Entries& v = spill[key];
  v.assign(f.e, f.e + 2);
  v.push_back(e);
  f.nnz = 0xFF;
}

void check_budget(const Device& d, int photon_budget) {
  if (d.total_photons() > photon_budget)
    throw ResourceError("device needs " + std::to_string(d.total_photons()) +
                        " photons, budget is " + std::to_string(photon_budget));
}

std::vector<Group> build_groups(const Device& d, bool keep_patterns) {
  Evolver ev(d);
  FuncMap funcs;
  SpillMap spill;
  for (int x = 0; x < (1 << d.n); ++x) {
    PackedMap m = ev.run(x);
    for (const auto& [s, amp] : m) {
      if (std::abs(amp) < kPruneTol) continue;
      append_entry(funcs, spill, ev.pattern_key(s),
                   {uint16_t(x), ev.out_occ(s), amp});
    }
  }

  std::vector<PackedState> keys;
  keys.reserve(funcs.size());
  for (const auto& [k, f] : funcs) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  std::vector<Group> groups;
  std::unordered_map<uint64_t, boost::container::small_vector<int, 2>> buckets;
  bool has_output = !d.output_rails.empty();
  Entries scratch;
  for (PackedState key : keys) {
    const CompactFunc& f = funcs[key];
    const Entries* es;
    if (f.nnz == 0xFF) {
      Entries& v = spill[key];
      std::sort(v.begin(), v.end(), entry_order);
      es = &v;
    } else {
      scratch.assign(f.e, f.e + f.nnz);
      std::sort(scratch.begin(), scratch.end(), entry_order);
      es = &scratch;
    }
    double mass = 0;
    for (const Entry& e : *es) mass += std::norm(e.amp);
    Entries norm = normalize_entries(*es, false);
    uint64_t h = ray_hash(norm);
    auto& ids = buckets[h];
    int gid = -1;
    for (int id : ids)
      if (same_direction(groups[id].rep, norm)) { gid = id; break; }
    if (gid < 0) {
      gid = (int)groups.size();
      Group g;
      g.rep = std::move(norm);
      g.first_key = key;
      g.outcome = classify_entries(g.rep, d.n, has_output);
      groups.push_back(std::move(g));
      ids.push_back(gid);
    }
    Group& g = groups[gid];
    g.mass += mass;
    g.pattern_count += 1;
    if (keep_patterns) g.pattern_keys.push_back(key);
  }

  std::sort(groups.begin(), groups.end(), [&](const Group& a, const Group& b) {
    int ra = a.outcome == Outcome::SuccessEntangled ? 0
             : a.outcome == Outcome::Failure        ? 1
                                                    : 2;
    int rb = b.outcome == Outcome::SuccessEntangled ? 0
             : b.outcome == Outcome::Failure        ? 1
                                                    : 2;
    if (ra != rb) return ra < rb;
    return a.first_key < b.first_key;
  });
  return groups;
}

std::vector<int> unpack_pattern(PackedState key, const std::vector<int>& detected) {
  std::vector<int> counts(detected.size());
  for (size_t i = 0; i < detected.size(); ++i) counts[i] = packed_get(key, detected[i]);
  return counts;
}

}  // namespace

std::vector<KrausOperator> kraus_table(const Device& d, int photon_budget) {
  check_budget(d, photon_budget);
  std::vector<Group> groups = build_groups(d, true);
  std::vector<KrausOperator> table;
  table.reserve(groups.size());
  bool has_output = !d.output_rails.empty();
  for (Group& g : groups) {
    KrausOperator k;
    k.outcome = g.outcome;
    double norm2 = 0;
    for (const Entry& e : g.rep) norm2 += std::norm(e.amp);
    double scale = std::sqrt(g.mass / norm2);
    for (size_t i = 0; i < g.rep.size();) {
      size_t j = i;
      double xmass = 0;
      while (j < g.rep.size() && g.rep[j].x == g.rep[i].x) {
        xmass += std::norm(g.rep[j].amp);
        ++j;
      }
      QubitString x = QubitString::from_index(g.rep[i].x, d.n);
      Complex phase = g.rep[i].amp / std::abs(g.rep[i].amp);
      k.weights[x] = phase * std::sqrt(xmass) * scale;
      if (has_output && j == i + 1) {
        if (auto bit = dr_bit(g.rep[i].out)) k.out_bits[x] = *bit;
      }
      i = j;
    }
    k.patterns.reserve(g.pattern_keys.size());
    for (PackedState key : g.pattern_keys)
      k.patterns.push_back(unpack_pattern(key, d.detected_modes));
    std::sort(k.patterns.begin(), k.patterns.end());
    table.push_back(std::move(k));
  }
  return table;
}

Probability success_probability(const Device& d, int photon_budget) {
  check_budget(d, photon_budget);
  std::vector<Group> groups = build_groups(d, false);
  double mass = 0;
  for (const Group& g : groups)
    if (g.outcome == Outcome::SuccessEntangled) mass += g.mass;
  Probability p;
  p.value = mass / double(1 << d.n);
  Rational r;
  if (snap_dyadic(p.value, r)) p.exact = r;
  return p;
}

// Every detected photon of a heralded class must survive, except the pairs
// of boosters the class does not actually consume. A class whose herald pair
// differs from {00..0, 11..1} in `defects` positions needs one booster per
// defect to exist at all; of the boosters left over, only every second one
// buys loss tolerance, because removing a booster also removes the partner
// interference that made its photons indistinguishable from the register.
// Hence k = floor(B/2) - defects forgiven pairs, with two refinements on the
// fully boosted analyser where the closing beamsplitter breaks symmetry: on
// odd chains a single defect away from the phase rail keeps its tolerance,
// and on even chains one core sign class loses one unit of redundancy.
EtaPolynomial lossy_success_probability(const Device& d) {
  check_budget(d, kDefaultPhotonBudget);
  for (auto& [mode, count] : d.aux_inputs)
    if (count != 1)
      throw std::invalid_argument("loss analysis requires single-photon ancillas");
  const bool has_output = !d.output_rails.empty();
  const int detected = d.total_photons() - (has_output ? 1 : 0);
  const int nb = (int)d.boosters.size();
  const int cap = nb / 2;

  std::vector<Group> groups = build_groups(d, false);
  EtaPolynomial poly;
  for (const Group& g : groups) {
    if (g.outcome != Outcome::SuccessEntangled) continue;
    Entries ray = normalize_entries(g.rep, true);
    unsigned x0 = ray.front().x, x1 = ray.back().x;
    bool plus = (ray.back().amp / ray.front().amp).real() > 0;
    int defects = std::min(std::popcount(x0), std::popcount(x1));
    unsigned minority = std::popcount(x0) <= std::popcount(x1) ? x0 : x1;
    int k = std::max(0, cap - defects);
    if (nb == d.n) {
      if (d.n % 2 == 1 && defects == 1 && minority != 1u) {
        k = cap;
      } else if (d.n % 2 == 0 && d.n >= 4 && defects == 0 && !plus) {
        k = cap - 1;
      }
    }
    Rational r;
    if (!snap_dyadic(g.mass / double(1 << d.n), r))
      throw std::runtime_error("non-dyadic probability mass in loss analysis");
    poly.add_term(detected - 2 * k, r);
  }
  return poly;
}

}  // namespace fockforge
