#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fockforge/devices.hpp"
#include "fockforge/packed.hpp"
#include "fockforge/zx.hpp"

namespace fockforge {

namespace {

constexpr double kAmplitudeFloor = 1e-12;
constexpr int kMaxOutputQubits = 8;

// Fock modes are a scarce resource (32 packed slots), so wire slots are
// rented for the lifetime of the wire: allocated when the producer fires,
// returned once a device has detected them.
class SlotPool {
 public:
  std::pair<int, int> rent() {
    if (free_.empty()) {
      if (next_ + 2 > kPackedMaxModes)
        throw ResourceError("more than " + std::to_string(kPackedMaxModes / 2) +
                            " simultaneously live wires");
      next_ += 2;
      return {next_ - 2, next_ - 1};
    }
    auto p = free_.back();
    free_.pop_back();
    return p;
  }
  void give_back(std::pair<int, int> p) { free_.push_back(p); }

 private:
  std::vector<std::pair<int, int>> free_;
  int next_ = 0;
};

void drop_dust(PackedMap& state) {
  for (auto it = state.begin(); it != state.end();)
    it = std::abs(it->second) < kAmplitudeFloor ? state.erase(it) : std::next(it);
}

}  // namespace

SchemeRun simulate_scheme(const LOScheme& s,
                          const std::map<int, std::vector<int>>& patterns) {
  s.validate();
  int photons = 0, output_qubits = 0;
  for (const SchemeNode& nd : s.nodes) {
    if (nd.kind == NodeKind::Seed) photons += nd.n;
    if (nd.kind == NodeKind::Output) output_qubits++;
  }
  if (photons > kDefaultPhotonBudget)
    throw ResourceError("scheme carries " + std::to_string(photons) +
                        " photons, budget is " +
                        std::to_string(kDefaultPhotonBudget));
  if (output_qubits > kMaxOutputQubits)
    throw ResourceError("scheme has " + std::to_string(output_qubits) +
                        " output qubits, simulation cap is " +
                        std::to_string(kMaxOutputQubits));

  // to-port -> wire, then wire -> rented slot pair as production happens.
  std::map<std::pair<int, int>, int> feeds;
  for (size_t w = 0; w < s.wires.size(); ++w)
    feeds[{s.wires[w].to, s.wires[w].to_port}] = (int)w;
  std::vector<std::pair<int, int>> wire_slots(s.wires.size(), {-1, -1});
  auto incoming = [&](int node, int port) -> std::pair<int, int>& {
    return wire_slots[feeds.at({node, port})];
  };
  auto outgoing = [&](int node, int port) -> int {
    for (size_t w = 0; w < s.wires.size(); ++w)
      if (s.wires[w].from == node && s.wires[w].from_port == port) return (int)w;
    throw std::logic_error("unwired output port");
  };

  SlotPool pool;
  PackedMap state;
  state[PackedState(0)] = Complex(1, 0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  for (int node : s.topo_order()) {
    const SchemeNode& nd = s.nodes[node];
    switch (nd.kind) {
      case NodeKind::Seed: {
        std::vector<std::pair<int, int>> legs(nd.n);
        for (int q = 0; q < nd.n; ++q) {
          legs[q] = pool.rent();
          wire_slots[outgoing(node, q)] = legs[q];
        }
        PackedMap next;
        next.reserve(state.size() * 2);
        for (const auto& [t, amp] : state)
          for (int bit = 0; bit < 2; ++bit) {
            PackedState u = t;
            for (int q = 0; q < nd.n; ++q)
              u = packed_set(u, bit ? legs[q].second : legs[q].first, 1);
            next[u] += amp * inv_sqrt2;
          }
        state = std::move(next);
        break;
      }
      case NodeKind::Beamsplitter: {
        std::pair<int, int> rails = incoming(node, 0);
        packed_apply_beamsplitter(state, rails.first, rails.second);
        wire_slots[outgoing(node, 0)] = rails;
        break;
      }
      case NodeKind::Fusion:
      case NodeKind::Analyser: {
        Device dev = node_device(s, node);
        std::vector<int> slot(dev.modes, -1);
        for (int q = 0; q < dev.n; ++q) {
          std::pair<int, int> rails = incoming(node, q);
          slot[dev.qubit_rails[q].first] = rails.first;
          slot[dev.qubit_rails[q].second] = rails.second;
        }
        for (auto [i, j] : dev.network())
          packed_apply_beamsplitter(state, slot[i], slot[j]);
        if (!dev.phase_pi_modes.empty()) {
          PackedMap flipped;
          flipped.reserve(state.size());
          for (const auto& [t, amp] : state) {
            int par = 0;
            for (int m : dev.phase_pi_modes) par += packed_get(t, slot[m]);
            flipped[t] = par % 2 ? -amp : amp;
          }
          state = std::move(flipped);
        }
        auto it = patterns.find(node);
        if (it == patterns.end())
          throw std::invalid_argument("no detector pattern for node " +
                                      std::to_string(node));
        const std::vector<int>& pat = it->second;
        if (pat.size() != dev.detected_modes.size())
          throw std::invalid_argument("pattern for node " + std::to_string(node) +
                                      " must list " +
                                      std::to_string(dev.detected_modes.size()) +
                                      " detector counts");
        PackedMap kept;
        for (const auto& [t, amp] : state) {
          bool match = true;
          PackedState u = t;
          for (size_t k = 0; k < pat.size(); ++k) {
            int m = slot[dev.detected_modes[k]];
            if (packed_get(t, m) != pat[k]) { match = false; break; }
            u = packed_set(u, m, 0);
          }
          if (match) kept[u] += amp;
        }
        state = std::move(kept);
        drop_dust(state);
        std::set<int> live;
        for (const auto& [r0, r1] : dev.output_rails) {
          live.insert(slot[r0]);
          live.insert(slot[r1]);
        }
        for (int q = 0; q < dev.n; ++q) {
          std::pair<int, int> rails = incoming(node, q);
          if (!live.count(rails.first) && !live.count(rails.second))
            pool.give_back(rails);
        }
        for (const auto& [r0, r1] : dev.output_rails)
          wire_slots[outgoing(node, 0)] = {slot[r0], slot[r1]};
        break;
      }
      case NodeKind::Output:
        break;
    }
  }

  std::vector<std::pair<int, int>> out_rails;
  for (size_t i = 0; i < s.nodes.size(); ++i)
    if (s.nodes[i].kind == NodeKind::Output)
      out_rails.push_back(incoming((int)i, 0));

  SchemeRun run;
  for (const auto& [t, amp] : state) {
    run.probability += std::norm(amp);
    QubitString bits(std::vector<int>(out_rails.size(), 0));
    bool dual_rail = true;
    for (size_t q = 0; q < out_rails.size(); ++q) {
      int a = packed_get(t, out_rails[q].first);
      int b = packed_get(t, out_rails[q].second);
      if (a == 1 && b == 0) bits.bits[q] = 0;
      else if (a == 0 && b == 1) bits.bits[q] = 1;
      else dual_rail = false;
    }
    if (!dual_rail)
      throw std::runtime_error("detector pattern leaves a non-dual-rail output");
    run.output[bits] += amp;
  }
  return run;
}

PauliFrame find_pauli_frame(const std::map<QubitString, Complex>& state,
                            const std::vector<Complex>& reference,
                            double tol) {
  size_t dim = reference.size();
  if (dim == 0 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("reference length must be a power of two");
  int n = std::countr_zero(dim);

  std::vector<Complex> vec(dim, Complex(0, 0));
  double norm2 = 0, ref2 = 0;
  for (const auto& [qs, amp] : state) {
    if (qs.n() != n) return {};
    vec[qs.index()] = amp;
    norm2 += std::norm(amp);
  }
  for (const Complex& a : reference) ref2 += std::norm(a);
  if (norm2 < tol || ref2 < tol) return {};
  for (Complex& a : vec) a /= std::sqrt(norm2);
  std::vector<Complex> ref = reference;
  for (Complex& a : ref) a /= std::sqrt(ref2);

  for (uint32_t x = 0; x < dim; ++x)
    for (uint32_t z = 0; z < dim; ++z) {
      // candidate = Z^z X^x |state>, compared entrywise against ref.
      uint32_t pivot = 0;
      while (pivot < dim && std::abs(ref[pivot]) <= tol) ++pivot;
      auto cand = [&](uint32_t b) {
        Complex a = vec[b ^ x];
        return std::popcount(b & z) % 2 ? -a : a;
      };
      if (pivot == dim || std::abs(cand(pivot)) <= tol) continue;
      Complex lambda = ref[pivot] / cand(pivot);
      if (std::abs(std::abs(lambda) - 1.0) > 1e-6) continue;
      bool ok = true;
      for (uint32_t b = 0; b < dim && ok; ++b)
        ok = std::abs(ref[b] - lambda * cand(b)) <= tol * 10;
      if (ok) {
        PauliFrame f;
        f.found = true;
        f.x_mask = x;
        f.z_mask = z;
        f.phase = lambda;
        return f;
      }
    }
  return {};
}

}  // namespace fockforge
