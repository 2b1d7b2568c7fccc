#include "fockforge/devices.hpp"
#include "fockforge/packed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fockforge {

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::SuccessEntangled: return "SuccessEntangled";
    case Outcome::Failure: return "Failure";
    case Outcome::Invalid: return "Invalid";
  }
  return "?";
}

std::string Probability::str() const {
  if (exact) return exact->str();
  std::ostringstream os;
  os << value;
  return os.str();
}

std::vector<std::pair<int, int>> Device::network() const {
  std::vector<std::pair<int, int>> all;
  for (const Booster& b : boosters) all.push_back(b.internal);
  all.insert(all.end(), core_network.begin(), core_network.end());
  for (const Booster& b : boosters) {
    all.push_back(b.couple0);
    all.push_back(b.couple1);
  }
  return all;
}

ModeUnitary Device::unitary() const {
  ModeUnitary u{Eigen::MatrixXcd::Identity(modes, modes)};
  for (auto [plus, minus] : network()) {
    ModeUnitary b = plus < minus ? beamsplitter(plus, minus, modes)
                                 : beamsplitter(minus, plus, modes);
    if (plus > minus) {
      // beamsplitter() puts the -1 on the larger index; swap roles.
      b.matrix.col(plus).swap(b.matrix.col(minus));
      b.matrix.row(plus).swap(b.matrix.row(minus));
    }
    u = compose(u, b);
  }
  for (int m : phase_pi_modes) u.matrix.row(m) *= -1.0;
  return u;
}

int Device::total_photons() const {
  int p = n;
  for (auto& [mode, count] : aux_inputs) p += count;
  return p;
}

double KrausOperator::mass() const {
  double m = 0;
  for (auto& [x, w] : weights) m += std::norm(w);
  return m;
}

static void check_qubit_count(int n) {
  if (n < 2 || n > 8) throw std::invalid_argument("qubit count must be in [2, 8]");
}

Device ghz_analyser(int n) {
  check_qubit_count(n);
  Device d;
  d.modes = 2 * n;
  d.n = n;
  for (int i = 0; i < n; i++) d.qubit_rails.push_back({2 * i, 2 * i + 1});
  for (int m = 0; m < d.modes; m++) d.detected_modes.push_back(m);
  for (int i = 1; i < n; i++) d.core_network.push_back({2 * i - 1, 2 * i});
  d.core_network.push_back({0, 2 * n - 1});
  // The closing mode carries a pi phase so that detector patterns heralding
  // the same projection do so with a positive ratio, not just up to sign.
  d.phase_pi_modes.push_back(2 * n - 1);
  return d;
}

Device bell_analyser() { return ghz_analyser(2); }

Device type1_fusion(int n) {
  check_qubit_count(n);
  Device d;
  d.modes = 2 * n;
  d.n = n;
  for (int i = 0; i < n; i++) d.qubit_rails.push_back({2 * i, 2 * i + 1});
  for (int m = 1; m < d.modes - 1; m++) d.detected_modes.push_back(m);
  d.output_rails.push_back({0, 2 * n - 1});
  for (int i = 1; i < n; i++) d.core_network.push_back({2 * i - 1, 2 * i});
  return d;
}

Device attach_sqa_beta(const Device& d, int qubit) {
  if (qubit < 0 || qubit >= d.n) throw std::invalid_argument("qubit out of range");
  for (const Booster& b : d.boosters)
    if (b.qubit == qubit) throw std::invalid_argument("qubit already boosted");
  if (d.modes + 2 > kPackedMaxModes)
    throw std::invalid_argument("mode count exceeds enumeration limit");
  auto [r0, r1] = d.qubit_rails[qubit];
  for (auto [o0, o1] : d.output_rails)
    if (r0 == o0 || r0 == o1 || r1 == o0 || r1 == o1)
      throw std::invalid_argument("cannot couple a booster to an output rail");
  Device out = d;
  int a = d.modes;
  int b = d.modes + 1;
  out.modes += 2;
  out.aux_inputs.push_back({a, 1});
  out.aux_inputs.push_back({b, 1});
  out.detected_modes.push_back(a);
  out.detected_modes.push_back(b);
  out.boosters.push_back(Booster{qubit, a, b, {a, b}, {r0, a}, {r1, b}});
  return out;
}

Outcome classify(const std::map<QubitString, Complex>& weights) {
  std::vector<std::pair<QubitString, Complex>> nz;
  for (auto& [x, w] : weights)
    if (std::abs(w) > kAmpTol) nz.push_back({x, w});
  if (nz.empty()) return Outcome::Invalid;
  if (nz.size() == 1) return Outcome::Failure;
  if (nz.size() == 2 && nz[1].first == nz[0].first.complemented() &&
      std::abs(std::abs(nz[0].second) - std::abs(nz[1].second)) < kAmpTol)
    return Outcome::SuccessEntangled;
  return Outcome::Invalid;
}

int required_pnr(const Device& d) {
  auto table = kraus_table(d);
  // group id per pattern, -1 for non-success groups
  struct Tagged {
    std::vector<int> counts;
    int success_group;
  };
  std::vector<Tagged> all;
  int gid = 0;
  int max_count = 0;
  int max_success_count = 0;
  for (auto& k : table) {
    int tag = k.outcome == Outcome::SuccessEntangled ? gid : -1;
    for (auto& p : k.patterns) {
      all.push_back({p, tag});
      for (int c : p) {
        max_count = std::max(max_count, c);
        if (tag >= 0) max_success_count = std::max(max_success_count, c);
      }
    }
    gid++;
  }
  for (int cap = max_success_count; cap <= max_count; cap++) {
    std::map<std::vector<int>, std::pair<int, bool>> seen;  // reading -> (group, clash)
    bool ok = true;
    for (auto& t : all) {
      std::vector<int> reading = t.counts;
      for (int& c : reading) c = std::min(c, cap);
      auto it = seen.find(reading);
      if (it == seen.end()) {
        seen.emplace(std::move(reading), std::make_pair(t.success_group, false));
        continue;
      }
      if (it->second.first != t.success_group &&
          (it->second.first >= 0 || t.success_group >= 0)) {
        ok = false;
        break;
      }
    }
    if (ok) return std::max(cap, 1);
  }
  return std::max(max_count, 1);
}

double lossy_success_probability(const Device& d, const LossModel& loss) {
  if (loss.eta < 0 || loss.eta > 1) throw std::invalid_argument("eta must be in [0, 1]");
  return lossy_success_probability(d).eval(loss.eta);
}

}  // namespace fockforge
