#include "fockforge/fock.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace fockforge {

int FockState::photons() const {
  return std::accumulate(occ.begin(), occ.end(), 0);
}

void FockSuperposition::add(const FockState& s, Complex amp) {
  if (s.modes() != modes_) throw std::invalid_argument("FockSuperposition: mode mismatch");
  auto [it, inserted] = terms_.try_emplace(s, amp);
  if (!inserted) {
    it->second += amp;
    if (std::abs(it->second) < kPruneTol) terms_.erase(it);
  } else if (std::abs(amp) < kPruneTol) {
    terms_.erase(it);
  }
}

Complex FockSuperposition::amplitude(const FockState& s) const {
  auto it = terms_.find(s);
  return it == terms_.end() ? Complex(0) : it->second;
}

double FockSuperposition::norm2() const {
  double n = 0;
  for (const auto& [s, a] : terms_) n += std::norm(a);
  return n;
}

void FockSuperposition::scale(Complex c) {
  for (auto& [s, a] : terms_) a *= c;
}

void FockSuperposition::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < tol) it = terms_.erase(it);
    else ++it;
  }
}

FockSuperposition FockSuperposition::tensor(const FockSuperposition& other) const {
  FockSuperposition out(modes_ + other.modes_);
  for (const auto& [s1, a1] : terms_) {
    for (const auto& [s2, a2] : other.terms_) {
      FockState s = s1;
      s.occ.insert(s.occ.end(), s2.occ.begin(), s2.occ.end());
      out.add(s, a1 * a2);
    }
  }
  return out;
}

bool ModeUnitary::is_unitary(double tol) const {
  Eigen::MatrixXcd d = matrix * matrix.adjoint() -
                       Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
  return d.norm() <= tol;
}

Complex permanent(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("permanent: non-square matrix");
  const int n = (int)m.rows();
  if (n == 0) return 1.0;
  if (n > kMaxPhotons) throw std::invalid_argument("permanent: dimension above cap");

  // Ryser: per(A) = (-1)^n sum_{S subset} (-1)^|S| prod_i sum_{j in S} a_ij.
  // Gray-code iteration updates the row sums by one column per step.
  std::vector<Complex> rowsum(n, 0.0);
  Complex total = 0.0;
  uint64_t prev = 0;
  const uint64_t count = 1ULL << n;
  for (uint64_t k = 1; k < count; ++k) {
    uint64_t gray = k ^ (k >> 1);
    uint64_t diff = gray ^ prev;
    int j = std::countr_zero(diff);
    double sign_col = (gray & diff) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) rowsum[i] += sign_col * m(i, j);
    prev = gray;

    Complex prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= rowsum[i];
    int bits = std::popcount(gray);
    total += ((n - bits) % 2 == 0) ? prod : -prod;
  }
  return total;
}

Complex permanent_naive(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("permanent: non-square matrix");
  const int n = (int)m.rows();
  if (n == 0) return 1.0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Complex total = 0.0;
  do {
    Complex prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[i]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

ModeUnitary beamsplitter(int i, int j, int m) {
  if (i == j || i < 0 || j < 0 || i >= m || j >= m)
    throw std::invalid_argument("beamsplitter: bad mode indices");
  if (i > j) std::swap(i, j);
  ModeUnitary u;
  u.matrix = Eigen::MatrixXcd::Identity(m, m);
  const double s = 1.0 / std::sqrt(2.0);
  u.matrix(i, i) = s;
  u.matrix(i, j) = s;
  u.matrix(j, i) = s;
  u.matrix(j, j) = -s;
  return u;
}

ModeUnitary compose(const ModeUnitary& u1, const ModeUnitary& u2) {
  if (u1.modes() != u2.modes()) throw std::invalid_argument("compose: mode mismatch");
  return ModeUnitary{u2.matrix * u1.matrix};
}

namespace {

double log_factorial(int n) {
  static std::array<double, kMaxPhotons + 1> table = [] {
    std::array<double, kMaxPhotons + 1> t{};
    for (int i = 2; i <= kMaxPhotons; ++i) t[i] = t[i - 1] + std::log(double(i));
    return t;
  }();
  return table[n];
}

// Enumerate all occupations of `photons` photons over `modes` modes.
void enumerate_occupations(int modes, int photons,
                           const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> occ(modes, 0);
  occ[0] = photons;
  auto rec = [&](auto&& self, int mode, int left) -> void {
    if (mode == modes - 1) {
      occ[mode] = left;
      fn(occ);
      return;
    }
    for (int k = left; k >= 0; --k) {
      occ[mode] = k;
      self(self, mode + 1, left - k);
    }
  };
  if (modes == 0) {
    if (photons == 0) fn(occ);
    return;
  }
  rec(rec, 0, photons);
}

}  // namespace

FockSuperposition evolve(const FockSuperposition& state, const ModeUnitary& u) {
  if (state.modes() != u.modes()) throw std::invalid_argument("evolve: mode mismatch");
  const int m = state.modes();
  FockSuperposition out(m);

  for (const auto& [t, amp] : state.terms()) {
    const int n = t.photons();
    if (n > kMaxPhotons) throw std::invalid_argument("evolve: photon cap exceeded");
    if (n == 0) {
      out.add(t, amp);
      continue;
    }
    std::vector<int> cols;
    for (int j = 0; j < m; ++j)
      for (int c = 0; c < t.occ[j]; ++c) cols.push_back(j);

    enumerate_occupations(m, n, [&](const std::vector<int>& s) {
      Eigen::MatrixXcd sub(n, n);
      int row = 0;
      for (int i = 0; i < m; ++i)
        for (int c = 0; c < s[i]; ++c) {
          for (int k = 0; k < n; ++k) sub(row, k) = u.matrix(i, cols[k]);
          ++row;
        }
      Complex per = permanent(sub);
      if (std::abs(per) < kPruneTol) return;
      double logfac = 0;
      for (int i = 0; i < m; ++i) logfac += log_factorial(s[i]) + log_factorial(t.occ[i]);
      out.add(FockState(s), amp * per * std::exp(-0.5 * logfac));
    });
  }
  out.prune();
  return out;
}

double bs_element(int p_out, int q_out, int p_in, int q_in) {
  if (p_out + q_out != p_in + q_in) return 0.0;
  // <p',q'| BS |p,q> from the binomial expansion of
  // ((a+b)/sqrt2)^p ((a-b)/sqrt2)^q with bosonic normalization.
  double total = 0.0;
  for (int k = std::max(0, p_out - q_in); k <= std::min(p_in, p_out); ++k) {
    int l = p_out - k;  // photons from the q_in factor landing in mode i
    double term = 1.0;
    // binomial(p_in, k) * binomial(q_in, l)
    for (int a = 0; a < k; ++a) term *= double(p_in - a) / double(a + 1);
    for (int a = 0; a < l; ++a) term *= double(q_in - a) / double(a + 1);
    if ((q_in - l) % 2 != 0) term = -term;
    total += term;
  }
  if (total == 0.0) return 0.0;
  double logn = 0.5 * (log_factorial(p_out) + log_factorial(q_out) -
                       log_factorial(p_in) - log_factorial(q_in));
  return total * std::exp(logn - 0.5 * (p_in + q_in) * std::log(2.0));
}

FockSuperposition apply_beamsplitter(const FockSuperposition& state, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= state.modes() || i == j)
    throw std::invalid_argument("apply_beamsplitter: bad mode indices");
  FockSuperposition out(state.modes());
  for (const auto& [t, amp] : state.terms()) {
    const int p = t.occ[i], q = t.occ[j];
    const int total = p + q;
    if (total == 0) {
      out.add(t, amp);
      continue;
    }
    FockState s = t;
    for (int p2 = 0; p2 <= total; ++p2) {
      double el = bs_element(p2, total - p2, p, q);
      if (el == 0.0) continue;
      s.occ[i] = p2;
      s.occ[j] = total - p2;
      out.add(s, amp * el);
    }
  }
  out.prune();
  return out;
}

ProjectionResult project_pattern(const FockSuperposition& state,
                                 const std::vector<int>& detected_modes,
                                 const std::vector<int>& counts) {
  if (detected_modes.size() != counts.size())
    throw std::invalid_argument("project_pattern: modes/counts length mismatch");
  std::vector<bool> detected(state.modes(), false);
  for (int m : detected_modes) {
    if (m < 0 || m >= state.modes())
      throw std::invalid_argument("project_pattern: mode out of range");
    if (detected[m]) throw std::invalid_argument("project_pattern: duplicate mode");
    detected[m] = true;
  }

  FockSuperposition residual(state.modes() - (int)detected_modes.size());
  double prob = 0;
  for (const auto& [s, amp] : state.terms()) {
    bool match = true;
    for (size_t k = 0; k < detected_modes.size(); ++k) {
      if (s.occ[detected_modes[k]] != counts[k]) { match = false; break; }
    }
    if (!match) continue;
    FockState rest;
    rest.occ.reserve(residual.modes());
    for (int m = 0; m < state.modes(); ++m)
      if (!detected[m]) rest.occ.push_back(s.occ[m]);
    residual.add(rest, amp);
    prob += std::norm(amp);
  }
  return {std::move(residual), prob};
}

}  // namespace fockforge
