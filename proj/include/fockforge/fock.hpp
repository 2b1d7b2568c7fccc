#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace fockforge {

using Complex = std::complex<double>;

constexpr int kMaxPhotons = 20;        // permanent cost is 2^k
constexpr double kAmpTol = 1e-9;       // amplitude comparison tolerance
constexpr double kPruneTol = 1e-12;    // below this a term is treated as zero

// Photon occupation numbers, one entry per optical mode.
struct FockState {
  std::vector<int> occ;

  FockState() = default;
  explicit FockState(std::vector<int> o) : occ(std::move(o)) {}
  static FockState vacuum(int modes) { return FockState(std::vector<int>(modes, 0)); }

  int modes() const { return (int)occ.size(); }
  int photons() const;

  bool operator<(const FockState& o) const { return occ < o.occ; }
  bool operator==(const FockState& o) const { return occ == o.occ; }
};

// Sparse complex superposition of Fock states on a fixed mode count.
// Terms are kept in lexicographic occupation order so iteration (and thus
// all output) is deterministic. Zero-amplitude terms are pruned.
class FockSuperposition {
 public:
  explicit FockSuperposition(int modes) : modes_(modes) {}

  static FockSuperposition single(const FockState& s, Complex amp = 1.0) {
    FockSuperposition psi(s.modes());
    psi.add(s, amp);
    return psi;
  }

  int modes() const { return modes_; }
  const std::map<FockState, Complex>& terms() const { return terms_; }

  void add(const FockState& s, Complex amp);
  Complex amplitude(const FockState& s) const;
  double norm2() const;
  void scale(Complex c);
  void prune(double tol = kPruneTol);

  // Tensor product on disjoint mode ranges; other's modes are appended.
  FockSuperposition tensor(const FockSuperposition& other) const;

 private:
  int modes_;
  std::map<FockState, Complex> terms_;
};

// m x m unitary scattering matrix acting on mode creation operators.
struct ModeUnitary {
  Eigen::MatrixXcd matrix;

  int modes() const { return (int)matrix.rows(); }
  bool is_unitary(double tol = 1e-9) const;
};

// Matrix permanent via Ryser's inclusion-exclusion formula with Gray-code
// subset updates, O(2^k * k). Exact method, feasible to k = 20.
Complex permanent(const Eigen::MatrixXcd& m);

// Reference O(k!) permanent used as a test oracle for small k.
Complex permanent_naive(const Eigen::MatrixXcd& m);

// 50:50 beamsplitter between modes i < j: identity except for the block
// (1/sqrt 2) {{1,1},{1,-1}} on rows/columns (i, j). Hermitian involution.
ModeUnitary beamsplitter(int i, int j, int m);

// Matrix product u2 * u1 (u1 applied first).
ModeUnitary compose(const ModeUnitary& u1, const ModeUnitary& u2);

// Full multiphoton evolution. The amplitude from input |t> to output |s>
// is per(U_{s,t}) / sqrt(prod s_i! prod t_i!) where U_{s,t} repeats rows
// with multiplicity s and columns with multiplicity t.
FockSuperposition evolve(const FockSuperposition& state, const ModeUnitary& u);

// Single-beamsplitter update. Equivalent to evolve(state, beamsplitter(...))
// but linear in the number of stored terms; heavy enumeration uses chains of
// these instead of one dense scattering matrix.
FockSuperposition apply_beamsplitter(const FockSuperposition& state, int i, int j);

// Two-mode matrix element <p',q'| BS |p,q> of the 50:50 beamsplitter.
double bs_element(int p_out, int q_out, int p_in, int q_in);

// Projects the given detector counts on a subset of modes. Returns the
// (subnormalized) state of the remaining modes and the outcome probability.
struct ProjectionResult {
  FockSuperposition residual;
  double probability;
};
ProjectionResult project_pattern(const FockSuperposition& state,
                                 const std::vector<int>& detected_modes,
                                 const std::vector<int>& counts);

}  // namespace fockforge
