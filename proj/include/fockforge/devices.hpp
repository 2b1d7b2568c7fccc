#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockforge/dualrail.hpp"
#include "fockforge/fock.hpp"
#include "fockforge/polynomial.hpp"
#include "fockforge/rational.hpp"

namespace fockforge {

// Thrown when a computation would exceed an explicit resource limit, as
// opposed to being malformed.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Default input-photon budget for table enumeration; raise explicitly when a
// larger boosted device is genuinely wanted. A single detector nibble holds
// at most 15 photons, which no in-budget device approaches.
constexpr int kDefaultPhotonBudget = 16;

enum class Outcome { SuccessEntangled, Failure, Invalid };

std::string outcome_name(Outcome o);

// A probability that is exact when the underlying amplitudes square to
// dyadic rationals (they do for circuits of 50:50 beamsplitters).
struct Probability {
  double value = 0;
  std::optional<Rational> exact;

  std::string str() const;
};

// One auxiliary booster: two extra modes carrying one photon each, mixed on
// an internal beamsplitter and then coupled, one to each rail of the target
// qubit, after that rail has passed the analyser network.
struct Booster {
  int qubit;
  int mode_a;
  int mode_b;
  std::pair<int, int> internal;  // NOON preparation, (mode_a, mode_b)
  std::pair<int, int> couple0;   // (rail0, mode_a)
  std::pair<int, int> couple1;   // (rail1, mode_b)
};

// A measurement device: a beamsplitter network in front of a PNRD array.
// Ordered beamsplitter pairs (plus, minus) mean the mode listed first keeps
// the +1 matrix column, the second the -1. The full network is: booster
// internal preparations, then the core network, then booster couplings,
// then a sign flip on each mode in phase_pi_modes.
struct Device {
  int modes = 0;
  int n = 0;                                      // input qubit count
  std::vector<std::pair<int, int>> qubit_rails;   // (mode, mode) per qubit
  std::vector<std::pair<int, int>> aux_inputs;    // (mode, photon count)
  std::vector<int> detected_modes;
  std::vector<std::pair<int, int>> output_rails;  // at most one pair here
  std::vector<std::pair<int, int>> core_network;
  std::vector<int> phase_pi_modes;
  std::vector<Booster> boosters;

  std::vector<std::pair<int, int>> network() const;
  ModeUnitary unitary() const;
  int total_photons() const;
  int output_qubits() const { return (int)output_rails.size(); }
};

struct LossModel {
  double eta = 1.0;
};

// Grouped measurement operator for a set of detector patterns whose induced
// functionals are proportional with positive real ratio. The representative
// keeps the phase of the group's first pattern and is scaled so that the
// squared weights sum to the whole group's probability mass.
struct KrausOperator {
  std::map<QubitString, Complex> weights;  // bra-side functional on inputs
  std::map<QubitString, int> out_bits;     // fusion only: output bit per bra
  std::vector<std::vector<int>> patterns;  // counts in detected_modes order
  Outcome outcome = Outcome::Invalid;

  double mass() const;  // sum of squared weights
};

Device bell_analyser();
Device ghz_analyser(int n);
Device type1_fusion(int n);

// Couples an SQA booster to the given qubit: two auxiliary single photons
// mixed on an internal beamsplitter, each output then coupled to one rail of
// the qubit downstream of the analyser network. Both rails must be detected.
Device attach_sqa_beta(const Device& d, int qubit);

// Enumerates every detector pattern, groups proportional functionals and
// classifies each group. Throws when the device needs more input photons
// than the budget.
std::vector<KrausOperator> kraus_table(const Device& d,
                                       int photon_budget = kDefaultPhotonBudget);

// SuccessEntangled iff the support is exactly {x, complement(x)} with equal
// magnitudes; Failure iff a single basis string; Invalid otherwise.
Outcome classify(const std::map<QubitString, Complex>& weights);

// (1/2^n) * sum over success patterns of the functional mass.
Probability success_probability(const Device& d,
                                int photon_budget = kDefaultPhotonBudget);

// Exact polynomial in the per-photon transmission eta. Each heralded class
// contributes mass * eta^(photons it consumes): all detected photons except
// one auxiliary pair per booster the class does not rely on. An output
// photon that survives the device is never charged.
EtaPolynomial lossy_success_probability(const Device& d);
double lossy_success_probability(const Device& d, const LossModel& loss);

// Photon-number resolution needed to post-select correctly: the largest
// count in any success pattern, or more when capped readings would confuse
// a success pattern with another outcome.
int required_pnr(const Device& d);

}  // namespace fockforge
