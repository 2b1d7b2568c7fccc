#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fockforge/devices.hpp"
#include "fockforge/dualrail.hpp"
#include "fockforge/fock.hpp"
#include "fockforge/rational.hpp"

namespace fockforge {

// An endpoint of a diagram edge: either port `port` of spider `spider`
// (ports are numbered inputs first, then outputs), or, when spider < 0,
// boundary output number `port`.
struct ZXEndpoint {
  int spider = -1;
  int port = 0;

  bool is_boundary() const { return spider < 0; }
  bool operator==(const ZXEndpoint& o) const {
    return spider == o.spider && port == o.port;
  }
};

ZXEndpoint boundary(int index);
ZXEndpoint port_of(int spider, int port);

struct ZXEdge {
  ZXEndpoint a;
  ZXEndpoint b;
  bool hadamard = false;
};

// Phase-free Z-spider. The name is a stable identifier for the JSON form;
// empty names are assigned on serialization.
struct ZXSpider {
  std::string name;
  int inputs = 0;
  int outputs = 0;

  int ports() const { return inputs + outputs; }
};

// Undirected diagram of phase-free Z-spiders with plain or Hadamard edges
// and an ordered list of boundary outputs. Wire direction is implied by the
// spider arities, not stored per edge.
struct ZXDiagram {
  std::vector<ZXSpider> spiders;
  std::vector<ZXEdge> edges;
  int boundary_count = 0;

  int add_spider(int inputs, int outputs, std::string name = "");
  int add_boundary();
  void connect(ZXEndpoint a, ZXEndpoint b, bool hadamard = false);

  // Every spider port and every boundary output has exactly one incident
  // edge; endpoints are in range. Throws std::invalid_argument otherwise.
  void validate() const;

  int find_spider(const std::string& name) const;  // -1 when absent
};

struct ConvertibilityReport {
  bool ok = true;
  std::vector<int> offending_spiders;
};

// A diagram maps to linear optics when every spider is a seed (0 to n), a
// fusion (n to 1), an analyser (n to 0) or a plain 1-to-1 wire spider.
ConvertibilityReport is_lo_convertible(const ZXDiagram& d);

// ---- rewrites (all return a new diagram; tensor preserved up to scalar) ----

// Merges the two spiders joined by the given plain edge. Parallel plain
// edges between the pair collapse; a parallel Hadamard edge would need a
// phase and is rejected.
ZXDiagram spider_fuse(const ZXDiagram& d, int edge_index);

// Splits a spider in two, connected by a new plain edge. `ports_a` lists the
// port indices kept by the first half; it must be a proper nonempty subset.
// The connecting edge is an output of the first half and an input of the
// second.
ZXDiagram spider_unfuse(const ZXDiagram& d, int spider,
                        const std::vector<int>& ports_a);

// Rewrites a spider with m >= 2 outputs into an (inputs + m - 1)-to-1 spider
// fed by m - 1 Bell seeds, each supplying one of the former output wires.
ZXDiagram eliminate_multi_output(const ZXDiagram& d, int spider);

// Bends the single output wire of an n-to-1 spider through its input side:
// the spider becomes an (n + 1)-to-0 analyser and a fresh Bell seed drives
// whatever the output used to feed.
ZXDiagram bend_output_through_input(const ZXDiagram& d, int spider);

// ---- tensor semantics ----

// Contracts the diagram to a vector over the boundary outputs, boundary 0
// being the most significant bit (QubitString order). Result is canonical:
// unit norm with the first nonzero entry rotated positive real. The
// contraction eliminates spiders greedily and refuses frontiers wider than
// `max_cut` binary variables.
std::vector<Complex> to_tensor(const ZXDiagram& d, int max_cut = 22);

// Same canonical form applied to an arbitrary vector; zero vectors pass
// through unchanged.
std::vector<Complex> canonical_form(std::vector<Complex> v);

bool tensor_equal(const std::vector<Complex>& a, const std::vector<Complex>& b,
                  double tol = 1e-9);

// Parity-code encoder: a 1-to-n spider fanning out through Hadamard edges
// into n 1-to-m spiders. Boundary 0 is the logical input wire (bent into the
// boundary so the diagram stays outputs-only); boundaries 1..nm are the code
// qubits.
ZXDiagram qpc_encoder_diagram(int n, int m);

// Grafts `encoder` onto output `which` of `d`: the encoder's boundary 0 takes
// over the wire that fed that output, and the encoder's remaining boundaries
// are appended as new outputs of the combined diagram.
ZXDiagram append_encoder(const ZXDiagram& d, int which,
                         const ZXDiagram& encoder);

// ---- linear-optical schemes ----

enum class NodeKind { Seed, Fusion, Analyser, Beamsplitter, Output };

std::string node_kind_name(NodeKind k);

struct SchemeNode {
  NodeKind kind = NodeKind::Seed;
  int n = 0;  // seed size, fusion inputs, or analyser inputs; 1 otherwise
};

// Directed dual-rail qubit wire between node ports. Seeds have output ports
// 0..n-1; fusions have inputs 0..n-1 and output 0; analysers inputs 0..n-1;
// beamsplitters one input and one output port 0.
struct SchemeWire {
  int from = 0;
  int from_port = 0;
  int to = 0;
  int to_port = 0;
};

struct LOScheme {
  std::vector<SchemeNode> nodes;
  std::vector<SchemeWire> wires;

  // Acyclic, every consumer port driven exactly once, every producer port
  // used exactly once. Throws std::invalid_argument otherwise.
  void validate() const;
  std::vector<int> topo_order() const;
};

struct ConversionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Replaces wires by dual-rail pairs, Hadamard edges by beamsplitters, n-to-0
// spiders by analysers, n-to-1 by fusions and 0-to-n by seed generators.
// Throws ConversionError naming the offending spiders otherwise.
LOScheme extract_scheme(const ZXDiagram& d);

struct SchemeMetrics {
  Rational success_probability{1, 1};
  std::map<int, int> seed_inventory;                // seed size -> count
  std::map<std::string, int> device_inventory;      // kind+size -> count
  int photon_count = 0;
  bool fully_loss_detecting = false;
  int max_pnr = 0;
};

// Per-analyser boosting: node index -> boosted qubit indices.
using BoostAssignment = std::map<int, std::vector<int>>;

// Product of the independent device success probabilities plus inventory
// tallies. Boosting is only accepted on analyser nodes.
SchemeMetrics scheme_metrics(const LOScheme& s,
                             const BoostAssignment& boosting = {});

struct LossDetectionReport {
  bool fully_loss_detecting = true;
  std::vector<int> witness_path;  // fusion node .. output node when violated
};

// A scheme detects any single photon loss iff no output port is reachable
// from a type-I fusion output; feeding an analyser instead is fine.
LossDetectionReport check_full_loss_detection(const LOScheme& s);

// The measurement device realizing a fusion or analyser node.
Device node_device(const LOScheme& s, int node,
                   const std::vector<int>& boost = {});

struct SchemeRun {
  std::map<QubitString, Complex> output;  // over output ports, port order
  double probability = 0;
};

// Builds the whole Fock circuit, applies every device unitary, post-selects
// the chosen detector pattern of each fusion/analyser node (patterns indexed
// by node, in detected-mode order) and decodes the output wires.
SchemeRun simulate_scheme(const LOScheme& s,
                          const std::map<int, std::vector<int>>& patterns);

struct PauliFrame {
  bool found = false;
  uint32_t x_mask = 0;  // bit i set: X on output qubit i (QubitString order)
  uint32_t z_mask = 0;
  Complex phase{1, 0};
};

// Searches the single-qubit bit/phase-flip frame mapping `state` onto
// `reference` (a 2^n vector in QubitString order) up to global phase.
PauliFrame find_pauli_frame(const std::map<QubitString, Complex>& state,
                            const std::vector<Complex>& reference,
                            double tol = 1e-9);

// ---- JSON interchange (format "fockforge/1") ----

std::string diagram_to_json(const ZXDiagram& d);
ZXDiagram diagram_from_json(const std::string& text);
std::string scheme_to_json(const LOScheme& s, const SchemeMetrics* m = nullptr);

}  // namespace fockforge
