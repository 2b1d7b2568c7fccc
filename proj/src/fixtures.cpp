#include "fockforge/fixtures.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace fockforge {

namespace {

// Four Bell seeds feeding a 4-GHZ analyser, one leg each; the spare legs
// are the outputs.
ZXDiagram ghz4_from_bells() {
  ZXDiagram d;
  int a = d.add_spider(4, 0, "analyser");
  for (int i = 0; i < 4; ++i) {
    int b = d.add_spider(0, 2, "bell" + std::to_string(i));
    d.connect(port_of(b, 0), boundary(d.add_boundary()));
    d.connect(port_of(b, 1), port_of(a, i));
  }
  return d;
}

// Same four Bells, but the analyser is decomposed into two 2-fusions whose
// outputs meet a Bell analyser.
ZXDiagram ghz4_fusion_tree() {
  ZXDiagram d;
  int f1 = d.add_spider(2, 1, "merge01");
  int f2 = d.add_spider(2, 1, "merge23");
  int bsm = d.add_spider(2, 0, "bsm");
  for (int i = 0; i < 4; ++i) {
    int b = d.add_spider(0, 2, "bell" + std::to_string(i));
    d.connect(port_of(b, 0), boundary(d.add_boundary()));
    d.connect(port_of(b, 1), port_of(i < 2 ? f1 : f2, i % 2));
  }
  d.connect(port_of(f1, 2), port_of(bsm, 0));
  d.connect(port_of(f2, 2), port_of(bsm, 1));
  return d;
}

// Two 3-GHZ seeds glued by a Bell analyser on one leg each.
ZXDiagram ghz4_from_ghz3() {
  ZXDiagram d;
  int bsm = d.add_spider(2, 0, "bsm");
  for (int i = 0; i < 2; ++i) {
    int g = d.add_spider(0, 3, "ghz" + std::to_string(i));
    d.connect(port_of(g, 0), boundary(d.add_boundary()));
    d.connect(port_of(g, 1), boundary(d.add_boundary()));
    d.connect(port_of(g, 2), port_of(bsm, i));
  }
  return d;
}

// Cyclic arrangement: three 3-GHZ seeds and three 2-fusions alternate
// around a six-cycle of Hadamard edges. Fusion outputs are ring qubits, so
// the scheme is not fully loss-detecting.
ZXDiagram six_ring() {
  ZXDiagram d;
  int g[3], f[3];
  for (int i = 0; i < 3; ++i) g[i] = d.add_spider(0, 3, "ghz" + std::to_string(i));
  for (int i = 0; i < 3; ++i) f[i] = d.add_spider(2, 1, "join" + std::to_string(i));
  for (int i = 0; i < 3; ++i) {
    d.connect(port_of(g[i], 0), boundary(d.add_boundary()));
    d.connect(port_of(f[i], 2), boundary(d.add_boundary()));
  }
  for (int i = 0; i < 3; ++i) {
    d.connect(port_of(g[i], 1), port_of(f[i], 0), true);
    d.connect(port_of(g[(i + 1) % 3], 2), port_of(f[i], 1), true);
  }
  return d;
}

// One 3-GHZ seed, five Bells, a fusion chain and a closing 3-GHZ analyser.
// Every fusion output is eventually measured, restoring full loss
// detection at the cost of a lower success probability.
ZXDiagram six_ring_min_seeds() {
  ZXDiagram d;
  int g = d.add_spider(0, 3, "ghz");
  d.connect(port_of(g, 0), boundary(d.add_boundary()));
  int b[6], m[6];
  for (int i = 1; i <= 5; ++i) {
    b[i] = d.add_spider(0, 2, "bell" + std::to_string(i));
    d.connect(port_of(b[i], 0), boundary(d.add_boundary()));
  }
  for (int i = 1; i <= 4; ++i) m[i] = d.add_spider(2, 1, "chain" + std::to_string(i));
  m[5] = d.add_spider(3, 0, "close");
  d.connect(port_of(b[1], 1), port_of(m[1], 0));
  d.connect(port_of(g, 1), port_of(m[1], 1), true);
  for (int i = 2; i <= 4; ++i) {
    d.connect(port_of(b[i], 1), port_of(m[i], 0));
    d.connect(port_of(m[i - 1], 2), port_of(m[i], 1), true);
  }
  d.connect(port_of(b[5], 1), port_of(m[5], 0));
  d.connect(port_of(m[4], 2), port_of(m[5], 1), true);
  d.connect(port_of(g, 2), port_of(m[5], 2), true);
  return d;
}

// The minimum-seed ring with its 3-GHZ seed unfused into two Bells and a
// 2-fusion, leaving Bell pairs as the only seed species.
ZXDiagram six_ring_bells() {
  ZXDiagram d;
  int bx = d.add_spider(0, 2, "bellx");
  int by = d.add_spider(0, 2, "belly");
  int fg = d.add_spider(2, 1, "joinxy");
  d.connect(port_of(bx, 0), boundary(d.add_boundary()));
  d.connect(port_of(bx, 1), port_of(fg, 0));
  d.connect(port_of(by, 1), port_of(fg, 1));
  int b[6], m[6];
  for (int i = 1; i <= 5; ++i) {
    b[i] = d.add_spider(0, 2, "bell" + std::to_string(i));
    d.connect(port_of(b[i], 0), boundary(d.add_boundary()));
  }
  for (int i = 1; i <= 4; ++i) m[i] = d.add_spider(2, 1, "chain" + std::to_string(i));
  m[5] = d.add_spider(3, 0, "close");
  d.connect(port_of(b[1], 1), port_of(m[1], 0));
  d.connect(port_of(fg, 2), port_of(m[1], 1), true);
  for (int i = 2; i <= 4; ++i) {
    d.connect(port_of(b[i], 1), port_of(m[i], 0));
    d.connect(port_of(m[i - 1], 2), port_of(m[i], 1), true);
  }
  d.connect(port_of(b[5], 1), port_of(m[5], 0));
  d.connect(port_of(m[4], 2), port_of(m[5], 1), true);
  d.connect(port_of(by, 0), port_of(m[5], 2), true);
  return d;
}

// Six-ring on two-qubit encoded vertices. Each vertex takes two Bell-fed
// 2-fusions; ring position 0 closes the chain with a 3-GHZ analyser and
// position 5 absorbs the bend-through Bell.
ZXDiagram six_ring_encoded() {
  ZXDiagram d;
  int f[6][2];
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 2; ++j) {
      std::string tag = std::to_string(i) + std::to_string(j);
      int b1 = d.add_spider(0, 2, "bell" + tag + "a");
      int b2 = d.add_spider(0, 2, "bell" + tag + "b");
      f[i][j] = d.add_spider(2, 1, "pair" + tag);
      d.connect(port_of(b1, 0), boundary(d.add_boundary()));
      d.connect(port_of(b2, 0), boundary(d.add_boundary()));
      d.connect(port_of(b1, 1), port_of(f[i][j], 0));
      d.connect(port_of(b2, 1), port_of(f[i][j], 1));
    }
  int r[6];
  for (int i = 1; i <= 5; ++i) {
    r[i] = d.add_spider(3, 1, "vertex" + std::to_string(i));
    d.connect(port_of(f[i][0], 2), port_of(r[i], 0), true);
    d.connect(port_of(f[i][1], 2), port_of(r[i], 1), true);
  }
  int r0a = d.add_spider(2, 1, "vertex0");
  int r0b = d.add_spider(3, 0, "close");
  d.connect(port_of(f[0][0], 2), port_of(r0a, 0), true);
  d.connect(port_of(f[0][1], 2), port_of(r0a, 1), true);
  d.connect(port_of(r0a, 2), port_of(r0b, 0));
  int spare = d.add_spider(0, 2, "bellz");
  d.connect(port_of(spare, 0), port_of(r[5], 2));
  d.connect(port_of(spare, 1), port_of(r0b, 2), true);
  for (int i = 5; i >= 2; --i) d.connect(port_of(r[i], 3), port_of(r[i - 1], 2), true);
  d.connect(port_of(r[1], 3), port_of(r0b, 1), true);
  return d;
}

// Two four-arm fusion trees over 3-GHZ seeds, joined by a Bell analyser.
ZXDiagram two_chain_encoded() {
  ZXDiagram d;
  int u = d.add_spider(4, 1, "treeu");
  int v = d.add_spider(4, 1, "treev");
  int bsm = d.add_spider(2, 0, "bsm");
  for (int k = 0; k < 8; ++k) {
    int g = d.add_spider(0, 3, "ghz" + std::to_string(k));
    d.connect(port_of(g, 0), boundary(d.add_boundary()));
    d.connect(port_of(g, 1), boundary(d.add_boundary()));
    d.connect(port_of(g, 2), port_of(k < 4 ? u : v, k % 4), true);
  }
  d.connect(port_of(u, 4), port_of(bsm, 0), true);
  d.connect(port_of(v, 4), port_of(bsm, 1));
  return d;
}

// The same two trees with every 3-GHZ seed unfused into two Bells and a
// 2-fusion.
ZXDiagram two_chain_bells() {
  ZXDiagram d;
  int u = d.add_spider(4, 1, "treeu");
  int v = d.add_spider(4, 1, "treev");
  int bsm = d.add_spider(2, 0, "bsm");
  for (int k = 0; k < 8; ++k) {
    std::string tag = std::to_string(k);
    int p1 = d.add_spider(0, 2, "bell" + tag + "a");
    int p2 = d.add_spider(0, 2, "bell" + tag + "b");
    int e = d.add_spider(2, 1, "pair" + tag);
    d.connect(port_of(p1, 0), boundary(d.add_boundary()));
    d.connect(port_of(p2, 0), boundary(d.add_boundary()));
    d.connect(port_of(p1, 1), port_of(e, 0));
    d.connect(port_of(p2, 1), port_of(e, 1));
    d.connect(port_of(e, 2), port_of(k < 4 ? u : v, k % 4), true);
  }
  d.connect(port_of(u, 4), port_of(bsm, 0), true);
  d.connect(port_of(v, 4), port_of(bsm, 1));
  return d;
}

// Five-qubit-code encoder: ten Bells, five 3-fusions sharing the second
// five Bells cyclically, outputs on the first five, and a 5-GHZ analyser
// over the fusion outputs.
ZXDiagram five_qubit_code() {
  ZXDiagram d;
  int a = d.add_spider(5, 0, "analyser");
  int own[5], shared[5];
  for (int i = 0; i < 5; ++i) own[i] = d.add_spider(0, 2, "bell" + std::to_string(i));
  for (int i = 0; i < 5; ++i)
    shared[i] = d.add_spider(0, 2, "link" + std::to_string(i));
  for (int i = 0; i < 5; ++i) {
    int t = d.add_spider(3, 1, "merge" + std::to_string(i));
    d.connect(port_of(own[i], 0), boundary(d.add_boundary()));
    d.connect(port_of(own[i], 1), port_of(t, 0));
    d.connect(port_of(shared[i], 0), port_of(t, 1));
    d.connect(port_of(shared[(i + 1) % 5], 1), port_of(t, 2));
    d.connect(port_of(t, 3), port_of(a, i), true);
  }
  return d;
}

// Surface-code encoder: a central 4-GHZ hub measured across three 4-GHZ
// analysers together with four 3-GHZ seeds and two Bells; the eight code
// qubits come off the 3-GHZ seeds.
ZXDiagram surface_code() {
  ZXDiagram d;
  int a[3];
  for (int i = 0; i < 3; ++i) a[i] = d.add_spider(4, 0, "stab" + std::to_string(i));
  int h = d.add_spider(0, 4, "hub");
  d.connect(port_of(h, 0), port_of(a[0], 0));
  d.connect(port_of(h, 1), port_of(a[1], 0));
  d.connect(port_of(h, 2), port_of(a[2], 0));
  d.connect(port_of(h, 3), port_of(a[2], 1));
  int g[4];
  for (int i = 0; i < 4; ++i) {
    g[i] = d.add_spider(0, 3, "ghz" + std::to_string(i));
    d.connect(port_of(g[i], 0), boundary(d.add_boundary()));
    d.connect(port_of(g[i], 1), boundary(d.add_boundary()));
  }
  d.connect(port_of(g[0], 2), port_of(a[0], 1), true);
  d.connect(port_of(g[1], 2), port_of(a[0], 2), true);
  d.connect(port_of(g[2], 2), port_of(a[1], 1), true);
  d.connect(port_of(g[3], 2), port_of(a[1], 2), true);
  int c0 = d.add_spider(0, 2, "bell0");
  int c1 = d.add_spider(0, 2, "bell1");
  d.connect(port_of(c0, 0), port_of(a[0], 3));
  d.connect(port_of(c0, 1), port_of(a[2], 2));
  d.connect(port_of(c1, 0), port_of(a[1], 3));
  d.connect(port_of(c1, 1), port_of(a[2], 3));
  return d;
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"ghz4-from-bells", "ghz4-fusion-tree", "ghz4-from-ghz3",
          "six-ring",        "six-ring-min-seeds", "six-ring-bells",
          "six-ring-encoded", "two-chain-encoded", "two-chain-bells",
          "five-qubit-code", "surface-code"};
}

ZXDiagram fixture_diagram(const std::string& name) {
  if (name == "ghz4-from-bells") return ghz4_from_bells();
  if (name == "ghz4-fusion-tree") return ghz4_fusion_tree();
  if (name == "ghz4-from-ghz3") return ghz4_from_ghz3();
  if (name == "six-ring") return six_ring();
  if (name == "six-ring-min-seeds") return six_ring_min_seeds();
  if (name == "six-ring-bells") return six_ring_bells();
  if (name == "six-ring-encoded") return six_ring_encoded();
  if (name == "two-chain-encoded") return two_chain_encoded();
  if (name == "two-chain-bells") return two_chain_bells();
  if (name == "five-qubit-code") return five_qubit_code();
  if (name == "surface-code") return surface_code();
  throw std::invalid_argument("unknown fixture \"" + name + "\"");
}

std::vector<Complex> ghz_state_vector(int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("ghz_state_vector: bad n");
  std::vector<Complex> v(size_t(1) << n, Complex(0, 0));
  v.front() = Complex(1 / std::sqrt(2.0), 0);
  v.back() = Complex(1 / std::sqrt(2.0), 0);
  return v;
}

std::vector<Complex> ring_graph_state_vector(int n) {
  if (n < 3 || n > 20) throw std::invalid_argument("ring_graph_state_vector: bad n");
  size_t dim = size_t(1) << n;
  double scale = std::pow(2.0, -n / 2.0);
  std::vector<Complex> v(dim);
  for (size_t idx = 0; idx < dim; ++idx) {
    int sign = 0;
    for (int i = 0; i < n; ++i) {
      int bi = (idx >> (n - 1 - i)) & 1;
      int bj = (idx >> (n - 1 - (i + 1) % n)) & 1;
      sign += bi & bj;
    }
    v[idx] = Complex(sign % 2 ? -scale : scale, 0);
  }
  return v;
}

}  // namespace fockforge
