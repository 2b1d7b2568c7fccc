// Command line front end: exact measurement-operator tables, loss sweeps,
// diagram compilation, scheme verification and a self-check table.
//
// Exit codes: 0 ok, 1 check failure, 2 usage or parse error, 3 a diagram
// that does not convert to linear optics, 4 a resource cap.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fockforge/devices.hpp"
#include "fockforge/dualrail.hpp"
#include "fockforge/fixtures.hpp"
#include "fockforge/fock.hpp"
#include "fockforge/polynomial.hpp"
#include "fockforge/rational.hpp"
#include "fockforge/zx.hpp"

using namespace fockforge;

namespace {

std::string g12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// "1/2 = 0.5" when the value is a dyadic rational, plain decimal otherwise.
std::string prob_str(double v) {
  Rational r;
  if (snap_dyadic(v, r)) {
    if (r.den() == 1) return r.str();
    return r.str() + " = " + g12(v);
  }
  return g12(v);
}

std::string rational_str(const Rational& r) {
  if (r.den() == 1) return r.str();
  return r.str() + " = " + g12(r.to_double());
}

std::string bit_string(const QubitString& q) {
  std::string s;
  for (int b : q.bits) s += char('0' + b);
  return s;
}

std::string pattern_string(const std::vector<int>& p) {
  bool wide = false;
  for (int c : p) wide = wide || c > 9;
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (wide && i) s += '.';
    s += std::to_string(p[i]);
  }
  return s;
}

std::string weight_string(Complex w) {
  char buf[96];
  if (std::abs(w.imag()) > 1e-12)
    std::snprintf(buf, sizeof buf, "(%+.12g%+.12gi)", w.real(), w.imag());
  else
    std::snprintf(buf, sizeof buf, "(%+.12g)", w.real());
  return buf;
}

std::string seed_label(int n) {
  return n == 2 ? std::string("Bell") : std::to_string(n) + "-GHZ";
}

std::string device_desc(const Device& d) {
  std::string s;
  if (!d.output_rails.empty())
    s = "type-I " + std::to_string(d.n) + "-fusion";
  else if (d.n == 2)
    s = "Bell analyser";
  else
    s = std::to_string(d.n) + "-GHZ analyser";
  if (!d.boosters.empty()) {
    s += ", boosted qubits";
    for (const Booster& b : d.boosters) s += " " + std::to_string(b.qubit);
  }
  return s;
}

Device device_from_flags(const std::string& kind, int n,
                         const std::vector<int>& boost) {
  Device d;
  if (kind == "bell") {
    if (n > 0 && n != 2)
      throw std::invalid_argument("--kind bell is fixed at n = 2");
    d = bell_analyser();
  } else if (kind == "ghz") {
    if (n <= 0) throw std::invalid_argument("--kind ghz needs -n");
    d = ghz_analyser(n);
  } else if (kind == "fusion") {
    if (n <= 0) throw std::invalid_argument("--kind fusion needs -n");
    if (!boost.empty())
      throw std::invalid_argument("fusion devices take no --boost");
    d = type1_fusion(n);
  } else {
    throw std::invalid_argument("unknown --kind '" + kind +
                                "' (expected bell, ghz or fusion)");
  }
  for (int q : boost) d = attach_sqa_beta(d, q);
  return d;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// rail pattern rules
//
// A success or failure pattern of an n-GHZ analyser pins the input basis
// strings it can herald. In device mode order the closing beamsplitter pair
// is (mode 0, mode 2n-1) and the interior pairs are (2i-1, 2i). A pair with
// both photons on one side assigns the two linked bits, an empty interior
// pair assigns them the other way round, a single photon forces equality.
// Returns the admissible strings, empty on conflict.

std::set<unsigned> rail_solutions(int n, const std::vector<int>& p) {
  std::vector<int> val(n, -1);
  std::vector<std::pair<int, int>> eq;
  bool ok = true;
  auto assign = [&](int i, int b) {
    if (val[i] >= 0 && val[i] != b) ok = false;
    val[i] = b;
  };
  for (int i = 1; i < n && ok; ++i) {
    int ca = p[2 * i - 1], cb = p[2 * i];
    if ((ca == 2 && cb == 0) || (ca == 0 && cb == 2)) {
      assign(i - 1, 1);
      assign(i, 0);
    } else if (ca == 0 && cb == 0) {
      assign(i - 1, 0);
      assign(i, 1);
    } else if (ca + cb == 1) {
      eq.push_back({i - 1, i});
    } else {
      ok = false;
    }
  }
  if (ok) {
    int ca = p[0], cb = p[2 * n - 1];
    if ((ca == 2 && cb == 0) || (ca == 0 && cb == 2)) {
      assign(0, 0);
      assign(n - 1, 1);
    } else if (ca == 0 && cb == 0) {
      assign(0, 1);
      assign(n - 1, 0);
    } else if (ca + cb == 1) {
      eq.push_back({0, n - 1});
    } else {
      ok = false;
    }
  }
  if (!ok) return {};
  for (bool moved = true; moved;) {
    moved = false;
    for (auto& [a, b] : eq) {
      if (val[a] >= 0 && val[b] < 0) val[b] = val[a], moved = true;
      if (val[b] >= 0 && val[a] < 0) val[a] = val[b], moved = true;
      if (val[a] >= 0 && val[b] >= 0 && val[a] != val[b]) return {};
    }
  }
  bool any = false;
  for (int v : val) any = any || v >= 0;
  if (!any) return {0u, (1u << n) - 1};  // all pairs single: GHZ class
  unsigned x = 0;
  for (int i = 0; i < n; ++i) {
    if (val[i] < 0) return {};
    if (val[i]) x |= 1u << (n - 1 - i);
  }
  return {x};
}

// Sign of the GHZ functional heralded by an all-single-photon pattern: the
// interior pairs give a parity, the closing pair orientation reads it out.
int rail_sign(int n, const std::vector<int>& p, bool* usable) {
  *usable = true;
  int par = 0;
  for (int i = 1; i < n; ++i) {
    int ca = p[2 * i - 1], cb = p[2 * i];
    if (ca == 0 && cb == 1)
      par ^= 1;
    else if (!(ca == 1 && cb == 0)) {
      *usable = false;
      return 0;
    }
  }
  int ca = p[0], cb = p[2 * n - 1];
  if (ca == 1 && cb == 0) return par == 0 ? +1 : -1;
  if (ca == 0 && cb == 1) return par == 0 ? -1 : +1;
  *usable = false;
  return 0;
}

// Cyclic falling transitions of a basis string; sets the pattern multiplicity
// 2^(n - d) of its rail class.
int falling_transitions(unsigned x, int n) {
  int d = 0;
  for (int i = 0; i < n; ++i) {
    int bi = (x >> (n - 1 - i)) & 1;
    int bj = (x >> (n - 1 - (i + 1) % n)) & 1;
    if (bi == 1 && bj == 0) d++;
  }
  return d;
}

// Fused-qubit sign of a type-I fusion success pattern: each detected
// beamsplitter pair seen as (0, 1) flips it.
int fusion_pattern_k(const std::vector<int>& p) {
  int k = 0;
  for (size_t j = 0; j + 1 < p.size(); j += 2)
    if (p[j] == 0 && p[j + 1] == 1) k++;
  return k;
}

// ---------------------------------------------------------------------------
// scheme loading

LOScheme scheme_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("format") || !j.at("format").is_string() ||
      j.at("format").get<std::string>() != "fockforge/1")
    throw std::invalid_argument("scheme json: missing format tag fockforge/1");
  static const std::map<std::string, NodeKind> kinds = {
      {"seed", NodeKind::Seed},
      {"fusion", NodeKind::Fusion},
      {"analyser", NodeKind::Analyser},
      {"beamsplitter", NodeKind::Beamsplitter},
      {"output", NodeKind::Output}};
  LOScheme s;
  for (const auto& nj : j.at("nodes")) {
    if (nj.at("id").get<int>() != (int)s.nodes.size())
      throw std::invalid_argument("scheme json: node ids must be 0..k in order");
    auto it = kinds.find(nj.at("kind").get<std::string>());
    if (it == kinds.end())
      throw std::invalid_argument("scheme json: unknown node kind");
    s.nodes.push_back({it->second, nj.at("n").get<int>()});
  }
  for (const auto& wj : j.at("wires"))
    s.wires.push_back({wj.at("from").get<int>(), wj.at("from_port").get<int>(),
                       wj.at("to").get<int>(), wj.at("to_port").get<int>()});
  s.validate();
  return s;
}

// A scheme argument names either a json file (diagram or scheme form) or a
// built-in fixture.
LOScheme load_scheme(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    std::string text = read_file(arg);
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.contains("spiders")) return extract_scheme(diagram_from_json(text));
    return scheme_from_json(text);
  }
  return extract_scheme(fixture_diagram(arg));
}

ZXDiagram load_diagram(const std::string& arg) {
  if (std::filesystem::exists(arg)) return diagram_from_json(read_file(arg));
  return fixture_diagram(arg);
}

// ---------------------------------------------------------------------------
// exhaustive heralded-branch survey

struct BranchSurvey {
  long combinations = 0;
  long frames_found = 0;
  long zero_probability = 0;
  double total_probability = 0;
};

constexpr long kBranchCap = 4096;

BranchSurvey survey_success_branches(const LOScheme& s,
                                     const std::vector<Complex>& ref,
                                     int budget) {
  std::vector<int> meas;
  for (int i = 0; i < (int)s.nodes.size(); ++i)
    if (s.nodes[i].kind == NodeKind::Fusion ||
        s.nodes[i].kind == NodeKind::Analyser)
      meas.push_back(i);
  std::vector<std::vector<std::vector<int>>> options;
  long combos = 1;
  for (int node : meas) {
    std::vector<std::vector<int>> pats;
    for (const auto& g : kraus_table(node_device(s, node), budget))
      if (g.outcome == Outcome::SuccessEntangled)
        for (const auto& p : g.patterns) pats.push_back(p);
    if (pats.empty())
      throw std::runtime_error("a measurement node has no success patterns");
    combos *= (long)pats.size();
    if (combos > kBranchCap)
      throw ResourceError("more than " + std::to_string(kBranchCap) +
                          " heralded branches");
    options.push_back(std::move(pats));
  }
  BranchSurvey r;
  r.combinations = combos;
  std::vector<size_t> idx(meas.size(), 0);
  for (long c = 0; c < combos; ++c) {
    std::map<int, std::vector<int>> patterns;
    for (size_t k = 0; k < meas.size(); ++k) patterns[meas[k]] = options[k][idx[k]];
    SchemeRun run = simulate_scheme(s, patterns);
    r.total_probability += run.probability;
    if (run.probability > 1e-15) {
      if (find_pauli_frame(run.output, ref).found) r.frames_found++;
    } else {
      r.zero_probability++;
    }
    for (size_t k = idx.size(); k-- > 0;) {
      if (++idx[k] < options[k].size()) break;
      idx[k] = 0;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// commands

int cmd_kraus(const std::string& kind, int n, const std::vector<int>& boost,
              int budget) {
  Device d = device_from_flags(kind, n, boost);
  auto groups = kraus_table(d, budget);
  int ns = 0, nf = 0, ni = 0;
  double success_mass = 0;
  for (const auto& g : groups) {
    if (g.outcome == Outcome::SuccessEntangled) ns++, success_mass += g.mass();
    else if (g.outcome == Outcome::Failure) nf++;
    else ni++;
  }
  std::cout << "device: " << device_desc(d) << "\n";
  std::cout << "modes: " << d.modes << "  qubits: " << d.n
            << "  photons: " << d.total_photons() << "\n";
  std::cout << "required pnr: " << required_pnr(d) << "\n";
  std::cout << "groups: " << groups.size() << " (" << ns << " success, " << nf
            << " failure, " << ni << " invalid)\n";
  int cs = 0, cf = 0, ci = 0;
  for (const auto& g : groups) {
    std::string label;
    if (g.outcome == Outcome::SuccessEntangled) label = "S" + std::to_string(++cs);
    else if (g.outcome == Outcome::Failure) label = "F" + std::to_string(++cf);
    else label = "I" + std::to_string(++ci);
    std::cout << label << " [" << prob_str(g.mass()) << "]";
    for (const auto& [bra, w] : g.weights) {
      std::cout << " " << weight_string(w);
      auto ob = g.out_bits.find(bra);
      if (ob != g.out_bits.end()) std::cout << "|" << ob->second << ">";
      std::cout << "<" << bit_string(bra) << "|";
    }
    std::cout << " ::";
    for (const auto& p : g.patterns) std::cout << " " << pattern_string(p);
    std::cout << "\n";
  }
  std::cout << "P_S = " << prob_str(success_mass / std::ldexp(1.0, d.n)) << "\n";
  return 0;
}

int cmd_loss_sweep(const std::string& kind, int n, const std::vector<int>& boost,
                   double start, double stop, int steps, const std::string& out) {
  if (!(start >= 0 && start <= 1 && stop >= 0 && stop <= 1))
    throw std::invalid_argument("the eta grid must stay within [0, 1]");
  if (steps < 1) throw std::invalid_argument("--eta-steps must be positive");
  Device d = device_from_flags(kind, n, boost);
  EtaPolynomial p = lossy_success_probability(d);
  std::ostringstream csv;
  csv << "eta,p_success\n";
  for (int i = 0; i < steps; ++i) {
    double eta = steps == 1 ? start : start + (stop - start) * i / (steps - 1);
    csv << g12(eta) << "," << g12(p.eval(eta)) << "\n";
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << csv.str();
    std::cout << "device: " << device_desc(d) << "\n";
    std::cout << "p(eta) = " << p.str() << "\n";
    std::cout << "rows: " << steps << "\n";
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_compile(const std::string& file, const std::string& kind,
                const std::string& out) {
  if (file.empty() == kind.empty())
    throw std::invalid_argument(
        "give exactly one of: a diagram json file, or --kind <fixture>");
  ZXDiagram d = file.empty() ? fixture_diagram(kind) : load_diagram(file);
  LOScheme s = extract_scheme(d);
  SchemeMetrics m = scheme_metrics(s);
  std::cout << "input: " << (file.empty() ? "fixture " + kind : file) << "\n";
  std::cout << "diagram: " << d.spiders.size() << " spiders, " << d.edges.size()
            << " edges, " << d.boundary_count << " outputs\n";
  std::cout << "scheme: " << s.nodes.size() << " nodes, " << s.wires.size()
            << " wires\n";
  std::cout << "seeds:";
  if (m.seed_inventory.empty()) std::cout << " none";
  bool first = true;
  for (const auto& [sz, c] : m.seed_inventory) {
    std::cout << (first ? " " : ", ") << c << " x " << seed_label(sz);
    first = false;
  }
  std::cout << "\n";
  std::cout << "devices:";
  if (m.device_inventory.empty()) std::cout << " none";
  first = true;
  for (const auto& [name, c] : m.device_inventory) {
    std::cout << (first ? " " : ", ") << c << " x " << name;
    first = false;
  }
  std::cout << "\n";
  std::cout << "photons: " << m.photon_count << "\n";
  std::cout << "P_S = " << rational_str(m.success_probability) << "\n";
  std::cout << "loss detection: " << (m.fully_loss_detecting ? "full" : "incomplete")
            << "\n";
  std::cout << "max pnr: " << m.max_pnr << "\n";
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << scheme_to_json(s, &m);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& arg, const std::string& target, int budget) {
  auto pos = target.find(':');
  std::string tkind = pos == std::string::npos ? "" : target.substr(0, pos);
  int tn = 0;
  if (pos != std::string::npos) {
    try {
      size_t used = 0;
      tn = std::stoi(target.substr(pos + 1), &used);
      if (used != target.size() - pos - 1) tn = 0;
    } catch (...) {
      tn = 0;
    }
  }
  std::vector<Complex> ref;
  if (tkind == "ghz" && tn >= 2 && tn <= 8) ref = ghz_state_vector(tn);
  else if (tkind == "ring" && tn >= 3 && tn <= 8) ref = ring_graph_state_vector(tn);
  else throw std::invalid_argument("target must be ghz:N (2..8) or ring:N (3..8)");

  LOScheme s = load_scheme(arg);
  SchemeMetrics m = scheme_metrics(s);
  int outputs = 0;
  for (const auto& node : s.nodes)
    if (node.kind == NodeKind::Output) outputs++;
  std::cout << "scheme: " << arg << " (" << s.nodes.size() << " nodes, "
            << s.wires.size() << " wires, " << outputs << " outputs)\n";
  std::cout << "target: " << target << "\n";
  if (outputs != tn) {
    std::cout << "output count " << outputs << " does not match the target\n";
    std::cout << "verify: FAIL\n";
    return 1;
  }
  std::cout << "expected P_S = " << rational_str(m.success_probability) << "\n";
  BranchSurvey r = survey_success_branches(s, ref, budget);
  std::cout << "heralded branches: " << r.combinations << "\n";
  std::cout << "simulated probability = " << g12(r.total_probability) << "\n";
  std::cout << "pauli frames found: " << r.frames_found << "/"
            << (r.combinations - r.zero_probability) << "\n";
  if (r.zero_probability)
    std::cout << "zero-probability branches: " << r.zero_probability << "\n";
  bool prob_ok =
      std::abs(r.total_probability - m.success_probability.to_double()) <= 1e-9;
  bool frames_ok = r.frames_found == r.combinations - r.zero_probability;
  if (!prob_ok)
    std::cout << "branch probabilities do not sum to the expected P_S\n";
  if (!frames_ok)
    std::cout << "some branches are not the target state up to Pauli frame\n";
  std::cout << "verify: " << (prob_ok && frames_ok ? "PASS" : "FAIL") << "\n";
  return prob_ok && frames_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// reproduce: recompute the frozen reference results

struct FixtureExpect {
  const char* name;
  Rational p;
  int photons;
  bool fld;
  int pnr;
  std::map<int, int> seeds;
  std::map<std::string, int> devices;
};

const std::vector<FixtureExpect>& fixture_expectations() {
  static const std::vector<FixtureExpect> t = {
      {"ghz4-from-bells", Rational(1, 8), 8, true, 1, {{2, 4}},
       {{"4-GHZ analyser", 1}}},
      {"ghz4-fusion-tree", Rational(1, 8), 8, true, 2, {{2, 4}},
       {{"Bell analyser", 1}, {"type-I 2-fusion", 2}}},
      {"ghz4-from-ghz3", Rational(1, 2), 6, true, 1, {{3, 2}},
       {{"Bell analyser", 1}}},
      {"six-ring", Rational(1, 8), 9, false, 2, {{3, 3}},
       {{"beamsplitter", 6}, {"type-I 2-fusion", 3}}},
      {"six-ring-min-seeds", Rational(1, 64), 13, true, 2, {{2, 5}, {3, 1}},
       {{"3-GHZ analyser", 1}, {"beamsplitter", 6}, {"type-I 2-fusion", 4}}},
      {"six-ring-bells", Rational(1, 128), 14, true, 2, {{2, 7}},
       {{"3-GHZ analyser", 1}, {"beamsplitter", 6}, {"type-I 2-fusion", 5}}},
      {"six-ring-encoded", Rational(1, 33554432), 50, true, 2, {{2, 25}},
       {{"3-GHZ analyser", 1},
        {"beamsplitter", 18},
        {"type-I 2-fusion", 13},
        {"type-I 3-fusion", 5}}},
      {"two-chain-encoded", Rational(1, 128), 24, true, 2, {{3, 8}},
       {{"Bell analyser", 1}, {"beamsplitter", 9}, {"type-I 4-fusion", 2}}},
      {"two-chain-bells", Rational(1, 32768), 32, true, 2, {{2, 16}},
       {{"Bell analyser", 1},
        {"beamsplitter", 9},
        {"type-I 2-fusion", 8},
        {"type-I 4-fusion", 2}}},
      {"five-qubit-code", Rational(1, 16384), 20, true, 2, {{2, 10}},
       {{"5-GHZ analyser", 1}, {"beamsplitter", 5}, {"type-I 3-fusion", 5}}},
      {"surface-code", Rational(1, 512), 20, true, 1, {{2, 2}, {3, 4}, {4, 1}},
       {{"4-GHZ analyser", 3}, {"beamsplitter", 4}}},
  };
  return t;
}

// Scaling formula for the fully boosted n-GHZ analyser. Matches the exact
// tables from n = 4 up; kept as a report-only comparison below that.
Rational boosted_scaling_formula(int n) {
  Rational base(4 + n, 2LL << n);
  if (n % 2 == 0) return base + Rational::dyadic(1, (5 * n - 8) / 2);
  return base + Rational(n) * Rational::dyadic(1, (5 * n - 9) / 2);
}

ZXDiagram random_diagram(std::mt19937& rng) {
  auto pick = [&](int m) { return (int)(rng() % (unsigned)m); };
  for (int attempt = 0; attempt < 64; ++attempt) {
    ZXDiagram d;
    int ns = 1 + pick(3);
    int ports = 0;
    for (int i = 0; i < ns; ++i) {
      int in = pick(3), out = pick(3);
      if (in + out == 0) out = 1 + pick(2);
      d.add_spider(in, out);
      ports += in + out;
    }
    int b = 2 + pick(5);
    if ((ports + b) % 2) b++;
    if (b > 10) continue;
    std::vector<ZXEndpoint> ends;
    for (int i = 0; i < ns; ++i)
      for (int p = 0; p < d.spiders[i].ports(); ++p) ends.push_back(port_of(i, p));
    for (int i = 0; i < b; ++i) ends.push_back(boundary(d.add_boundary()));
    std::shuffle(ends.begin(), ends.end(), rng);
    // no self-loops, no boundary-boundary wires
    auto bad_pair = [](const ZXEndpoint& a, const ZXEndpoint& b2) {
      if (a.is_boundary() && b2.is_boundary()) return true;
      return !a.is_boundary() && !b2.is_boundary() && a.spider == b2.spider;
    };
    bool ok = true;
    for (size_t i = 0; i + 1 < ends.size() && ok; i += 2) {
      if (bad_pair(ends[i], ends[i + 1])) {
        bool fixed = false;
        for (size_t j = i + 2; j < ends.size() && !fixed; ++j) {
          std::swap(ends[i + 1], ends[j]);
          if (!bad_pair(ends[i], ends[i + 1])) fixed = true;
          else std::swap(ends[i + 1], ends[j]);
        }
        ok = fixed;
      }
      if (ok) d.connect(ends[i], ends[i + 1], pick(2) == 1);
    }
    if (!ok) continue;
    d.validate();
    return d;
  }
  throw std::runtime_error("diagram sampling failed");
}

struct RewriteProbe {
  bool applied = false;
  bool preserved = true;
};

RewriteProbe probe_random_rewrite(const ZXDiagram& d, std::mt19937& rng) {
  auto pick = [&](int m) { return (int)(rng() % (unsigned)m); };
  std::vector<std::function<ZXDiagram()>> sites;
  for (int e = 0; e < (int)d.edges.size(); ++e) {
    const ZXEdge& ed = d.edges[e];
    if (ed.hadamard || ed.a.is_boundary() || ed.b.is_boundary()) continue;
    bool parallel_h = false;
    for (const ZXEdge& o : d.edges) {
      if (!o.hadamard || o.a.is_boundary() || o.b.is_boundary()) continue;
      if ((o.a.spider == ed.a.spider && o.b.spider == ed.b.spider) ||
          (o.a.spider == ed.b.spider && o.b.spider == ed.a.spider))
        parallel_h = true;
    }
    if (parallel_h) continue;
    sites.push_back([&d, e] { return spider_fuse(d, e); });
  }
  for (int si = 0; si < (int)d.spiders.size(); ++si) {
    int np = d.spiders[si].ports();
    if (np >= 2) {
      unsigned mask = 1 + (unsigned)pick((1 << np) - 2);
      std::vector<int> keep;
      for (int p = 0; p < np; ++p)
        if (mask >> p & 1) keep.push_back(p);
      sites.push_back([&d, si, keep] { return spider_unfuse(d, si, keep); });
    }
    if (d.spiders[si].outputs >= 2)
      sites.push_back([&d, si] { return eliminate_multi_output(d, si); });
    if (d.spiders[si].outputs == 1)
      sites.push_back([&d, si] { return bend_output_through_input(d, si); });
  }
  if (sites.empty()) return {};
  ZXDiagram after = sites[pick((int)sites.size())]();
  after.validate();
  return {true, tensor_equal(to_tensor(d), to_tensor(after))};
}

int cmd_reproduce(const std::string& filter, int budget, bool conjecture_n5) {
  int passed = 0, failed = 0, infos = 0, skipped = 0;
  auto row = [&](const std::string& name, bool info,
                 const std::function<std::pair<bool, std::string>()>& fn) {
    if (!filter.empty() && name.find(filter) == std::string::npos) {
      skipped++;
      return;
    }
    bool ok = false;
    std::string detail;
    try {
      auto r = fn();
      ok = r.first;
      detail = r.second;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("threw: ") + e.what();
    }
    const char* tag = info ? "INFO" : ok ? "PASS" : "FAIL";
    if (info) infos++;
    else if (ok) passed++;
    else failed++;
    std::cout << std::left << std::setw(28) << name << tag << "  " << detail
              << "\n";
  };

  std::map<std::string, std::vector<KrausOperator>> tables;
  auto table_of = [&](const std::string& kind, int n,
                      std::vector<int> boost) -> const std::vector<KrausOperator>& {
    std::string key = kind + std::to_string(n);
    for (int q : boost) key += "b" + std::to_string(q);
    auto it = tables.find(key);
    if (it == tables.end())
      it = tables.emplace(key, kraus_table(device_from_flags(kind, n, boost), budget))
               .first;
    return it->second;
  };
  auto table_p = [&](const std::string& kind, int n, std::vector<int> boost) {
    double m = 0;
    for (const auto& g : table_of(kind, n, boost))
      if (g.outcome == Outcome::SuccessEntangled) m += g.mass();
    Rational r;
    if (!snap_dyadic(m / std::ldexp(1.0, n), r))
      throw std::runtime_error("success probability is not dyadic");
    return r;
  };

  // exact tables
  auto kraus_row = [&](const std::string& kind, int n, size_t groups, Rational p) {
    return [&, kind, n, groups, p]() -> std::pair<bool, std::string> {
      const auto& t = table_of(kind, n, {});
      Rational got = table_p(kind, n, {});
      bool ok = t.size() == groups && got == p;
      return {ok, std::to_string(t.size()) + " groups, P_S = " + got.str()};
    };
  };
  row("kraus-bell", false, kraus_row("bell", 2, 6, Rational(1, 2)));
  row("kraus-ghz3", false, kraus_row("ghz", 3, 14, Rational(1, 4)));
  row("kraus-ghz4", false, kraus_row("ghz", 4, 30, Rational(1, 8)));
  row("kraus-ghz5", false, kraus_row("ghz", 5, 62, Rational(1, 16)));
  row("kraus-fusion2", false, kraus_row("fusion", 2, 5, Rational(1, 2)));
  row("kraus-fusion3", false, kraus_row("fusion", 3, 13, Rational(1, 4)));

  // rail rules on analyser patterns
  row("rails-support", false, [&]() -> std::pair<bool, std::string> {
    long checked = 0, bad = 0;
    for (int n : {2, 3, 4}) {
      for (const auto& g : table_of("ghz", n, {})) {
        if (g.outcome == Outcome::Invalid) continue;
        std::set<unsigned> support;
        for (const auto& [bra, w] : g.weights) support.insert(bra.index());
        for (const auto& p : g.patterns) {
          checked++;
          if (rail_solutions(n, p) != support) bad++;
        }
      }
    }
    return {bad == 0, std::to_string(checked) + " patterns, " +
                          std::to_string(bad) + " off the rail rules"};
  });

  row("rails-class-count", false, [&]() -> std::pair<bool, std::string> {
    int bad = 0, classes = 0;
    for (int n : {2, 3, 4}) {
      std::map<unsigned, long> count;
      for (const auto& g : table_of("ghz", n, {})) {
        if (g.outcome == Outcome::Failure)
          for (const auto& p : g.patterns) {
            auto sol = rail_solutions(n, p);
            if (sol.size() != 1) return {false, "failure pattern not pinned"};
            count[*sol.begin()]++;
          }
        else if (g.outcome == Outcome::SuccessEntangled)
          count[0] += (long)g.patterns.size();
      }
      for (const auto& [x, c] : count) {
        classes++;
        long want = x == 0 ? 1L << n : 1L << (n - falling_transitions(x, n));
        if (c != want) bad++;
      }
    }
    return {bad == 0, std::to_string(classes) + " classes match 2^(n-d)"};
  });

  row("rails-ghz-sign", false, [&]() -> std::pair<bool, std::string> {
    long checked = 0, bad = 0;
    for (int n : {2, 3, 4}) {
      for (const auto& g : table_of("ghz", n, {})) {
        if (g.outcome != Outcome::SuccessEntangled) continue;
        double w0 = g.weights.at(QubitString::from_index(0, n)).real();
        double w1 = g.weights.at(QubitString::from_index((1u << n) - 1, n)).real();
        for (const auto& p : g.patterns) {
          checked++;
          bool usable = false;
          int pred = rail_sign(n, p, &usable);
          if (!usable || (w1 / w0 > 0) != (pred > 0)) bad++;
        }
      }
    }
    return {bad == 0, std::to_string(checked) + " patterns, parity rule holds"};
  });

  row("rails-fusion-sign", false, [&]() -> std::pair<bool, std::string> {
    long checked = 0, bad = 0;
    for (int n : {2, 3, 4}) {
      QubitString z = QubitString::from_index(0, n);
      QubitString o = QubitString::from_index((1u << n) - 1, n);
      for (const auto& g : table_of("fusion", n, {})) {
        if (g.outcome != Outcome::SuccessEntangled) continue;
        if (!g.weights.count(z) || !g.weights.count(o)) return {false, "bad support"};
        if (g.out_bits.at(z) != 0 || g.out_bits.at(o) != 1)
          return {false, "bad output bits"};
        double ratio = (g.weights.at(z) / g.weights.at(o)).real();
        for (const auto& p : g.patterns) {
          checked++;
          if ((ratio > 0) != (fusion_pattern_k(p) % 2 == 0)) bad++;
        }
      }
    }
    return {bad == 0,
            std::to_string(checked) + " patterns, (-1)^k sign rule holds"};
  });

  row("pnr-requirements", false, [&]() -> std::pair<bool, std::string> {
    Device bb0 = attach_sqa_beta(bell_analyser(), 0);
    bool ok = required_pnr(bell_analyser()) == 1 &&
              required_pnr(ghz_analyser(3)) == 1 &&
              required_pnr(ghz_analyser(4)) == 1 &&
              required_pnr(type1_fusion(2)) == 2 &&
              required_pnr(type1_fusion(3)) == 2 &&
              required_pnr(bb0) == 3 &&
              required_pnr(attach_sqa_beta(bb0, 1)) == 3;
    return {ok, "analysers 1, fusions 2, boosted bell 3"};
  });

  // boosting
  auto boost_row = [&](int n, std::vector<int> q, Rational p) {
    return [&, n, q, p]() -> std::pair<bool, std::string> {
      Rational got = table_p(n == 2 ? "bell" : "ghz", n, q);
      return {got == p, "P_S = " + got.str()};
    };
  };
  row("boost-bell-one", false, boost_row(2, {0}, Rational(5, 8)));
  row("boost-bell-two", false, boost_row(2, {0, 1}, Rational(3, 4)));
  row("boost-ghz4-alternating", false, boost_row(4, {1, 3}, Rational(25, 128)));
  row("boost-ghz4-full", false, boost_row(4, {0, 1, 2, 3}, Rational(17, 64)));
  row("boost-ratio", false, [&]() -> std::pair<bool, std::string> {
    Rational full = table_p("ghz", 4, {0, 1, 2, 3});
    Rational adj = table_p("ghz", 4, {0, 1});
    double ratio = full.to_double() / adj.to_double();
    bool ok = full == Rational(17, 64) && adj == Rational(3, 16) &&
              std::abs(ratio - 1.417) <= 0.001 * 1.417;
    return {ok, full.str() + " / " + adj.str() + " = " + g12(ratio)};
  });

  // fully boosted scaling formula; exact below n = 4 it is not
  auto conjecture_row = [&](int n) {
    return [&, n]() -> std::pair<bool, std::string> {
      std::vector<int> all;
      for (int q = 0; q < n; ++q) all.push_back(q);
      Rational dev = table_p(n == 2 ? "bell" : "ghz", n, all);
      Rational f = boosted_scaling_formula(n);
      return {true, "formula " + f.str() + ", device " + dev.str() +
                        (f == dev ? " (matches)" : " (disagrees)")};
    };
  };
  row("conjecture-n2", true, conjecture_row(2));
  row("conjecture-n3", true, conjecture_row(3));
  row("conjecture-n4", true, conjecture_row(4));
  if (conjecture_n5) row("conjecture-n5", true, conjecture_row(5));

  // loss polynomials
  auto poly_row = [&](const std::string& kind, int n, std::vector<int> boost,
                      EtaPolynomial want) {
    return [&, kind, n, boost, want]() -> std::pair<bool, std::string> {
      EtaPolynomial got =
          lossy_success_probability(device_from_flags(kind, n, boost));
      return {got == want, "p(eta) = " + got.str()};
    };
  };
  EtaPolynomial pb, p3, p4;
  pb.add_term(4, Rational(1, 2));
  pb.add_term(6, Rational(1, 4));
  p3.add_term(7, Rational(3, 8));
  p3.add_term(9, Rational(1, 16));
  p4.add_term(8, Rational(1, 16));
  p4.add_term(10, Rational(3, 16));
  p4.add_term(12, Rational(1, 64));
  row("loss-bell-boosted", false, poly_row("bell", 2, {0, 1}, pb));
  row("loss-ghz3-boosted", false, poly_row("ghz", 3, {0, 1, 2}, p3));
  row("loss-ghz4-boosted", false, poly_row("ghz", 4, {0, 1, 2, 3}, p4));

  row("loss-unboosted", false, [&]() -> std::pair<bool, std::string> {
    auto mono = [](int deg, Rational c) {
      EtaPolynomial p;
      p.add_term(deg, c);
      return p;
    };
    bool ok =
        lossy_success_probability(bell_analyser()) == mono(2, Rational(1, 2)) &&
        lossy_success_probability(ghz_analyser(3)) == mono(3, Rational(1, 4)) &&
        lossy_success_probability(ghz_analyser(4)) == mono(4, Rational(1, 8)) &&
        lossy_success_probability(type1_fusion(2)) == mono(1, Rational(1, 2)) &&
        lossy_success_probability(type1_fusion(3)) == mono(2, Rational(1, 4));
    return {ok, "P_S * eta^(detected photons) on five plain devices"};
  });

  row("loss-monotone", false, [&]() -> std::pair<bool, std::string> {
    std::vector<Device> devs = {bell_analyser(),
                                attach_sqa_beta(bell_analyser(), 0),
                                device_from_flags("bell", 2, {0, 1}),
                                ghz_analyser(3),
                                device_from_flags("ghz", 3, {0, 1, 2}),
                                type1_fusion(2),
                                type1_fusion(3)};
    for (const Device& d : devs) {
      EtaPolynomial p = lossy_success_probability(d);
      if (std::abs(p.eval(0)) > 1e-12) return {false, "p(0) != 0"};
      double prev = -1;
      for (int i = 0; i <= 10; ++i) {
        double v = p.eval(i / 10.0);
        if (v + 1e-12 < prev) return {false, "not monotone"};
        prev = v;
      }
      Rational r;
      if (!snap_dyadic(p.eval(1.0), r)) return {false, "p(1) not dyadic"};
    }
    return {true, "7 devices, 11 grid points each"};
  });

  // fixture metrics
  for (const auto& fx : fixture_expectations()) {
    row(std::string("fixture-") + fx.name, false,
        [&fx]() -> std::pair<bool, std::string> {
          SchemeMetrics m = scheme_metrics(extract_scheme(fixture_diagram(fx.name)));
          bool ok = m.success_probability == fx.p && m.photon_count == fx.photons &&
                    m.fully_loss_detecting == fx.fld && m.max_pnr == fx.pnr &&
                    m.seed_inventory == fx.seeds && m.device_inventory == fx.devices;
          return {ok, "P_S = " + m.success_probability.str() + ", " +
                          std::to_string(m.photon_count) + " photons"};
        });
  }

  // full heralded-branch simulations
  auto simulate_row = [&](const std::string& name, const std::vector<Complex>& ref,
                          long combos, Rational p) {
    return [&, name, ref, combos, p]() -> std::pair<bool, std::string> {
      LOScheme s = extract_scheme(fixture_diagram(name));
      BranchSurvey r = survey_success_branches(s, ref, budget);
      bool ok = r.combinations == combos && r.zero_probability == 0 &&
                r.frames_found == combos &&
                std::abs(r.total_probability - p.to_double()) <= 1e-9;
      return {ok, std::to_string(r.combinations) + " branches sum to " +
                      g12(r.total_probability)};
    };
  };
  row("simulate-ghz4-from-bells", false,
      simulate_row("ghz4-from-bells", ghz_state_vector(4), 16, Rational(1, 8)));
  row("simulate-ghz4-from-ghz3", false,
      simulate_row("ghz4-from-ghz3", ghz_state_vector(4), 4, Rational(1, 2)));
  row("simulate-six-ring", false,
      simulate_row("six-ring", ring_graph_state_vector(6), 8, Rational(1, 8)));

  row("rewrite-random", false, [&]() -> std::pair<bool, std::string> {
    std::mt19937 rng(20260815);
    int applied = 0, broken = 0;
    for (int i = 0; i < 200; ++i) {
      ZXDiagram d = random_diagram(rng);
      RewriteProbe pr = probe_random_rewrite(d, rng);
      if (pr.applied) applied++;
      if (!pr.preserved) broken++;
    }
    return {broken == 0 && applied >= 150,
            std::to_string(applied) + "/200 rewrites applied, " +
                std::to_string(broken) + " changed the tensor"};
  });

  row("permanent-oracle", false, [&]() -> std::pair<bool, std::string> {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0, bad = 0;
    for (int k = 1; k <= 6; ++k)
      for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXcd m(k, k);
        for (int r = 0; r < k; ++r)
          for (int c = 0; c < k; ++c) m(r, c) = Complex(u(rng), u(rng));
        checked++;
        Complex a = permanent(m), b = permanent_naive(m);
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b))) bad++;
      }
    return {bad == 0, std::to_string(checked) + " matrices up to 6x6"};
  });

  row("completeness", false, [&]() -> std::pair<bool, std::string> {
    struct Spec {
      const char* kind;
      int n;
      std::vector<int> boost;
    };
    std::vector<Spec> specs = {{"bell", 2, {}},    {"ghz", 3, {}},
                               {"ghz", 4, {}},     {"fusion", 2, {}},
                               {"fusion", 3, {}},  {"bell", 2, {0}},
                               {"bell", 2, {0, 1}}};
    for (const auto& sp : specs) {
      double m = 0;
      for (const auto& g : table_of(sp.kind, sp.n, sp.boost)) m += g.mass();
      if (std::abs(m - std::ldexp(1.0, sp.n)) > 1e-9)
        return {false, std::string(sp.kind) + " table mass " + g12(m)};
    }
    return {true, "operator masses sum to 2^n on 7 devices"};
  });

  std::cout << "reproduce: " << passed << " passed, " << failed << " failed, "
            << infos << " info, " << skipped << " skipped\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"exact dual-rail linear-optics toolkit"};
  app.require_subcommand(1);

  bool quiet = false;
  int budget = kDefaultPhotonBudget;
  std::string kind, out, filter;
  int n = 0;
  std::vector<int> boost;
  double eta_start = 0, eta_stop = 1;
  int eta_steps = 11;
  std::string compile_file, compile_kind;
  std::string verify_arg, verify_target;
  bool conjecture_n5 = false;

  auto add_common = [&](CLI::App* sub, bool with_budget) {
    sub->add_flag("--quiet", quiet, "omit the wall clock line");
    if (with_budget)
      sub->add_option("--max-photons", budget,
                      "input photon budget for table enumeration");
  };

  CLI::App* ck = app.add_subcommand(
      "kraus", "print the grouped measurement operator table of a device");
  ck->add_option("--kind", kind, "bell, ghz or fusion")->required();
  ck->add_option("-n,--qubits", n, "input qubit count");
  ck->add_option("--boost", boost, "attach a booster to this qubit (repeatable)");
  add_common(ck, true);

  CLI::App* cl = app.add_subcommand(
      "loss-sweep", "heralded success probability over a transmission grid, CSV");
  cl->add_option("--kind", kind, "bell, ghz or fusion")->required();
  cl->add_option("-n,--qubits", n, "input qubit count");
  cl->add_option("--boost", boost, "attach a booster to this qubit (repeatable)");
  cl->add_option("--eta-start", eta_start, "grid start (default 0)");
  cl->add_option("--eta-stop", eta_stop, "grid stop (default 1)");
  cl->add_option("--eta-steps", eta_steps, "grid size (default 11)");
  cl->add_option("--out", out, "write the CSV here instead of stdout");
  add_common(cl, false);

  CLI::App* cc = app.add_subcommand(
      "compile", "convert a diagram to a linear-optical scheme");
  cc->add_option("diagram", compile_file, "diagram json file");
  cc->add_option("--kind", compile_kind, "built-in fixture name");
  cc->add_option("--out", out, "write the scheme json here");
  add_common(cc, false);

  CLI::App* cv = app.add_subcommand(
      "verify", "simulate every heralded branch and match the target state");
  cv->add_option("scheme", verify_arg, "scheme or diagram json file, or a fixture name")
      ->required();
  cv->add_option("target", verify_target, "ghz:N or ring:N")->required();
  add_common(cv, true);

  CLI::App* cr = app.add_subcommand(
      "reproduce", "recompute the frozen reference results");
  cr->add_option("--filter", filter, "run only rows whose name contains this");
  cr->add_flag("--conjecture-n5", conjecture_n5,
               "include the slow fully boosted 5-qubit scaling row");
  add_common(cr, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  int rc = 1;
  try {
    if (const char* tv = std::getenv("FOCKFORGE_THREADS")) {
      std::string s(tv);
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos ||
          s == "0")
        throw std::invalid_argument("FOCKFORGE_THREADS must be a positive integer");
      // evolution kernels are single threaded; any cap holds trivially
    }
    if (budget < 1) throw std::invalid_argument("--max-photons must be positive");
    if (ck->parsed()) rc = cmd_kraus(kind, n, boost, budget);
    else if (cl->parsed())
      rc = cmd_loss_sweep(kind, n, boost, eta_start, eta_stop, eta_steps, out);
    else if (cc->parsed()) rc = cmd_compile(compile_file, compile_kind, out);
    else if (cv->parsed()) rc = cmd_verify(verify_arg, verify_target, budget);
    else if (cr->parsed()) rc = cmd_reproduce(filter, budget, conjecture_n5);
  } catch (const ConversionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = 3;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = 1;
  }
  if (!quiet) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << "# wall_ms " << ms << "\n";
  }
  return rc;
}
