#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "fockforge/devices.hpp"
#include "fockforge/zx.hpp"

namespace fockforge {

namespace {

bool produces(NodeKind k) { return k != NodeKind::Analyser && k != NodeKind::Output; }
bool consumes(NodeKind k) { return k != NodeKind::Seed; }

int producer_ports(const SchemeNode& n) {
  switch (n.kind) {
    case NodeKind::Seed: return n.n;
    case NodeKind::Fusion:
    case NodeKind::Beamsplitter: return 1;
    default: return 0;
  }
}

int consumer_ports(const SchemeNode& n) {
  switch (n.kind) {
    case NodeKind::Fusion:
    case NodeKind::Analyser: return n.n;
    case NodeKind::Beamsplitter:
    case NodeKind::Output: return 1;
    default: return 0;
  }
}

}  // namespace

std::string node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Seed: return "seed";
    case NodeKind::Fusion: return "fusion";
    case NodeKind::Analyser: return "analyser";
    case NodeKind::Beamsplitter: return "beamsplitter";
    case NodeKind::Output: return "output";
  }
  return "?";
}

void LOScheme::validate() const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    const SchemeNode& nd = nodes[i];
    int least = 1;
    if (nd.kind == NodeKind::Fusion || nd.kind == NodeKind::Analyser) least = 2;
    if (nd.n < least ||
        ((nd.kind == NodeKind::Beamsplitter || nd.kind == NodeKind::Output) && nd.n != 1))
      throw std::invalid_argument("node " + std::to_string(i) + " (" +
                                  node_kind_name(nd.kind) + ") has invalid size " +
                                  std::to_string(nd.n));
  }
  std::vector<std::vector<int>> out_use(nodes.size()), in_use(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    out_use[i].assign(producer_ports(nodes[i]), 0);
    in_use[i].assign(consumer_ports(nodes[i]), 0);
  }
  for (const SchemeWire& w : wires) {
    if (w.from < 0 || w.from >= (int)nodes.size() || w.to < 0 ||
        w.to >= (int)nodes.size())
      throw std::invalid_argument("wire references missing node");
    if (!produces(nodes[w.from].kind) || w.from_port < 0 ||
        w.from_port >= producer_ports(nodes[w.from]))
      throw std::invalid_argument("wire leaves nonexistent output port");
    if (!consumes(nodes[w.to].kind) || w.to_port < 0 ||
        w.to_port >= consumer_ports(nodes[w.to]))
      throw std::invalid_argument("wire enters nonexistent input port");
    out_use[w.from][w.from_port]++;
    in_use[w.to][w.to_port]++;
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (int p = 0; p < producer_ports(nodes[i]); ++p)
      if (out_use[i][p] != 1)
        throw std::invalid_argument("node " + std::to_string(i) + " output port " +
                                    std::to_string(p) + " has " +
                                    std::to_string(out_use[i][p]) + " wires");
    for (int p = 0; p < consumer_ports(nodes[i]); ++p)
      if (in_use[i][p] != 1)
        throw std::invalid_argument("node " + std::to_string(i) + " input port " +
                                    std::to_string(p) + " has " +
                                    std::to_string(in_use[i][p]) + " wires");
  }
  topo_order();
}

std::vector<int> LOScheme::topo_order() const {
  std::vector<int> indeg(nodes.size(), 0);
  for (const SchemeWire& w : wires) indeg[w.to]++;
  std::vector<int> order;
  std::vector<bool> done(nodes.size(), false);
  for (size_t round = 0; round < nodes.size(); ++round) {
    int pick = -1;
    for (size_t i = 0; i < nodes.size(); ++i)
      if (!done[i] && indeg[i] == 0) { pick = (int)i; break; }
    if (pick < 0) throw std::invalid_argument("scheme wiring has a cycle");
    done[pick] = true;
    order.push_back(pick);
    for (const SchemeWire& w : wires)
      if (w.from == pick) indeg[w.to]--;
  }
  return order;
}

LOScheme extract_scheme(const ZXDiagram& d) {
  d.validate();
  ConvertibilityReport report = is_lo_convertible(d);
  if (!report.ok) {
    std::string msg = "diagram is not LO-convertible; offending spiders:";
    for (int s : report.offending_spiders) msg += " " + d.spiders[s].name;
    throw ConversionError(msg);
  }

  LOScheme scheme;
  // Spider nodes first, then one output node per boundary, then the
  // beamsplitters realizing Hadamard edges. Wires (1-to-1 spiders) melt away.
  std::vector<int> spider_node(d.spiders.size(), -1);
  for (size_t i = 0; i < d.spiders.size(); ++i) {
    const ZXSpider& s = d.spiders[i];
    if (s.inputs == 1 && s.outputs == 1) continue;
    if (s.ports() == 0)
      throw ConversionError("spider " + s.name + " has no ports");
    SchemeNode node;
    if (s.inputs == 0) node = {NodeKind::Seed, s.outputs};
    else if (s.outputs == 1) node = {NodeKind::Fusion, s.inputs};
    else node = {NodeKind::Analyser, s.inputs};
    spider_node[i] = (int)scheme.nodes.size();
    scheme.nodes.push_back(node);
  }
  std::vector<int> output_node(d.boundary_count);
  for (int b = 0; b < d.boundary_count; ++b) {
    output_node[b] = (int)scheme.nodes.size();
    scheme.nodes.push_back({NodeKind::Output, 1});
  }

  // Stub = one end of a diagram wire. Producer stubs are seed legs and
  // fusion outputs; consumer stubs are fusion/analyser inputs and boundary
  // outputs; 1-to-1 spiders contribute a passthrough pair.
  struct Stub {
    enum Role { Producer, Consumer, PassIn, PassOut } role;
    int node = -1;
    int port = 0;
    int spider = -1;
  };
  auto stub_key = [&](const ZXEndpoint& e) {
    return e.is_boundary() ? -1 - e.port
                           : e.spider * 4096 + e.port;
  };
  auto stub_of = [&](const ZXEndpoint& e) -> Stub {
    if (e.is_boundary()) return {Stub::Consumer, output_node[e.port], 0, -1};
    const ZXSpider& s = d.spiders[e.spider];
    if (s.inputs == 1 && s.outputs == 1)
      return {e.port == 0 ? Stub::PassIn : Stub::PassOut, -1, 0, e.spider};
    int node = spider_node[e.spider];
    if (e.port < s.inputs) return {Stub::Consumer, node, e.port, e.spider};
    return {Stub::Producer, node, e.port - s.inputs, e.spider};
  };

  std::map<int, std::pair<const ZXEdge*, bool>> link;  // stub key -> edge, is-a
  for (const ZXEdge& e : d.edges) {
    link[stub_key(e.a)] = {&e, true};
    link[stub_key(e.b)] = {&e, false};
  }

  std::set<const ZXEdge*> used;
  auto walk = [&](int from_node, int from_port, const ZXEndpoint& start) {
    ZXEndpoint at = start;
    int cur_node = from_node, cur_port = from_port;
    for (;;) {
      auto [edge, is_a] = link.at(stub_key(at));
      used.insert(edge);
      if (edge->hadamard) {
        int bs = (int)scheme.nodes.size();
        scheme.nodes.push_back({NodeKind::Beamsplitter, 1});
        scheme.wires.push_back({cur_node, cur_port, bs, 0});
        cur_node = bs;
        cur_port = 0;
      }
      ZXEndpoint other = is_a ? edge->b : edge->a;
      Stub s = stub_of(other);
      if (s.role == Stub::Consumer) {
        scheme.wires.push_back({cur_node, cur_port, s.node, s.port});
        return;
      }
      if (s.role == Stub::Producer)
        throw ConversionError("wire joins two outputs near spider " +
                              (s.spider >= 0 ? d.spiders[s.spider].name
                                             : std::string("?")));
      at = port_of(s.spider, s.role == Stub::PassIn ? 1 : 0);
    }
  };
  for (size_t i = 0; i < d.spiders.size(); ++i) {
    const ZXSpider& s = d.spiders[i];
    if (spider_node[i] < 0) continue;
    for (int o = 0; o < s.outputs; ++o) {
      int port = s.inputs + o;
      walk(spider_node[i], scheme.nodes[spider_node[i]].kind == NodeKind::Seed ? o : 0,
           port_of((int)i, port));
    }
  }
  if (used.size() != d.edges.size())
    throw ConversionError("diagram contains wires unreachable from any source");

  try {
    scheme.validate();
  } catch (const std::invalid_argument& e) {
    throw ConversionError(std::string("extracted wiring is invalid: ") + e.what());
  }
  return scheme;
}

LossDetectionReport check_full_loss_detection(const LOScheme& s) {
  // A photon lost on a fusion output can keep the heralds of every device it
  // would later have crossed intact, so any route from a fusion output to an
  // output port defeats loss detection. Analysers consume the wire.
  std::vector<int> parent(s.nodes.size(), -1);
  std::vector<int> queue;
  std::vector<bool> seen(s.nodes.size(), false);
  for (size_t i = 0; i < s.nodes.size(); ++i)
    if (s.nodes[i].kind == NodeKind::Fusion) {
      seen[i] = true;
      queue.push_back((int)i);
    }
  for (size_t head = 0; head < queue.size(); ++head) {
    int at = queue[head];
    for (const SchemeWire& w : s.wires) {
      if (w.from != at || seen[w.to]) continue;
      if (s.nodes[w.to].kind == NodeKind::Analyser) continue;
      seen[w.to] = true;
      parent[w.to] = at;
      if (s.nodes[w.to].kind == NodeKind::Output) {
        LossDetectionReport r;
        r.fully_loss_detecting = false;
        for (int n = w.to; n >= 0; n = parent[n])
          r.witness_path.insert(r.witness_path.begin(), n);
        return r;
      }
      queue.push_back(w.to);
    }
  }
  return {};
}

Device node_device(const LOScheme& s, int node, const std::vector<int>& boost) {
  if (node < 0 || node >= (int)s.nodes.size())
    throw std::invalid_argument("no such node");
  const SchemeNode& nd = s.nodes[node];
  if (nd.kind == NodeKind::Fusion) {
    if (!boost.empty())
      throw std::invalid_argument("boosting is only accepted on analyser nodes");
    return type1_fusion(nd.n);
  }
  if (nd.kind != NodeKind::Analyser)
    throw std::invalid_argument("node " + std::to_string(node) +
                                " is not a measurement device");
  Device d = nd.n == 2 ? bell_analyser() : ghz_analyser(nd.n);
  std::set<int> applied;
  for (int q : boost) {
    if (q < 0 || q >= nd.n || !applied.insert(q).second)
      throw std::invalid_argument("bad booster qubit " + std::to_string(q));
    d = attach_sqa_beta(d, q);
  }
  return d;
}

SchemeMetrics scheme_metrics(const LOScheme& s, const BoostAssignment& boosting) {
  s.validate();
  for (const auto& [node, qubits] : boosting)
    if (node < 0 || node >= (int)s.nodes.size() ||
        s.nodes[node].kind != NodeKind::Analyser)
      throw std::invalid_argument("boosting is only accepted on analyser nodes");

  SchemeMetrics m;
  std::map<std::string, std::pair<Rational, int>> device_cache;
  for (size_t i = 0; i < s.nodes.size(); ++i) {
    const SchemeNode& nd = s.nodes[i];
    switch (nd.kind) {
      case NodeKind::Seed:
        m.seed_inventory[nd.n]++;
        m.photon_count += nd.n;
        break;
      case NodeKind::Beamsplitter:
        m.device_inventory["beamsplitter"]++;
        break;
      case NodeKind::Output:
        break;
      case NodeKind::Fusion:
      case NodeKind::Analyser: {
        std::vector<int> boost;
        if (auto it = boosting.find((int)i); it != boosting.end()) boost = it->second;
        std::string label =
            nd.kind == NodeKind::Fusion
                ? "type-I " + std::to_string(nd.n) + "-fusion"
                : (nd.n == 2 ? std::string("Bell analyser")
                             : std::to_string(nd.n) + "-GHZ analyser");
        if (!boost.empty()) {
          std::sort(boost.begin(), boost.end());
          label += ", boosted";
          for (int q : boost) label += " " + std::to_string(q);
        }
        m.device_inventory[label]++;
        m.photon_count += 2 * (int)boost.size();
        auto found = device_cache.find(label);
        if (found == device_cache.end()) {
          std::pair<Rational, int> entry;
          if (boost.empty()) {
            // 1 / 2^(n-1) for both device families; no table needed.
            entry.first = Rational::dyadic(1, nd.n - 1);
            entry.second = nd.kind == NodeKind::Fusion ? 2 : 1;
          } else {
            Device dev = node_device(s, (int)i, boost);
            Probability p = success_probability(dev);
            if (!p.exact)
              throw std::runtime_error("non-dyadic device success probability");
            entry = {*p.exact, required_pnr(dev)};
          }
          found = device_cache.emplace(label, entry).first;
        }
        m.success_probability *= found->second.first;
        m.max_pnr = std::max(m.max_pnr, found->second.second);
        break;
      }
    }
  }
  m.fully_loss_detecting = check_full_loss_detection(s).fully_loss_detecting;
  return m;
}

}  // namespace fockforge
