#include <algorithm>
#include <stdexcept>
#include <vector>

#include "fockforge/zx.hpp"

namespace fockforge {
namespace {

bool is_input(const ZXSpider& s, int port) { return port < s.inputs; }

void check_spider(const ZXDiagram& d, int spider) {
  if (spider < 0 || spider >= (int)d.spiders.size())
    throw std::invalid_argument("spider index out of range");
}

}  // namespace

ZXDiagram spider_fuse(const ZXDiagram& d, int edge_index) {
  d.validate();
  if (edge_index < 0 || edge_index >= (int)d.edges.size())
    throw std::invalid_argument("edge index out of range");
  const ZXEdge fused = d.edges[edge_index];
  if (fused.hadamard)
    throw std::invalid_argument("cannot fuse across a Hadamard edge");
  if (fused.a.is_boundary() || fused.b.is_boundary())
    throw std::invalid_argument("cannot fuse into a boundary");
  int sa = fused.a.spider, sb = fused.b.spider;
  if (sa == sb) throw std::invalid_argument("cannot fuse a self-loop");
  if (sa > sb) std::swap(sa, sb);
  const ZXSpider& A = d.spiders[sa];
  const ZXSpider& B = d.spiders[sb];

  // Ports eaten by edges between the pair; only the fused edge and parallel
  // plain edges may join them.
  std::vector<bool> dead_a(A.ports(), false), dead_b(B.ports(), false);
  for (const ZXEdge& e : d.edges) {
    bool ab = !e.a.is_boundary() && !e.b.is_boundary() &&
              ((e.a.spider == sa && e.b.spider == sb) ||
               (e.a.spider == sb && e.b.spider == sa));
    if (!ab) continue;
    if (e.hadamard)
      throw std::invalid_argument(
          "parallel Hadamard edge between fused spiders needs a phase");
    const ZXEndpoint& ea = e.a.spider == sa ? e.a : e.b;
    const ZXEndpoint& eb = e.a.spider == sa ? e.b : e.a;
    dead_a[ea.port] = true;
    dead_b[eb.port] = true;
  }

  // New port numbering: surviving inputs of a, inputs of b, outputs of a,
  // outputs of b.
  std::vector<int> map_a(A.ports(), -1), map_b(B.ports(), -1);
  int next = 0;
  for (int p = 0; p < A.inputs; ++p)
    if (!dead_a[p]) map_a[p] = next++;
  for (int p = 0; p < B.inputs; ++p)
    if (!dead_b[p]) map_b[p] = next++;
  int merged_inputs = next;
  for (int p = A.inputs; p < A.ports(); ++p)
    if (!dead_a[p]) map_a[p] = next++;
  for (int p = B.inputs; p < B.ports(); ++p)
    if (!dead_b[p]) map_b[p] = next++;

  ZXDiagram out;
  out.boundary_count = d.boundary_count;
  for (int s = 0; s < (int)d.spiders.size(); ++s) {
    if (s == sb) continue;
    ZXSpider sp = d.spiders[s];
    if (s == sa) {
      sp.inputs = merged_inputs;
      sp.outputs = next - merged_inputs;
    }
    out.spiders.push_back(sp);
  }
  auto remap = [&](ZXEndpoint e) {
    if (e.is_boundary()) return e;
    if (e.spider == sa) return port_of(sa, map_a[e.port]);
    if (e.spider == sb) return port_of(sa, map_b[e.port]);
    return port_of(e.spider > sb ? e.spider - 1 : e.spider, e.port);
  };
  for (const ZXEdge& e : d.edges) {
    bool ab = !e.a.is_boundary() && !e.b.is_boundary() &&
              ((e.a.spider == sa && e.b.spider == sb) ||
               (e.a.spider == sb && e.b.spider == sa));
    if (ab) continue;
    out.edges.push_back({remap(e.a), remap(e.b), e.hadamard});
  }
  out.validate();
  return out;
}

ZXDiagram spider_unfuse(const ZXDiagram& d, int spider,
                        const std::vector<int>& ports_a) {
  d.validate();
  check_spider(d, spider);
  const ZXSpider& S = d.spiders[spider];
  std::vector<bool> keep(S.ports(), false);
  for (int p : ports_a) {
    if (p < 0 || p >= S.ports())
      throw std::invalid_argument("port index out of range");
    if (keep[p]) throw std::invalid_argument("duplicate port index");
    keep[p] = true;
  }
  int na = (int)ports_a.size();
  if (na == 0 || na == S.ports())
    throw std::invalid_argument("ports_a must be a proper nonempty subset");

  // First half keeps `ports_a` plus a fresh output; the rest moves to a new
  // spider with a fresh input. Inputs stay inputs, outputs stay outputs.
  std::vector<int> map_first(S.ports(), -1), map_second(S.ports(), -1);
  int in_a = 0, in_b = 0;
  for (int p = 0; p < S.inputs; ++p)
    keep[p] ? void(map_first[p] = in_a++) : void(map_second[p] = in_b++);
  int out_a = 0, out_b = 0;
  for (int p = S.inputs; p < S.ports(); ++p)
    keep[p] ? void(map_first[p] = in_a + out_a++)
            : void(map_second[p] = in_b + 1 + out_b++);

  ZXDiagram out = d;
  out.spiders[spider].inputs = in_a;
  out.spiders[spider].outputs = out_a + 1;
  int other = out.add_spider(in_b + 1, out_b);
  for (ZXEdge& e : out.edges) {
    for (ZXEndpoint* ep : {&e.a, &e.b}) {
      if (ep->is_boundary() || ep->spider != spider) continue;
      if (map_first[ep->port] >= 0)
        *ep = port_of(spider, map_first[ep->port]);
      else
        *ep = port_of(other, map_second[ep->port]);
    }
  }
  out.connect(port_of(spider, in_a + out_a), port_of(other, in_b));
  out.validate();
  return out;
}

ZXDiagram eliminate_multi_output(const ZXDiagram& d, int spider) {
  d.validate();
  check_spider(d, spider);
  const ZXSpider S = d.spiders[spider];
  if (S.outputs < 2)
    throw std::invalid_argument("spider needs at least two outputs");

  ZXDiagram out = d;
  // Former outputs 1..m-1 become inputs fed by Bell seeds whose other leg
  // drives whatever those outputs used to reach.
  out.spiders[spider].inputs = S.inputs + S.outputs - 1;
  out.spiders[spider].outputs = 1;
  // Old output port S.inputs + j: j = 0 stays the single output (now at port
  // inputs + m - 1); j >= 1 becomes input port inputs + j - 1.
  auto new_port = [&](int p) {
    if (p < S.inputs) return p;
    int j = p - S.inputs;
    return j == 0 ? S.inputs + S.outputs - 1 : S.inputs + j - 1;
  };
  std::vector<std::pair<int, int>> seed_links;  // (seed, spider input port)
  for (ZXEdge& e : out.edges)
    for (ZXEndpoint* ep : {&e.a, &e.b}) {
      if (ep->is_boundary() || ep->spider != spider) continue;
      int j = ep->port - S.inputs;
      if (j >= 1) {
        int seed = out.add_spider(0, 2);
        seed_links.push_back({seed, S.inputs + j - 1});
        *ep = port_of(seed, 1);
      } else {
        *ep = port_of(spider, new_port(ep->port));
      }
    }
  for (auto& [seed, port] : seed_links)
    out.connect(port_of(seed, 0), port_of(spider, port));
  out.validate();
  return out;
}

ZXDiagram bend_output_through_input(const ZXDiagram& d, int spider) {
  d.validate();
  check_spider(d, spider);
  const ZXSpider S = d.spiders[spider];
  if (S.outputs != 1)
    throw std::invalid_argument("spider must have exactly one output");

  ZXDiagram out = d;
  out.spiders[spider].inputs = S.inputs + 1;
  out.spiders[spider].outputs = 0;
  int seed = out.add_spider(0, 2);
  bool moved = false;
  for (ZXEdge& e : out.edges)
    for (ZXEndpoint* ep : {&e.a, &e.b})
      if (!ep->is_boundary() && ep->spider == spider && ep->port == S.inputs) {
        *ep = port_of(seed, 1);
        moved = true;
      }
  if (!moved) throw std::invalid_argument("output port has no edge");
  out.connect(port_of(seed, 0), port_of(spider, S.inputs));
  out.validate();
  return out;
}

}  // namespace fockforge
