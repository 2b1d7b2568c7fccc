#include "fockforge/zx.hpp"

#include <algorithm>
#include <stdexcept>

namespace fockforge {

ZXEndpoint boundary(int index) { return ZXEndpoint{-1, index}; }
ZXEndpoint port_of(int spider, int port) { return ZXEndpoint{spider, port}; }

int ZXDiagram::add_spider(int inputs, int outputs, std::string name) {
  if (inputs < 0 || outputs < 0)
    throw std::invalid_argument("negative spider arity");
  if (name.empty()) name = "s" + std::to_string(spiders.size());
  spiders.push_back(ZXSpider{std::move(name), inputs, outputs});
  return (int)spiders.size() - 1;
}

int ZXDiagram::add_boundary() { return boundary_count++; }

void ZXDiagram::connect(ZXEndpoint a, ZXEndpoint b, bool hadamard) {
  edges.push_back(ZXEdge{a, b, hadamard});
}

int ZXDiagram::find_spider(const std::string& name) const {
  for (size_t i = 0; i < spiders.size(); ++i)
    if (spiders[i].name == name) return (int)i;
  return -1;
}

void ZXDiagram::validate() const {
  std::vector<std::vector<int>> port_use(spiders.size());
  for (size_t i = 0; i < spiders.size(); ++i)
    port_use[i].assign(spiders[i].ports(), 0);
  std::vector<int> boundary_use(boundary_count, 0);
  auto touch = [&](const ZXEndpoint& e) {
    if (e.is_boundary()) {
      if (e.port < 0 || e.port >= boundary_count)
        throw std::invalid_argument("edge references missing boundary");
      boundary_use[e.port]++;
    } else {
      if (e.spider >= (int)spiders.size())
        throw std::invalid_argument("edge references missing spider");
      if (e.port < 0 || e.port >= spiders[e.spider].ports())
        throw std::invalid_argument("edge references missing port");
      port_use[e.spider][e.port]++;
    }
  };
  for (const ZXEdge& e : edges) {
    touch(e.a);
    touch(e.b);
  }
  for (size_t i = 0; i < spiders.size(); ++i)
    for (int p = 0; p < spiders[i].ports(); ++p)
      if (port_use[i][p] != 1)
        throw std::invalid_argument("spider " + spiders[i].name + " port " +
                                    std::to_string(p) + " has " +
                                    std::to_string(port_use[i][p]) +
                                    " incident edges");
  for (int b = 0; b < boundary_count; ++b)
    if (boundary_use[b] != 1)
      throw std::invalid_argument("boundary " + std::to_string(b) + " has " +
                                  std::to_string(boundary_use[b]) +
                                  " incident edges");
}

ConvertibilityReport is_lo_convertible(const ZXDiagram& d) {
  ConvertibilityReport r;
  for (size_t i = 0; i < d.spiders.size(); ++i) {
    const ZXSpider& s = d.spiders[i];
    bool seed = s.inputs == 0;
    bool fusion_or_wire = s.inputs >= 1 && s.outputs == 1;
    bool analyser = s.inputs >= 1 && s.outputs == 0;
    if (!(seed || fusion_or_wire || analyser)) {
      r.ok = false;
      r.offending_spiders.push_back((int)i);
    }
  }
  return r;
}

ZXDiagram qpc_encoder_diagram(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("qpc parameters must be >= 1");
  ZXDiagram d;
  // Logical input bent into boundary 0; the fan-out spider sees it as its
  // single input.
  int root = d.add_spider(1, n, "qpc_root");
  int in = d.add_boundary();
  d.connect(boundary(in), port_of(root, 0));
  for (int i = 0; i < n; ++i) {
    int block = d.add_spider(1, m, "qpc_block" + std::to_string(i));
    d.connect(port_of(root, 1 + i), port_of(block, 0), /*hadamard=*/true);
    for (int j = 0; j < m; ++j) {
      int out = d.add_boundary();
      d.connect(port_of(block, 1 + j), boundary(out));
    }
  }
  d.validate();
  return d;
}

ZXDiagram append_encoder(const ZXDiagram& d, int which,
                         const ZXDiagram& encoder) {
  if (which < 0 || which >= d.boundary_count)
    throw std::invalid_argument("no such output");
  if (encoder.boundary_count < 1)
    throw std::invalid_argument("encoder needs an input boundary");
  ZXDiagram out;
  out.spiders = d.spiders;
  int spider_base = (int)out.spiders.size();
  for (ZXSpider s : encoder.spiders) {
    if (out.find_spider(s.name) >= 0) s.name += "'";
    out.spiders.push_back(std::move(s));
  }

  // Host boundaries keep their indices except `which`, which disappears; the
  // encoder's non-input boundaries are appended after the host's.
  out.boundary_count = d.boundary_count - 1 + encoder.boundary_count - 1;
  auto host_boundary = [&](int b) { return b < which ? b : b - 1; };
  auto enc_boundary = [&](int b) { return d.boundary_count - 1 + b - 1; };

  // The endpoint the host wired to `which` and the one the encoder wired to
  // its boundary 0 get joined by one edge carrying both former flags.
  ZXEndpoint host_end{}, enc_end{};
  bool host_h = false, enc_h = false;

  for (ZXEdge e : d.edges) {
    bool a_cut = e.a.is_boundary() && e.a.port == which;
    bool b_cut = e.b.is_boundary() && e.b.port == which;
    for (ZXEndpoint* p : {&e.a, &e.b})
      if (p->is_boundary() && p->port != which)
        p->port = host_boundary(p->port);
    if (a_cut || b_cut) {
      host_end = a_cut ? e.b : e.a;
      host_h = e.hadamard;
    } else {
      out.edges.push_back(e);
    }
  }
  for (ZXEdge e : encoder.edges) {
    bool a_cut = e.a.is_boundary() && e.a.port == 0;
    bool b_cut = e.b.is_boundary() && e.b.port == 0;
    for (ZXEndpoint* p : {&e.a, &e.b}) {
      if (p->is_boundary()) {
        if (p->port != 0) p->port = enc_boundary(p->port);
      } else {
        p->spider += spider_base;
      }
    }
    if (a_cut || b_cut) {
      enc_end = a_cut ? e.b : e.a;
      enc_h = e.hadamard;
    } else {
      out.edges.push_back(e);
    }
  }
  if (host_h && enc_h)
    throw std::invalid_argument("joining two Hadamard stubs needs a phase");
  out.connect(host_end, enc_end, host_h || enc_h);
  out.validate();
  return out;
}

}  // namespace fockforge
