#include <json.hpp>

#include <set>
#include <stdexcept>

#include "fockforge/zx.hpp"

namespace fockforge {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "fockforge/1";

json endpoint_to_json(const ZXEndpoint& e, const std::vector<std::string>& names) {
  if (e.is_boundary()) return json{{"boundary", e.port}};
  return json{{"spider", names[e.spider]}, {"port", e.port}};
}

ZXEndpoint endpoint_from_json(const json& j, const ZXDiagram& d) {
  if (j.contains("boundary")) return boundary(j.at("boundary").get<int>());
  int s = d.find_spider(j.at("spider").get<std::string>());
  if (s < 0)
    throw std::invalid_argument("endpoint references unknown spider " +
                                j.at("spider").get<std::string>());
  return port_of(s, j.at("port").get<int>());
}

// Names must be unique to serve as ids. Spiders constructed by hand may
// carry empty or clashing names; those get fresh ones here.
std::vector<std::string> serial_names(const ZXDiagram& d) {
  std::set<std::string> taken;
  for (const ZXSpider& s : d.spiders)
    if (!s.name.empty()) taken.insert(s.name);
  std::vector<std::string> names;
  std::set<std::string> used;
  for (size_t i = 0; i < d.spiders.size(); ++i) {
    std::string n = d.spiders[i].name;
    if (n.empty() || used.count(n)) {
      int k = (int)i;
      do {
        n = "s" + std::to_string(k++);
      } while (taken.count(n) || used.count(n));
    }
    used.insert(n);
    names.push_back(n);
  }
  return names;
}

}  // namespace

std::string diagram_to_json(const ZXDiagram& d) {
  std::vector<std::string> names = serial_names(d);
  json j;
  j["format"] = kFormat;
  j["spiders"] = json::array();
  for (size_t i = 0; i < d.spiders.size(); ++i)
    j["spiders"].push_back(json{{"id", names[i]},
                                {"in", d.spiders[i].inputs},
                                {"out", d.spiders[i].outputs}});
  j["edges"] = json::array();
  for (const ZXEdge& e : d.edges)
    j["edges"].push_back(json{{"a", endpoint_to_json(e.a, names)},
                              {"b", endpoint_to_json(e.b, names)},
                              {"hadamard", e.hadamard}});
  // outputs[k] is the endpoint driving boundary k, for readers that only
  // care about the interface; the same edge also appears in "edges".
  json outputs = json::array();
  for (int b = 0; b < d.boundary_count; ++b) {
    json found;
    for (const ZXEdge& e : d.edges) {
      if (e.a.is_boundary() && e.a.port == b) found = endpoint_to_json(e.b, names);
      if (e.b.is_boundary() && e.b.port == b) found = endpoint_to_json(e.a, names);
    }
    if (found.is_null()) found = json{{"boundary", b}};
    outputs.push_back(found);
  }
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

ZXDiagram diagram_from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("format") || j.at("format") != kFormat)
    throw std::invalid_argument("diagram JSON missing format \"fockforge/1\"");
  ZXDiagram d;
  for (const json& s : j.at("spiders")) {
    std::string id = s.at("id").get<std::string>();
    if (id.empty() || d.find_spider(id) >= 0)
      throw std::invalid_argument("duplicate or empty spider id");
    d.add_spider(s.at("in").get<int>(), s.at("out").get<int>(), id);
  }
  d.boundary_count = (int)j.at("outputs").size();
  for (const json& e : j.at("edges"))
    d.connect(endpoint_from_json(e.at("a"), d), endpoint_from_json(e.at("b"), d),
              e.value("hadamard", false));
  for (const json& o : j.at("outputs")) endpoint_from_json(o, d);
  return d;
}

std::string scheme_to_json(const LOScheme& s, const SchemeMetrics* m) {
  json j;
  j["format"] = kFormat;
  j["nodes"] = json::array();
  for (size_t i = 0; i < s.nodes.size(); ++i)
    j["nodes"].push_back(json{{"id", (int)i},
                              {"kind", node_kind_name(s.nodes[i].kind)},
                              {"n", s.nodes[i].n}});
  j["wires"] = json::array();
  for (const SchemeWire& w : s.wires)
    j["wires"].push_back(json{{"from", w.from},
                              {"from_port", w.from_port},
                              {"to", w.to},
                              {"to_port", w.to_port}});
  if (m) {
    json metrics;
    metrics["success_probability"] = json{{"num", m->success_probability.num()},
                                          {"den", m->success_probability.den()}};
    json seeds = json::object();
    for (const auto& [size, count] : m->seed_inventory)
      seeds[std::to_string(size)] = count;
    metrics["seed_inventory"] = seeds;
    json devices = json::object();
    for (const auto& [name, count] : m->device_inventory) devices[name] = count;
    metrics["device_inventory"] = devices;
    metrics["photon_count"] = m->photon_count;
    metrics["fully_loss_detecting"] = m->fully_loss_detecting;
    metrics["max_pnr"] = m->max_pnr;
    j["metrics"] = metrics;
  }
  return j.dump(2) + "\n";
}

}  // namespace fockforge
