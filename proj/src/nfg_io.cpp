#include "bethe/nfg_io.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bethe {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ValidationError(std::string("NFG JSON: missing field \"") + name + "\"");
  }
  return obj.at(name);
}

}  // namespace

Nfg nfg_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("NFG JSON: ") + e.what());
  }
  try {
    std::vector<Node> nodes;
    for (const json& jn : field(doc, "nodes")) {
      auto values = field(jn, "table").get<std::vector<double>>();
      if (values.empty() || !std::has_single_bit(values.size())) {
        throw ValidationError("NFG JSON: table length of node " + field(jn, "id").get<std::string>() +
                              " is not a power of two");
      }
      const auto table_arity = static_cast<std::size_t>(std::countr_zero(values.size()));
      const bool transformed = jn.value("transformed", false);
      nodes.push_back(Node{field(jn, "id").get<std::string>(), field(jn, "arity").get<std::size_t>(),
                           LocalFunctionTable(table_arity, std::move(values), transformed)});
    }
    std::vector<Edge> edges;
    for (const json& je : field(doc, "edges")) {
      const auto kind_name = field(je, "kind").get<std::string>();
      EdgeKind kind;
      if (kind_name == "full") {
        kind = EdgeKind::full;
      } else if (kind_name == "half") {
        kind = EdgeKind::half;
      } else {
        throw ValidationError("NFG JSON: edge kind must be \"full\" or \"half\", got \"" + kind_name + "\"");
      }
      Edge e{field(je, "id").get<std::string>(), kind, {}};
      for (const json& end : field(je, "ends")) {
        if (!end.is_array() || end.size() != 2) {
          throw ValidationError("NFG JSON: edge " + e.id + " endpoint must be [node, port]");
        }
        const auto node_id = end.at(0).get<std::string>();
        std::size_t node = nodes.size();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          if (nodes[i].id == node_id) node = i;
        }
        if (node == nodes.size()) throw ValidationError("NFG JSON: edge " + e.id + " names unknown node " + node_id);
        e.ends.push_back(Endpoint{node, end.at(1).get<std::size_t>()});
      }
      edges.push_back(std::move(e));
    }
    return Nfg(std::move(nodes), std::move(edges));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("NFG JSON: ") + e.what());
  }
}

std::string nfg_to_json(const Nfg& nfg) {
  json doc;
  doc["nodes"] = json::array();
  for (const Node& n : nfg.nodes()) {
    json jn{{"id", n.id}, {"arity", n.ports}, {"table", std::vector<double>(n.table.values().begin(), n.table.values().end())}};
    if (n.table.transformed()) jn["transformed"] = true;
    doc["nodes"].push_back(std::move(jn));
  }
  doc["edges"] = json::array();
  for (const Edge& e : nfg.edges()) {
    json ends = json::array();
    for (const Endpoint& end : e.ends) ends.push_back(json::array({nfg.node(end.node).id, end.port}));
    doc["edges"].push_back({{"id", e.id}, {"kind", e.kind == EdgeKind::full ? "full" : "half"}, {"ends", ends}});
  }
  return doc.dump();
}

Nfg load_nfg(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open NFG file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return nfg_from_json(buf.str());
}

}  // namespace bethe
