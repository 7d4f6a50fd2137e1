#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "flawnet/error.hpp"

namespace flawnet {

/// The six program-graph kinds accepted by the featurizer.
enum class GraphKind { Ast, Cfg, Icfg, Scope, Udg, Type };

inline std::string to_string(GraphKind k) {
  switch (k) {
    case GraphKind::Ast: return "AST";
    case GraphKind::Cfg: return "CFG";
    case GraphKind::Icfg: return "ICFG";
    case GraphKind::Scope: return "SCOPE";
    case GraphKind::Udg: return "UDG";
    case GraphKind::Type: return "TYPE";
  }
  return "AST";
}

inline GraphKind parse_graph_kind(const std::string& s, const std::string& function_id) {
  if (s == "AST") return GraphKind::Ast;
  if (s == "CFG") return GraphKind::Cfg;
  if (s == "ICFG") return GraphKind::Icfg;
  if (s == "SCOPE") return GraphKind::Scope;
  if (s == "UDG") return GraphKind::Udg;
  if (s == "TYPE") return GraphKind::Type;
  throw DataError("function '" + function_id + "': unknown graph kind '" + s + "'");
}

struct GraphNode {
  std::int64_t id = 0;
  std::string type;
};

struct GraphEdge {
  std::int64_t src = 0;
  std::int64_t dst = 0;
  std::string label;
};

/// Typed nodes and labeled edges of one graph kind of one function.
struct ProgramGraph {
  std::string function_id;
  GraphKind kind = GraphKind::Ast;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  void validate() const {
    std::unordered_set<std::int64_t> ids;
    for (const auto& n : nodes)
      if (!ids.insert(n.id).second)
        throw DataError("function '" + function_id + "': duplicate node id " +
                        std::to_string(n.id));
    for (const auto& e : edges) {
      if (!ids.count(e.src) || !ids.count(e.dst))
        throw DataError("function '" + function_id + "': edge " + std::to_string(e.src) + "->" +
                        std::to_string(e.dst) + " references a missing node");
    }
  }
};

/// Parses the interchange JSON
/// {"functions":[{"function_id":str,"graphs":[{"kind":str,
///   "nodes":[{"id":int,"type":str}],"edges":[{"src":int,"dst":int,"label":str}]}]}]}
/// into one ProgramGraph per (function, kind) entry.
inline std::vector<ProgramGraph> parse_graph_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("graph json is malformed: ") + e.what());
  }
  std::vector<ProgramGraph> out;
  try {
    if (!doc.is_object() || !doc.contains("functions"))
      throw DataError("graph json must be an object with a 'functions' array");
    for (const auto& fn : doc.at("functions")) {
      const std::string fid = fn.at("function_id").get<std::string>();
      for (const auto& g : fn.at("graphs")) {
        ProgramGraph pg;
        pg.function_id = fid;
        pg.kind = parse_graph_kind(g.at("kind").get<std::string>(), fid);
        for (const auto& n : g.at("nodes"))
          pg.nodes.push_back({n.at("id").get<std::int64_t>(), n.at("type").get<std::string>()});
        if (g.contains("edges"))
          for (const auto& e : g.at("edges"))
            pg.edges.push_back({e.at("src").get<std::int64_t>(), e.at("dst").get<std::int64_t>(),
                                e.at("label").get<std::string>()});
        pg.validate();
        out.push_back(std::move(pg));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("graph json has an unexpected structure: ") + e.what());
  }
  return out;
}

inline std::vector<ProgramGraph> parse_graph_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph_json_text(ss.str());
}

/// Serializes graphs in the interchange layout, grouped by function in
/// first-appearance order.
inline std::string write_graph_json(const std::vector<ProgramGraph>& graphs) {
  nlohmann::json doc;
  doc["functions"] = nlohmann::json::array();
  std::vector<std::string> order;
  auto function_entry = [&](const std::string& fid) -> nlohmann::json& {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == fid) return doc["functions"][i];
    order.push_back(fid);
    doc["functions"].push_back({{"function_id", fid}, {"graphs", nlohmann::json::array()}});
    return doc["functions"].back();
  };
  for (const auto& g : graphs) {
    nlohmann::json jg;
    jg["kind"] = to_string(g.kind);
    jg["nodes"] = nlohmann::json::array();
    for (const auto& n : g.nodes) jg["nodes"].push_back({{"id", n.id}, {"type", n.type}});
    jg["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges)
      jg["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"label", e.label}});
    function_entry(g.function_id)["graphs"].push_back(std::move(jg));
  }
  return doc.dump(2);
}

}  // namespace flawnet
