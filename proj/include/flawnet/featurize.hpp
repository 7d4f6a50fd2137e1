#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flawnet/dataset.hpp"
#include "flawnet/graph.hpp"

namespace flawnet {

/// Feature key → count. Ordered so iteration is deterministic.
using FeatureCounts = std::map<std::string, std::int64_t>;

/// Counts every node—edge—node transition of one graph as
/// `<kind>:<src type>---<label>---<dst type>`, with edge multiplicity.
inline FeatureCounts count_transitions(const ProgramGraph& g) {
  std::unordered_map<std::int64_t, const std::string*> type_of;
  type_of.reserve(g.nodes.size());
  for (const auto& n : g.nodes) type_of[n.id] = &n.type;
  const std::string kind = to_string(g.kind);
  FeatureCounts counts;
  for (const auto& e : g.edges) {
    const auto su = type_of.find(e.src);
    const auto sv = type_of.find(e.dst);
    if (su == type_of.end() || sv == type_of.end())
      throw DataError("function '" + g.function_id + "': edge references a missing node");
    ++counts[kind + ":" + *su->second + "---" + e.label + "---" + *sv->second];
  }
  return counts;
}

/// Statistical features over all graphs of one function: node counts per
/// type, edge counts per label, and an out-degree histogram per node type
/// with buckets 0, 1, 2 and 3+.
inline FeatureCounts statistical_counts(const std::vector<ProgramGraph>& graphs) {
  FeatureCounts counts;
  for (const auto& g : graphs) {
    if (g.function_id != graphs.front().function_id)
      throw DataError("statistical_counts: graphs mix function ids ('" +
                      graphs.front().function_id + "' vs '" + g.function_id + "')");
    const std::string kind = to_string(g.kind);
    std::unordered_map<std::int64_t, std::int64_t> outdeg;
    for (const auto& n : g.nodes) {
      ++counts[kind + ":nodecount:" + n.type];
      outdeg.emplace(n.id, 0);
    }
    for (const auto& e : g.edges) {
      ++counts[kind + ":edgecount:" + e.label];
      ++outdeg[e.src];
    }
    for (const auto& n : g.nodes) {
      const std::int64_t d = outdeg[n.id];
      const std::string bucket = d >= 3 ? "3+" : std::to_string(d);
      ++counts[kind + ":outdeg:" + n.type + ":" + bucket];
    }
  }
  return counts;
}

/// Ordered feature keys shared by a corpus run.
struct FeatureSchema {
  std::vector<std::string> keys;  // unique, lexicographically sorted
  std::string version = "v1";
};

/// Aligns every function's counts to the sorted union of all observed keys;
/// absent keys become 0. Row order follows the corpus order.
inline std::pair<FeatureSchema, Matrix> vectorize(
    const std::vector<std::pair<std::string, FeatureCounts>>& corpus) {
  if (corpus.empty()) throw DataError("vectorize: corpus is empty");
  FeatureSchema schema;
  {
    std::map<std::string, std::size_t> keys;
    for (const auto& [id, counts] : corpus)
      for (const auto& [key, count] : counts) keys.emplace(key, 0);
    std::size_t idx = 0;
    for (auto& [key, slot] : keys) {
      slot = idx++;
      schema.keys.push_back(key);
    }
    Matrix m(corpus.size(), schema.keys.size());
    for (std::size_t i = 0; i < corpus.size(); ++i)
      for (const auto& [key, count] : corpus[i].second)
        m(i, keys.at(key)) = static_cast<double>(count);
    return {std::move(schema), std::move(m)};
  }
}

/// Full featurization: groups graphs per function (first-appearance order),
/// merges transition and statistical counts, and vectorizes. Labels are not
/// part of the graph interchange, so every row gets label 0; join labels and
/// binary features downstream.
inline BimodalDataset featurize_graphs(const std::vector<ProgramGraph>& graphs) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const ProgramGraph*>> by_fn;
  for (const auto& g : graphs) {
    auto& slot = by_fn[g.function_id];
    if (slot.empty()) order.push_back(g.function_id);
    slot.push_back(&g);
  }
  std::vector<std::pair<std::string, FeatureCounts>> corpus;
  for (const auto& fid : order) {
    std::vector<ProgramGraph> own;
    for (const auto* g : by_fn[fid]) own.push_back(*g);
    FeatureCounts merged = statistical_counts(own);
    for (const auto& g : own)
      for (const auto& [key, count] : count_transitions(g)) merged[key] += count;
    corpus.emplace_back(fid, std::move(merged));
  }
  auto [schema, m] = vectorize(corpus);
  BimodalDataset ds;
  ds.ids = order;
  ds.x = std::move(m);
  ds.y = Matrix(order.size(), 0);
  ds.labels.assign(order.size(), 0);
  ds.x_names = schema.keys;
  return ds;
}

}  // namespace flawnet
