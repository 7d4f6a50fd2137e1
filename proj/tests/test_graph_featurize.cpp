#include "flawnet/featurize.hpp"

#include <gtest/gtest.h>

#include <map>

#include "flawnet/rng.hpp"

using namespace flawnet;

namespace {

ProgramGraph random_graph(Rng& rng, const std::string& fid, GraphKind kind,
                          std::size_t max_nodes = 50, std::size_t max_edges = 200) {
  static const std::vector<std::string> types{"CallExpression", "BinaryOperator",
                                              "ElseStatement", "VarDecl", "Block"};
  static const std::vector<std::string> labels{"argument", "next", "declaration", "child"};
  ProgramGraph g;
  g.function_id = fid;
  g.kind = kind;
  const std::size_t n = 1 + rng.below(max_nodes);
  for (std::size_t i = 0; i < n; ++i)
    g.nodes.push_back({static_cast<std::int64_t>(i), types[rng.below(types.size())]});
  const std::size_t e = rng.below(max_edges + 1);
  for (std::size_t i = 0; i < e; ++i)
    g.edges.push_back({static_cast<std::int64_t>(rng.below(n)),
                       static_cast<std::int64_t>(rng.below(n)),
                       labels[rng.below(labels.size())]});
  return g;
}

}  // namespace

TEST(GraphJson, EmptyFunctionListParses) {
  const auto graphs = parse_graph_json_text(R"({"functions":[]})");
  EXPECT_TRUE(graphs.empty());
}

TEST(GraphJson, DanglingEdgeNamesTheFunction) {
  const std::string doc = R"({"functions":[{"function_id":"foo","graphs":[
    {"kind":"AST","nodes":[{"id":1,"type":"Block"}],
     "edges":[{"src":1,"dst":2,"label":"child"}]}]}]})";
  try {
    parse_graph_json_text(doc);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
  }
}

TEST(GraphJson, DuplicateNodeIdRejected) {
  const std::string doc = R"({"functions":[{"function_id":"bar","graphs":[
    {"kind":"CFG","nodes":[{"id":1,"type":"A"},{"id":1,"type":"B"}],"edges":[]}]}]})";
  EXPECT_THROW(parse_graph_json_text(doc), DataError);
}

TEST(GraphJson, UnknownKindRejected) {
  const std::string doc = R"({"functions":[{"function_id":"baz","graphs":[
    {"kind":"DFG","nodes":[],"edges":[]}]}]})";
  EXPECT_THROW(parse_graph_json_text(doc), DataError);
}

TEST(GraphJson, EmitParseRoundTrip) {
  Rng rng(3);
  std::vector<ProgramGraph> graphs;
  graphs.push_back(random_graph(rng, "f1", GraphKind::Ast));
  graphs.push_back(random_graph(rng, "f1", GraphKind::Cfg));
  graphs.push_back(random_graph(rng, "f2", GraphKind::Udg));
  const auto back = parse_graph_json_text(write_graph_json(graphs));
  ASSERT_EQ(back.size(), graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    EXPECT_EQ(back[i].function_id, graphs[i].function_id);
    EXPECT_EQ(back[i].kind, graphs[i].kind);
    ASSERT_EQ(back[i].nodes.size(), graphs[i].nodes.size());
    ASSERT_EQ(back[i].edges.size(), graphs[i].edges.size());
    for (std::size_t k = 0; k < graphs[i].edges.size(); ++k) {
      EXPECT_EQ(back[i].edges[k].src, graphs[i].edges[k].src);
      EXPECT_EQ(back[i].edges[k].dst, graphs[i].edges[k].dst);
      EXPECT_EQ(back[i].edges[k].label, graphs[i].edges[k].label);
    }
  }
}

TEST(Transitions, PaperStyleKeyForSingleEdge) {
  ProgramGraph g;
  g.function_id = "f";
  g.kind = GraphKind::Ast;
  g.nodes = {{1, "CallExpression"}, {2, "BinaryOperator"}};
  g.edges = {{1, 2, "argument"}};
  const auto counts = count_transitions(g);
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts.begin()->first, "AST:CallExpression---argument---BinaryOperator");
  EXPECT_EQ(counts.begin()->second, 1);
}

TEST(Transitions, NoEdgesGiveEmptyMap) {
  ProgramGraph g;
  g.function_id = "f";
  g.kind = GraphKind::Cfg;
  g.nodes = {{1, "A"}};
  EXPECT_TRUE(count_transitions(g).empty());
}

TEST(Transitions, MatchBruteForceOnRandomGraphs) {
  Rng rng(17);
  const GraphKind kinds[] = {GraphKind::Ast, GraphKind::Cfg, GraphKind::Icfg,
                             GraphKind::Scope, GraphKind::Udg, GraphKind::Type};
  for (int trial = 0; trial < 100; ++trial) {
    const ProgramGraph g = random_graph(rng, "f", kinds[trial % 6]);
    const auto counts = count_transitions(g);
    // Brute force: enumerate edges and recount with a parallel map.
    std::map<std::string, std::int64_t> expected;
    for (const auto& e : g.edges) {
      std::string su, sv;
      for (const auto& n : g.nodes) {
        if (n.id == e.src) su = n.type;
        if (n.id == e.dst) sv = n.type;
      }
      ++expected[to_string(g.kind) + ":" + su + "---" + e.label + "---" + sv];
    }
    EXPECT_EQ(counts, expected);
    std::int64_t total = 0;
    for (const auto& [key, c] : counts) total += c;
    EXPECT_EQ(total, static_cast<std::int64_t>(g.edges.size()));
  }
}

TEST(StatisticalCounts, NodeCountMatchesPaperExample) {
  ProgramGraph g;
  g.function_id = "f";
  g.kind = GraphKind::Ast;
  g.nodes = {{1, "ElseStatement"}};
  const auto counts = statistical_counts({g});
  EXPECT_EQ(counts.at("AST:nodecount:ElseStatement"), 1);
  EXPECT_EQ(counts.at("AST:outdeg:ElseStatement:0"), 1);  // isolated node
}

TEST(StatisticalCounts, MixedFunctionIdsRejected) {
  ProgramGraph a, b;
  a.function_id = "f1";
  b.function_id = "f2";
  EXPECT_THROW(statistical_counts({a, b}), DataError);
}

TEST(StatisticalCounts, OutDegreeBucketsConserveNodeCounts) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const ProgramGraph g = random_graph(rng, "f", GraphKind::Cfg);
    const auto counts = statistical_counts({g});
    std::map<std::string, std::int64_t> per_type_nodes, per_type_buckets;
    for (const auto& [key, c] : counts) {
      if (key.find(":nodecount:") != std::string::npos)
        per_type_nodes[key.substr(key.rfind(':') + 1)] += c;
      if (key.find(":outdeg:") != std::string::npos) {
        const auto start = std::string("CFG:outdeg:").size();
        const auto end = key.rfind(':');
        per_type_buckets[key.substr(start, end - start)] += c;
      }
    }
    EXPECT_EQ(per_type_nodes, per_type_buckets);
  }
}

TEST(StatisticalCounts, MatchBruteForceOnRandomGraphs) {
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const ProgramGraph g = random_graph(rng, "f", GraphKind::Udg, 30, 100);
    const auto counts = statistical_counts({g});
    std::map<std::string, std::int64_t> expected;
    for (const auto& n : g.nodes) {
      ++expected["UDG:nodecount:" + n.type];
      std::int64_t deg = 0;
      for (const auto& e : g.edges)
        if (e.src == n.id) ++deg;
      ++expected["UDG:outdeg:" + n.type + ":" + (deg >= 3 ? "3+" : std::to_string(deg))];
    }
    for (const auto& e : g.edges) ++expected["UDG:edgecount:" + e.label];
    EXPECT_EQ(counts, expected);
  }
}

TEST(Vectorize, UnionSchemaWithZeroFill) {
  std::vector<std::pair<std::string, FeatureCounts>> corpus;
  corpus.push_back({"f1", {{"b", 2}}});
  corpus.push_back({"f2", {{"a", 3}}});
  const auto [schema, m] = vectorize(corpus);
  ASSERT_EQ(schema.keys, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 2u);
  EXPECT_DOUBLE_EQ(m(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(m(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(m(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(m(1, 1), 0.0);
}

TEST(Vectorize, PermutationInvariantSchemaAndRows) {
  Rng rng(31);
  std::vector<std::pair<std::string, FeatureCounts>> corpus;
  for (int i = 0; i < 6; ++i) {
    const ProgramGraph g = random_graph(rng, "fn" + std::to_string(i), GraphKind::Ast);
    corpus.push_back({g.function_id, count_transitions(g)});
  }
  auto [schema_a, ma] = vectorize(corpus);
  std::vector<std::pair<std::string, FeatureCounts>> shuffled{corpus.rbegin(), corpus.rend()};
  auto [schema_b, mb] = vectorize(shuffled);
  EXPECT_EQ(schema_a.keys, schema_b.keys);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t j = 0; j < ma.cols(); ++j)
      EXPECT_DOUBLE_EQ(ma(i, j), mb(corpus.size() - 1 - i, j));
}

TEST(Vectorize, EmptyCorpusRejected) {
  EXPECT_THROW(vectorize({}), DataError);
}

TEST(FeaturizeGraphs, BuildsDatasetWithLabelZeroAndSortedSchema) {
  Rng rng(37);
  std::vector<ProgramGraph> graphs;
  graphs.push_back(random_graph(rng, "f1", GraphKind::Ast));
  graphs.push_back(random_graph(rng, "f2", GraphKind::Cfg));
  graphs.push_back(random_graph(rng, "f1", GraphKind::Udg));
  const BimodalDataset ds = featurize_graphs(graphs);
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.ids[0], "f1");
  EXPECT_EQ(ds.dim_y(), 0u);
  for (int l : ds.labels) EXPECT_EQ(l, 0);
  for (std::size_t i = 1; i < ds.x_names.size(); ++i)
    EXPECT_LT(ds.x_names[i - 1], ds.x_names[i]);
  // Featurizing twice yields identical rows.
  const BimodalDataset again = featurize_graphs(graphs);
  EXPECT_EQ(ds.x, again.x);
}
