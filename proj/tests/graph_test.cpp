#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "span/graph/temporal_graph.hpp"

using namespace span::graph;

namespace {

DynamicGraph parse(const std::string& text, bool weighted = false) {
  std::istringstream in(text);
  return parse_edge_list(in, weighted);
}

Snapshot make_snapshot(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
  std::vector<Snapshot::Edge> es;
  for (auto [u, v] : edges) es.push_back({u, v, 1.0});
  return Snapshot(n, es);
}

// Random simple graph with unit weights as an edge list.
std::vector<std::pair<NodeId, NodeId>> random_edges(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (keep(rng)) out.push_back({u, v});
  return out;
}

}  // namespace

TEST(Ingest, ParsesTwoEdges) {
  auto g = parse("0 1 5\n1 2 7\n");
  EXPECT_EQ(g.num_nodes(), 3u);
  ASSERT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.edges()[0].timestamp, 5.0);
  EXPECT_EQ(g.edges()[1].timestamp, 7.0);
  EXPECT_EQ(g.edges()[0].weight, 1.0);
}

TEST(Ingest, DropsSelfLoops) {
  auto g = parse("0 1 1\n3 3 9\n");
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.dropped_self_loops(), 1u);
}

TEST(Ingest, RemapsIdsDensely) {
  auto g = parse("500 10 1\n");
  EXPECT_EQ(g.num_nodes(), 2u);
  ASSERT_EQ(g.original_ids().size(), 2u);
  EXPECT_EQ(g.original_ids()[0], 10);
  EXPECT_EQ(g.original_ids()[1], 500);
  EXPECT_EQ(g.edges()[0].src, 1u);
  EXPECT_EQ(g.edges()[0].dst, 0u);
}

TEST(Ingest, SkipsCommentsAndSortsByTime) {
  auto g = parse("# header\n0 1 9\n\n1 2 3\n2 0 3\n");
  ASSERT_EQ(g.num_edges(), 3u);
  for (std::size_t i = 1; i < g.num_edges(); ++i) EXPECT_LE(g.edges()[i - 1].timestamp, g.edges()[i].timestamp);
  // stable among equal timestamps
  EXPECT_EQ(g.original_ids()[g.edges()[0].src], 1);
}

TEST(Ingest, ReadsWeights) {
  auto g = parse("0 1 2.5 4\n", true);
  EXPECT_EQ(g.edges()[0].weight, 2.5);
  EXPECT_EQ(g.edges()[0].timestamp, 4.0);
}

TEST(Ingest, KeepsDuplicateEdges) {
  auto g = parse("0 1 1\n0 1 1\n");
  EXPECT_EQ(g.num_edges(), 2u);
}

TEST(Ingest, MalformedLineReportsLineNumber) {
  try {
    parse("0 1 1\n# c\n0 x 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("0 1\n"), ParseError);
  EXPECT_THROW(parse("0 1 0 5\n", true), ParseError);   // weight must be positive
  EXPECT_THROW(parse("0 1 -2\n"), ParseError);          // negative timestamp
  EXPECT_THROW(parse("-1 1 2\n"), ParseError);          // negative id
}

TEST(Ingest, EmptyInputIsError) {
  EXPECT_ANY_THROW(parse(""));
  EXPECT_ANY_THROW(parse("# only comments\n"));
}

TEST(Ingest, NodeTypesSidecar) {
  auto g = parse("10 20 1\n20 30 2\n");
  std::istringstream types("10 7\n20 3\n30 7\n");
  load_node_types(g, types);
  ASSERT_TRUE(g.has_types());
  EXPECT_EQ(g.num_types(), 2u);
  EXPECT_EQ(g.node_types()[0], 1);
  EXPECT_EQ(g.node_types()[1], 0);
  EXPECT_EQ(g.node_types()[2], 1);

  auto h = parse("10 20 1\n");
  std::istringstream partial("10 1\n");
  EXPECT_ANY_THROW(load_node_types(h, partial));
}

TEST(Snapshots, HalfOpenWindows) {
  std::string text;
  for (int t = 0; t <= 9; ++t) text += std::to_string(t) + " " + std::to_string(t + 1) + " " + std::to_string(t) + "\n";
  text += "20 21 4.5\n";
  auto g = parse(text);
  auto snaps = split_snapshots(g, 2);
  ASSERT_EQ(snaps.size(), 2u);
  EXPECT_EQ(snaps[0].index(), 1u);
  EXPECT_EQ(snaps[1].index(), 2u);
  EXPECT_DOUBLE_EQ(snaps[0].t_start(), 0.0);
  EXPECT_DOUBLE_EQ(snaps[0].t_end(), 4.5);
  EXPECT_DOUBLE_EQ(snaps[1].t_end(), 9.0);
  // times 0..4 go to the first window, 4.5 and 5..9 to the second
  EXPECT_EQ(snaps[0].num_temporal_edges(), 5u);
  EXPECT_EQ(snaps[1].num_temporal_edges(), 6u);
  const auto ids = g.original_ids();
  auto find = [&](std::int64_t id) {
    return static_cast<NodeId>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };
  EXPECT_TRUE(snaps[1].has_edge(find(20), find(21)));
  EXPECT_FALSE(snaps[0].has_edge(find(20), find(21)));
}

TEST(Snapshots, OneEdgePerWindow) {
  auto snaps = split_snapshots(parse("0 1 0\n2 3 10\n"), 2);
  EXPECT_EQ(snaps[0].num_edges(), 1u);
  EXPECT_EQ(snaps[1].num_edges(), 1u);
  EXPECT_EQ(snaps[0].num_nodes(), 4u);  // global universe
}

TEST(Snapshots, ZeroWidthRangeIsError) {
  EXPECT_ANY_THROW(split_snapshots(parse("0 1 3\n1 2 3\n"), 2));
  EXPECT_ANY_THROW(split_snapshots(parse("0 1 3\n1 2 4\n"), 1));
}

TEST(Snapshots, MultiEdgesAccumulateWeight) {
  auto snaps = split_snapshots(parse("0 1 1 0\n1 0 2 1\n0 1 4 9\n", true), 2);
  EXPECT_DOUBLE_EQ(snaps[0].edge_weight(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(snaps[0].edge_weight(1, 0), 3.0);
  EXPECT_EQ(snaps[0].degree(0), 1u);
  EXPECT_DOUBLE_EQ(snaps[1].edge_weight(0, 1), 4.0);
}

TEST(Snapshots, EdgeFractionSplit) {
  auto g = parse("0 1 1\n1 2 2\n2 3 3\n3 4 4\n4 5 5\n5 6 6\n6 7 7\n7 8 8\n8 9 9\n9 0 10\n");
  auto [early, late] = split_by_edge_fraction(g, 0.7);
  EXPECT_EQ(early.num_temporal_edges(), 7u);
  EXPECT_EQ(late.num_temporal_edges(), 3u);
}

TEST(Degree, Examples) {
  auto tri = make_snapshot(4, {{0, 1}, {1, 2}, {0, 2}});
  for (NodeId v = 0; v < 3; ++v) EXPECT_EQ(degree(tri, v), 2u);
  EXPECT_EQ(degree(tri, 3), 0u);
  auto star = make_snapshot(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  EXPECT_EQ(degree(star, 0), 5u);
  EXPECT_EQ(star.max_degree(), 5u);
}

TEST(Induced, Examples) {
  auto tri = make_snapshot(3, {{0, 1}, {1, 2}, {0, 2}});
  std::vector<NodeId> abc{0, 1, 2};
  auto sg = induced_subgraph(tri, abc);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(sg.edge(i, j), i != j);

  auto path = make_snapshot(3, {{0, 1}, {1, 2}});
  std::vector<NodeId> acb{0, 2, 1};
  auto p = induced_subgraph(path, acb);
  EXPECT_FALSE(p.edge(0, 1));
  EXPECT_TRUE(p.edge(0, 2));
  EXPECT_TRUE(p.edge(1, 2));
  EXPECT_EQ(p.num_edges(), 2u);

  auto empty = make_snapshot(4, {{0, 1}});
  std::vector<NodeId> none{0, 2, 3};
  EXPECT_EQ(induced_subgraph(empty, none).num_edges(), 0u);

  std::vector<NodeId> dup{0, 0};
  EXPECT_ANY_THROW(induced_subgraph(tri, dup));
}

TEST(SnapshotProperties, HandshakeAndSymmetry) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 5 + trial;
    auto s = make_snapshot(n, random_edges(n, 0.2, rng));
    std::size_t total = 0;
    for (NodeId v = 0; v < n; ++v) {
      total += s.degree(v);
      for (const auto& nb : s.neighbors(v)) EXPECT_EQ(s.edge_weight(nb.id, v), nb.weight);
      auto nbs = s.neighbors(v);
      EXPECT_TRUE(std::is_sorted(nbs.begin(), nbs.end(), [](auto a, auto b) { return a.id < b.id; }));
    }
    EXPECT_EQ(total, 2 * s.num_edges());
  }
}

TEST(SnapshotProperties, SplitPreservesEdgeMultiset) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TemporalEdge> edges;
    std::uniform_int_distribution<NodeId> node(0, 19);
    std::uniform_real_distribution<double> time(0.0, 100.0);
    for (int e = 0; e < 200; ++e) {
      NodeId u = node(rng), v = node(rng);
      if (u == v) continue;
      edges.push_back({u, v, 1.0, std::floor(time(rng))});
    }
    DynamicGraph g(edges, 20);
    std::size_t parts = 2 + trial % 9;
    auto snaps = split_snapshots(g, parts);
    std::map<std::pair<NodeId, NodeId>, double> expected, seen;
    for (const auto& e : g.edges()) expected[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += e.weight;
    std::size_t temporal = 0;
    for (const auto& s : snaps) {
      temporal += s.num_temporal_edges();
      for (const auto& e : s.edge_list()) seen[{e.u, e.v}] += e.weight;
    }
    EXPECT_EQ(temporal, g.num_edges());
    EXPECT_EQ(seen, expected);
  }
}

TEST(SnapshotProperties, InducedMatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 5 + trial % 46;
    auto edges = random_edges(n, 0.3, rng);
    auto s = make_snapshot(n, edges);
    std::vector<NodeId> all(n);
    for (NodeId v = 0; v < n; ++v) all[v] = v;
    std::shuffle(all.begin(), all.end(), rng);
    std::size_t size = 1 + trial % 5;
    std::vector<NodeId> nodes(all.begin(), all.begin() + size);
    auto sg = induced_subgraph(s, nodes);
    ASSERT_EQ(sg.nodes, nodes);
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) {
        bool brute = false;
        for (auto [u, v] : edges)
          if ((u == nodes[i] && v == nodes[j]) || (u == nodes[j] && v == nodes[i])) brute = true;
        EXPECT_EQ(sg.edge(i, j), brute);
      }
  }
}
