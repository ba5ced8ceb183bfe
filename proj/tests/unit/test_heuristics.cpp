#include <gtest/gtest.h>

#include <cmath>

#include "nodedup/errors.hpp"
#include "nodedup/heuristics.hpp"
#include "testutil.hpp"

namespace nodedup {
namespace {

using testutil::random_graph;

const HeuristicKind kAll[] = {HeuristicKind::CommonNeighbors, HeuristicKind::AdamicAdar,
                              HeuristicKind::ResourceAllocation};

TEST(Heuristics, PathExample) {
  std::vector<Edge> path{{0, 1}, {1, 2}};
  auto adj = Adjacency::from_edges(3, path, false);
  EXPECT_EQ(heuristic_score(adj, 0, 2, HeuristicKind::CommonNeighbors), 1.0);
  EXPECT_NEAR(heuristic_score(adj, 0, 2, HeuristicKind::AdamicAdar), 1.4426950408889634, 1e-12);
  EXPECT_NEAR(heuristic_score(adj, 0, 2, HeuristicKind::ResourceAllocation), 0.5, 1e-12);
}

TEST(Heuristics, K5MinusEdge) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 5; ++u) {
    for (NodeId v = u + 1; v < 5; ++v) {
      if (!(u == 0 && v == 1)) edges.push_back({u, v});
    }
  }
  // Three outside nodes attached to node 4 only.
  for (NodeId w = 5; w < 8; ++w) edges.push_back({4, w});
  auto adj = Adjacency::from_edges(8, edges, false);
  const double cn = heuristic_score(adj, 0, 1, HeuristicKind::CommonNeighbors);
  EXPECT_EQ(cn, 3.0);
  for (NodeId w = 5; w < 8; ++w) {
    EXPECT_LT(heuristic_score(adj, 0, w, HeuristicKind::CommonNeighbors), cn);
  }
}

TEST(Heuristics, EmptyGraphScoresZero) {
  auto adj = Adjacency::from_edges(6, {}, false);
  for (auto k : kAll) EXPECT_EQ(heuristic_score(adj, 1, 4, k), 0.0);
}

TEST(Heuristics, PropertiesOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = random_graph(40, 120, 1, seed);
    const auto& adj = g.adjacency();
    for (NodeId u = 0; u < 40; ++u) {
      for (NodeId v = u + 1; v < 40; ++v) {
        for (auto k : kAll) EXPECT_EQ(heuristic_score(adj, u, v, k), heuristic_score(adj, v, u, k));
        const double cn = heuristic_score(adj, u, v, HeuristicKind::CommonNeighbors);
        EXPECT_LE(cn, static_cast<double>(std::min(adj.degree(u), adj.degree(v))));
        if (adj.degree(u) == 0 || adj.degree(v) == 0) {
          for (auto k : kAll) EXPECT_EQ(heuristic_score(adj, u, v, k), 0.0);
        }
      }
    }
  }
}

TEST(Heuristics, OutOfRange) {
  auto adj = Adjacency::from_edges(3, {}, false);
  EXPECT_THROW(heuristic_score(adj, 0, 3, HeuristicKind::CommonNeighbors), DataError);
  EXPECT_THROW(heuristic_score(adj, -1, 0, HeuristicKind::AdamicAdar), DataError);
}

TEST(Heuristics, IsolatedRowIsZero) {
  Graph g = random_graph(300, 400, 1, 9);
  SplitOptions opts;
  opts.seed = 2;
  opts.num_negatives = 100;
  DataSplit split = transductive_split(g, opts);
  auto adj = Adjacency::from_edges(split.num_nodes, split.eval_message_edges, false);
  std::size_t isolated = 0;
  for (const auto& e : split.test_pos) {
    if (bucket_edge(e, split.buckets) != Bucket::Isolated) continue;
    ++isolated;
    for (auto k : kAll) EXPECT_EQ(heuristic_score(adj, e.u, e.v, k), 0.0);
  }
  ASSERT_GT(isolated, 0u);
  for (auto k : kAll) {
    auto report = evaluate_heuristic(split, k);
    EXPECT_EQ(report.row(Bucket::Isolated).hits, 0.0);
    EXPECT_EQ(report.row(Bucket::Isolated).positives, isolated);
  }
}

TEST(Heuristics, KindStrings) {
  for (auto k : kAll) EXPECT_EQ(heuristic_kind_from_string(to_string(k)), k);
  EXPECT_THROW(heuristic_kind_from_string("jaccard"), ConfigError);
}

}  // namespace
}  // namespace nodedup
