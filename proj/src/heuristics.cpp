#include "nodedup/heuristics.hpp"

#include <cmath>
#include <string>

#include "nodedup/errors.hpp"

namespace nodedup {

double heuristic_score(const Adjacency& adj, NodeId u, NodeId v, HeuristicKind kind) {
  const auto n = adj.num_nodes();
  if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
    throw DataError("heuristic score for (" + std::to_string(u) + "," + std::to_string(v) +
                    ") outside a graph of " + std::to_string(n) + " nodes");
  }
  auto a = adj.neighbors(u);
  auto b = adj.neighbors(v);
  double score = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      const NodeId w = *i;
      ++i;
      ++j;
      if (w == u || w == v) continue;
      const auto d = static_cast<double>(adj.degree(w));
      switch (kind) {
        case HeuristicKind::CommonNeighbors:
          score += 1.0;
          break;
        case HeuristicKind::AdamicAdar:
          if (d >= 2.0) score += 1.0 / std::log(d);
          break;
        case HeuristicKind::ResourceAllocation:
          if (d >= 2.0) score += 1.0 / d;
          break;
      }
    }
  }
  return score;
}

EvalReport evaluate_heuristic(const DataSplit& split, HeuristicKind kind,
                              const EvalOptions& options) {
  Adjacency adj = Adjacency::from_edges(split.num_nodes, split.eval_message_edges, false);
  return evaluate_scores(
      split, [&](NodeId s, NodeId t) { return heuristic_score(adj, s, t, kind); }, options);
}

std::string_view to_string(HeuristicKind k) {
  switch (k) {
    case HeuristicKind::CommonNeighbors: return "cn";
    case HeuristicKind::AdamicAdar: return "aa";
    case HeuristicKind::ResourceAllocation: return "ra";
  }
  return "?";
}

HeuristicKind heuristic_kind_from_string(std::string_view s) {
  if (s == "cn" || s == "common_neighbors") return HeuristicKind::CommonNeighbors;
  if (s == "aa" || s == "adamic_adar") return HeuristicKind::AdamicAdar;
  if (s == "ra" || s == "resource_allocation") return HeuristicKind::ResourceAllocation;
  throw ConfigError("unknown heuristic '" + std::string(s) + "'");
}

}  // namespace nodedup
