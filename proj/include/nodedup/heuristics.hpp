#pragma once

#include <cstdint>
#include <string_view>

#include "nodedup/eval.hpp"
#include "nodedup/graph.hpp"
#include "nodedup/split.hpp"

namespace nodedup {

enum class HeuristicKind : std::uint8_t { CommonNeighbors, AdamicAdar, ResourceAllocation };

// CN = |N(u) & N(v)|, AA = sum over common w of 1/ln d_w, RA = sum of 1/d_w.
// Common neighbors with d_w < 2 are skipped by AA and RA. Throws DataError
// for an out-of-range node. Self-loop entries are ignored.
double heuristic_score(const Adjacency& adj, NodeId u, NodeId v, HeuristicKind kind);

// Scores on the split's eval_message_edges only, ranked through the same
// bucketing and Hits@K path as learned models.
EvalReport evaluate_heuristic(const DataSplit& split, HeuristicKind kind,
                              const EvalOptions& options = {});

std::string_view to_string(HeuristicKind k);
HeuristicKind heuristic_kind_from_string(std::string_view s);

}  // namespace nodedup
