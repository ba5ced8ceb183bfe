#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nodedup/graph.hpp"

namespace nodedup {

enum class Selector : std::uint8_t { None, Isolated, Cold, MidWarm, Warm, Random, All };

enum class DupMode : std::uint8_t {
  Full,        // NodeDup: clone nodes, link clone to original
  Light,       // NodeDup(L): self-loop on the original
  WholeGraph,  // NodeDup over every node, once
};

struct AugmentPlan {
  Selector selector = Selector::None;
  // Random selector only. Unset means |V_cold|.
  std::optional<std::size_t> random_count;
  int times = 0;
  DupMode mode = DupMode::Full;
  bool use_in_aggregation = true;  // Step II
  bool use_in_supervision = true;  // Step III
  std::uint64_t seed = 0;

  // Throws ConfigError for None with times > 0, negative times, Light with
  // times > 1, or a Random count given to another selector.
  void validate() const;
  bool is_identity() const;

  static AugmentPlan baseline() { return {}; }
  static AugmentPlan node_dup(Selector s = Selector::Cold, int times = 1) {
    AugmentPlan p;
    p.selector = s;
    p.times = times;
    return p;
  }
  static AugmentPlan node_dup_light(Selector s = Selector::Cold) {
    AugmentPlan p;
    p.selector = s;
    p.times = 1;
    p.mode = DupMode::Light;
    return p;
  }
  static AugmentPlan whole_graph() {
    AugmentPlan p;
    p.selector = Selector::All;
    p.times = 1;
    p.mode = DupMode::WholeGraph;
    return p;
  }
};

// The training-time graph after augmentation.
//
// Nodes [0, num_original) are the input nodes; duplicates follow, appended in
// selection order and then duplication-round order. Every duplicate carries
// an exact copy of its original's feature row.
struct AugmentedGraph {
  std::size_t num_original = 0;
  Adjacency message;           // aggregation graph over V'
  DenseMatrix features;        // X'
  std::vector<NodeId> origin;  // origin[v] == v for originals
  std::vector<NodeId> selected;
  std::vector<Edge> added_message_edges;
  std::vector<Edge> added_supervision;
  std::vector<Edge> train_pos;  // Y' = Y + added_supervision
  AugmentPlan plan;             // set by apply_plan

  std::size_t num_nodes() const { return origin.size(); }
  std::size_t num_duplicates() const { return num_nodes() - num_original; }
  bool is_duplicate(NodeId v) const { return static_cast<std::size_t>(v) >= num_original; }
  NodeId origin_of(NodeId v) const { return origin[static_cast<std::size_t>(v)]; }
};

// Isolated -> V_iso, Cold -> V_iso + V_low, MidWarm -> delta < deg <= 2*delta,
// Warm -> deg > delta, Random(k) -> k distinct nodes uniformly, All -> V.
// Nodes with eligible[v] == 0 are never selected (an empty mask allows all).
// Output is ascending except for Random, which keeps draw order.
std::vector<NodeId> select_nodes(const DegreeBuckets& buckets, Selector selector,
                                 std::optional<std::size_t> random_count, std::uint64_t seed,
                                 std::span<const std::uint8_t> eligible = {});

// Duplication steps I-III with `times` duplicates per selected node.
AugmentedGraph node_dup(const DenseMatrix& features, std::span<const Edge> message_edges,
                        std::span<const Edge> train_pos, std::span<const NodeId> selected,
                        int times, bool use_in_aggregation, bool use_in_supervision);

// Self-loop variant: no new nodes.
AugmentedGraph node_dup_light(const DenseMatrix& features, std::span<const Edge> message_edges,
                              std::span<const Edge> train_pos, std::span<const NodeId> selected,
                              bool use_in_aggregation, bool use_in_supervision);

// node_dup over every node with times == 1.
AugmentedGraph whole_graph_dup(const DenseMatrix& features, std::span<const Edge> message_edges,
                               std::span<const Edge> train_pos);

// Selects nodes per the plan and dispatches on its mode.
AugmentedGraph apply_plan(const DenseMatrix& features, std::span<const Edge> message_edges,
                          std::span<const Edge> train_pos, const DegreeBuckets& buckets,
                          const AugmentPlan& plan, std::span<const std::uint8_t> eligible = {});

std::string_view to_string(Selector s);
std::string_view to_string(DupMode m);
Selector selector_from_string(std::string_view s);
DupMode dup_mode_from_string(std::string_view s);

}  // namespace nodedup
