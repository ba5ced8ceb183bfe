#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nodedup/graph.hpp"

namespace nodedup {

inline constexpr std::size_t kDefaultEvalNegatives = 500;

// Fixed evaluation negatives for a list of positives, one list per positive.
struct NegativeLists {
  std::vector<std::vector<NodeId>> lists;
  // Per positive: how many of the requested negatives could not be drawn.
  std::vector<std::size_t> shortfall;

  std::size_t total_shortfall() const;
};

// Samples `count` distinct nodes per positive (s, t), excluding s and every
// neighbor of s in `graph`. When fewer candidates exist, all of them are
// returned and the gap is recorded in `shortfall`. Each positive draws from
// its own stream derived from (seed, index), so lists do not depend on one
// another.
NegativeLists sample_eval_negatives(const Graph& graph, std::span<const Edge> positives,
                                    std::size_t count, std::uint64_t seed);

struct SplitOptions {
  double valid_frac = 0.1;
  double test_frac = 0.2;
  std::uint64_t seed = 0;
  std::size_t num_negatives = kDefaultEvalNegatives;
  int delta = kDefaultDelta;
  DegreeSource degree_source = DegreeSource::MessageEdges;
};

// Train/valid/test partition plus frozen evaluation negatives.
//
// Validation and test positives are oriented so that `u` is the endpoint with
// the lower bucketing degree (ties: lower id). `u` is the ranking source:
// negatives are drawn against it and the positive counts toward its bucket.
struct DataSplit {
  std::string mode = "transductive";
  std::size_t num_nodes = 0;
  std::uint64_t seed = 0;
  double valid_frac = 0.0;
  double test_frac = 0.0;
  std::size_t num_negatives = kDefaultEvalNegatives;

  std::vector<Edge> message_edges;       // encoder-visible during training
  std::vector<Edge> train_pos;           // supervised positives
  std::vector<Edge> valid_pos;
  std::vector<Edge> test_pos;
  std::vector<Edge> eval_message_edges;  // encoder-visible at test inference
  NegativeLists valid_negatives;
  NegativeLists test_negatives;
  // Nodes that must stay invisible during training (new nodes in the
  // inductive setting). Empty means every node is visible.
  std::vector<std::uint8_t> hidden_nodes;
  DegreeBuckets buckets;

  bool is_hidden(NodeId v) const {
    return !hidden_nodes.empty() && hidden_nodes[static_cast<std::size_t>(v)] != 0;
  }
};

// Uniform random edge partition. Sizes use floor rounding with the remainder
// going to train; message_edges == train_pos. Throws ConfigError unless
// 0 <= valid_frac, 0 <= test_frac and valid_frac + test_frac < 1.
DataSplit transductive_split(const Graph& graph, const SplitOptions& options);

// Node-level split where a fraction of nodes only appears after training.
struct InductiveSplit {
  std::uint64_t seed = 0;
  double new_node_frac = 0.1;
  std::vector<NodeId> observed_nodes;
  std::vector<NodeId> new_nodes;
  std::vector<Edge> train_edges;  // observed-observed only
  std::vector<Edge> test_observed_observed;
  std::vector<Edge> test_observed_new;
  std::vector<Edge> test_new_new;
  std::vector<Edge> inference_edges;  // revealed only at test inference

  std::vector<Edge> test_edges() const;
};

// Samples new_node_frac of the nodes as new, groups edges into
// observed-observed / observed-new / new-new, takes 10% of each group as test
// edges, and reveals the rest of observed-new and new-new plus another 10% of
// observed-observed at inference. Throws DataError when a group ends up with
// no test edge.
InductiveSplit inductive_split(const Graph& graph, double new_node_frac, std::uint64_t seed);

// Turns an inductive split into a DataSplit for training and evaluation.
// A valid_frac share of the training edges is held out for early stopping;
// buckets are computed on the inference-time graph (train + inference edges).
DataSplit to_data_split(const Graph& graph, const InductiveSplit& split,
                        const SplitOptions& options);

// Orients each pair so the lower-degree endpoint comes first.
std::vector<Edge> orient_by_degree(std::span<const Edge> edges, const DegreeBuckets& buckets);

}  // namespace nodedup
