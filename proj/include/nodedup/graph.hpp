#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nodedup {

using NodeId = std::int32_t;

// Row-major 64-bit dense matrix. Node features and all model tensors use it.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// An undirected pair. Direction only matters where a consumer says so
// (evaluation positives treat `u` as the ranking source).
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge canonical(Edge e) { return e.u <= e.v ? e : Edge{e.v, e.u}; }

// Compressed sparse row adjacency over an undirected edge set. Every
// undirected edge (u,v), u != v, is stored in both lists; a self-loop (v,v)
// occupies a single entry in v's list. Lists are sorted ascending and free of
// duplicates.
class Adjacency {
 public:
  Adjacency() = default;

  // Throws DataError on an out-of-range index, or on a self-loop when
  // `allow_self_loops` is false. Duplicate and reversed pairs are merged.
  static Adjacency from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                              bool allow_self_loops = false);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // Number of undirected edges, counting a self-loop once.
  std::size_t num_edges() const { return num_edges_; }
  std::size_t num_self_loops() const { return num_self_loops_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    auto b = offsets_[static_cast<std::size_t>(v)];
    auto e = offsets_[static_cast<std::size_t>(v) + 1];
    return {targets_.data() + b, e - b};
  }
  std::size_t degree(NodeId v) const {
    return offsets_[static_cast<std::size_t>(v) + 1] - offsets_[static_cast<std::size_t>(v)];
  }
  bool has_edge(NodeId u, NodeId v) const;

  // Canonical (u <= v) edge list, sorted.
  std::vector<Edge> edges() const;

  bool operator==(const Adjacency&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::size_t num_edges_ = 0;
  std::size_t num_self_loops_ = 0;
};

// Immutable undirected attributed graph without self-loops.
class Graph {
 public:
  Graph() = default;

  // Builds the symmetric, deduplicated adjacency. Throws DataError when an
  // index is >= num_nodes, when features.rows() != num_nodes, or when the
  // input contains a self-loop.
  static Graph build(std::size_t num_nodes, std::span<const Edge> edges, DenseMatrix features);
  // Convenience: num_nodes = features.rows().
  static Graph build(std::span<const Edge> edges, DenseMatrix features);

  std::size_t num_nodes() const { return adjacency_.num_nodes(); }
  std::size_t num_edges() const { return adjacency_.num_edges(); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features_.cols()); }

  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.neighbors(v); }
  std::size_t degree(NodeId v) const { return adjacency_.degree(v); }
  bool has_edge(NodeId u, NodeId v) const { return adjacency_.has_edge(u, v); }

  const Adjacency& adjacency() const { return adjacency_; }
  const DenseMatrix& features() const { return features_; }
  std::vector<Edge> edges() const { return adjacency_.edges(); }

 private:
  Adjacency adjacency_;
  DenseMatrix features_;
};

enum class Bucket : std::uint8_t { Isolated = 0, LowDegree = 1, Warm = 2 };

// Which edge set node degrees were computed from.
enum class DegreeSource : std::uint8_t { MessageEdges, TrainPlusValid, InferenceGraph, Custom };

struct DegreeBuckets {
  std::vector<std::int32_t> degrees;
  std::vector<Bucket> bucket;
  int delta = 2;
  DegreeSource source = DegreeSource::MessageEdges;

  std::size_t size() const { return degrees.size(); }
  bool is_cold(NodeId v) const { return bucket[static_cast<std::size_t>(v)] != Bucket::Warm; }
  std::size_t count(Bucket b) const;
};

inline constexpr int kDefaultDelta = 2;

// Isolated iff degree == 0, LowDegree iff 0 < degree <= delta, Warm otherwise.
Bucket classify_degree(std::int64_t degree, int delta);

DegreeBuckets compute_buckets(const Adjacency& adjacency, int delta = kDefaultDelta,
                              DegreeSource source = DegreeSource::MessageEdges);
DegreeBuckets compute_buckets(std::size_t num_nodes, std::span<const Edge> edges,
                              int delta = kDefaultDelta,
                              DegreeSource source = DegreeSource::MessageEdges);

// Pair labels for the Warm-Warm / Warm-Cold analysis.
enum class PairCategory : std::uint8_t { WarmWarm = 0, WarmCold = 1, ColdCold = 2 };

// Edge bucket under the MinDegreeEndpoint policy: the bucket of the endpoint
// with the lower degree.
Bucket bucket_edge(Edge e, const DegreeBuckets& buckets);
// Edge label under the BothEndpoints policy.
PairCategory categorize_pair(Edge e, const DegreeBuckets& buckets);

std::string_view to_string(Bucket b);
std::string_view to_string(PairCategory c);
std::string_view to_string(DegreeSource s);
DegreeSource degree_source_from_string(std::string_view s);

}  // namespace nodedup
