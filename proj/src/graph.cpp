#include "nodedup/graph.hpp"

#include <algorithm>
#include <string>

#include "nodedup/errors.hpp"

namespace nodedup {

Adjacency Adjacency::from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                                bool allow_self_loops) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= num_nodes ||
        static_cast<std::size_t>(e.v) >= num_nodes) {
      throw DataError("edge " + std::to_string(i) + " (" + std::to_string(e.u) + "," +
                      std::to_string(e.v) + ") has a node index out of range for " +
                      std::to_string(num_nodes) + " nodes");
    }
    if (e.u == e.v && !allow_self_loops) {
      throw DataError("edge " + std::to_string(i) + " is a self-loop on node " +
                      std::to_string(e.u));
    }
    canon.push_back(canonical(e));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  Adjacency adj;
  std::vector<std::size_t> counts(num_nodes, 0);
  for (const Edge& e : canon) {
    ++counts[static_cast<std::size_t>(e.u)];
    if (e.u != e.v) {
      ++counts[static_cast<std::size_t>(e.v)];
    } else {
      ++adj.num_self_loops_;
    }
  }
  adj.offsets_.assign(num_nodes + 1, 0);
  for (std::size_t v = 0; v < num_nodes; ++v) adj.offsets_[v + 1] = adj.offsets_[v] + counts[v];
  adj.targets_.resize(adj.offsets_.back());
  std::vector<std::size_t> cursor(adj.offsets_.begin(), adj.offsets_.end() - 1);
  for (const Edge& e : canon) {
    adj.targets_[cursor[static_cast<std::size_t>(e.u)]++] = e.v;
    if (e.u != e.v) adj.targets_[cursor[static_cast<std::size_t>(e.v)]++] = e.u;
  }
  for (std::size_t v = 0; v < num_nodes; ++v) {
    std::sort(adj.targets_.begin() + static_cast<std::ptrdiff_t>(adj.offsets_[v]),
              adj.targets_.begin() + static_cast<std::ptrdiff_t>(adj.offsets_[v + 1]));
  }
  adj.num_edges_ = canon.size();
  return adj;
}

bool Adjacency::has_edge(NodeId u, NodeId v) const {
  if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= num_nodes() ||
      static_cast<std::size_t>(v) >= num_nodes()) {
    return false;
  }
  auto nb = degree(u) <= degree(v) ? neighbors(u) : neighbors(v);
  NodeId target = degree(u) <= degree(v) ? v : u;
  return std::binary_search(nb.begin(), nb.end(), target);
}

std::vector<Edge> Adjacency::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (std::size_t u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(static_cast<NodeId>(u))) {
      if (static_cast<NodeId>(u) <= v) out.push_back({static_cast<NodeId>(u), v});
    }
  }
  return out;
}

Graph Graph::build(std::size_t num_nodes, std::span<const Edge> edges, DenseMatrix features) {
  if (static_cast<std::size_t>(features.rows()) != num_nodes) {
    throw DataError("feature matrix has " + std::to_string(features.rows()) +
                    " rows but the graph has " + std::to_string(num_nodes) + " nodes");
  }
  Graph g;
  g.adjacency_ = Adjacency::from_edges(num_nodes, edges, /*allow_self_loops=*/false);
  g.features_ = std::move(features);
  return g;
}

Graph Graph::build(std::span<const Edge> edges, DenseMatrix features) {
  auto n = static_cast<std::size_t>(features.rows());
  return build(n, edges, std::move(features));
}

std::size_t DegreeBuckets::count(Bucket b) const {
  return static_cast<std::size_t>(std::count(bucket.begin(), bucket.end(), b));
}

Bucket classify_degree(std::int64_t degree, int delta) {
  if (degree <= 0) return Bucket::Isolated;
  if (degree <= delta) return Bucket::LowDegree;
  return Bucket::Warm;
}

DegreeBuckets compute_buckets(const Adjacency& adjacency, int delta, DegreeSource source) {
  if (delta < 0) throw ConfigError("delta must be >= 0, got " + std::to_string(delta));
  DegreeBuckets out;
  out.delta = delta;
  out.source = source;
  const std::size_t n = adjacency.num_nodes();
  out.degrees.resize(n);
  out.bucket.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto d = static_cast<std::int32_t>(adjacency.degree(static_cast<NodeId>(v)));
    out.degrees[v] = d;
    out.bucket[v] = classify_degree(d, delta);
  }
  return out;
}

DegreeBuckets compute_buckets(std::size_t num_nodes, std::span<const Edge> edges, int delta,
                              DegreeSource source) {
  return compute_buckets(Adjacency::from_edges(num_nodes, edges, false), delta, source);
}

Bucket bucket_edge(Edge e, const DegreeBuckets& buckets) {
  auto du = buckets.degrees[static_cast<std::size_t>(e.u)];
  auto dv = buckets.degrees[static_cast<std::size_t>(e.v)];
  return classify_degree(std::min(du, dv), buckets.delta);
}

PairCategory categorize_pair(Edge e, const DegreeBuckets& buckets) {
  bool cu = buckets.is_cold(e.u);
  bool cv = buckets.is_cold(e.v);
  if (!cu && !cv) return PairCategory::WarmWarm;
  if (cu && cv) return PairCategory::ColdCold;
  return PairCategory::WarmCold;
}

std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::Isolated: return "Isolated";
    case Bucket::LowDegree: return "LowDegree";
    case Bucket::Warm: return "Warm";
  }
  return "?";
}

std::string_view to_string(PairCategory c) {
  switch (c) {
    case PairCategory::WarmWarm: return "WarmWarm";
    case PairCategory::WarmCold: return "WarmCold";
    case PairCategory::ColdCold: return "ColdCold";
  }
  return "?";
}

std::string_view to_string(DegreeSource s) {
  switch (s) {
    case DegreeSource::MessageEdges: return "message_edges";
    case DegreeSource::TrainPlusValid: return "train_plus_valid";
    case DegreeSource::InferenceGraph: return "inference_graph";
    case DegreeSource::Custom: return "custom";
  }
  return "?";
}

DegreeSource degree_source_from_string(std::string_view s) {
  if (s == "message_edges") return DegreeSource::MessageEdges;
  if (s == "train_plus_valid") return DegreeSource::TrainPlusValid;
  if (s == "inference_graph") return DegreeSource::InferenceGraph;
  if (s == "custom") return DegreeSource::Custom;
  throw ConfigError("unknown degree_source '" + std::string(s) + "'");
}

}  // namespace nodedup
