#include "nodedup/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "nodedup/errors.hpp"
#include "nodedup/random.hpp"

namespace nodedup {
namespace {

constexpr std::uint64_t kValidStream = 1;
constexpr std::uint64_t kTestStream = 2;
constexpr std::uint64_t kHoldoutStream = 3;

std::size_t floor_share(std::size_t total, double frac) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(total) * frac));
}

void check_fractions(double valid_frac, double test_frac) {
  if (!(valid_frac >= 0.0) || !(test_frac >= 0.0) || !(valid_frac + test_frac < 1.0)) {
    throw ConfigError("split fractions must satisfy 0 <= valid, 0 <= test, valid + test < 1 (got " +
                      std::to_string(valid_frac) + ", " + std::to_string(test_frac) + ")");
  }
}

std::vector<Edge> sorted(std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<Edge> concat(std::span<const Edge> a, std::span<const Edge> b) {
  std::vector<Edge> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::size_t NegativeLists::total_shortfall() const {
  return std::accumulate(shortfall.begin(), shortfall.end(), std::size_t{0});
}

NegativeLists sample_eval_negatives(const Graph& graph, std::span<const Edge> positives,
                                    std::size_t count, std::uint64_t seed) {
  const std::size_t n = graph.num_nodes();
  NegativeLists out;
  out.lists.resize(positives.size());
  out.shortfall.assign(positives.size(), 0);
  std::vector<NodeId> candidates;
  std::unordered_set<NodeId> taken;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const NodeId s = positives[i].u;
    if (s < 0 || static_cast<std::size_t>(s) >= n) {
      throw DataError("positive " + std::to_string(i) + " has source " + std::to_string(s) +
                      " outside the graph");
    }
    auto nb = graph.neighbors(s);
    const std::size_t available = n - 1 - nb.size();
    auto& list = out.lists[i];
    Rng rng(derive_seed(seed, i));

    if (available <= count || 2 * count >= available) {
      candidates.clear();
      candidates.reserve(available);
      auto it = nb.begin();
      for (NodeId v = 0; static_cast<std::size_t>(v) < n; ++v) {
        while (it != nb.end() && *it < v) ++it;
        if (v == s || (it != nb.end() && *it == v)) continue;
        candidates.push_back(v);
      }
      if (available <= count) {
        list = candidates;
        out.shortfall[i] = count - available;
        continue;
      }
      // Partial Fisher-Yates over the explicit candidate list.
      for (std::size_t k = 0; k < count; ++k) {
        auto j = k + uniform_index(rng, candidates.size() - k);
        std::swap(candidates[k], candidates[j]);
      }
      list.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count));
      continue;
    }

    taken.clear();
    list.reserve(count);
    while (list.size() < count) {
      auto v = static_cast<NodeId>(uniform_index(rng, n));
      if (v == s || std::binary_search(nb.begin(), nb.end(), v)) continue;
      if (!taken.insert(v).second) continue;
      list.push_back(v);
    }
  }
  return out;
}

std::vector<Edge> orient_by_degree(std::span<const Edge> edges, const DegreeBuckets& buckets) {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (Edge e : edges) {
    auto du = buckets.degrees[static_cast<std::size_t>(e.u)];
    auto dv = buckets.degrees[static_cast<std::size_t>(e.v)];
    if (dv < du || (dv == du && e.v < e.u)) std::swap(e.u, e.v);
    out.push_back(e);
  }
  return out;
}

DataSplit transductive_split(const Graph& graph, const SplitOptions& options) {
  check_fractions(options.valid_frac, options.test_frac);
  std::vector<Edge> edges = graph.edges();
  Rng rng(options.seed);
  shuffle(edges.begin(), edges.end(), rng);

  const std::size_t m = edges.size();
  const std::size_t n_valid = floor_share(m, options.valid_frac);
  const std::size_t n_test = floor_share(m, options.test_frac);
  auto first = edges.begin();
  auto valid_end = first + static_cast<std::ptrdiff_t>(n_valid);
  auto test_end = valid_end + static_cast<std::ptrdiff_t>(n_test);

  DataSplit split;
  split.mode = "transductive";
  split.num_nodes = graph.num_nodes();
  split.seed = options.seed;
  split.valid_frac = options.valid_frac;
  split.test_frac = options.test_frac;
  split.num_negatives = options.num_negatives;

  std::vector<Edge> valid = sorted({first, valid_end});
  std::vector<Edge> test = sorted({valid_end, test_end});
  split.train_pos = sorted({test_end, edges.end()});
  split.message_edges = split.train_pos;
  split.eval_message_edges = split.message_edges;

  if (options.degree_source == DegreeSource::TrainPlusValid) {
    split.buckets = compute_buckets(graph.num_nodes(), concat(split.train_pos, valid),
                                    options.delta, DegreeSource::TrainPlusValid);
  } else if (options.degree_source == DegreeSource::MessageEdges) {
    split.buckets = compute_buckets(graph.num_nodes(), split.message_edges, options.delta,
                                    DegreeSource::MessageEdges);
  } else {
    throw ConfigError("transductive splits support degree_source message_edges or "
                      "train_plus_valid, got " + std::string(to_string(options.degree_source)));
  }

  split.valid_pos = orient_by_degree(valid, split.buckets);
  split.test_pos = orient_by_degree(test, split.buckets);
  split.valid_negatives = sample_eval_negatives(graph, split.valid_pos, options.num_negatives,
                                                derive_seed(options.seed, kValidStream));
  split.test_negatives = sample_eval_negatives(graph, split.test_pos, options.num_negatives,
                                               derive_seed(options.seed, kTestStream));
  return split;
}

std::vector<Edge> InductiveSplit::test_edges() const {
  std::vector<Edge> out = test_observed_observed;
  out.insert(out.end(), test_observed_new.begin(), test_observed_new.end());
  out.insert(out.end(), test_new_new.begin(), test_new_new.end());
  return out;
}

InductiveSplit inductive_split(const Graph& graph, double new_node_frac, std::uint64_t seed) {
  if (!(new_node_frac > 0.0 && new_node_frac < 1.0)) {
    throw ConfigError("new_node_frac must lie in (0, 1), got " + std::to_string(new_node_frac));
  }
  const std::size_t n = graph.num_nodes();
  Rng rng(seed);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order.begin(), order.end(), rng);
  const std::size_t n_new = floor_share(n, new_node_frac);
  if (n_new == 0 || n_new == n) {
    throw DataError("graph with " + std::to_string(n) + " nodes is too small for an inductive split");
  }

  InductiveSplit out;
  out.seed = seed;
  out.new_node_frac = new_node_frac;
  std::vector<std::uint8_t> is_new(n, 0);
  for (std::size_t i = 0; i < n_new; ++i) is_new[static_cast<std::size_t>(order[i])] = 1;
  for (std::size_t v = 0; v < n; ++v) {
    (is_new[v] ? out.new_nodes : out.observed_nodes).push_back(static_cast<NodeId>(v));
  }

  std::vector<Edge> oo, on, nn;
  for (Edge e : graph.edges()) {
    int k = is_new[static_cast<std::size_t>(e.u)] + is_new[static_cast<std::size_t>(e.v)];
    (k == 0 ? oo : k == 1 ? on : nn).push_back(e);
  }
  shuffle(oo.begin(), oo.end(), rng);
  shuffle(on.begin(), on.end(), rng);
  shuffle(nn.begin(), nn.end(), rng);

  auto take = [](std::vector<Edge>& pool, std::size_t k) {
    std::vector<Edge> head(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    return head;
  };
  // At least one test edge from every non-empty group.
  auto test_share = [](std::size_t total) {
    return total == 0 ? std::size_t{0} : std::max<std::size_t>(1, floor_share(total, 0.1));
  };
  const std::size_t t_oo = test_share(oo.size());
  const std::size_t t_on = test_share(on.size());
  const std::size_t t_nn = test_share(nn.size());
  if (t_oo == 0 || t_on == 0 || t_nn == 0) {
    throw DataError("inductive split needs at least one test edge in every group (observed-observed " +
                    std::to_string(oo.size()) + ", observed-new " + std::to_string(on.size()) +
                    ", new-new " + std::to_string(nn.size()) + " edges)");
  }
  const std::size_t extra_oo = floor_share(oo.size(), 0.1);
  out.test_observed_observed = sorted(take(oo, t_oo));
  out.test_observed_new = sorted(take(on, t_on));
  out.test_new_new = sorted(take(nn, t_nn));
  std::vector<Edge> inference = take(oo, extra_oo);
  inference.insert(inference.end(), on.begin(), on.end());
  inference.insert(inference.end(), nn.begin(), nn.end());
  out.inference_edges = sorted(std::move(inference));
  out.train_edges = sorted(std::move(oo));
  return out;
}

DataSplit to_data_split(const Graph& graph, const InductiveSplit& ind, const SplitOptions& options) {
  check_fractions(options.valid_frac, 0.0);
  const std::size_t n = graph.num_nodes();
  std::vector<Edge> train = ind.train_edges;
  Rng rng(derive_seed(ind.seed, kHoldoutStream));
  shuffle(train.begin(), train.end(), rng);
  const std::size_t n_valid = floor_share(train.size(), options.valid_frac);

  DataSplit split;
  split.mode = "inductive";
  split.num_nodes = n;
  split.seed = ind.seed;
  split.valid_frac = options.valid_frac;
  split.test_frac = 0.1;
  split.num_negatives = options.num_negatives;
  std::vector<Edge> valid = sorted({train.begin(), train.begin() + static_cast<std::ptrdiff_t>(n_valid)});
  split.train_pos = sorted({train.begin() + static_cast<std::ptrdiff_t>(n_valid), train.end()});
  split.message_edges = split.train_pos;
  split.eval_message_edges = sorted(concat(split.message_edges, ind.inference_edges));
  split.hidden_nodes.assign(n, 0);
  for (NodeId v : ind.new_nodes) split.hidden_nodes[static_cast<std::size_t>(v)] = 1;

  split.buckets = compute_buckets(n, split.eval_message_edges, options.delta,
                                  DegreeSource::InferenceGraph);
  split.valid_pos = orient_by_degree(valid, split.buckets);
  split.test_pos = orient_by_degree(sorted(ind.test_edges()), split.buckets);
  split.valid_negatives = sample_eval_negatives(graph, split.valid_pos, options.num_negatives,
                                                derive_seed(ind.seed, kValidStream));
  split.test_negatives = sample_eval_negatives(graph, split.test_pos, options.num_negatives,
                                               derive_seed(ind.seed, kTestStream));
  return split;
}

}  // namespace nodedup
