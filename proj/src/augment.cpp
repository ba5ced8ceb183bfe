#include "nodedup/augment.hpp"

#include <algorithm>
#include <string>

#include "nodedup/errors.hpp"
#include "nodedup/random.hpp"

namespace nodedup {
namespace {

bool eligible_at(std::span<const std::uint8_t> eligible, std::size_t v) {
  return eligible.empty() || eligible[v] != 0;
}

AugmentedGraph start(const DenseMatrix& features, std::span<const Edge> train_pos,
                     std::span<const NodeId> selected) {
  AugmentedGraph out;
  out.num_original = static_cast<std::size_t>(features.rows());
  out.selected.assign(selected.begin(), selected.end());
  out.train_pos.assign(train_pos.begin(), train_pos.end());
  for (NodeId v : selected) {
    if (v < 0 || static_cast<std::size_t>(v) >= out.num_original) {
      throw DataError("selected node " + std::to_string(v) + " is outside the graph");
    }
  }
  return out;
}

}  // namespace

void AugmentPlan::validate() const {
  if (times < 0) throw ConfigError("augment.times must be >= 0");
  if (selector == Selector::None && times > 0) {
    throw ConfigError("augment.selector none cannot be combined with times > 0");
  }
  if (mode == DupMode::Light && times > 1) {
    throw ConfigError("augment.mode light adds a single self-loop; times must be 0 or 1");
  }
  if (mode == DupMode::WholeGraph && (selector != Selector::All || times != 1)) {
    throw ConfigError("augment.mode whole_graph implies selector all and times 1");
  }
  if (random_count && selector != Selector::Random) {
    throw ConfigError("augment.random_count only applies to selector random");
  }
}

bool AugmentPlan::is_identity() const {
  return selector == Selector::None || times == 0 ||
         (!use_in_aggregation && !use_in_supervision && mode == DupMode::Light);
}

std::vector<NodeId> select_nodes(const DegreeBuckets& buckets, Selector selector,
                                 std::optional<std::size_t> random_count, std::uint64_t seed,
                                 std::span<const std::uint8_t> eligible) {
  const std::size_t n = buckets.size();
  if (!eligible.empty() && eligible.size() != n) {
    throw DataError("eligibility mask has " + std::to_string(eligible.size()) +
                    " entries for " + std::to_string(n) + " nodes");
  }
  const int delta = buckets.delta;
  auto pick = [&](auto pred) {
    std::vector<NodeId> out;
    for (std::size_t v = 0; v < n; ++v) {
      if (eligible_at(eligible, v) && pred(buckets.degrees[v])) out.push_back(static_cast<NodeId>(v));
    }
    return out;
  };
  switch (selector) {
    case Selector::None:
      return {};
    case Selector::Isolated:
      return pick([](int d) { return d == 0; });
    case Selector::Cold:
      return pick([&](int d) { return d <= delta; });
    case Selector::MidWarm:
      return pick([&](int d) { return d > delta && d <= 2 * delta; });
    case Selector::Warm:
      return pick([&](int d) { return d > delta; });
    case Selector::All:
      return pick([](int) { return true; });
    case Selector::Random: {
      std::vector<NodeId> pool = pick([](int) { return true; });
      std::size_t k = random_count ? *random_count
                                   : pick([&](int d) { return d <= delta; }).size();
      if (k > pool.size()) {
        throw ConfigError("random selector asks for " + std::to_string(k) + " nodes but only " +
                          std::to_string(pool.size()) + " are eligible");
      }
      Rng rng(seed);
      for (std::size_t i = 0; i < k; ++i) {
        auto j = i + uniform_index(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
      }
      pool.resize(k);
      return pool;
    }
  }
  return {};
}

AugmentedGraph node_dup(const DenseMatrix& features, std::span<const Edge> message_edges,
                        std::span<const Edge> train_pos, std::span<const NodeId> selected,
                        int times, bool use_in_aggregation, bool use_in_supervision) {
  if (times < 0) throw ConfigError("duplication count must be >= 0");
  AugmentedGraph out = start(features, train_pos, selected);
  const std::size_t n = out.num_original;
  const std::size_t n_dup = selected.size() * static_cast<std::size_t>(times);

  out.origin.resize(n + n_dup);
  for (std::size_t v = 0; v < n; ++v) out.origin[v] = static_cast<NodeId>(v);
  out.features.resize(static_cast<Eigen::Index>(n + n_dup), features.cols());
  out.features.topRows(static_cast<Eigen::Index>(n)) = features;

  auto next = static_cast<NodeId>(n);
  for (NodeId v : selected) {
    for (int r = 0; r < times; ++r, ++next) {
      out.origin[static_cast<std::size_t>(next)] = v;
      out.features.row(next) = features.row(v);
      Edge link{v, next};
      if (use_in_aggregation) out.added_message_edges.push_back(link);
      if (use_in_supervision) out.added_supervision.push_back(link);
    }
  }

  std::vector<Edge> msg(message_edges.begin(), message_edges.end());
  msg.insert(msg.end(), out.added_message_edges.begin(), out.added_message_edges.end());
  out.message = Adjacency::from_edges(n + n_dup, msg, /*allow_self_loops=*/false);
  out.train_pos.insert(out.train_pos.end(), out.added_supervision.begin(),
                       out.added_supervision.end());
  return out;
}

AugmentedGraph node_dup_light(const DenseMatrix& features, std::span<const Edge> message_edges,
                              std::span<const Edge> train_pos, std::span<const NodeId> selected,
                              bool use_in_aggregation, bool use_in_supervision) {
  AugmentedGraph out = start(features, train_pos, selected);
  const std::size_t n = out.num_original;
  out.origin.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.origin[v] = static_cast<NodeId>(v);
  out.features = features;
  for (NodeId v : selected) {
    Edge loop{v, v};
    if (use_in_aggregation) out.added_message_edges.push_back(loop);
    if (use_in_supervision) out.added_supervision.push_back(loop);
  }
  std::vector<Edge> msg(message_edges.begin(), message_edges.end());
  msg.insert(msg.end(), out.added_message_edges.begin(), out.added_message_edges.end());
  out.message = Adjacency::from_edges(n, msg, /*allow_self_loops=*/true);
  out.train_pos.insert(out.train_pos.end(), out.added_supervision.begin(),
                       out.added_supervision.end());
  return out;
}

AugmentedGraph whole_graph_dup(const DenseMatrix& features, std::span<const Edge> message_edges,
                               std::span<const Edge> train_pos) {
  std::vector<NodeId> all(static_cast<std::size_t>(features.rows()));
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<NodeId>(v);
  return node_dup(features, message_edges, train_pos, all, 1, true, true);
}

namespace {

AugmentedGraph apply_plan_impl(const DenseMatrix& features, std::span<const Edge> message_edges,
                               std::span<const Edge> train_pos, const DegreeBuckets& buckets,
                               const AugmentPlan& plan, std::span<const std::uint8_t> eligible) {
  if (plan.mode == DupMode::WholeGraph) {
    if (!eligible.empty()) {
      auto selected = select_nodes(buckets, Selector::All, std::nullopt, plan.seed, eligible);
      return node_dup(features, message_edges, train_pos, selected, 1, true, true);
    }
    return whole_graph_dup(features, message_edges, train_pos);
  }
  std::vector<NodeId> selected;
  if (plan.times > 0) {
    selected = select_nodes(buckets, plan.selector, plan.random_count, plan.seed, eligible);
  }
  if (plan.mode == DupMode::Light) {
    return node_dup_light(features, message_edges, train_pos, selected, plan.use_in_aggregation,
                          plan.use_in_supervision);
  }
  return node_dup(features, message_edges, train_pos, selected, plan.times,
                  plan.use_in_aggregation, plan.use_in_supervision);
}

}  // namespace

AugmentedGraph apply_plan(const DenseMatrix& features, std::span<const Edge> message_edges,
                          std::span<const Edge> train_pos, const DegreeBuckets& buckets,
                          const AugmentPlan& plan, std::span<const std::uint8_t> eligible) {
  plan.validate();
  if (buckets.size() != static_cast<std::size_t>(features.rows())) {
    throw DataError("buckets cover " + std::to_string(buckets.size()) + " nodes, features " +
                    std::to_string(features.rows()));
  }
  AugmentedGraph out = apply_plan_impl(features, message_edges, train_pos, buckets, plan, eligible);
  out.plan = plan;
  return out;
}

std::string_view to_string(Selector s) {
  switch (s) {
    case Selector::None: return "none";
    case Selector::Isolated: return "isolated";
    case Selector::Cold: return "cold";
    case Selector::MidWarm: return "mid_warm";
    case Selector::Warm: return "warm";
    case Selector::Random: return "random";
    case Selector::All: return "all";
  }
  return "?";
}

std::string_view to_string(DupMode m) {
  switch (m) {
    case DupMode::Full: return "full";
    case DupMode::Light: return "light";
    case DupMode::WholeGraph: return "whole_graph";
  }
  return "?";
}

Selector selector_from_string(std::string_view s) {
  for (Selector x : {Selector::None, Selector::Isolated, Selector::Cold, Selector::MidWarm,
                     Selector::Warm, Selector::Random, Selector::All}) {
    if (to_string(x) == s) return x;
  }
  throw ConfigError("unknown selector '" + std::string(s) + "'");
}

DupMode dup_mode_from_string(std::string_view s) {
  for (DupMode x : {DupMode::Full, DupMode::Light, DupMode::WholeGraph}) {
    if (to_string(x) == s) return x;
  }
  throw ConfigError("unknown duplication mode '" + std::string(s) + "'");
}

}  // namespace nodedup
