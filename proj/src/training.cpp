#include "nodedup/training.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "nodedup/errors.hpp"
#include "nodedup/random.hpp"

namespace nodedup {
namespace {

constexpr std::uint64_t kInitStream = 11;
constexpr std::uint64_t kNegativeStream = 22;
constexpr std::uint64_t kDropoutStream = 33;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("train.lr must be > 0");
  if (max_epochs < 1) throw ConfigError("train.max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("train.patience must be >= 1");
  if (negative_rate < 1) throw ConfigError("train.negative_rate must be >= 1");
  if (eval_every < 1) throw ConfigError("train.eval_every must be >= 1");
  if (eval_k < 1) throw ConfigError("train.eval_k must be >= 1");
}

NegativeSample sample_train_negatives(const Adjacency& adj, std::span<const Edge> positives,
                                      int negative_rate, std::uint64_t seed, std::uint64_t epoch,
                                      std::span<const std::uint8_t> hidden) {
  const std::size_t n = adj.num_nodes();
  auto is_hidden = [&](NodeId v) {
    return !hidden.empty() && hidden[static_cast<std::size_t>(v)] != 0;
  };
  std::size_t hidden_count = 0;
  for (auto h : hidden) hidden_count += h != 0 ? 1 : 0;

  NegativeSample out;
  out.pairs.reserve(positives.size() * static_cast<std::size_t>(negative_rate));
  Rng rng(derive_seed(seed, epoch));
  std::vector<NodeId> pool;
  for (const Edge& pos : positives) {
    const NodeId u = pos.u;
    auto nb = adj.neighbors(u);
    // |{u} + N(u) + hidden| without double counting.
    std::size_t excluded = hidden_count + (is_hidden(u) ? 0 : 1);
    for (NodeId w : nb) {
      if (w != u && !is_hidden(w)) ++excluded;
    }
    const std::size_t available = n - excluded;
    if (available == 0) {
      out.shortfall += static_cast<std::size_t>(negative_rate);
      continue;
    }
    const bool enumerate = available * 8 < n;
    if (enumerate) {
      pool.clear();
      for (NodeId w = 0; static_cast<std::size_t>(w) < n; ++w) {
        if (w == u || is_hidden(w) || std::binary_search(nb.begin(), nb.end(), w)) continue;
        pool.push_back(w);
      }
    }
    for (int k = 0; k < negative_rate; ++k) {
      NodeId w;
      if (enumerate) {
        w = pool[uniform_index(rng, pool.size())];
      } else {
        do {
          w = static_cast<NodeId>(uniform_index(rng, n));
        } while (w == u || is_hidden(w) || std::binary_search(nb.begin(), nb.end(), w));
      }
      out.pairs.push_back({u, w});
    }
  }
  return out;
}

AugmentedGraph augment_for_split(const Graph& graph, const DataSplit& split,
                                 const AugmentPlan& plan) {
  if (graph.num_nodes() != split.num_nodes) {
    throw DataError("split covers " + std::to_string(split.num_nodes) + " nodes but the graph has " +
                    std::to_string(graph.num_nodes()));
  }
  // Selection always uses training-time visibility, whatever the reporting
  // degree source is.
  DegreeBuckets visible = compute_buckets(split.num_nodes, split.message_edges,
                                          split.buckets.delta, DegreeSource::MessageEdges);
  std::vector<std::uint8_t> eligible;
  if (!split.hidden_nodes.empty()) {
    eligible.resize(split.num_nodes);
    for (std::size_t v = 0; v < split.num_nodes; ++v) eligible[v] = split.hidden_nodes[v] ? 0 : 1;
  }
  return apply_plan(graph.features(), split.message_edges, split.train_pos, visible, plan, eligible);
}

TrainResult train(const Graph& graph, const DataSplit& split, const AugmentPlan& plan,
                  const EncoderConfig& encoder, const DecoderConfig& decoder,
                  const TrainConfig& config) {
  config.validate();
  TrainHistory history;
  auto t0 = Clock::now();
  AugmentedGraph aug = augment_for_split(graph, split, plan);
  history.preprocess_seconds = seconds_since(t0);

  LinkModel model(graph.feature_dim(), encoder, decoder, derive_seed(config.seed, kInitStream));
  std::vector<std::uint8_t> hidden;
  if (!split.hidden_nodes.empty()) {
    hidden = split.hidden_nodes;
    hidden.resize(aug.num_nodes(), 0);
  }

  const std::size_t num_pos = aug.train_pos.size();
  if (num_pos == 0) throw DataError("no supervised positives to train on");
  const bool has_valid = !split.valid_pos.empty();
  AdamOptions adam;
  adam.lr = config.lr;
  std::vector<DenseMatrix> best_values;
  auto snapshot = [&] {
    best_values.clear();
    for (const auto& p : model.params().params()) best_values.push_back(p.value);
  };
  snapshot();

  std::vector<Edge> pairs;
  std::vector<double> labels;
  const auto train_t0 = Clock::now();
  int since_best = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto epoch_t0 = Clock::now();
    NegativeSample negs =
        sample_train_negatives(aug.message, aug.train_pos, config.negative_rate,
                               derive_seed(config.seed, kNegativeStream),
                               static_cast<std::uint64_t>(epoch), hidden);
    history.negative_shortfall += negs.shortfall;
    pairs.assign(aug.train_pos.begin(), aug.train_pos.end());
    pairs.insert(pairs.end(), negs.pairs.begin(), negs.pairs.end());
    labels.assign(pairs.size(), 0.0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(num_pos), 1.0);
    if (epoch == 0) history.supervised_pairs_per_epoch = pairs.size();

    EpochRecord rec;
    rec.epoch = epoch;
    try {
      rec.loss = model.loss_and_grad(aug.message, aug.features, pairs, labels,
                                     DropoutKey{derive_seed(config.seed, kDropoutStream),
                                                static_cast<std::uint64_t>(epoch)});
    } catch (const DivergenceError& e) {
      history.diverged = true;
      history.divergence_message = e.what();
      break;
    }
    if (!std::isfinite(rec.loss)) {
      history.diverged = true;
      history.divergence_message = "non-finite loss at epoch " + std::to_string(epoch);
      break;
    }
    adam_step(model.params(), adam);

    const bool last = epoch + 1 == config.max_epochs;
    if (has_valid && ((epoch + 1) % config.eval_every == 0 || last)) {
      try {
        DenseMatrix h = model.encode(aug.message, aug.features);
        EvalOptions opts;
        opts.k = config.eval_k;
        opts.set = EvalSet::Valid;
        rec.valid_hits = evaluate_embeddings(model, h, split, opts).overall().hits;
      } catch (const DivergenceError& e) {
        history.diverged = true;
        history.divergence_message = e.what();
        rec.seconds = seconds_since(epoch_t0);
        history.epochs.push_back(rec);
        break;
      }
      if (*rec.valid_hits > history.best_valid_hits) {
        history.best_valid_hits = *rec.valid_hits;
        history.best_epoch = epoch;
        snapshot();
        since_best = 0;
      } else {
        since_best += config.eval_every;
      }
    }
    rec.seconds = seconds_since(epoch_t0);
    history.epochs.push_back(rec);
    if (has_valid && since_best >= config.patience) break;
  }
  history.train_seconds = seconds_since(train_t0);

  if (!has_valid) {
    snapshot();
    history.best_epoch = history.epochs.empty() ? -1 : history.epochs.back().epoch;
  }
  auto& ps = model.params().params();
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i].value = best_values[i];
  model.params().zero_grad();
  return TrainResult{std::move(model), std::move(history), std::move(aug)};
}

std::vector<AblationVariant> default_ablation_variants(std::uint64_t seed) {
  std::vector<AblationVariant> out;
  AugmentPlan base = AugmentPlan::baseline();
  base.seed = seed;
  out.push_back({"baseline", base, std::nullopt});

  AugmentPlan no_agg = AugmentPlan::node_dup();
  no_agg.seed = seed;
  no_agg.use_in_aggregation = false;
  out.push_back({"nodedup_wo_step2", no_agg, std::nullopt});

  AugmentPlan no_sup = AugmentPlan::node_dup();
  no_sup.seed = seed;
  no_sup.use_in_supervision = false;
  out.push_back({"nodedup_wo_step3", no_sup, std::nullopt});

  AugmentPlan full = AugmentPlan::node_dup();
  full.seed = seed;
  out.push_back({"nodedup", full, std::nullopt});

  AugmentPlan light = AugmentPlan::node_dup_light();
  light.seed = seed;
  out.push_back({"nodedup_light", light, std::nullopt});
  return out;
}

std::vector<AblationOutcome> run_ablation(const Graph& graph, const DataSplit& split,
                                          std::span<const AblationVariant> variants,
                                          const EncoderConfig& encoder,
                                          const DecoderConfig& decoder, const TrainConfig& config,
                                          const EvalOptions& eval_options) {
  std::vector<AblationOutcome> out;
  out.reserve(variants.size());
  for (const auto& v : variants) {
    TrainResult r = train(graph, split, v.plan, v.encoder.value_or(encoder), decoder, config);
    EvalOptions opts = eval_options;
    opts.set = EvalSet::Test;
    EvalReport report = evaluate(r.model, r.augmented, split, opts);
    out.push_back({v.name, v.plan, std::move(r.history), report});
  }
  return out;
}

}  // namespace nodedup
