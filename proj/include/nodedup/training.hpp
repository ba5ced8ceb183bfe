#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodedup/augment.hpp"
#include "nodedup/eval.hpp"
#include "nodedup/graph.hpp"
#include "nodedup/models.hpp"
#include "nodedup/split.hpp"

namespace nodedup {

struct TrainConfig {
  double lr = 0.001;
  int max_epochs = 500;
  int patience = 50;  // epochs without validation improvement before stopping
  int negative_rate = 1;
  std::uint64_t seed = 0;
  // Validation Hits@K is computed every `eval_every` epochs (and on the last).
  int eval_every = 1;
  std::size_t eval_k = kDefaultHitsK;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  std::optional<double> valid_hits;
  double seconds = 0.0;  // wall time; never serialized with results
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  double best_valid_hits = -1.0;
  std::size_t supervised_pairs_per_epoch = 0;
  std::size_t negative_shortfall = 0;  // summed over epochs
  double preprocess_seconds = 0.0;
  double train_seconds = 0.0;
  bool diverged = false;
  std::string divergence_message;
};

struct TrainResult {
  LinkModel model;  // parameters from the best validation epoch
  TrainHistory history;
  AugmentedGraph augmented;
};

struct NegativeSample {
  std::vector<Edge> pairs;
  std::size_t shortfall = 0;
};

// K negatives per positive for one epoch. Each negative keeps the positive's
// source u and draws w uniformly from the nodes of `adj` excluding u, N(u)
// and hidden nodes. The stream is keyed by (seed, epoch). When a source has no
// candidate at all, the negative is dropped and counted in `shortfall`.
NegativeSample sample_train_negatives(const Adjacency& adj, std::span<const Edge> positives,
                                      int negative_rate, std::uint64_t seed, std::uint64_t epoch,
                                      std::span<const std::uint8_t> hidden = {});

// Augments once, then runs full-batch epochs (one Adam step each) and early
// stops on validation overall Hits@K. Training stops early with
// history.diverged set if the loss turns non-finite; the returned model then
// holds the best parameters seen so far.
TrainResult train(const Graph& graph, const DataSplit& split, const AugmentPlan& plan,
                  const EncoderConfig& encoder, const DecoderConfig& decoder,
                  const TrainConfig& config);

// Builds the augmented training graph for a split and plan, as train() does.
AugmentedGraph augment_for_split(const Graph& graph, const DataSplit& split,
                                 const AugmentPlan& plan);

struct AblationVariant {
  std::string name;
  AugmentPlan plan;
  std::optional<EncoderConfig> encoder;  // overrides the shared encoder
};

// baseline, w/o Step II, w/o Step III, NodeDup, NodeDup(L).
std::vector<AblationVariant> default_ablation_variants(std::uint64_t seed = 0);

struct AblationOutcome {
  std::string name;
  AugmentPlan plan;
  TrainHistory history;
  EvalReport report;
};

// Trains every variant on the same split with the same seeds.
std::vector<AblationOutcome> run_ablation(const Graph& graph, const DataSplit& split,
                                          std::span<const AblationVariant> variants,
                                          const EncoderConfig& encoder,
                                          const DecoderConfig& decoder, const TrainConfig& config,
                                          const EvalOptions& eval_options = {});

}  // namespace nodedup
