#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nodedup/augment.hpp"
#include "nodedup/io.hpp"
#include "nodedup/models.hpp"
#include "nodedup/split.hpp"
#include "nodedup/training.hpp"

namespace nodedup {

using Json = nlohmann::ordered_json;

struct DatasetConfig {
  std::string edges;
  std::string features;
  bool row_normalize = false;
  std::string name;
  std::optional<SynthConfig> synth;  // takes the place of edges/features
};

struct SplitConfig {
  std::string mode = "transductive";  // or "inductive"
  double valid_frac = 0.1;
  double test_frac = 0.2;
  double new_node_frac = 0.1;
  // One run per seed. The seed drives the split, the augmentation and training.
  std::vector<std::uint64_t> seeds{0};
  std::size_t num_negatives = kDefaultEvalNegatives;
  int delta = kDefaultDelta;
  DegreeSource degree_source = DegreeSource::MessageEdges;

  SplitOptions options(std::uint64_t seed) const;
};

struct EvalConfig {
  std::size_t k = kDefaultHitsK;
  bool auc_pairs = false;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  SplitConfig split;
  AugmentPlan augment;
  EncoderConfig encoder;
  DecoderConfig decoder;
  TrainConfig train;
  EvalConfig eval;
  std::string output_dir;
  int jobs = 1;

  // Throws ConfigError naming the first offending key.
  void validate() const;
  // Per-run copies with the seed applied.
  AugmentPlan plan_for(std::uint64_t seed) const;
  TrainConfig train_for(std::uint64_t seed) const;
};

// Strict: unknown keys and wrong types throw ConfigError.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& c);

// Reads a JSON config file and applies "section.key=value" overrides in
// order. A value that parses as JSON is used as such, otherwise as a string.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides);
void apply_override(Json& j, std::string_view assignment);

Json plan_to_json(const AugmentPlan& p);
AugmentPlan plan_from_json(const Json& j);
Json synth_to_json(const SynthConfig& s);
SynthConfig synth_from_json(const Json& j);

// git describe of the source tree at configure time.
std::string_view build_id();

}  // namespace nodedup
