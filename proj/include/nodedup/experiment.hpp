#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "nodedup/config.hpp"
#include "nodedup/eval.hpp"
#include "nodedup/io.hpp"
#include "nodedup/split.hpp"
#include "nodedup/training.hpp"

namespace nodedup {

// Synthetic when the config has a synth section, files otherwise.
DatasetBundle load_experiment_dataset(const ExperimentConfig& config);

// Transductive or inductive split per the config, for one seed.
DataSplit make_split(const Graph& graph, const SplitConfig& config, std::uint64_t seed);

struct SeedRun {
  std::uint64_t seed = 0;
  TrainResult result;
  EvalReport test;
};

// Split, augment, train and evaluate on the test set for one seed. The seed
// overrides the plan's and the training config's seeds.
SeedRun run_seed(const Graph& graph, const DataSplit& split, const ExperimentConfig& config,
                 const AugmentPlan& plan, const EncoderConfig& encoder);

// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown is rethrown after every worker has stopped.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace nodedup
