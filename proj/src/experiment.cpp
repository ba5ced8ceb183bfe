#include "nodedup/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace nodedup {

DatasetBundle load_experiment_dataset(const ExperimentConfig& config) {
  if (config.dataset.synth) {
    DatasetBundle b = generate_synthetic(*config.dataset.synth);
    if (!config.dataset.name.empty()) b.name = config.dataset.name;
    return b;
  }
  LoadOptions opts;
  opts.row_normalize = config.dataset.row_normalize;
  opts.name = config.dataset.name;
  return load_dataset(config.dataset.edges, config.dataset.features, opts);
}

DataSplit make_split(const Graph& graph, const SplitConfig& config, std::uint64_t seed) {
  const SplitOptions opts = config.options(seed);
  if (config.mode == "inductive") {
    InductiveSplit ind = inductive_split(graph, config.new_node_frac, seed);
    return to_data_split(graph, ind, opts);
  }
  return transductive_split(graph, opts);
}

SeedRun run_seed(const Graph& graph, const DataSplit& split, const ExperimentConfig& config,
                 const AugmentPlan& plan, const EncoderConfig& encoder) {
  AugmentPlan p = plan;
  p.seed = split.seed;
  TrainConfig t = config.train_for(split.seed);
  t.eval_k = config.eval.k;
  TrainResult r = train(graph, split, p, encoder, config.decoder, t);
  EvalOptions opts;
  opts.k = config.eval.k;
  opts.set = EvalSet::Test;
  opts.pair_auc = config.eval.auc_pairs;
  EvalReport report = evaluate(r.model, r.augmented, split, opts);
  return SeedRun{split.seed, std::move(r), report};
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard lock(error_mutex);
        if (error) return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nodedup
