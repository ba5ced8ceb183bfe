#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nodedup/augment.hpp"
#include "nodedup/config.hpp"
#include "nodedup/eval.hpp"
#include "nodedup/split.hpp"
#include "nodedup/training.hpp"

namespace nodedup {

Json split_to_json(const DataSplit& s);
// Bucket labels are recomputed from the stored degrees.
DataSplit split_from_json(const Json& j);

Json report_to_json(const EvalReport& r);
Json aggregate_to_json(const AggregateReport& r);
// Per-epoch losses and validation scores; no wall times.
Json history_to_json(const TrainHistory& h);
// Wall times only, kept apart so results stay byte-stable across runs.
Json timing_to_json(const TrainHistory& h);
Json augment_summary(const AugmentedGraph& g);

// Header "row  hits  positives  shortfall", one line per bucket plus Overall,
// hits in percent with two decimals.
std::string report_tsv(const EvalReport& r);
std::string aggregate_tsv(const AggregateReport& r);

// Pretty-printed JSON with a trailing newline. Parent directories are created.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);

}  // namespace nodedup
