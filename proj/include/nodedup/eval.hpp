#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodedup/augment.hpp"
#include "nodedup/graph.hpp"
#include "nodedup/models.hpp"
#include "nodedup/split.hpp"

namespace nodedup {

inline constexpr std::size_t kDefaultHitsK = 10;

// 1 iff strictly fewer than k negatives score >= pos (ties count against the
// positive).
bool hits_at_k(double pos_score, std::span<const double> neg_scores, std::size_t k);

// P(pos > neg) + 0.5 P(pos == neg), computed from ranks in O((P+N) log(P+N)).
// Throws std::invalid_argument if either side is empty.
double auc(std::span<const double> pos_scores, std::span<const double> neg_scores);

// Row order of EvalReport::buckets.
enum class ReportRow : std::uint8_t { Isolated = 0, LowDegree = 1, Warm = 2, Overall = 3 };
inline constexpr std::size_t kReportRows = 4;

struct BucketStats {
  double hits = 0.0;           // mean hits over positives, in [0, 1]
  std::size_t positives = 0;
  std::size_t shortfall = 0;   // missing negatives summed over positives
};

struct PairAuc {
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct EvalReport {
  std::size_t k = kDefaultHitsK;
  std::uint64_t seed = 0;
  std::array<BucketStats, kReportRows> rows{};
  // Warm-Warm and Warm-Cold AUC, when requested. ColdCold is reported too.
  std::optional<std::array<PairAuc, 3>> pair_auc;

  const BucketStats& row(ReportRow r) const { return rows[static_cast<std::size_t>(r)]; }
  const BucketStats& row(Bucket b) const { return rows[static_cast<std::size_t>(b)]; }
  const BucketStats& overall() const { return row(ReportRow::Overall); }
};

enum class EvalSet : std::uint8_t { Valid, Test };

struct EvalOptions {
  std::size_t k = kDefaultHitsK;
  EvalSet set = EvalSet::Test;
  bool pair_auc = false;
};

// Score of the pair (source, candidate); higher means more likely linked.
using PairScorer = std::function<double(NodeId, NodeId)>;

// Ranks every positive of the chosen set against its frozen negatives and
// buckets it by its source node (MinDegreeEndpoint policy).
EvalReport evaluate_scores(const DataSplit& split, const PairScorer& score,
                           const EvalOptions& options = {});

// Same ranking over a precomputed embedding matrix with the model's
// decoder. Only rows of original nodes are read.
EvalReport evaluate_embeddings(const LinkModel& model, const DenseMatrix& embeddings,
                               const DataSplit& split, const EvalOptions& options = {});

// The graph the encoder sees at evaluation time. Transductive: the training
// augmentation with eval_message_edges in place of message_edges. Inductive:
// the plan re-applied to the inference graph, so new cold nodes are duplicated
// too.
AugmentedGraph inference_graph(const AugmentedGraph& augmented, const DataSplit& split);

// Encodes once (no dropout) over inference_graph and ranks the chosen set.
EvalReport evaluate(const LinkModel& model, const AugmentedGraph& augmented,
                    const DataSplit& split, const EvalOptions& options = {});

// Mean and sample standard deviation of each row over seeds.
struct SummaryStat {
  double mean = 0.0;
  double stddev = 0.0;
};

struct AggregateReport {
  std::size_t k = kDefaultHitsK;
  std::vector<std::uint64_t> seeds;
  std::array<SummaryStat, kReportRows> hits{};
  std::array<std::size_t, kReportRows> positives{};  // summed over seeds
  std::optional<std::array<SummaryStat, 3>> pair_auc;
};

AggregateReport aggregate(std::span<const EvalReport> reports);

std::string_view to_string(ReportRow r);

}  // namespace nodedup
