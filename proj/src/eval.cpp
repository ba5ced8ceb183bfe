#include "nodedup/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nodedup/errors.hpp"

namespace nodedup {

bool hits_at_k(double pos_score, std::span<const double> neg_scores, std::size_t k) {
  std::size_t at_or_above = 0;
  for (double s : neg_scores) {
    if (s >= pos_score && ++at_or_above >= k) return false;
  }
  return at_or_above < k;
}

double auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw std::invalid_argument("auc needs at least one positive and one negative score");
  }
  // Mann-Whitney U with midranks for ties.
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) items.push_back({s, true});
  for (double s : neg_scores) items.push_back({s, false});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < items.size() && items[j].score == items[i].score) {
      pos_in_group += items[j].positive ? 1 : 0;
      ++j;
    }
    // Ranks i+1 .. j share the midrank.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    pos_rank_sum += midrank * static_cast<double>(pos_in_group);
    i = j;
  }
  const auto p = static_cast<double>(pos_scores.size());
  const auto n = static_cast<double>(neg_scores.size());
  const double u = pos_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * n);
}

EvalReport evaluate_scores(const DataSplit& split, const PairScorer& score,
                           const EvalOptions& options) {
  const bool valid = options.set == EvalSet::Valid;
  const auto& positives = valid ? split.valid_pos : split.test_pos;
  const auto& negatives = valid ? split.valid_negatives : split.test_negatives;
  if (negatives.lists.size() != positives.size()) {
    throw DataError("split has " + std::to_string(negatives.lists.size()) + " negative lists for " +
                    std::to_string(positives.size()) + " positives");
  }
  EvalReport report;
  report.k = options.k;
  report.seed = split.seed;
  std::array<double, kReportRows> hit_sum{};
  std::array<std::vector<double>, 3> cat_pos, cat_neg;
  std::vector<double> neg_scores;

  for (std::size_t i = 0; i < positives.size(); ++i) {
    const Edge e = positives[i];
    const double pos = score(e.u, e.v);
    neg_scores.clear();
    for (NodeId w : negatives.lists[i]) neg_scores.push_back(score(e.u, w));
    const double hit = hits_at_k(pos, neg_scores, options.k) ? 1.0 : 0.0;
    const auto b = static_cast<std::size_t>(bucket_edge(e, split.buckets));
    for (std::size_t r : {b, static_cast<std::size_t>(ReportRow::Overall)}) {
      hit_sum[r] += hit;
      report.rows[r].positives += 1;
      report.rows[r].shortfall += negatives.shortfall[i];
    }
    if (options.pair_auc) {
      const auto c = static_cast<std::size_t>(categorize_pair(e, split.buckets));
      cat_pos[c].push_back(pos);
      cat_neg[c].insert(cat_neg[c].end(), neg_scores.begin(), neg_scores.end());
    }
  }
  for (std::size_t r = 0; r < kReportRows; ++r) {
    const auto n = report.rows[r].positives;
    report.rows[r].hits = n == 0 ? 0.0 : hit_sum[r] / static_cast<double>(n);
  }
  if (options.pair_auc) {
    std::array<PairAuc, 3> table{};
    for (std::size_t c = 0; c < 3; ++c) {
      table[c].positives = cat_pos[c].size();
      table[c].negatives = cat_neg[c].size();
      table[c].auc = (cat_pos[c].empty() || cat_neg[c].empty()) ? 0.0 : auc(cat_pos[c], cat_neg[c]);
    }
    report.pair_auc = table;
  }
  return report;
}

EvalReport evaluate_embeddings(const LinkModel& model, const DenseMatrix& embeddings,
                               const DataSplit& split, const EvalOptions& options) {
  if (static_cast<std::size_t>(embeddings.rows()) < split.num_nodes) {
    throw DataError("embedding matrix has fewer rows than the split has nodes");
  }
  const auto d = static_cast<std::size_t>(embeddings.cols());
  auto row = [&](NodeId v) {
    return std::span<const double>(embeddings.data() + static_cast<std::size_t>(v) * d, d);
  };
  if (model.decoder_config().kind == DecoderKind::InnerProduct) {
    return evaluate_scores(
        split, [&](NodeId a, NodeId b) { return embeddings.row(a).dot(embeddings.row(b)); },
        options);
  }
  return evaluate_scores(split, [&](NodeId a, NodeId b) { return model.logit(row(a), row(b)); },
                         options);
}

AugmentedGraph inference_graph(const AugmentedGraph& augmented, const DataSplit& split) {
  const auto n = static_cast<Eigen::Index>(augmented.num_original);
  if (split.mode == "inductive") {
    DenseMatrix x = augmented.features.topRows(n);
    const DegreeBuckets buckets =
        compute_buckets(split.num_nodes, split.eval_message_edges, split.buckets.delta);
    return apply_plan(x, split.eval_message_edges, {}, buckets, augmented.plan);
  }
  AugmentedGraph out = augmented;
  std::vector<Edge> edges = split.eval_message_edges;
  edges.insert(edges.end(), augmented.added_message_edges.begin(),
               augmented.added_message_edges.end());
  out.message = Adjacency::from_edges(augmented.num_nodes(), edges,
                                      augmented.message.num_self_loops() > 0);
  return out;
}

EvalReport evaluate(const LinkModel& model, const AugmentedGraph& augmented,
                    const DataSplit& split, const EvalOptions& options) {
  const AugmentedGraph g = inference_graph(augmented, split);
  DenseMatrix h = model.encode(g.message, g.features);
  return evaluate_embeddings(model, h, split, options);
}

AggregateReport aggregate(std::span<const EvalReport> reports) {
  AggregateReport out;
  if (reports.empty()) return out;
  out.k = reports.front().k;
  const auto n = static_cast<double>(reports.size());
  auto summarize = [&](auto get) {
    SummaryStat s;
    for (const auto& r : reports) s.mean += get(r);
    s.mean /= n;
    if (reports.size() > 1) {
      double ss = 0.0;
      for (const auto& r : reports) ss += (get(r) - s.mean) * (get(r) - s.mean);
      s.stddev = std::sqrt(ss / (n - 1.0));
    }
    return s;
  };
  for (const auto& r : reports) out.seeds.push_back(r.seed);
  for (std::size_t row = 0; row < kReportRows; ++row) {
    out.hits[row] = summarize([row](const EvalReport& r) { return r.rows[row].hits; });
    for (const auto& r : reports) out.positives[row] += r.rows[row].positives;
  }
  const bool all_auc = std::all_of(reports.begin(), reports.end(),
                                   [](const EvalReport& r) { return r.pair_auc.has_value(); });
  if (all_auc) {
    std::array<SummaryStat, 3> table{};
    for (std::size_t c = 0; c < 3; ++c) {
      table[c] = summarize([c](const EvalReport& r) { return (*r.pair_auc)[c].auc; });
    }
    out.pair_auc = table;
  }
  return out;
}

std::string_view to_string(ReportRow r) {
  switch (r) {
    case ReportRow::Isolated: return "Isolated";
    case ReportRow::LowDegree: return "LowDegree";
    case ReportRow::Warm: return "Warm";
    case ReportRow::Overall: return "Overall";
  }
  return "?";
}

}  // namespace nodedup
