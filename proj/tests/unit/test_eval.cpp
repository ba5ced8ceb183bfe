#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "nodedup/augment.hpp"
#include "nodedup/eval.hpp"
#include "nodedup/split.hpp"
#include "testutil.hpp"

namespace nodedup {
namespace {

using testutil::random_graph;

// Sort-based oracle: the positive's 1-based pessimistic rank.
bool hits_oracle(double pos, std::vector<double> negs, std::size_t k) {
  negs.push_back(pos);
  std::sort(negs.begin(), negs.end(), std::greater<>());
  const auto last_tie = std::find_if(negs.begin(), negs.end(), [&](double s) { return s < pos; });
  const auto rank = static_cast<std::size_t>(last_tie - negs.begin());
  return rank <= k;
}

double auc_oracle(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Coarse values so ties occur often.
std::vector<double> draw(Rng& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& x : out) x = static_cast<double>(uniform_index(rng, 20)) / 4.0;
  return out;
}

TEST(Hits, Examples) {
  std::vector<double> low(500, 0.5);
  EXPECT_TRUE(hits_at_k(0.9, low, 10));
  std::vector<double> eleventh(10, 0.95);
  eleventh.resize(500, 0.1);
  EXPECT_FALSE(hits_at_k(0.9, eleventh, 10));
  std::vector<double> tenth(9, 0.95);
  tenth.resize(500, 0.1);
  EXPECT_TRUE(hits_at_k(0.9, tenth, 10));
  EXPECT_TRUE(hits_at_k(0.0, {}, 10));
}

TEST(Hits, TiesCountAgainstPositive) {
  std::vector<double> ties(10, 0.5);
  EXPECT_FALSE(hits_at_k(0.5, ties, 10));
  std::vector<double> constant(500, 1.0);
  EXPECT_FALSE(hits_at_k(1.0, constant, 10));
}

TEST(Hits, MatchesSortOracle) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    auto negs = draw(rng, 1 + uniform_index(rng, 60));
    const double pos = static_cast<double>(uniform_index(rng, 20)) / 4.0;
    const std::size_t k = 1 + uniform_index(rng, 15);
    ASSERT_EQ(hits_at_k(pos, negs, k), hits_oracle(pos, negs, k)) << "instance " << i;
  }
}

TEST(Hits, MonotoneTransformInvariance) {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    auto negs = draw(rng, 40);
    const double pos = static_cast<double>(uniform_index(rng, 20)) / 4.0;
    std::vector<double> t(negs.size());
    std::transform(negs.begin(), negs.end(), t.begin(), [](double x) { return std::exp(3 * x) - 7; });
    EXPECT_EQ(hits_at_k(pos, negs, 5), hits_at_k(std::exp(3 * pos) - 7, t, 5));
  }
}

TEST(Auc, Examples) {
  EXPECT_EQ(auc(std::vector<double>{3, 4}, std::vector<double>{1, 2}), 1.0);
  EXPECT_EQ(auc(std::vector<double>{1, 2, 2}, std::vector<double>{2, 1, 2}), 0.5);
  EXPECT_EQ(auc(std::vector<double>{7}, std::vector<double>{7, 7}), 0.5);
  EXPECT_THROW(auc(std::vector<double>{}, std::vector<double>{1}), std::invalid_argument);
}

TEST(Auc, MatchesPairwiseOracle) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    auto pos = draw(rng, 1 + uniform_index(rng, 30));
    auto neg = draw(rng, 1 + uniform_index(rng, 30));
    ASSERT_EQ(auc(pos, neg), auc_oracle(pos, neg)) << "instance " << i;
  }
}

TEST(Auc, MonotoneTransformInvariance) {
  Rng rng(4);
  auto pos = draw(rng, 25);
  auto neg = draw(rng, 31);
  auto f = [](std::vector<double> v) {
    for (auto& x : v) x = std::atan(x) * 10;
    return v;
  };
  EXPECT_EQ(auc(pos, neg), auc(f(pos), f(neg)));
}

DataSplit small_split() {
  Graph g = random_graph(150, 300, 3, 5);
  SplitOptions opts;
  opts.seed = 6;
  opts.num_negatives = 40;
  return transductive_split(g, opts);
}

TEST(Evaluate, ConstantScoreGivesZeroHitsAndHalfAuc) {
  DataSplit split = small_split();
  EvalOptions opts;
  opts.pair_auc = true;
  auto report = evaluate_scores(split, [](NodeId, NodeId) { return 1.0; }, opts);
  for (const auto& row : report.rows) EXPECT_EQ(row.hits, 0.0);
  ASSERT_TRUE(report.pair_auc.has_value());
  for (const auto& c : *report.pair_auc) {
    if (c.positives > 0) EXPECT_EQ(c.auc, 0.5);
  }
}

TEST(Evaluate, OverallCountsAreBucketSums) {
  DataSplit split = small_split();
  Rng rng(7);
  std::vector<double> table(150 * 150);
  for (auto& x : table) x = uniform_unit(rng);
  auto report = evaluate_scores(split, [&](NodeId a, NodeId b) { return table[static_cast<std::size_t>(a) * 150 + static_cast<std::size_t>(b)]; });
  std::size_t sum = 0;
  double weighted = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    sum += report.rows[r].positives;
    weighted += report.rows[r].hits * static_cast<double>(report.rows[r].positives);
    EXPECT_GE(report.rows[r].hits, 0.0);
    EXPECT_LE(report.rows[r].hits, 1.0);
  }
  EXPECT_EQ(sum, report.overall().positives);
  EXPECT_EQ(sum, split.test_pos.size());
  EXPECT_NEAR(weighted / static_cast<double>(sum), report.overall().hits, 1e-12);
}

TEST(Evaluate, PerfectScorerHitsEverything) {
  DataSplit split = small_split();
  std::set<Edge> positives;
  for (const auto& e : split.test_pos) positives.insert(canonical(e));
  auto report = evaluate_scores(split, [&](NodeId a, NodeId b) {
    return positives.count(canonical({a, b})) ? 1.0 : 0.0;
  });
  EXPECT_EQ(report.overall().hits, 1.0);
  EvalOptions valid;
  valid.set = EvalSet::Valid;
  EXPECT_EQ(evaluate_scores(split, [](NodeId, NodeId) { return 0.0; }, valid).overall().positives,
            split.valid_pos.size());
}

TEST(Evaluate, DuplicateRowsAreNeverRead) {
  Graph g = random_graph(150, 300, 4, 8);
  SplitOptions opts;
  opts.seed = 9;
  opts.num_negatives = 40;
  DataSplit split = transductive_split(g, opts);
  auto aug = apply_plan(g.features(), split.message_edges, split.train_pos, split.buckets,
                        AugmentPlan::node_dup(Selector::Cold, 2));
  EncoderConfig e;
  e.hidden_dim = 8;
  e.dropout = 0.0;
  LinkModel model(4, e, {}, 3);
  AugmentedGraph inf = inference_graph(aug, split);
  DenseMatrix h = model.encode(inf.message, inf.features);
  DenseMatrix trimmed = h.topRows(150);
  auto full = evaluate_embeddings(model, h, split);
  auto cut = evaluate_embeddings(model, trimmed, split);
  for (std::size_t r = 0; r < kReportRows; ++r) EXPECT_EQ(full.rows[r].hits, cut.rows[r].hits);
}

TEST(Evaluate, TransductiveInferenceGraphMatchesTraining) {
  Graph g = random_graph(120, 240, 3, 10);
  SplitOptions opts;
  opts.seed = 11;
  DataSplit split = transductive_split(g, opts);
  auto aug = apply_plan(g.features(), split.message_edges, split.train_pos, split.buckets,
                        AugmentPlan::node_dup_light());
  EXPECT_EQ(inference_graph(aug, split).message, aug.message);
}

TEST(Aggregate, MeanAndSampleStd) {
  EvalReport a, b, c;
  a.rows[0].hits = 0.2;
  b.rows[0].hits = 0.4;
  c.rows[0].hits = 0.6;
  for (auto* r : {&a, &b, &c}) r->rows[0].positives = 10;
  std::vector<EvalReport> reports{a, b, c};
  auto agg = aggregate(reports);
  EXPECT_NEAR(agg.hits[0].mean, 0.4, 1e-15);
  EXPECT_NEAR(agg.hits[0].stddev, 0.2, 1e-15);
  EXPECT_EQ(agg.positives[0], 30u);
  std::vector<EvalReport> one{a};
  EXPECT_EQ(aggregate(one).hits[0].stddev, 0.0);
}

}  // namespace
}  // namespace nodedup
