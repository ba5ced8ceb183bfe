#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nodedup/augment.hpp"
#include "nodedup/errors.hpp"
#include "nodedup/models.hpp"
#include "testutil.hpp"

namespace nodedup {
namespace {

using testutil::bitwise_equal;
using testutil::random_graph;
using testutil::random_matrix;

EncoderConfig enc(LayerKind kind, int layers, int hidden, double dropout = 0.0) {
  EncoderConfig e;
  e.kind = kind;
  e.num_layers = layers;
  e.hidden_dim = hidden;
  e.dropout = dropout;
  return e;
}

DecoderConfig dec(DecoderKind kind, int width = 0) {
  DecoderConfig d;
  d.kind = kind;
  d.mlp_hidden = width;
  return d;
}

// Positives from the graph plus an equal number of random non-edges.
void labelled_pairs(const Graph& g, std::uint64_t seed, std::vector<Edge>& pairs,
                    std::vector<double>& labels) {
  for (const auto& e : g.edges()) {
    pairs.push_back(e);
    labels.push_back(1.0);
  }
  Rng rng(seed);
  const std::size_t n = pairs.size();
  while (pairs.size() < 2 * n) {
    auto u = static_cast<NodeId>(uniform_index(rng, g.num_nodes()));
    auto v = static_cast<NodeId>(uniform_index(rng, g.num_nodes()));
    if (u == v || g.has_edge(u, v)) continue;
    pairs.push_back({u, v});
    labels.push_back(0.0);
  }
}

struct GradCase {
  LayerKind kind;
  DecoderKind decoder;
};

void PrintTo(const GradCase& c, std::ostream* os) {
  *os << to_string(c.kind) << "/" << to_string(c.decoder);
}

class FullModelGrad : public ::testing::TestWithParam<GradCase> {};

TEST_P(FullModelGrad, MatchesFiniteDifferences) {
  Graph g = random_graph(8, 10, 5, 31);
  LinkModel model(5, enc(GetParam().kind, 2, 6), dec(GetParam().decoder, 4), 7);
  std::vector<Edge> pairs;
  std::vector<double> labels;
  labelled_pairs(g, 3, pairs, labels);
  LinkObjective obj(model, g.adjacency(), g.features(), pairs, labels);
  auto r = grad_check(obj);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst.param << "[" << r.worst.index << "] analytic "
                                  << r.worst.analytic << " numeric " << r.worst.numeric;
  EXPECT_EQ(r.coords_checked, model.params().num_scalars());
}

INSTANTIATE_TEST_SUITE_P(Encoders, FullModelGrad,
                         ::testing::Values(GradCase{LayerKind::SeparateWeights, DecoderKind::InnerProduct},
                                           GradCase{LayerKind::SeparateWeights, DecoderKind::Mlp},
                                           GradCase{LayerKind::SharedWeights, DecoderKind::InnerProduct},
                                           GradCase{LayerKind::SharedWeights, DecoderKind::Mlp}),
                         [](const auto& info) {
                           return std::string(to_string(info.param.kind)) + "_" +
                                  std::string(to_string(info.param.decoder));
                         });

TEST(FullModel, GradCheckRefusesActiveDropout) {
  Graph g = random_graph(8, 10, 5, 32);
  LinkModel model(5, enc(LayerKind::SeparateWeights, 2, 6, 0.5), dec(DecoderKind::InnerProduct), 7);
  std::vector<Edge> pairs;
  std::vector<double> labels;
  labelled_pairs(g, 3, pairs, labels);
  LinkObjective obj(model, g.adjacency(), g.features(), pairs, labels, DropoutKey{1, 0});
  EXPECT_THROW(grad_check(obj), std::logic_error);
}

TEST(SageLayer, IsolatedAndSelfDuplicate) {
  DenseMatrix h = random_matrix(3, 4, 33);
  DenseMatrix w1 = random_matrix(4, 2, 34);
  DenseMatrix w2 = random_matrix(4, 2, 35);
  std::vector<Edge> loop{{1, 1}};
  auto adj = Adjacency::from_edges(3, loop, true);
  DenseMatrix out = sage_layer(h, adj, w1, w2);
  DenseMatrix h0 = h.row(0);
  DenseMatrix h1 = h.row(1);
  DenseMatrix iso = nn::matmul(h0, w1);
  DenseMatrix dup = nn::matmul(h1, w1) + nn::matmul(h1, w2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    EXPECT_EQ(out(0, c), iso(0, c));
    EXPECT_EQ(out(1, c), dup(0, c));
  }
}

TEST(SageLayer, ZeroNeighborWeightIsPerNodeLinear) {
  Graph g = random_graph(10, 15, 4, 36);
  DenseMatrix w1 = random_matrix(4, 3, 37);
  DenseMatrix out = sage_layer(g.features(), g.adjacency(), w1, DenseMatrix::Zero(4, 3));
  EXPECT_TRUE(bitwise_equal(out, nn::matmul(g.features(), w1)));
}

TEST(GcnLayer, SingleNodeAndSymmetry) {
  DenseMatrix w = random_matrix(3, 2, 38);
  DenseMatrix x = random_matrix(1, 3, 39);
  auto lone = Adjacency::from_edges(1, {}, false);
  EXPECT_TRUE(bitwise_equal(gcn_style_layer(x, lone, w), nn::matmul(x, w)));

  DenseMatrix pair(2, 3);
  pair.row(0) = x.row(0);
  pair.row(1) = x.row(0);
  std::vector<Edge> e{{0, 1}};
  DenseMatrix out = gcn_style_layer(pair, Adjacency::from_edges(2, e, false), w);
  for (Eigen::Index c = 0; c < 2; ++c) EXPECT_EQ(out(0, c), out(1, c));
}

TEST(GcnLayer, SelfDuplicateOnlyRescales) {
  // An isolated node and the same node with a duplicate: outputs are parallel.
  DenseMatrix w = random_matrix(3, 2, 40);
  DenseMatrix x = random_matrix(1, 3, 41);
  DenseMatrix two(2, 3);
  two.row(0) = x.row(0);
  two.row(1) = x.row(0);
  std::vector<Edge> e{{0, 1}};
  DenseMatrix alone = gcn_style_layer(x, Adjacency::from_edges(1, {}, false), w);
  DenseMatrix with_dup = gcn_style_layer(two, Adjacency::from_edges(2, e, false), w);
  for (Eigen::Index c = 0; c < 2; ++c) EXPECT_NEAR(with_dup(0, c), alone(0, c), 1e-12);
}

// Layer outputs for isolated nodes under the self-loop variant, checked against
// a reference built from the same products.
TEST(IsolatedIdentity, LightEqualsSumOfWeights) {
  Graph g = random_graph(30, 20, 6, 42);
  auto edges = g.edges();
  auto buckets = compute_buckets(g.adjacency());
  auto aug = apply_plan(g.features(), edges, edges, buckets, AugmentPlan::node_dup_light(Selector::Isolated));
  ASSERT_GT(aug.selected.size(), 0u);
  LinkModel model(6, enc(LayerKind::SeparateWeights, 3, 5), dec(DecoderKind::InnerProduct), 9);
  EncoderTape tape;
  model.encode(aug.message, aug.features, std::nullopt, &tape);
  for (int l = 0; l < 3; ++l) {
    const auto& w1 = model.params().at("enc." + std::to_string(l) + ".self").value;
    const auto& w2 = model.params().at("enc." + std::to_string(l) + ".neigh").value;
    for (NodeId v : aug.selected) {
      DenseMatrix h = tape.inputs[static_cast<std::size_t>(l)].row(v);
      DenseMatrix ref = nn::matmul(h, w1) + nn::matmul(h, w2);
      for (Eigen::Index c = 0; c < ref.cols(); ++c) {
        EXPECT_EQ(tape.pre[static_cast<std::size_t>(l)](v, c), ref(0, c));
      }
    }
  }
}

TEST(IsolatedIdentity, FullMatchesLightBitwise) {
  Graph g = random_graph(40, 25, 6, 43);
  auto edges = g.edges();
  auto buckets = compute_buckets(g.adjacency());
  auto light = apply_plan(g.features(), edges, edges, buckets, AugmentPlan::node_dup_light(Selector::Isolated));
  auto full = apply_plan(g.features(), edges, edges, buckets, AugmentPlan::node_dup(Selector::Isolated, 1));
  LinkModel model(6, enc(LayerKind::SeparateWeights, 2, 8), dec(DecoderKind::InnerProduct), 10);
  DenseMatrix hl = model.encode(light.message, light.features);
  DenseMatrix hf = model.encode(full.message, full.features);
  for (NodeId v : light.selected) {
    for (Eigen::Index c = 0; c < hl.cols(); ++c) EXPECT_EQ(hl(v, c), hf(v, c));
  }
}

TEST(Encoder, PermutationEquivariance) {
  Graph g = random_graph(10, 14, 4, 44);
  std::vector<NodeId> perm(10);
  for (int i = 0; i < 10; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng(5);
  shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> pe;
  for (const auto& e : g.edges()) pe.push_back({perm[e.u], perm[e.v]});
  DenseMatrix px(10, 4);
  for (int v = 0; v < 10; ++v) px.row(perm[static_cast<std::size_t>(v)]) = g.features().row(v);
  for (auto kind : {LayerKind::SeparateWeights, LayerKind::SharedWeights}) {
    LinkModel model(4, enc(kind, 2, 5), dec(DecoderKind::InnerProduct), 11);
    DenseMatrix h = model.encode(g.adjacency(), g.features());
    DenseMatrix ph = model.encode(Adjacency::from_edges(10, pe, false), px);
    for (int v = 0; v < 10; ++v) {
      for (Eigen::Index c = 0; c < 5; ++c) {
        EXPECT_NEAR(ph(perm[static_cast<std::size_t>(v)], c), h(v, c), 1e-12);
      }
    }
  }
}

TEST(Encoder, ZeroFeaturesGiveZeroEmbeddings) {
  Graph g = random_graph(10, 14, 4, 45);
  LinkModel model(4, enc(LayerKind::SeparateWeights, 2, 5), dec(DecoderKind::InnerProduct), 12);
  DenseMatrix h = model.encode(g.adjacency(), DenseMatrix::Zero(10, 4));
  EXPECT_EQ(h.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Encoder, SingleLayerHasNoActivation) {
  Graph g = random_graph(10, 14, 4, 46);
  LinkModel model(4, enc(LayerKind::SeparateWeights, 1, 5), dec(DecoderKind::InnerProduct), 13);
  DenseMatrix h = model.encode(g.adjacency(), g.features());
  DenseMatrix ref = sage_layer(g.features(), g.adjacency(), model.params().at("enc.0.self").value,
                               model.params().at("enc.0.neigh").value);
  EXPECT_TRUE(bitwise_equal(h, ref));
  EXPECT_LT(h.minCoeff(), 0.0);
}

TEST(Encoder, DropoutKeyDeterminesMasks) {
  Graph g = random_graph(10, 14, 4, 47);
  LinkModel model(4, enc(LayerKind::SeparateWeights, 2, 5, 0.5), dec(DecoderKind::InnerProduct), 14);
  auto a = model.encode(g.adjacency(), g.features(), DropoutKey{1, 3}, nullptr);
  auto b = model.encode(g.adjacency(), g.features(), DropoutKey{1, 3}, nullptr);
  auto c = model.encode(g.adjacency(), g.features(), DropoutKey{1, 4}, nullptr);
  EXPECT_TRUE(bitwise_equal(a, b));
  EXPECT_FALSE(bitwise_equal(a, c));
  EXPECT_TRUE(bitwise_equal(model.encode(g.adjacency(), g.features()),
                            model.encode(g.adjacency(), g.features(), std::nullopt, nullptr)));
}

TEST(Decoder, InnerProductExample) {
  LinkModel model(2, enc(LayerKind::SeparateWeights, 1, 2), dec(DecoderKind::InnerProduct), 15);
  std::vector<double> u{1.0, 1.0}, v{1.0, 1.0};
  EXPECT_DOUBLE_EQ(model.decode(u, v), 1.0 / (1.0 + std::exp(-2.0)));
}

TEST(Decoder, Symmetric) {
  LinkModel model(3, enc(LayerKind::SeparateWeights, 1, 4), dec(DecoderKind::Mlp, 6), 16);
  DenseMatrix h = random_matrix(2, 4, 48);
  std::vector<double> a(h.row(0).begin(), h.row(0).end());
  std::vector<double> b(h.row(1).begin(), h.row(1).end());
  EXPECT_EQ(model.logit(a, b), model.logit(b, a));
  EXPECT_GT(model.decode(a, b), 0.0);
  EXPECT_LT(model.decode(a, b), 1.0);
  std::vector<double> short_row{1.0};
  EXPECT_THROW(model.logit(a, short_row), std::invalid_argument);
}

TEST(Model, ConfigValidation) {
  EXPECT_THROW(enc(LayerKind::SeparateWeights, 0, 4).validate(), ConfigError);
  EXPECT_THROW(enc(LayerKind::SeparateWeights, 2, 0).validate(), ConfigError);
  EXPECT_THROW(enc(LayerKind::SeparateWeights, 2, 4, 1.0).validate(), ConfigError);
  EXPECT_THROW(dec(DecoderKind::Mlp, -1).validate(), ConfigError);
  EXPECT_EQ(layer_kind_from_string(to_string(LayerKind::SharedWeights)), LayerKind::SharedWeights);
  EXPECT_EQ(decoder_kind_from_string(to_string(DecoderKind::Mlp)), DecoderKind::Mlp);
}

TEST(Model, CheckpointRoundTrip) {
  LinkModel model(5, enc(LayerKind::SeparateWeights, 2, 6), dec(DecoderKind::Mlp, 3), 17);
  model.params().set_step(12);
  auto path = std::filesystem::temp_directory_path() / "nodedup_test_ckpt.bin";
  save_checkpoint(path, model.params(), 99);
  Checkpoint ck = load_checkpoint(path);
  std::filesystem::remove(path);
  EXPECT_EQ(ck.rng_seed, 99u);
  EXPECT_EQ(ck.params.step(), 12u);
  EXPECT_TRUE(ck.params.same_values(model.params()));
  LinkModel restored(std::move(ck.params), 5, model.encoder_config(), model.decoder_config());
  Graph g = random_graph(8, 10, 5, 49);
  EXPECT_TRUE(bitwise_equal(restored.encode(g.adjacency(), g.features()),
                            model.encode(g.adjacency(), g.features())));
  EXPECT_THROW(LinkModel(restored.params(), 5, enc(LayerKind::SeparateWeights, 3, 6),
                         model.decoder_config()),
               DataError);
}

TEST(Model, CheckpointRejectsGarbage) {
  auto path = std::filesystem::temp_directory_path() / "nodedup_test_bad.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a checkpoint";
  }
  EXPECT_THROW(load_checkpoint(path), DataError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace nodedup
