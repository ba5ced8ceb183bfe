#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nodedup/config.hpp"
#include "nodedup/errors.hpp"

namespace nodedup {
namespace {

ExperimentConfig synth_config(std::vector<std::string> overrides = {}) {
  overrides.insert(overrides.begin(), "dataset.synth.num_nodes=100");
  return load_config(std::nullopt, overrides);
}

TEST(Config, Defaults) {
  auto c = synth_config();
  EXPECT_EQ(c.split.mode, "transductive");
  EXPECT_EQ(c.split.seeds, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(c.split.num_negatives, 500u);
  EXPECT_EQ(c.encoder.num_layers, 2);
  EXPECT_EQ(c.encoder.hidden_dim, 256);
  EXPECT_EQ(c.encoder.dropout, 0.5);
  EXPECT_EQ(c.train.max_epochs, 500);
  EXPECT_EQ(c.train.patience, 50);
  EXPECT_EQ(c.eval.k, 10u);
  EXPECT_TRUE(c.augment.is_identity());
}

TEST(Config, OverridesParseJsonValues) {
  auto c = synth_config({"train.lr=0.01", "split.seeds=[1,2,3]", "augment.selector=cold",
                         "model.encoder.kind=shared_weights", "eval.auc_pairs=true"});
  EXPECT_EQ(c.train.lr, 0.01);
  EXPECT_EQ(c.split.seeds.size(), 3u);
  EXPECT_EQ(c.augment.selector, Selector::Cold);
  EXPECT_EQ(c.augment.times, 1);
  EXPECT_EQ(c.encoder.kind, LayerKind::SharedWeights);
  EXPECT_TRUE(c.eval.auc_pairs);
}

TEST(Config, ApplyOverrideCreatesNesting) {
  Json j = Json::object();
  apply_override(j, "a.b.c=3");
  apply_override(j, "a.d=hello");
  EXPECT_EQ(j["a"]["b"]["c"], 3);
  EXPECT_EQ(j["a"]["d"], "hello");
  EXPECT_THROW(apply_override(j, "novalue"), ConfigError);
  EXPECT_THROW(apply_override(j, "a..b=1"), ConfigError);
  EXPECT_THROW(apply_override(j, "a.b.c.d=1"), ConfigError);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(synth_config({"train.learning_rate=0.1"}), ConfigError);
  EXPECT_THROW(synth_config({"bogus=1"}), ConfigError);
  EXPECT_THROW(synth_config({"dataset.synth.nodes=5"}), ConfigError);
  try {
    synth_config({"model.encoder.width=5"});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("model.encoder.width"), std::string::npos) << e.what();
  }
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(synth_config({"split.mode=sideways"}), ConfigError);
  EXPECT_THROW(synth_config({"split.valid_frac=0.5", "split.test_frac=0.5"}), ConfigError);
  EXPECT_THROW(synth_config({"train.lr=\"fast\""}), ConfigError);
  EXPECT_THROW(synth_config({"augment.selector=lukewarm"}), ConfigError);
  EXPECT_THROW(synth_config({"augment.mode=light", "augment.selector=cold", "augment.times=2"}),
               ConfigError);
  EXPECT_THROW(synth_config({"split.seeds=[]"}), ConfigError);
  EXPECT_THROW(load_config(std::nullopt, {}), ConfigError);
  EXPECT_THROW(load_config(std::filesystem::path("/nonexistent/config.json"), {}), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  auto c = synth_config({"augment.selector=warm", "augment.times=2", "split.mode=inductive",
                         "model.decoder.kind=mlp", "model.decoder.mlp_hidden=16",
                         "train.eval_every=5", "split.degree_source=train_plus_valid"});
  Json j = config_to_json(c);
  auto back = config_from_json(j);
  EXPECT_EQ(config_to_json(back).dump(), j.dump());
  EXPECT_EQ(back.augment.selector, Selector::Warm);
  EXPECT_EQ(back.augment.times, 2);
  EXPECT_EQ(back.split.mode, "inductive");
  EXPECT_EQ(back.decoder.kind, DecoderKind::Mlp);
  EXPECT_EQ(back.split.degree_source, DegreeSource::TrainPlusValid);
}

TEST(Config, FileThenOverrides) {
  auto path = std::filesystem::temp_directory_path() / "nodedup_config_test.json";
  {
    std::ofstream out(path);
    out << R"({"dataset": {"synth": {"num_nodes": 50}}, "train": {"lr": 0.5}})";
  }
  auto c = load_config(path, {"train.lr=0.25"});
  EXPECT_EQ(c.dataset.synth->num_nodes, 50u);
  EXPECT_EQ(c.train.lr, 0.25);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  EXPECT_THROW(load_config(path, {}), ConfigError);
  std::filesystem::remove(path);
}

TEST(Config, PlanAndTrainForSeed) {
  auto c = synth_config({"augment.selector=cold"});
  EXPECT_EQ(c.plan_for(7).seed, 7u);
  EXPECT_EQ(c.train_for(7).seed, 7u);
  EXPECT_FALSE(build_id().empty());
}

}  // namespace
}  // namespace nodedup
