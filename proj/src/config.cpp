#include "nodedup/config.hpp"

#include <fstream>
#include <set>

#include "nodedup/errors.hpp"

#ifndef NODEDUP_BUILD_ID
#define NODEDUP_BUILD_ID "unknown"
#endif

namespace nodedup {
namespace {

// Reads keys from one JSON object and rejects anything left over.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("invalid value for " + where(key) + ": " + j_.at(key).dump());
    }
  }

  template <typename T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T v{};
    read(key, v);
    out = v;
  }

  template <typename T>
  void read_enum(const char* key, T& out, T (*parse)(std::string_view)) {
    std::optional<std::string> s;
    read(key, s);
    if (s) out = parse(*s);
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& child(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string where(std::string_view key) const {
    if (path_.empty()) return std::string(key);
    return key.empty() ? path_ : path_ + "." + std::string(key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + where(k) + "'");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

template <typename F>
auto rethrow_as_config(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

SplitOptions SplitConfig::options(std::uint64_t seed) const {
  SplitOptions o;
  o.valid_frac = valid_frac;
  o.test_frac = test_frac;
  o.seed = seed;
  o.num_negatives = num_negatives;
  o.delta = delta;
  o.degree_source = degree_source;
  return o;
}

void ExperimentConfig::validate() const {
  if (dataset.synth) {
    dataset.synth->validate();
  } else if (dataset.edges.empty() || dataset.features.empty()) {
    throw ConfigError("dataset.edges and dataset.features are required unless dataset.synth is set");
  }
  if (split.mode != "transductive" && split.mode != "inductive") {
    throw ConfigError("split.mode must be 'transductive' or 'inductive'");
  }
  if (split.valid_frac < 0.0 || split.test_frac < 0.0 || split.valid_frac + split.test_frac >= 1.0) {
    throw ConfigError("split.valid_frac and split.test_frac must be >= 0 and sum to < 1");
  }
  if (!(split.new_node_frac > 0.0 && split.new_node_frac < 1.0)) {
    throw ConfigError("split.new_node_frac must be in (0, 1)");
  }
  if (split.seeds.empty()) throw ConfigError("split.seeds must not be empty");
  if (split.delta < 0) throw ConfigError("split.delta must be >= 0");
  rethrow_as_config("augment", [&] { augment.validate(); });
  rethrow_as_config("model.encoder", [&] { encoder.validate(); });
  rethrow_as_config("model.decoder", [&] { decoder.validate(); });
  train.validate();
  if (eval.k < 1) throw ConfigError("eval.k must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

AugmentPlan ExperimentConfig::plan_for(std::uint64_t seed) const {
  AugmentPlan p = augment;
  p.seed = seed;
  return p;
}

TrainConfig ExperimentConfig::train_for(std::uint64_t seed) const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

Json plan_to_json(const AugmentPlan& p) {
  Json j;
  j["selector"] = std::string(to_string(p.selector));
  j["times"] = p.times;
  j["mode"] = std::string(to_string(p.mode));
  j["aggregation"] = p.use_in_aggregation;
  j["supervision"] = p.use_in_supervision;
  j["random_count"] = p.random_count ? Json(*p.random_count) : Json(nullptr);
  return j;
}

AugmentPlan plan_from_json(const Json& j) {
  AugmentPlan p;
  Section s(j, "augment");
  s.read_enum("selector", p.selector, selector_from_string);
  s.read("times", p.times);
  s.read_enum("mode", p.mode, dup_mode_from_string);
  s.read("aggregation", p.use_in_aggregation);
  s.read("supervision", p.use_in_supervision);
  s.read("random_count", p.random_count);
  s.finish();
  // A selector alone implies one round.
  if (p.selector != Selector::None && !j.contains("times")) p.times = 1;
  return p;
}

Json synth_to_json(const SynthConfig& c) {
  Json j;
  j["num_nodes"] = c.num_nodes;
  j["exponent"] = c.exponent;
  j["min_degree"] = c.min_degree;
  j["max_degree"] = c.max_degree;
  j["feature_dim"] = c.feature_dim;
  j["num_communities"] = c.num_communities;
  j["homophily"] = c.homophily;
  j["feature_signal"] = c.feature_signal;
  j["seed"] = c.seed;
  return j;
}

SynthConfig synth_from_json(const Json& j) {
  SynthConfig c;
  Section s(j, "dataset.synth");
  s.read("num_nodes", c.num_nodes);
  s.read("exponent", c.exponent);
  s.read("min_degree", c.min_degree);
  s.read("max_degree", c.max_degree);
  s.read("feature_dim", c.feature_dim);
  s.read("num_communities", c.num_communities);
  s.read("homophily", c.homophily);
  s.read("feature_signal", c.feature_signal);
  s.read("seed", c.seed);
  s.finish();
  return c;
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  Section root(j, "");
  if (root.has("dataset")) {
    Section d(root.child("dataset"), "dataset");
    d.read("edges", c.dataset.edges);
    d.read("features", c.dataset.features);
    d.read("row_normalize", c.dataset.row_normalize);
    d.read("name", c.dataset.name);
    if (d.has("synth") && !d.child("synth").is_null()) c.dataset.synth = synth_from_json(d.child("synth"));
    d.finish();
  }
  if (root.has("split")) {
    Section s(root.child("split"), "split");
    s.read("mode", c.split.mode);
    s.read("valid_frac", c.split.valid_frac);
    s.read("test_frac", c.split.test_frac);
    s.read("new_node_frac", c.split.new_node_frac);
    s.read("seeds", c.split.seeds);
    s.read("num_negatives", c.split.num_negatives);
    s.read("delta", c.split.delta);
    s.read_enum("degree_source", c.split.degree_source, degree_source_from_string);
    s.finish();
  }
  if (root.has("augment")) c.augment = plan_from_json(root.child("augment"));
  if (root.has("model")) {
    Section m(root.child("model"), "model");
    if (m.has("encoder")) {
      Section e(m.child("encoder"), "model.encoder");
      e.read_enum("kind", c.encoder.kind, layer_kind_from_string);
      e.read("layers", c.encoder.num_layers);
      e.read("hidden", c.encoder.hidden_dim);
      e.read("dropout", c.encoder.dropout);
      e.finish();
    }
    if (m.has("decoder")) {
      Section d(m.child("decoder"), "model.decoder");
      d.read_enum("kind", c.decoder.kind, decoder_kind_from_string);
      d.read("mlp_hidden", c.decoder.mlp_hidden);
      d.finish();
    }
    m.finish();
  }
  if (root.has("train")) {
    Section t(root.child("train"), "train");
    t.read("lr", c.train.lr);
    t.read("max_epochs", c.train.max_epochs);
    t.read("patience", c.train.patience);
    t.read("negative_rate", c.train.negative_rate);
    t.read("eval_every", c.train.eval_every);
    t.finish();
  }
  if (root.has("eval")) {
    Section e(root.child("eval"), "eval");
    e.read("k", c.eval.k);
    e.read("auc_pairs", c.eval.auc_pairs);
    e.finish();
  }
  root.read("output_dir", c.output_dir);
  root.read("jobs", c.jobs);
  root.finish();
  c.train.eval_k = c.eval.k;
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  Json d;
  if (c.dataset.synth) {
    d["synth"] = synth_to_json(*c.dataset.synth);
  } else {
    d["edges"] = c.dataset.edges;
    d["features"] = c.dataset.features;
    d["row_normalize"] = c.dataset.row_normalize;
  }
  d["name"] = c.dataset.name;
  j["dataset"] = d;
  j["split"] = {{"mode", c.split.mode},
                {"valid_frac", c.split.valid_frac},
                {"test_frac", c.split.test_frac},
                {"new_node_frac", c.split.new_node_frac},
                {"seeds", c.split.seeds},
                {"num_negatives", c.split.num_negatives},
                {"delta", c.split.delta},
                {"degree_source", std::string(to_string(c.split.degree_source))}};
  j["augment"] = plan_to_json(c.augment);
  j["model"] = {{"encoder",
                 {{"kind", std::string(to_string(c.encoder.kind))},
                  {"layers", c.encoder.num_layers},
                  {"hidden", c.encoder.hidden_dim},
                  {"dropout", c.encoder.dropout}}},
                {"decoder",
                 {{"kind", std::string(to_string(c.decoder.kind))},
                  {"mlp_hidden", c.decoder.mlp_hidden}}}};
  j["train"] = {{"lr", c.train.lr},
                {"max_epochs", c.train.max_epochs},
                {"patience", c.train.patience},
                {"negative_rate", c.train.negative_rate},
                {"eval_every", c.train.eval_every}};
  j["eval"] = {{"k", c.eval.k}, {"auc_pairs", c.eval.auc_pairs}};
  j["output_dir"] = c.output_dir;
  j["jobs"] = c.jobs;
  return j;
}

void apply_override(Json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  Json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("override key '" + key + "' descends into a non-object");
      *node = Json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides) {
  Json j = Json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file " + path->string());
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path->string() + ": " + e.what());
    }
  }
  for (const auto& o : overrides) apply_override(j, o);
  ExperimentConfig c = config_from_json(j);
  c.validate();
  return c;
}

std::string_view build_id() { return NODEDUP_BUILD_ID; }

}  // namespace nodedup
