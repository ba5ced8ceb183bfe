#include "nodedup/serialize.hpp"

#include <cstdio>
#include <fstream>

#include "nodedup/errors.hpp"

namespace nodedup {
namespace {

Json edges_to_json(std::span<const Edge> edges) {
  Json a = Json::array();
  for (Edge e : edges) a.push_back({e.u, e.v});
  return a;
}

std::vector<Edge> edges_from_json(const Json& a) {
  std::vector<Edge> out;
  out.reserve(a.size());
  for (const auto& p : a) out.push_back({p.at(0).get<NodeId>(), p.at(1).get<NodeId>()});
  return out;
}

Json negatives_to_json(const NegativeLists& n) {
  return {{"lists", n.lists}, {"shortfall", n.shortfall}};
}

NegativeLists negatives_from_json(const Json& j) {
  NegativeLists n;
  n.lists = j.at("lists").get<std::vector<std::vector<NodeId>>>();
  n.shortfall = j.at("shortfall").get<std::vector<std::size_t>>();
  return n;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

const char* kPairNames[3] = {"WarmWarm", "WarmCold", "ColdCold"};

}  // namespace

Json split_to_json(const DataSplit& s) {
  Json j;
  j["mode"] = s.mode;
  j["num_nodes"] = s.num_nodes;
  j["seed"] = s.seed;
  j["valid_frac"] = s.valid_frac;
  j["test_frac"] = s.test_frac;
  j["num_negatives"] = s.num_negatives;
  j["delta"] = s.buckets.delta;
  j["degree_source"] = std::string(to_string(s.buckets.source));
  j["degrees"] = s.buckets.degrees;
  j["hidden_nodes"] = s.hidden_nodes;
  j["message_edges"] = edges_to_json(s.message_edges);
  j["train_pos"] = edges_to_json(s.train_pos);
  j["valid_pos"] = edges_to_json(s.valid_pos);
  j["test_pos"] = edges_to_json(s.test_pos);
  j["eval_message_edges"] = edges_to_json(s.eval_message_edges);
  j["valid_negatives"] = negatives_to_json(s.valid_negatives);
  j["test_negatives"] = negatives_to_json(s.test_negatives);
  return j;
}

DataSplit split_from_json(const Json& j) {
  try {
    DataSplit s;
    s.mode = j.at("mode").get<std::string>();
    s.num_nodes = j.at("num_nodes").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.valid_frac = j.at("valid_frac").get<double>();
    s.test_frac = j.at("test_frac").get<double>();
    s.num_negatives = j.at("num_negatives").get<std::size_t>();
    s.buckets.delta = j.at("delta").get<int>();
    s.buckets.source = degree_source_from_string(j.at("degree_source").get<std::string>());
    s.buckets.degrees = j.at("degrees").get<std::vector<std::int32_t>>();
    for (auto d : s.buckets.degrees) s.buckets.bucket.push_back(classify_degree(d, s.buckets.delta));
    s.hidden_nodes = j.at("hidden_nodes").get<std::vector<std::uint8_t>>();
    s.message_edges = edges_from_json(j.at("message_edges"));
    s.train_pos = edges_from_json(j.at("train_pos"));
    s.valid_pos = edges_from_json(j.at("valid_pos"));
    s.test_pos = edges_from_json(j.at("test_pos"));
    s.eval_message_edges = edges_from_json(j.at("eval_message_edges"));
    s.valid_negatives = negatives_from_json(j.at("valid_negatives"));
    s.test_negatives = negatives_from_json(j.at("test_negatives"));
    if (s.buckets.degrees.size() != s.num_nodes) throw DataError("split degrees do not cover every node");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed split file: ") + e.what());
  }
}

Json report_to_json(const EvalReport& r) {
  Json j;
  j["k"] = r.k;
  j["seed"] = r.seed;
  Json rows = Json::object();
  for (std::size_t i = 0; i < kReportRows; ++i) {
    rows[std::string(to_string(static_cast<ReportRow>(i)))] = {{"hits", r.rows[i].hits},
                                                               {"positives", r.rows[i].positives},
                                                               {"shortfall", r.rows[i].shortfall}};
  }
  j["hits"] = rows;
  if (r.pair_auc) {
    Json a = Json::object();
    for (std::size_t c = 0; c < 3; ++c) {
      const auto& p = (*r.pair_auc)[c];
      a[kPairNames[c]] = {{"auc", p.auc}, {"positives", p.positives}, {"negatives", p.negatives}};
    }
    j["pair_auc"] = a;
  }
  return j;
}

Json aggregate_to_json(const AggregateReport& r) {
  Json j;
  j["k"] = r.k;
  j["seeds"] = r.seeds;
  Json rows = Json::object();
  for (std::size_t i = 0; i < kReportRows; ++i) {
    rows[std::string(to_string(static_cast<ReportRow>(i)))] = {{"mean", r.hits[i].mean},
                                                               {"std", r.hits[i].stddev},
                                                               {"positives", r.positives[i]}};
  }
  j["hits"] = rows;
  if (r.pair_auc) {
    Json a = Json::object();
    for (std::size_t c = 0; c < 3; ++c) {
      a[kPairNames[c]] = {{"mean", (*r.pair_auc)[c].mean}, {"std", (*r.pair_auc)[c].stddev}};
    }
    j["pair_auc"] = a;
  }
  return j;
}

Json history_to_json(const TrainHistory& h) {
  Json j;
  j["best_epoch"] = h.best_epoch;
  j["best_valid_hits"] = h.best_valid_hits;
  j["epochs_run"] = h.epochs.size();
  j["supervised_pairs_per_epoch"] = h.supervised_pairs_per_epoch;
  j["negative_shortfall"] = h.negative_shortfall;
  j["diverged"] = h.diverged;
  if (h.diverged) j["divergence_message"] = h.divergence_message;
  Json loss = Json::array();
  Json valid = Json::array();
  for (const auto& e : h.epochs) {
    loss.push_back(e.loss);
    valid.push_back(e.valid_hits ? Json(*e.valid_hits) : Json(nullptr));
  }
  j["loss"] = loss;
  j["valid_hits"] = valid;
  return j;
}

Json timing_to_json(const TrainHistory& h) {
  Json j;
  j["preprocess_seconds"] = h.preprocess_seconds;
  j["train_seconds"] = h.train_seconds;
  j["epochs_run"] = h.epochs.size();
  j["seconds_per_epoch"] = h.epochs.empty() ? 0.0 : h.train_seconds / static_cast<double>(h.epochs.size());
  return j;
}

Json augment_summary(const AugmentedGraph& g) {
  Json j;
  j["num_original"] = g.num_original;
  j["num_nodes"] = g.num_nodes();
  j["num_duplicates"] = g.num_duplicates();
  j["num_selected"] = g.selected.size();
  j["message_edges"] = g.message.num_edges();
  j["self_loops"] = g.message.num_self_loops();
  j["added_message_edges"] = g.added_message_edges.size();
  j["added_supervision"] = g.added_supervision.size();
  j["train_pos"] = g.train_pos.size();
  j["selected"] = g.selected;
  return j;
}

std::string report_tsv(const EvalReport& r) {
  std::string out = "row\thits@" + std::to_string(r.k) + "\tpositives\tshortfall\n";
  for (std::size_t i = 0; i < kReportRows; ++i) {
    out += std::string(to_string(static_cast<ReportRow>(i))) + "\t" + pct(r.rows[i].hits) + "\t" +
           std::to_string(r.rows[i].positives) + "\t" + std::to_string(r.rows[i].shortfall) + "\n";
  }
  if (r.pair_auc) {
    for (std::size_t c = 0; c < 3; ++c) {
      out += std::string("auc_") + kPairNames[c] + "\t" + pct((*r.pair_auc)[c].auc) + "\t" +
             std::to_string((*r.pair_auc)[c].positives) + "\t-\n";
    }
  }
  return out;
}

std::string aggregate_tsv(const AggregateReport& r) {
  std::string out = "row\thits@" + std::to_string(r.k) + "_mean\tstd\tpositives\n";
  for (std::size_t i = 0; i < kReportRows; ++i) {
    out += std::string(to_string(static_cast<ReportRow>(i))) + "\t" + pct(r.hits[i].mean) + "\t" +
           pct(r.hits[i].stddev) + "\t" + std::to_string(r.positives[i]) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace nodedup
