#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nodedup/config.hpp"
#include "nodedup/errors.hpp"
#include "nodedup/eval.hpp"
#include "nodedup/experiment.hpp"
#include "nodedup/heuristics.hpp"
#include "nodedup/io.hpp"
#include "nodedup/params.hpp"
#include "nodedup/serialize.hpp"

namespace fs = std::filesystem;
using namespace nodedup;

namespace {

struct Common {
  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  std::string name;
  int jobs = 0;
};

std::string seed_dir(std::uint64_t seed) { return "seed-" + std::to_string(seed); }

fs::path output_root(const ExperimentConfig& c) {
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("NODEDUP_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

// Every artifact carries the resolved config and the build identifier.
Json envelope(const ExperimentConfig& c, std::string_view kind) {
  Json j;
  j["kind"] = std::string(kind);
  j["build_id"] = std::string(build_id());
  j["config"] = config_to_json(c);
  return j;
}

std::string plan_name(const AugmentPlan& p) {
  if (p.is_identity()) return "baseline";
  std::string s = std::string(to_string(p.selector)) + "-" + std::string(to_string(p.mode)) + "-t" +
                  std::to_string(p.times);
  if (!p.use_in_aggregation) s += "-noagg";
  if (!p.use_in_supervision) s += "-nosup";
  return s;
}

struct Variant {
  std::string name;
  AugmentPlan plan;
  EncoderConfig encoder;
};

struct VariantOutcome {
  std::string name;
  std::vector<SeedRun> runs;
  AggregateReport aggregate;
  bool diverged = false;
};

class Runner {
 public:
  explicit Runner(ExperimentConfig c) : config_(std::move(c)) {
    bundle_ = load_experiment_dataset(config_);
  }

  const ExperimentConfig& config() const { return config_; }
  const Graph& graph() const { return bundle_.graph; }

  const std::vector<DataSplit>& splits() {
    if (splits_.empty()) {
      splits_.resize(config_.split.seeds.size());
      parallel_for(splits_.size(), config_.jobs, [&](std::size_t i) {
        splits_[i] = make_split(graph(), config_.split, config_.split.seeds[i]);
      });
    }
    return splits_;
  }

  VariantOutcome run_variant(const Variant& v, const fs::path& dir) {
    const auto& sp = splits();
    VariantOutcome out;
    out.name = v.name;
    std::vector<std::optional<SeedRun>> runs(sp.size());
    ExperimentConfig resolved = config_;
    resolved.augment = v.plan;
    resolved.encoder = v.encoder;
    parallel_for(sp.size(), config_.jobs, [&](std::size_t i) {
      runs[i] = run_seed(graph(), sp[i], config_, v.plan, v.encoder);
      write_seed(resolved, *runs[i], dir / seed_dir(sp[i].seed));
    });
    for (auto& r : runs) out.runs.push_back(std::move(*r));
    std::vector<EvalReport> reports;
    for (const auto& r : out.runs) {
      reports.push_back(r.test);
      out.diverged = out.diverged || r.result.history.diverged;
    }
    out.aggregate = aggregate(reports);
    Json j = envelope(resolved, "aggregate");
    j["variant"] = v.name;
    j["aggregate"] = aggregate_to_json(out.aggregate);
    write_json(dir / "aggregate.json", j);
    write_text(dir / "aggregate.tsv", aggregate_tsv(out.aggregate));
    return out;
  }

 private:
  static void write_seed(const ExperimentConfig& c, const SeedRun& run, const fs::path& dir) {
    fs::create_directories(dir);
    save_checkpoint(dir / "model.ckpt", run.result.model.params(), run.seed);
    Json h = envelope(c, "history");
    h["seed"] = run.seed;
    h["history"] = history_to_json(run.result.history);
    write_json(dir / "history.json", h);
    Json r = envelope(c, "report");
    r["seed"] = run.seed;
    r["report"] = report_to_json(run.test);
    write_json(dir / "report.json", r);
    write_text(dir / "report.tsv", report_tsv(run.test));
    Json t;
    t["seed"] = run.seed;
    t["timing"] = timing_to_json(run.result.history);
    write_json(dir / "timing.json", t);
  }

  ExperimentConfig config_;
  DatasetBundle bundle_;
  std::vector<DataSplit> splits_;
};

ExperimentConfig resolve(const Common& o) {
  std::optional<fs::path> path;
  if (o.config_path) path = *o.config_path;
  ExperimentConfig c = load_config(path, o.sets);
  if (o.jobs > 0) c.jobs = o.jobs;
  return c;
}

void add_common(CLI::App* app, Common& o) {
  app->add_option("-c,--config", o.config_path, "JSON experiment config");
  app->add_option("--set", o.sets, "Override, e.g. --set train.lr=0.01 (also --train.lr=0.01)");
  app->add_option("-j,--jobs", o.jobs, "Concurrent seed runs");
  app->allow_extras();
}

// Folds "--section.key=value" (or "--key=value") extras into the override list.
void collect_dotted(CLI::App* app, Common& o) {
  for (const auto& arg : app->remaining()) {
    if (arg.rfind("--", 0) == 0 && arg.find('=') != std::string::npos) {
      o.sets.push_back(arg.substr(2));
    } else {
      throw ConfigError("unrecognized argument '" + arg + "'");
    }
  }
}

void report_divergence(const std::vector<VariantOutcome>& outs) {
  for (const auto& v : outs) {
    for (const auto& r : v.runs) {
      if (r.result.history.diverged) {
        throw DivergenceError(v.name + " seed " + std::to_string(r.seed) + ": " +
                              r.result.history.divergence_message);
      }
    }
  }
}

std::string summary_line(const std::string& name, const AggregateReport& a) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-28s iso %6.2f  low %6.2f  warm %6.2f  overall %6.2f", name.c_str(),
                100 * a.hits[0].mean, 100 * a.hits[1].mean, 100 * a.hits[2].mean, 100 * a.hits[3].mean);
  return buf;
}

int cmd_synth(const Common& o) {
  ExperimentConfig c = resolve(o);
  if (!c.dataset.synth) throw ConfigError("synth needs a dataset.synth section");
  SynthInfo info;
  DatasetBundle b = generate_synthetic(*c.dataset.synth, &info);
  const fs::path dir = output_root(c) / "synth" / (o.name.empty() ? b.name : o.name);
  write_edge_list(dir / "edges.tsv", b.graph.edges());
  write_features_text(dir / "features.txt", b.graph.features());
  DegreeBuckets buckets = compute_buckets(b.graph.adjacency(), c.split.delta);
  Json j = envelope(c, "synth");
  j["num_nodes"] = b.graph.num_nodes();
  j["num_edges"] = b.graph.num_edges();
  j["isolated"] = buckets.count(Bucket::Isolated);
  j["low_degree"] = buckets.count(Bucket::LowDegree);
  j["warm"] = buckets.count(Bucket::Warm);
  j["erased_pairs"] = info.erased_pairs;
  j["parity_fixed"] = info.parity_fixed;
  write_json(dir / "synth.json", j);
  std::cout << dir.string() << "\tN=" << b.graph.num_nodes() << "\tM=" << b.graph.num_edges() << "\n";
  return 0;
}

int cmd_split(const Common& o) {
  Runner run(resolve(o));
  const fs::path dir = output_root(run.config()) / "split";
  std::string tsv = "seed\ttrain\tvalid\ttest\tiso\tlow\twarm\tshortfall\n";
  for (const auto& s : run.splits()) {
    Json j = envelope(run.config(), "split");
    j["split"] = split_to_json(s);
    write_json(dir / seed_dir(s.seed) / "split.json", j);
    std::array<std::size_t, 3> per{};
    for (Edge e : s.test_pos) ++per[static_cast<std::size_t>(bucket_edge(e, s.buckets))];
    tsv += std::to_string(s.seed) + "\t" + std::to_string(s.train_pos.size()) + "\t" +
           std::to_string(s.valid_pos.size()) + "\t" + std::to_string(s.test_pos.size()) + "\t" +
           std::to_string(per[0]) + "\t" + std::to_string(per[1]) + "\t" + std::to_string(per[2]) +
           "\t" + std::to_string(s.test_negatives.total_shortfall()) + "\n";
  }
  write_text(dir / "split.tsv", tsv);
  std::cout << tsv;
  return 0;
}

int cmd_augment(const Common& o) {
  Runner run(resolve(o));
  const std::string name = o.name.empty() ? plan_name(run.config().augment) : o.name;
  const fs::path dir = output_root(run.config()) / "augment" / name;
  for (const auto& s : run.splits()) {
    AugmentedGraph g = augment_for_split(run.graph(), s, run.config().plan_for(s.seed));
    Json j = envelope(run.config(), "augment");
    j["seed"] = s.seed;
    j["augment"] = augment_summary(g);
    write_json(dir / seed_dir(s.seed) / "augment.json", j);
    std::cout << "seed " << s.seed << "\tnodes " << g.num_nodes() << "\tmessage_edges "
              << g.message.num_edges() << "\ttrain_pos " << g.train_pos.size() << "\n";
  }
  return 0;
}

int cmd_train(const Common& o) {
  Runner run(resolve(o));
  const auto& c = run.config();
  Variant v{o.name.empty() ? plan_name(c.augment) : o.name, c.augment, c.encoder};
  auto out = run.run_variant(v, output_root(c) / "train" / v.name);
  std::cout << summary_line(v.name, out.aggregate) << "\n";
  std::vector<VariantOutcome> outs;
  outs.push_back(std::move(out));
  report_divergence(outs);
  return 0;
}

int cmd_eval(const Common& o, const std::string& checkpoints) {
  Runner run(resolve(o));
  const auto& c = run.config();
  const std::string name = o.name.empty() ? plan_name(c.augment) : o.name;
  const fs::path dir = output_root(c) / "eval" / name;
  std::vector<EvalReport> reports;
  for (const auto& s : run.splits()) {
    const fs::path ckpt = fs::path(checkpoints) / seed_dir(s.seed) / "model.ckpt";
    Checkpoint cp = load_checkpoint(ckpt);
    LinkModel model(std::move(cp.params), run.graph().feature_dim(), c.encoder, c.decoder);
    AugmentedGraph g = augment_for_split(run.graph(), s, c.plan_for(s.seed));
    EvalOptions opts;
    opts.k = c.eval.k;
    opts.pair_auc = c.eval.auc_pairs;
    EvalReport r = evaluate(model, g, s, opts);
    Json j = envelope(c, "report");
    j["seed"] = s.seed;
    j["report"] = report_to_json(r);
    write_json(dir / seed_dir(s.seed) / "report.json", j);
    write_text(dir / seed_dir(s.seed) / "report.tsv", report_tsv(r));
    reports.push_back(r);
  }
  AggregateReport a = aggregate(reports);
  Json j = envelope(c, "aggregate");
  j["variant"] = name;
  j["aggregate"] = aggregate_to_json(a);
  write_json(dir / "aggregate.json", j);
  write_text(dir / "aggregate.tsv", aggregate_tsv(a));
  std::cout << summary_line(name, a) << "\n";
  return 0;
}

int cmd_heuristic(const Common& o, const std::string& kinds) {
  Runner run(resolve(o));
  const auto& c = run.config();
  std::vector<HeuristicKind> list;
  if (kinds == "all") {
    list = {HeuristicKind::CommonNeighbors, HeuristicKind::AdamicAdar, HeuristicKind::ResourceAllocation};
  } else {
    list = {heuristic_kind_from_string(kinds)};
  }
  for (HeuristicKind k : list) {
    const std::string name(to_string(k));
    const fs::path dir = output_root(c) / "heuristic" / name;
    std::vector<EvalReport> reports;
    for (const auto& s : run.splits()) {
      EvalOptions opts;
      opts.k = c.eval.k;
      opts.pair_auc = c.eval.auc_pairs;
      EvalReport r = evaluate_heuristic(s, k, opts);
      Json j = envelope(c, "report");
      j["heuristic"] = name;
      j["seed"] = s.seed;
      j["report"] = report_to_json(r);
      write_json(dir / seed_dir(s.seed) / "report.json", j);
      write_text(dir / seed_dir(s.seed) / "report.tsv", report_tsv(r));
      reports.push_back(r);
    }
    AggregateReport a = aggregate(reports);
    Json j = envelope(c, "aggregate");
    j["variant"] = name;
    j["aggregate"] = aggregate_to_json(a);
    write_json(dir / "aggregate.json", j);
    write_text(dir / "aggregate.tsv", aggregate_tsv(a));
    std::cout << summary_line(name, a) << "\n";
  }
  return 0;
}

int cmd_ablate(const Common& o, const std::string& grid) {
  Runner run(resolve(o));
  const auto& c = run.config();
  std::vector<Variant> variants;
  if (grid == "steps") {
    for (const auto& v : default_ablation_variants()) variants.push_back({v.name, v.plan, c.encoder});
  } else if (grid == "frequency") {
    variants.push_back({"baseline", AugmentPlan::baseline(), c.encoder});
    for (Selector s : {Selector::Isolated, Selector::Cold, Selector::MidWarm, Selector::Warm}) {
      for (int t : {1, 2, 3}) {
        AugmentPlan p = AugmentPlan::node_dup(s, t);
        variants.push_back({plan_name(p), p, c.encoder});
      }
    }
  } else {
    throw ConfigError("unknown ablation grid '" + grid + "' (steps, frequency)");
  }
  const fs::path dir = output_root(c) / "ablate" / grid;
  std::vector<VariantOutcome> outs;
  for (const auto& v : variants) {
    outs.push_back(run.run_variant(v, dir / v.name));
    std::cout << summary_line(v.name, outs.back().aggregate) << "\n";
  }
  Json j = envelope(c, "ablation");
  j["grid"] = grid;
  Json rows = Json::array();
  std::string tsv = "variant\tIsolated\tLowDegree\tWarm\tOverall\n";
  for (const auto& out : outs) {
    rows.push_back({{"variant", out.name}, {"aggregate", aggregate_to_json(out.aggregate)}});
    tsv += out.name;
    for (std::size_t r = 0; r < kReportRows; ++r) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "\t%.2f", 100 * out.aggregate.hits[r].mean);
      tsv += buf;
    }
    tsv += "\n";
  }
  j["variants"] = rows;
  write_json(dir / "ablation.json", j);
  write_text(dir / "ablation.tsv", tsv);
  if (grid == "frequency") {
    // Selector x times matrix of Isolated and Overall Hits@K.
    std::map<std::string, std::map<int, const VariantOutcome*>> m;
    for (std::size_t i = 1; i < outs.size(); ++i) {
      m[std::string(to_string(variants[i].plan.selector))][variants[i].plan.times] = &outs[i];
    }
    std::string mat = "selector\tt1_iso\tt2_iso\tt3_iso\tt1_overall\tt2_overall\tt3_overall\n";
    for (const auto& [sel, row] : m) {
      mat += sel;
      for (std::size_t col : {0, 3}) {
        for (int t : {1, 2, 3}) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "\t%.2f", 100 * row.at(t)->aggregate.hits[col].mean);
          mat += buf;
        }
      }
      mat += "\n";
    }
    write_text(dir / "matrix.tsv", mat);
  }
  report_divergence(outs);
  return 0;
}

int cmd_bench(const Common& o) {
  Runner run(resolve(o));
  const auto& c = run.config();
  std::vector<Variant> variants = {{"baseline", AugmentPlan::baseline(), c.encoder},
                                   {"nodedup", AugmentPlan::node_dup(), c.encoder},
                                   {"nodedup_light", AugmentPlan::node_dup_light(), c.encoder}};
  const fs::path dir = output_root(c) / "bench";
  std::vector<VariantOutcome> outs;
  std::string timing = "variant\tpreprocess_s\ttrain_s\ts_per_epoch\tepochs\n";
  Json tj = Json::array();
  for (const auto& v : variants) {
    outs.push_back(run.run_variant(v, dir / v.name));
    double pre = 0, tr = 0, per = 0, ep = 0;
    for (const auto& r : outs.back().runs) {
      const auto& h = r.result.history;
      pre += h.preprocess_seconds;
      tr += h.train_seconds;
      ep += static_cast<double>(h.epochs.size());
      per += h.epochs.empty() ? 0.0 : h.train_seconds / static_cast<double>(h.epochs.size());
    }
    const double n = static_cast<double>(outs.back().runs.size());
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.3f\t%.6f\t%.1f\n", v.name.c_str(), pre / n, tr / n,
                  per / n, ep / n);
    timing += buf;
    tj.push_back({{"variant", v.name},
                  {"preprocess_seconds", pre / n},
                  {"train_seconds", tr / n},
                  {"seconds_per_epoch", per / n},
                  {"epochs", ep / n}});
    std::cout << summary_line(v.name, outs.back().aggregate) << "\n";
  }
  Json j = envelope(c, "bench");
  Json rows = Json::array();
  for (const auto& out : outs) {
    rows.push_back({{"variant", out.name}, {"aggregate", aggregate_to_json(out.aggregate)}});
  }
  j["variants"] = rows;
  write_json(dir / "bench.json", j);
  write_json(dir / "timing.json", Json{{"timing", tj}});
  write_text(dir / "timing.tsv", timing);
  std::cout << timing;
  report_divergence(outs);
  return 0;
}

int fail(int code, std::string_view kind, const std::string& message) {
  Json j{{"error", std::string(kind)}, {"exit_code", code}, {"message", message}};
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cold-start link prediction with node duplication"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(build_id()));

  Common o;
  std::string checkpoints;
  std::string kinds = "all";
  std::string grid = "steps";

  auto* synth = app.add_subcommand("synth", "Generate a synthetic long-tailed graph");
  auto* split = app.add_subcommand("split", "Write train/valid/test splits and negatives");
  auto* augment = app.add_subcommand("augment", "Apply the augmentation plan and report counts");
  auto* train = app.add_subcommand("train", "Train and evaluate one plan over all seeds");
  auto* eval = app.add_subcommand("eval", "Re-evaluate saved checkpoints");
  auto* heuristic = app.add_subcommand("heuristic", "Rank with CN / AA / RA");
  auto* ablate = app.add_subcommand("ablate", "Run an ablation grid");
  auto* bench = app.add_subcommand("bench", "Baseline vs NodeDup vs NodeDup(L) with timings");
  for (auto* sub : {synth, split, augment, train, eval, heuristic, ablate, bench}) add_common(sub, o);
  for (auto* sub : {synth, augment, train, eval}) sub->add_option("--name", o.name, "Run name");
  eval->add_option("--checkpoints", checkpoints, "Directory holding seed-*/model.ckpt")->required();
  heuristic->add_option("--kind", kinds, "cn, aa, ra or all");
  ablate->add_option("--grid", grid, "steps (w/o Step II / III) or frequency (selector x times)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "config", e.what());
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    collect_dotted(active, o);
    if (active == synth) return cmd_synth(o);
    if (active == split) return cmd_split(o);
    if (active == augment) return cmd_augment(o);
    if (active == train) return cmd_train(o);
    if (active == eval) return cmd_eval(o, checkpoints);
    if (active == heuristic) return cmd_heuristic(o, kinds);
    if (active == ablate) return cmd_ablate(o, grid);
    if (active == bench) return cmd_bench(o);
  } catch (const ConfigError& e) {
    return fail(2, "config", e.what());
  } catch (const DataError& e) {
    return fail(3, "data", e.what());
  } catch (const DivergenceError& e) {
    return fail(4, "divergence", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
  return 0;
}
