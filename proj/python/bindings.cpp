#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nodedup/augment.hpp"
#include "nodedup/config.hpp"
#include "nodedup/errors.hpp"
#include "nodedup/eval.hpp"
#include "nodedup/experiment.hpp"
#include "nodedup/heuristics.hpp"
#include "nodedup/io.hpp"
#include "nodedup/serialize.hpp"
#include "nodedup/split.hpp"
#include "nodedup/training.hpp"

namespace py = pybind11;
using namespace nodedup;

namespace {

using PyEdges = std::vector<std::pair<NodeId, NodeId>>;

std::vector<Edge> to_edges(const PyEdges& in) {
  std::vector<Edge> out;
  out.reserve(in.size());
  for (const auto& [u, v] : in) out.push_back({u, v});
  return out;
}

PyEdges from_edges(const std::vector<Edge>& in) {
  PyEdges out;
  out.reserve(in.size());
  for (const auto& e : in) out.emplace_back(e.u, e.v);
  return out;
}

// Reports cross the boundary as plain dicts, same layout as report.json.
py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::vector<std::string> bucket_names(const DegreeBuckets& b) {
  std::vector<std::string> out;
  out.reserve(b.size());
  for (Bucket x : b.bucket) out.emplace_back(to_string(x));
  return out;
}

AugmentPlan make_plan(const std::string& selector, int times, const std::string& mode,
                      bool aggregation, bool supervision, std::uint64_t seed,
                      std::optional<std::size_t> random_count) {
  AugmentPlan p;
  p.selector = selector_from_string(selector);
  p.times = p.selector == Selector::None ? 0 : times;
  p.mode = dup_mode_from_string(mode);
  p.use_in_aggregation = aggregation;
  p.use_in_supervision = supervision;
  p.seed = seed;
  p.random_count = random_count;
  p.validate();
  return p;
}

py::dict augmented_to_dict(const AugmentedGraph& g) {
  py::dict d;
  d["num_original"] = g.num_original;
  d["num_nodes"] = g.num_nodes();
  d["message_edges"] = from_edges(g.message.edges());
  d["features"] = g.features;
  d["origin"] = g.origin;
  d["selected"] = g.selected;
  d["added_message_edges"] = from_edges(g.added_message_edges);
  d["added_supervision"] = from_edges(g.added_supervision);
  d["train_pos"] = from_edges(g.train_pos);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Node duplication for cold-start link prediction";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  py::class_<Graph>(m, "Graph")
      .def(py::init([](std::size_t n, const PyEdges& edges, const DenseMatrix& x) {
             return Graph::build(n, to_edges(edges), x);
           }),
           py::arg("num_nodes"), py::arg("edges"), py::arg("features"))
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("feature_dim", &Graph::feature_dim)
      .def_property_readonly("features", &Graph::features)
      .def("edges", [](const Graph& g) { return from_edges(g.edges()); })
      .def("degree", &Graph::degree, py::arg("v"))
      .def("has_edge", &Graph::has_edge, py::arg("u"), py::arg("v"))
      .def("__repr__", [](const Graph& g) {
        return "<Graph nodes=" + std::to_string(g.num_nodes()) +
               " edges=" + std::to_string(g.num_edges()) + ">";
      });

  m.def(
      "generate_synthetic",
      [](std::size_t num_nodes, double exponent, int min_degree, std::size_t feature_dim,
         std::size_t num_communities, double homophily, double feature_signal, std::uint64_t seed) {
        SynthConfig c;
        c.num_nodes = num_nodes;
        c.exponent = exponent;
        c.min_degree = min_degree;
        c.feature_dim = feature_dim;
        c.num_communities = num_communities;
        c.homophily = homophily;
        c.feature_signal = feature_signal;
        c.seed = seed;
        return generate_synthetic(c).graph;
      },
      py::arg("num_nodes") = 3000, py::arg("exponent") = 2.5, py::arg("min_degree") = 1,
      py::arg("feature_dim") = 32, py::arg("num_communities") = 8, py::arg("homophily") = 0.8,
      py::arg("feature_signal") = 1.0, py::arg("seed") = 0);

  m.def(
      "load_dataset",
      [](const std::filesystem::path& edges, const std::filesystem::path& features,
         bool row_normalize) {
        LoadOptions o;
        o.row_normalize = row_normalize;
        return load_dataset(edges, features, o).graph;
      },
      py::arg("edges"), py::arg("features"), py::arg("row_normalize") = false);

  m.def(
      "buckets",
      [](const Graph& g, int delta) { return bucket_names(compute_buckets(g.adjacency(), delta)); },
      py::arg("graph"), py::arg("delta") = kDefaultDelta,
      "Per-node bucket label: Isolated, LowDegree or Warm.");

  py::class_<DataSplit>(m, "DataSplit")
      .def_readonly("mode", &DataSplit::mode)
      .def_readonly("num_nodes", &DataSplit::num_nodes)
      .def_readonly("seed", &DataSplit::seed)
      .def_property_readonly("message_edges", [](const DataSplit& s) { return from_edges(s.message_edges); })
      .def_property_readonly("train_pos", [](const DataSplit& s) { return from_edges(s.train_pos); })
      .def_property_readonly("valid_pos", [](const DataSplit& s) { return from_edges(s.valid_pos); })
      .def_property_readonly("test_pos", [](const DataSplit& s) { return from_edges(s.test_pos); })
      .def_property_readonly("test_negatives", [](const DataSplit& s) { return s.test_negatives.lists; })
      .def_property_readonly("buckets", [](const DataSplit& s) { return bucket_names(s.buckets); })
      .def("to_json", [](const DataSplit& s) { return to_py(split_to_json(s)); });

  m.def(
      "transductive_split",
      [](const Graph& g, std::uint64_t seed, double valid_frac, double test_frac,
         std::size_t num_negatives) {
        SplitOptions o;
        o.seed = seed;
        o.valid_frac = valid_frac;
        o.test_frac = test_frac;
        o.num_negatives = num_negatives;
        return transductive_split(g, o);
      },
      py::arg("graph"), py::arg("seed") = 0, py::arg("valid_frac") = 0.1,
      py::arg("test_frac") = 0.2, py::arg("num_negatives") = kDefaultEvalNegatives);

  m.def(
      "augment",
      [](const Graph& g, const DataSplit& split, const std::string& selector, int times,
         const std::string& mode, bool aggregation, bool supervision, std::uint64_t seed,
         std::optional<std::size_t> random_count) {
        return augmented_to_dict(augment_for_split(
            g, split, make_plan(selector, times, mode, aggregation, supervision, seed, random_count)));
      },
      py::arg("graph"), py::arg("split"), py::arg("selector") = "cold", py::arg("times") = 1,
      py::arg("mode") = "full", py::arg("aggregation") = true, py::arg("supervision") = true,
      py::arg("seed") = 0, py::arg("random_count") = std::nullopt);

  m.def(
      "hits_at_k",
      [](double pos, const std::vector<double>& negs, std::size_t k) { return hits_at_k(pos, negs, k); },
      py::arg("pos_score"), py::arg("neg_scores"), py::arg("k") = kDefaultHitsK);
  m.def(
      "auc",
      [](const std::vector<double>& pos, const std::vector<double>& neg) { return auc(pos, neg); },
      py::arg("pos_scores"), py::arg("neg_scores"));

  m.def(
      "heuristic_score",
      [](const Graph& g, NodeId u, NodeId v, const std::string& kind) {
        return heuristic_score(g.adjacency(), u, v, heuristic_kind_from_string(kind));
      },
      py::arg("graph"), py::arg("u"), py::arg("v"), py::arg("kind") = "cn");
  m.def(
      "evaluate_heuristic",
      [](const DataSplit& split, const std::string& kind, std::size_t k) {
        EvalOptions o;
        o.k = k;
        return to_py(report_to_json(evaluate_heuristic(split, heuristic_kind_from_string(kind), o)));
      },
      py::arg("split"), py::arg("kind") = "cn", py::arg("k") = kDefaultHitsK);

  m.def(
      "load_config",
      [](std::optional<std::filesystem::path> path, const std::vector<std::string>& overrides) {
        return to_py(config_to_json(load_config(path, overrides)));
      },
      py::arg("path") = std::nullopt, py::arg("overrides") = std::vector<std::string>{},
      "Resolved configuration as a dict.");

  m.def(
      "run",
      [](std::optional<std::filesystem::path> path, const std::vector<std::string>& overrides) {
        const ExperimentConfig c = load_config(path, overrides);
        py::list out;
        {
          py::gil_scoped_release release;
          const DatasetBundle data = load_experiment_dataset(c);
          std::vector<Json> reports;
          for (std::uint64_t seed : c.split.seeds) {
            DataSplit split = make_split(data.graph, c.split, seed);
            SeedRun r = run_seed(data.graph, split, c, c.plan_for(seed), c.encoder);
            if (r.result.history.diverged) throw DivergenceError(r.result.history.divergence_message);
            Json j;
            j["seed"] = seed;
            j["best_epoch"] = r.result.history.best_epoch;
            j["report"] = report_to_json(r.test);
            reports.push_back(std::move(j));
          }
          py::gil_scoped_acquire acquire;
          for (const auto& j : reports) out.append(to_py(j));
        }
        return out;
      },
      py::arg("config") = std::nullopt, py::arg("overrides") = std::vector<std::string>{},
      "Train and test one plan per seed; returns one report dict per seed.");

  m.attr("build_id") = std::string(build_id());
}
