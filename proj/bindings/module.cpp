// Python bindings for the trip-speed analysis core. The surface mirrors the
// C++ operations: dataset construction, matching-based clustering, consensus
// model-order selection, the rank-sum comparison, and the full pipeline.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "micromob/cluster.hpp"
#include "micromob/consensus.hpp"
#include "micromob/errors.hpp"
#include "micromob/profile.hpp"
#include "micromob/ranksum.hpp"
#include "micromob/report.hpp"
#include "micromob/trips.hpp"

namespace py = pybind11;
using namespace micromob;

namespace {

// A label-consistent placeholder period for points built from raw features.
int default_period(Mode mode, Label label) {
  if (mode == Mode::day_of_week) {
    return label == Label::regime_a ? 3 : 0;  // Wednesday / Sunday
  }
  return label == Label::regime_a ? 12 : 3;  // noon / 3AM
}

AnalysisDataset make_dataset(const std::vector<double>& features,
                             const std::vector<int>& labels, Mode mode,
                             std::optional<std::vector<int>> periods,
                             std::optional<std::vector<double>> weights,
                             std::optional<Granularity> granularity) {
  if (features.size() != labels.size()) {
    throw DomainError("features and labels differ in length");
  }
  if (periods && periods->size() != features.size()) {
    throw DomainError("periods differ in length from features");
  }
  if (weights && weights->size() != features.size()) {
    throw DomainError("weights differ in length from features");
  }
  AnalysisDataset dataset;
  dataset.mode = mode;
  dataset.points.reserve(features.size());
  bool all_unit = true;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw DomainError("labels must be 0 (regime_a) or 1 (regime_b)");
    }
    LabeledPoint point;
    point.feature = features[i];
    point.label = static_cast<Label>(labels[i]);
    point.period =
        periods ? (*periods)[i] : default_period(mode, point.label);
    point.weight = weights ? (*weights)[i] : 1.0;
    if (point.weight <= 0) throw DomainError("weights must be positive");
    all_unit = all_unit && point.weight == 1.0;
    dataset.points.push_back(point);
  }
  dataset.granularity = granularity.value_or(
      all_unit ? Granularity::per_trip : Granularity::per_period_per_date);
  return dataset;
}

py::dict analysis_summary(const AnalysisOutcome& analysis) {
  py::dict entry;
  entry["vehicle"] = std::string(to_string(analysis.vehicle));
  entry["mode"] = to_string(analysis.mode);
  entry["granularity"] = to_string(analysis.granularity);
  entry["k"] = analysis.k;
  entry["k_from_consensus"] = analysis.k_from_consensus;
  py::list means;
  py::list sizes;
  for (const auto& stats : analysis.model.stats) {
    means.append(stats.mean);
    sizes.append(stats.size);
  }
  entry["means"] = means;
  entry["sizes"] = sizes;
  entry["compared"] = py::make_tuple(analysis.compared_a, analysis.compared_b);
  entry["p_two_sided"] = analysis.ranksum.p_two_sided;
  entry["method"] = analysis.ranksum.method;
  if (analysis.curve) entry["chosen_k"] = analysis.curve->chosen_k;
  return entry;
}

py::dict run_analyze(const std::string& config_path,
                     const std::map<std::string, std::string>& overrides) {
  AnalysisConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + config_path + "'");
    config = parse_analysis_config(in);
  }
  apply_overrides(config, env_overrides());
  apply_overrides(config, overrides);

  const auto result = run_pipeline(config);

  py::dict summary;
  summary["trips_used"] = result.trips_used;
  summary["out_dir"] = config.out_dir;
  py::list files;
  for (const auto& file : result.files) files.append(file);
  summary["files"] = files;
  py::list analyses;
  for (const auto& analysis : result.analyses) {
    analyses.append(analysis_summary(analysis));
  }
  summary["analyses"] = analyses;
  return summary;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dockless micromobility trip-speed pattern analysis";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::enum_<Mode>(m, "Mode")
      .value("day_of_week", Mode::day_of_week)
      .value("time_of_day", Mode::time_of_day);
  py::enum_<Granularity>(m, "Granularity")
      .value("per_trip", Granularity::per_trip)
      .value("per_period_per_date", Granularity::per_period_per_date);
  py::enum_<Label>(m, "Label")
      .value("regime_a", Label::regime_a)
      .value("regime_b", Label::regime_b);
  py::enum_<QuotaPolicy>(m, "QuotaPolicy")
      .value("balanced", QuotaPolicy::balanced)
      .value("unbounded", QuotaPolicy::unbounded);
  py::enum_<DistanceMetric>(m, "DistanceMetric")
      .value("squared_euclidean", DistanceMetric::squared_euclidean)
      .value("absolute", DistanceMetric::absolute);
  py::enum_<RankSumMethod>(m, "RankSumMethod")
      .value("automatic", RankSumMethod::automatic)
      .value("exact", RankSumMethod::exact)
      .value("normal_approx", RankSumMethod::normal_approx);

  py::class_<DaytimeBoundary>(m, "DaytimeBoundary")
      .def(py::init<>())
      .def(py::init([](int start, int end) {
             return DaytimeBoundary{start, end};
           }),
           py::arg("start_hour"), py::arg("end_hour"))
      .def_readwrite("start_hour", &DaytimeBoundary::start_hour)
      .def_readwrite("end_hour", &DaytimeBoundary::end_hour);

  py::class_<LabeledPoint>(m, "LabeledPoint")
      .def(py::init<>())
      .def_readwrite("feature", &LabeledPoint::feature)
      .def_readwrite("label", &LabeledPoint::label)
      .def_readwrite("period", &LabeledPoint::period)
      .def_readwrite("weight", &LabeledPoint::weight);

  py::class_<AnalysisDataset>(m, "AnalysisDataset")
      .def(py::init<>())
      .def_readwrite("mode", &AnalysisDataset::mode)
      .def_readwrite("granularity", &AnalysisDataset::granularity)
      .def_readwrite("points", &AnalysisDataset::points)
      .def("__len__",
           [](const AnalysisDataset& d) { return d.points.size(); });

  py::class_<ClusterConfig>(m, "ClusterConfig")
      .def(py::init<>())
      .def_readwrite("k", &ClusterConfig::k)
      .def_readwrite("quota", &ClusterConfig::quota)
      .def_readwrite("metric", &ClusterConfig::metric)
      .def_readwrite("max_outer_iters", &ClusterConfig::max_outer_iters)
      .def_readwrite("seed", &ClusterConfig::seed);

  py::class_<ClusterStats>(m, "ClusterStats")
      .def_readonly("mean", &ClusterStats::mean)
      .def_readonly("stddev", &ClusterStats::stddev)
      .def_readonly("weight", &ClusterStats::weight)
      .def_readonly("size", &ClusterStats::size)
      .def_readonly("purity", &ClusterStats::purity)
      .def_readonly("majority_label", &ClusterStats::majority_label);

  py::class_<ClusterModel>(m, "ClusterModel")
      .def_readonly("centroids", &ClusterModel::centroids)
      .def_readonly("assignment", &ClusterModel::assignment)
      .def_readonly("stats", &ClusterModel::stats)
      .def_readonly("iterations", &ClusterModel::iterations)
      .def_readonly("converged", &ClusterModel::converged);

  py::class_<ConsensusConfig>(m, "ConsensusConfig")
      .def(py::init<>())
      .def_readwrite("k_min", &ConsensusConfig::k_min)
      .def_readwrite("k_max", &ConsensusConfig::k_max)
      .def_readwrite("resamples", &ConsensusConfig::resamples)
      .def_readwrite("fraction", &ConsensusConfig::fraction)
      .def_readwrite("seed", &ConsensusConfig::seed)
      .def_readwrite("flatness_threshold",
                     &ConsensusConfig::flatness_threshold);

  py::class_<ConsensusEntry>(m, "ConsensusEntry")
      .def(py::init<>())
      .def_readwrite("k", &ConsensusEntry::k)
      .def_readwrite("area", &ConsensusEntry::area)
      .def_readwrite("delta", &ConsensusEntry::delta)
      .def_readwrite("undefined_pairs", &ConsensusEntry::undefined_pairs);

  py::class_<ConsensusCurve>(m, "ConsensusCurve")
      .def_readonly("entries", &ConsensusCurve::entries)
      .def_readonly("chosen_k", &ConsensusCurve::chosen_k);

  py::class_<RankSumResult>(m, "RankSumResult")
      .def_readonly("u", &RankSumResult::u)
      .def_readonly("w", &RankSumResult::w)
      .def_readonly("z", &RankSumResult::z)
      .def_readonly("p_two_sided", &RankSumResult::p_two_sided)
      .def_readonly("method", &RankSumResult::method)
      .def_readonly("n1", &RankSumResult::n1)
      .def_readonly("n2", &RankSumResult::n2)
      .def_readonly("expansion_capped", &RankSumResult::expansion_capped);

  m.def("label_day_of_week", &label_day_of_week, py::arg("day_of_week"),
        "Saturday/Sunday -> regime_b (weekend); day 0 is Sunday.");
  m.def("label_time_of_day", &label_time_of_day, py::arg("hour"),
        py::arg("boundary") = DaytimeBoundary{},
        "Hours in [start, end) -> regime_a (daytime).");
  m.def("label_name", &label_name, py::arg("mode"), py::arg("label"));
  m.def("period_name", &period_name, py::arg("mode"), py::arg("period"));
  m.def("default_granularity", &default_granularity, py::arg("mode"));

  m.def("make_dataset", &make_dataset, py::arg("features"), py::arg("labels"),
        py::arg("mode") = Mode::day_of_week, py::arg("periods") = py::none(),
        py::arg("weights") = py::none(),
        py::arg("granularity") = py::none(),
        "Builds a labeled dataset from parallel feature/label sequences.");

  m.def(
      "fit",
      [](const AnalysisDataset& dataset, const ClusterConfig& config,
         bool order_by_mean) {
        config.validate();
        auto model = fit(dataset, config);
        if (order_by_mean) order_clusters_by_mean(model);
        return model;
      },
      py::arg("dataset"), py::arg("config") = ClusterConfig{},
      py::arg("order_by_mean") = true,
      "Fits the matching-based clusterer; cluster ids ascend by mean.");

  m.def(
      "run_consensus",
      [](const AnalysisDataset& dataset, const ConsensusConfig& config,
         const ClusterConfig& cluster_template) {
        config.validate();
        return run_consensus(dataset, config, cluster_template);
      },
      py::arg("dataset"), py::arg("config") = ConsensusConfig{},
      py::arg("cluster_template") = ClusterConfig{},
      "Subsampled co-assignment stability curve and the chosen k.");

  m.def("select_model_order", &select_model_order, py::arg("entries"),
        py::arg("flatness_threshold") = 0.025);

  m.def("ranksum_test", &ranksum_test, py::arg("x"), py::arg("y"),
        py::arg("method") = RankSumMethod::automatic,
        "Two-sided Wilcoxon rank-sum test.");
  m.def("ranksum_test_weighted", &ranksum_test_weighted, py::arg("x_values"),
        py::arg("x_weights"), py::arg("y_values"), py::arg("y_weights"),
        py::arg("expansion_cap") = 1e6);

  m.def("analyze", &run_analyze, py::arg("config_path") = std::string(),
        py::arg("overrides") = std::map<std::string, std::string>{},
        "Runs the full pipeline; returns a summary of analyses and files.");
}
