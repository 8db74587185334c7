/// Python bindings for the popstab core: metric operations, the
/// Monte-Carlo engine, the scorecard primitives and the population
/// simulator.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "popstab/mc_engine.hpp"
#include "popstab/metrics.hpp"
#include "popstab/population_sim.hpp"
#include "popstab/scorecard.hpp"
#include "popstab/version.hpp"

namespace py = pybind11;
using namespace popstab;

namespace {

mc::SelectorKind parse_selector(const std::string& name) {
  const auto kind = mc::selector_from_string(name);
  if (!kind) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "unknown statistic '" + name + "'");
  }
  return *kind;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "population stability metrics for credit scorecards";
  m.attr("__version__") = kVersion;

  py::register_exception<StabilityError>(m, "StabilityError",
                                         PyExc_ValueError);

  py::enum_<Band>(m, "Band")
      .value("NO_CHANGE", Band::NoChange)
      .value("SMALL_CHANGE", Band::SmallChange)
      .value("SUBSTANTIAL_CHANGE", Band::SubstantialChange)
      .value("NOT_CLASSIFIED", Band::NotClassified);

  py::enum_<Metric>(m, "Metric")
      .value("PSI", Metric::Psi)
      .value("DPV", Metric::Dpv)
      .value("EFFECT_SIZE", Metric::EffectSize)
      .value("OVERLAPPING", Metric::Overlapping)
      .value("KS", Metric::Ks)
      .value("PAI", Metric::Pai);

  py::class_<ProportionVector>(m, "ProportionVector")
      .def(py::init<std::vector<std::string>, std::vector<double>, bool>(),
           py::arg("levels"), py::arg("props"), py::arg("ordinal") = false)
      .def_readonly("levels", &ProportionVector::levels)
      .def_readonly("props", &ProportionVector::props)
      .def_readonly("ordinal", &ProportionVector::ordinal)
      .def("__len__", &ProportionVector::size);

  py::class_<SnapshotPair>(m, "SnapshotPair")
      .def(py::init<ProportionVector, ProportionVector,
                    std::optional<long>, std::optional<long>>(),
           py::arg("development"), py::arg("review"),
           py::arg("dev_count") = std::nullopt,
           py::arg("review_count") = std::nullopt)
      .def_readonly("development", &SnapshotPair::development)
      .def_readonly("review", &SnapshotPair::review)
      .def_readonly("dev_count", &SnapshotPair::dev_count)
      .def_readonly("review_count", &SnapshotPair::review_count);

  py::class_<RawSamplePair>(m, "RawSamplePair")
      .def(py::init<std::vector<double>, std::vector<double>>(),
           py::arg("x"), py::arg("y"))
      .def_readonly("x", &RawSamplePair::x)
      .def_readonly("y", &RawSamplePair::y);

  py::class_<MetricOutcome>(m, "MetricOutcome")
      .def_readonly("metric", &MetricOutcome::metric)
      .def_readonly("value", &MetricOutcome::value)
      .def_readonly("band", &MetricOutcome::band)
      .def_property_readonly("flags",
                             [](const MetricOutcome& outcome) {
                               std::vector<std::string> names;
                               for (auto flag : outcome.flags) {
                                 names.push_back(to_string(flag));
                               }
                               return names;
                             })
      .def_property_readonly("is_infinite", &MetricOutcome::is_infinite)
      .def("__repr__", [](const MetricOutcome& outcome) {
        return "<MetricOutcome " + to_string(outcome.metric) + "=" +
               std::to_string(outcome.value) + " band=" +
               to_string(outcome.band) + ">";
      });

  m.def("psi", &popstab::psi, py::arg("pair"));
  m.def("dpv", &popstab::dpv, py::arg("pair"),
        py::arg("k_star") = std::nullopt);
  m.def("effect_sizes", &popstab::effect_sizes, py::arg("pair"));
  m.def("gamma", &popstab::gamma, py::arg("pair"),
        py::arg("cutoff") = kGammaDefaultCutoff);
  m.def("overlap", &popstab::overlap, py::arg("pair"));
  m.def("ks", &popstab::ks, py::arg("pair"));
  m.def("pai", &popstab::pai, py::arg("samples"));

  // ---- Monte-Carlo engine ----
  py::class_<mc::McConfig>(m, "McConfig")
      .def(py::init<long, long, double, std::uint64_t>(), py::arg("m"),
           py::arg("b"), py::arg("alpha") = 0.05, py::arg("seed") = 0)
      .def_readonly("m", &mc::McConfig::m)
      .def_readonly("b", &mc::McConfig::b)
      .def_readonly("alpha", &mc::McConfig::alpha)
      .def_readonly("seed", &mc::McConfig::seed)
      .def_property_readonly("beta", &mc::McConfig::beta);

  py::class_<mc::McResult>(m, "McResult")
      .def_readonly("statistic_name", &mc::McResult::statistic_name)
      .def_readonly("null_draws_sorted", &mc::McResult::null_draws_sorted)
      .def_readonly("critical_value", &mc::McResult::critical_value)
      .def_readonly("p_value", &mc::McResult::p_value)
      .def_readonly("generator", &mc::McResult::generator);

  m.def(
      "sample_null_proportions",
      [](const ProportionVector& q, long m_size, std::uint64_t seed) {
        std::mt19937_64 rng(mc::stream_seed(seed, 0));
        return mc::sample_null_proportions(q, m_size, rng);
      },
      py::arg("q"), py::arg("m"), py::arg("seed") = 0);
  m.def(
      "critical_value",
      [](const std::string& statistic, const ProportionVector& q,
         const mc::McConfig& cfg) {
        return mc::critical_value(mc::MetricSelector{parse_selector(
                                      statistic)},
                                  q, cfg);
      },
      py::arg("statistic"), py::arg("q"), py::arg("config"),
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "p_value",
      [](const std::string& statistic, const SnapshotPair& pair,
         const mc::McConfig& cfg) {
        return mc::p_value(mc::MetricSelector{parse_selector(statistic)},
                           pair, cfg);
      },
      py::arg("statistic"), py::arg("pair"), py::arg("config"),
      py::call_guard<py::gil_scoped_release>());

  // ---- scorecard ----
  py::class_<scorecard::GroupedCounts>(m, "GroupedCounts")
      .def(py::init<std::vector<std::string>, std::vector<long>,
                    std::vector<long>>(),
           py::arg("levels"), py::arg("observations"), py::arg("defaults"))
      .def_readonly("levels", &scorecard::GroupedCounts::levels)
      .def_readonly("observations", &scorecard::GroupedCounts::observations)
      .def_readonly("defaults", &scorecard::GroupedCounts::defaults);

  py::class_<scorecard::WoeTable>(m, "WoeTable")
      .def_readonly("levels", &scorecard::WoeTable::levels)
      .def_readonly("woe", &scorecard::WoeTable::woe);

  m.def("woe", &scorecard::woe, py::arg("counts"),
        py::arg("smoothing") = 0.0);
  m.def(
      "iv",
      [](const scorecard::GroupedCounts& counts, double smoothing) {
        const auto result = scorecard::iv(counts, smoothing);
        return py::make_tuple(result.value,
                              scorecard::to_string(result.band));
      },
      py::arg("counts"), py::arg("smoothing") = 0.0);

  py::class_<scorecard::LogisticFit>(m, "LogisticFit")
      .def_readonly("intercept", &scorecard::LogisticFit::intercept)
      .def_readonly("coefficients", &scorecard::LogisticFit::coefficients)
      .def_readonly("converged", &scorecard::LogisticFit::converged)
      .def_readonly("iterations", &scorecard::LogisticFit::iterations)
      .def_readonly("final_gradient_norm",
                    &scorecard::LogisticFit::final_gradient_norm)
      .def_readonly("separation_suspected",
                    &scorecard::LogisticFit::separation_suspected)
      .def_readonly("log_likelihood_trace",
                    &scorecard::LogisticFit::log_likelihood_trace);

  m.def(
      "fit_logistic",
      [](const std::vector<std::vector<double>>& features,
         const std::vector<int>& outcomes) {
        return scorecard::fit_logistic(features, outcomes);
      },
      py::arg("features"), py::arg("outcomes"),
      py::call_guard<py::gil_scoped_release>());

  py::class_<scorecard::ScorecardModel>(m, "ScorecardModel")
      .def_readonly("coefficients",
                    &scorecard::ScorecardModel::coefficients)
      .def_readonly("intercept", &scorecard::ScorecardModel::intercept)
      .def("to_json", &scorecard::model_to_json);
  m.def("model_from_json", &scorecard::model_from_json, py::arg("text"));
  m.def("predict_pd", &scorecard::predict_pd, py::arg("model"),
        py::arg("levels"));

  py::class_<scorecard::PdGrouping>(m, "PdGrouping")
      .def_readonly("cut_points", &scorecard::PdGrouping::cut_points)
      .def_readonly("group_proportions_dev",
                    &scorecard::PdGrouping::group_proportions_dev)
      .def_readonly("group_proportions_review",
                    &scorecard::PdGrouping::group_proportions_review);
  m.def("pd_groups", &scorecard::pd_groups, py::arg("dev_pds"),
        py::arg("review_pds"), py::arg("g") = 10);

  // ---- population simulator ----
  py::enum_<sim::PopulationRole>(m, "PopulationRole")
      .value("DEVELOPMENT", sim::PopulationRole::Development)
      .value("REVIEW", sim::PopulationRole::Review);

  py::class_<sim::AttributeConfig>(m, "AttributeConfig")
      .def(py::init<std::string, std::vector<std::string>,
                    std::vector<double>, std::vector<double>, bool>(),
           py::arg("name"), py::arg("levels"), py::arg("props"),
           py::arg("bad_ratios"), py::arg("ordinal") = false)
      .def_readonly("name", &sim::AttributeConfig::name)
      .def_readonly("levels", &sim::AttributeConfig::levels)
      .def_readonly("props", &sim::AttributeConfig::props)
      .def_readonly("bad_ratios", &sim::AttributeConfig::bad_ratios)
      .def_readonly("ordinal", &sim::AttributeConfig::ordinal);

  py::class_<sim::ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("name", &sim::ScenarioConfig::name)
      .def_readwrite("base", &sim::ScenarioConfig::base)
      .def_readwrite("review_overrides",
                     &sim::ScenarioConfig::review_overrides)
      .def_readwrite("target_bad_rate",
                     &sim::ScenarioConfig::target_bad_rate)
      .def_readwrite("population_size",
                     &sim::ScenarioConfig::population_size)
      .def("to_json", &sim::scenario_to_json);
  m.def("scenario_from_json", &sim::scenario_from_json, py::arg("text"));
  m.def("builtin_scenarios", &sim::builtin_scenarios);

  py::class_<sim::SimulatedPopulation>(m, "SimulatedPopulation")
      .def_property_readonly("size", &sim::SimulatedPopulation::size)
      .def_readonly("true_pd", &sim::SimulatedPopulation::true_pd)
      .def_readonly("seed", &sim::SimulatedPopulation::seed)
      .def_property_readonly("default_rate",
                             &sim::SimulatedPopulation::default_rate)
      .def_property_readonly("attribute_names",
                             [](const sim::SimulatedPopulation& pop) {
                               std::vector<std::string> names;
                               for (const auto& attribute : pop.attributes) {
                                 names.push_back(attribute.name);
                               }
                               return names;
                             });

  m.def("simulate", &sim::simulate, py::arg("config"), py::arg("role"),
        py::arg("seed"), py::call_guard<py::gil_scoped_release>());
  m.def("snapshot", &sim::snapshot, py::arg("development"),
        py::arg("review"), py::arg("attribute"));
  m.def("mean_pd_shift", &sim::mean_pd_shift, py::arg("config"));
}
