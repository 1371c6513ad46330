#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bftavail/availability.hpp"
#include "bftavail/errors.hpp"
#include "bftavail/simulation.hpp"

namespace py = pybind11;
using namespace bftavail;

namespace {

EvaluationOptions options_for(const std::string& solver, unsigned jobs) {
  return EvaluationOptions{parse_solver_policy(solver), jobs};
}

LocationRounding rounding_for(const std::string& name) {
  if (name == "floor") return LocationRounding::kFloor;
  if (name == "nearest") return LocationRounding::kNearest;
  throw DomainError("rounding must be 'floor' or 'nearest'");
}

py::dict table_to_dict(const SweepTable& table) {
  py::dict result;
  result["N"] = table.n_values;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    std::vector<double> column;
    for (const auto& row : table.values) column.push_back(row[c]);
    result[py::str(table.columns[c])] = column;
  }
  return result;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Availability of Byzantine fault-tolerant clusters modeled as a two-dimensional CTMC";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_ArithmeticError);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init(&make_config), py::arg("n_servers"), py::arg("breakdown_rate"),
           py::arg("repair_rate") = 1.0)
      .def_readonly("n_servers", &SystemConfig::n_servers)
      .def_readonly("breakdown_rate", &SystemConfig::breakdown_rate)
      .def_readonly("repair_rate", &SystemConfig::repair_rate)
      .def_property_readonly("ratio", &SystemConfig::ratio);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("config", &Scenario::config)
      .def_readonly("byzantine_count", &Scenario::byzantine_count)
      .def_readonly("honest_count", &Scenario::honest_count)
      .def_property_readonly("state_count", [](const Scenario& s) { return state_count(s); })
      .def("__repr__", [](const Scenario& s) {
        std::ostringstream out;
        out << "Scenario(N=" << s.config.n_servers << ", h=" << s.honest_count
            << ", f=" << s.byzantine_count << ")";
        return out.str();
      });

  m.def("build_scenario", &build_scenario, py::arg("config"), py::arg("byzantine_count"));

  py::class_<GeneratorMatrix>(m, "GeneratorMatrix")
      .def_property_readonly("scenario", &GeneratorMatrix::scenario)
      .def_property_readonly("dimension", &GeneratorMatrix::dimension)
      .def("dense", &GeneratorMatrix::dense, "balance-equation coefficients as a dense array")
      .def("max_conservation_error", &GeneratorMatrix::max_conservation_error)
      .def("strongly_connected", &GeneratorMatrix::strongly_connected)
      .def("triplets", [](const GeneratorMatrix& q) {
        std::ostringstream out;
        q.write_triplets(out);
        return out.str();
      });

  m.def("build_generator", &build_generator, py::arg("scenario"));

  py::class_<StationaryDistribution>(m, "StationaryDistribution")
      .def_property_readonly("scenario", &StationaryDistribution::scenario)
      .def_property_readonly("probabilities", &StationaryDistribution::probabilities)
      .def("at", [](const StationaryDistribution& d, int i, int j) { return d.at({i, j}); },
           py::arg("honest_up"), py::arg("byzantine_up"));

  m.def("solve_svd", &solve_svd, py::arg("q"));
  m.def("solve_replaced_equation", &solve_replaced_equation, py::arg("q"));
  m.def(
      "solve",
      [](const GeneratorMatrix& q, const std::string& solver) { return solve(q, parse_solver_policy(solver)); },
      py::arg("q"), py::arg("solver") = "auto");

  m.def("quorum_threshold", &quorum_threshold, py::arg("n"));
  m.def("max_tolerated_faults", &max_tolerated_faults, py::arg("n"));
  m.def(
      "availability", [](const StationaryDistribution& d) { return availability(d).availability; },
      py::arg("dist"));
  m.def(
      "scenario_availability",
      [](const Scenario& s, const std::string& solver) { return scenario_availability(s, parse_solver_policy(solver)); },
      py::arg("scenario"), py::arg("solver") = "auto");

  py::class_<FaultDistribution>(m, "FaultDistribution")
      .def_static("uniform", &FaultDistribution::uniform, py::arg("a"), py::arg("b"), py::arg("support_max"))
      .def_static("truncated_poisson", &FaultDistribution::truncated_poisson, py::arg("lam"),
                  py::arg("support_max"))
      .def_static("binomial", &FaultDistribution::binomial, py::arg("n"), py::arg("q"), py::arg("support_max"))
      .def_static("degenerate", &FaultDistribution::degenerate, py::arg("x0"), py::arg("support_max"))
      .def("pmf", &FaultDistribution::pmf, py::arg("f"))
      .def_property_readonly("masses", &FaultDistribution::masses)
      .def_property_readonly("support_max", &FaultDistribution::support_max)
      .def("mean", &FaultDistribution::mean)
      .def("variance", &FaultDistribution::variance)
      .def("__repr__", &FaultDistribution::describe);

  m.def(
      "preset",
      [](const std::string& name, int n, const std::string& rounding) {
        return paper_preset(name, n, rounding_for(rounding));
      },
      py::arg("name"), py::arg("n"), py::arg("rounding") = "floor");
  m.def("preset_names", &preset_names);

  m.def(
      "mean_availability",
      [](const SystemConfig& config, const FaultDistribution& dist, const std::string& solver, unsigned jobs) {
        const auto result = mean_availability(config, dist, options_for(solver, jobs));
        py::list breakdown;
        for (const auto& c : result.per_f) {
          breakdown.append(py::make_tuple(c.byzantine_count, c.probability, c.availability));
        }
        return py::make_tuple(result.mean_availability, breakdown);
      },
      py::arg("config"), py::arg("fault_dist"), py::arg("solver") = "auto", py::arg("jobs") = 0,
      "returns (mean availability, [(f, p(f), A), ...])");

  m.def(
      "sweep_n",
      [](int n_min, int n_max, double ratio, const std::vector<std::string>& presets,
         const std::string& solver, unsigned jobs, const std::string& rounding) {
        std::vector<DistributionFactory> factories;
        for (const auto& name : presets) factories.push_back(preset_factory(name, rounding_for(rounding)));
        SweepTable table;
        {
          py::gil_scoped_release release;
          table = sweep_n(n_min, n_max, ratio, factories, options_for(solver, jobs));
        }
        return table_to_dict(table);
      },
      py::arg("n_min"), py::arg("n_max"), py::arg("ratio"), py::arg("presets"),
      py::arg("solver") = "replaced", py::arg("jobs") = 0, py::arg("rounding") = "floor");

  m.def(
      "sweep_ratio",
      [](const std::vector<int>& sizes, const std::vector<double>& ratios, const std::string& preset_name,
         const std::string& solver, unsigned jobs, const std::string& rounding) {
        SweepTable table;
        const auto factory = preset_factory(preset_name, rounding_for(rounding));
        {
          py::gil_scoped_release release;
          table = sweep_ratio(sizes, ratios, factory, options_for(solver, jobs));
        }
        return table_to_dict(table);
      },
      py::arg("sizes"), py::arg("ratios"), py::arg("preset"), py::arg("solver") = "replaced",
      py::arg("jobs") = 0, py::arg("rounding") = "floor");

  m.def(
      "simulate",
      [](const Scenario& scenario, double horizon, int replications, std::uint64_t seed,
         std::optional<double> warmup, std::optional<int> threshold) {
        SimConfig config{scenario, horizon, warmup, seed, replications, threshold, 0};
        SimEstimate estimate;
        {
          py::gil_scoped_release release;
          estimate = simulate(config);
        }
        py::dict result;
        result["mean_availability"] = estimate.mean_availability;
        result["standard_error"] = estimate.standard_error;
        result["replication_values"] = estimate.replication_values;
        return result;
      },
      py::arg("scenario"), py::arg("horizon") = 1e5, py::arg("replications") = 10, py::arg("seed") = 1,
      py::arg("warmup") = py::none(), py::arg("threshold") = py::none());
}
