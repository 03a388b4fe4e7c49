#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "mecsfc/baselines.hpp"
#include "mecsfc/harness.hpp"
#include "mecsfc/jcora.hpp"
#include "mecsfc/json_io.hpp"
#include "mecsfc/numerics.hpp"

namespace py = pybind11;
using namespace mecsfc;

namespace {

Json to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::dict>(obj)) {
    Json j = Json::object();
    for (auto item : obj.cast<py::dict>()) {
      j[py::str(item.first).cast<std::string>()] = to_json(item.second);
    }
    return j;
  }
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    Json j = Json::array();
    for (auto item : obj.cast<py::sequence>()) j.push_back(to_json(item));
    return j;
  }
  throw std::invalid_argument("unsupported python value in config");
}

py::object to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = to_py(value);
      return out;
    }
    default: return py::none();
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-site MEC offloading / chain placement / clock allocation solver";
  m.attr("__version__") = version_string();

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("request_count", &Scenario::request_count)
      .def_property_readonly("cell_count",
                             [](const Scenario& s) { return static_cast<int>(s.cells.size()); })
      .def_property_readonly("mu_count",
                             [](const Scenario& s) { return static_cast<int>(s.mus.size()); })
      .def("to_json", [](const Scenario& s) { return to_py(scenario_to_json(s)); })
      .def("to_json_str", [](const Scenario& s) { return scenario_to_json(s).dump(2); });

  m.def("default_config", []() { return to_py(config_to_json(ScenarioConfig{})); });

  m.def(
      "generate_scenario",
      [](const py::object& config, std::uint64_t seed) {
        const auto cfg = config.is_none() ? ScenarioConfig{} : config_from_json(to_json(config));
        return generate_scenario(cfg, seed);
      },
      py::arg("config") = py::none(), py::arg("seed") = 1);

  m.def(
      "solve",
      [](const Scenario& scenario, const std::string& algo) {
        Assignment assignment;
        Json report;
        Json trace;
        const auto metrics = run_algorithm(scenario, algo, &assignment, &report, &trace);
        py::dict out;
        out["objective"] = metrics.objective;
        out["avg_energy_j"] = metrics.avg_energy_j;
        out["offloaded_bits"] = metrics.offloaded_bits;
        out["feasible"] = metrics.feasible;
        out["assignment"] = to_py(assignment_to_json(assignment));
        out["report"] = to_py(report);
        out["trace"] = to_py(trace);
        return out;
      },
      py::arg("scenario"), py::arg("algo") = "gtda");

  m.def("validate", [](const Scenario& scenario, const py::object& assignment) {
    const auto a = assignment_from_json(to_json(assignment));
    return to_py(feasibility_to_json(validate(scenario, a)));
  });

  m.def("run_sweep", [](const py::object& spec) {
    const auto s = sweep_spec_from_json(to_json(spec));
    const auto rows = run_sweep(s);
    py::list out;
    for (const auto& row : rows) {
      py::dict r;
      r["param"] = row.param;
      r["value"] = row.value;
      r["algo"] = row.algo;
      r["topology"] = row.topology;
      r["seed"] = row.seed;
      r["objective"] = row.objective;
      r["avg_energy_j"] = row.avg_energy_j;
      r["offloaded_bits"] = row.offloaded_bits;
      r["feasible"] = row.feasible;
      r["failed"] = row.failed;
      out.append(r);
    }
    return out;
  });

  m.def("lambert_w0", &num::lambert_w0, py::arg("x"));

  m.def(
      "solve_knapsack",
      [](const std::vector<double>& values, const std::vector<double>& sizes, double capacity) {
        if (values.size() != sizes.size()) throw std::invalid_argument("values/sizes mismatch");
        std::vector<num::KnapsackItem> items;
        for (std::size_t i = 0; i < values.size(); ++i) {
          items.push_back({static_cast<int>(i), values[i], sizes[i]});
        }
        return num::solve_knapsack(items, capacity);
      },
      py::arg("values"), py::arg("sizes"), py::arg("capacity"));
}
