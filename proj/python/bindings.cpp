// Copyright 2026 The Bertrand Arena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bertrand/config.hpp"
#include "bertrand/equilibrium.hpp"
#include "bertrand/errors.hpp"
#include "bertrand/harness.hpp"
#include "bertrand/market.hpp"
#include "bertrand/metrics.hpp"
#include "bertrand/pricing_env.hpp"

namespace py = pybind11;
namespace b = bertrand;

namespace {

b::ExperimentConfig parse(const std::string& text) {
  return b::config_from_json(nlohmann::json::parse(text));
}

py::dict series_dict(const b::StepSeries& s) {
  py::dict d;
  d["t"] = s.t;
  d["action0"] = s.action0;
  d["action1"] = s.action1;
  d["price0"] = s.price0;
  d["price1"] = s.price1;
  d["profit0"] = s.profit0;
  d["profit1"] = s.profit1;
  return d;
}

py::dict record_dict(const b::RunRecord& r) {
  py::dict d;
  d["group"] = r.group;
  d["seed"] = r.seed;
  d["steps"] = r.steps;
  std::vector<std::int64_t> epoch;
  std::vector<double> p0, p1, r0, r1;
  for (const auto& row : r.epochs) {
    epoch.push_back(row.epoch);
    p0.push_back(row.price0);
    p1.push_back(row.price1);
    r0.push_back(row.profit0);
    r1.push_back(row.profit1);
  }
  py::dict epochs;
  epochs["epoch"] = epoch;
  epochs["price0"] = p0;
  epochs["price1"] = p1;
  epochs["profit0"] = r0;
  epochs["profit1"] = r1;
  d["epochs"] = epochs;
  d["tail"] = series_dict(r.tail);
  d["series"] = series_dict(r.series);
  d["updates"] = r.updates;
  d["exchanges"] = r.exchanges;
  return d;
}

py::dict report_dict(const b::EquilibriumReport& eq) {
  py::dict d;
  d["p_nash"] = eq.p_nash;
  d["p_monopoly"] = eq.p_monopoly;
  d["pi_nash"] = eq.pi_nash;
  d["pi_monopoly"] = eq.pi_monopoly;
  return d;
}

b::EquilibriumReport report_from(double pn, double pm, double pin, double pim) {
  return {pn, pm, pin, pim};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bertrand duopoly pricing lab";

  py::register_exception<b::InvalidParameter>(m, "InvalidParameter",
                                              PyExc_ValueError);
  py::register_exception<b::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<b::ShapeMismatch>(m, "ShapeMismatch", PyExc_ValueError);
  py::register_exception<b::NonConvergence>(m, "NonConvergence",
                                            PyExc_RuntimeError);
  py::register_exception<b::InsufficientData>(m, "InsufficientData",
                                              PyExc_RuntimeError);
  py::register_exception<b::FormatError>(m, "FormatError", PyExc_RuntimeError);

  py::class_<b::MarketSpec>(m, "MarketSpec")
      .def_static("standard", &b::MarketSpec::standard, py::arg("c") = 0.0)
      .def_static("edgeworth", &b::MarketSpec::edgeworth, py::arg("k") = 0.6,
                  py::arg("c") = 0.0)
      .def_static("logit", &b::MarketSpec::logit, py::arg("c") = 1.0,
                  py::arg("g") = 2.0, py::arg("mu") = 0.25)
      .def_property_readonly(
          "model", [](const b::MarketSpec& s) { return std::string(b::to_string(s.kind)); })
      .def_readonly("c", &b::MarketSpec::c)
      .def_readonly("g", &b::MarketSpec::g)
      .def_readonly("mu", &b::MarketSpec::mu)
      .def_readonly("k", &b::MarketSpec::k)
      .def("validate", &b::MarketSpec::validate)
      .def("__repr__", [](const b::MarketSpec& s) {
        return "MarketSpec(" + std::string(b::to_string(s.kind)) +
               ", c=" + std::to_string(s.c) + ")";
      });

  m.def("demand", &b::demand, py::arg("spec"), py::arg("own_price"),
        py::arg("opp_price"));
  m.def("profit", &b::profit, py::arg("spec"), py::arg("own_price"),
        py::arg("opp_price"));
  m.def(
      "equilibria",
      [](const b::MarketSpec& spec) { return report_dict(b::equilibrium_report(spec)); },
      py::arg("spec"), "Nash and monopoly prices and per-firm profits.");
  m.def(
      "price_grid",
      [](const b::MarketSpec& spec, std::size_t m_points, double zeta) {
        return b::build_grid(spec, b::equilibrium_report(spec), m_points, zeta).values;
      },
      py::arg("spec"), py::arg("m") = 15, py::arg("zeta") = 0.1);
  m.def(
      "rpdi",
      [](double price, double pn, double pm) {
        return b::metrics::rpdi(price, report_from(pn, pm, 0.0, 1.0));
      },
      py::arg("mean_price"), py::arg("p_nash"), py::arg("p_monopoly"));
  m.def(
      "delta",
      [](double profit, double pin, double pim) {
        return b::metrics::delta(profit, report_from(0.0, 1.0, pin, pim));
      },
      py::arg("mean_profit"), py::arg("pi_nash"), py::arg("pi_monopoly"));

  m.def("default_config",
        [] { return b::config_to_json(b::ExperimentConfig{}).dump(); });
  m.def(
      "normalize_config",
      [](const std::string& text) {
        const auto config = parse(text);
        config.validate();
        return b::config_to_json(config).dump();
      },
      py::arg("config_json"), "Fills defaults and validates a config document.");
  m.def(
      "apply_override",
      [](const std::string& text, const std::string& assignment) {
        auto doc = nlohmann::json::parse(text);
        b::apply_override(doc, assignment);
        return doc.dump();
      },
      py::arg("config_json"), py::arg("assignment"));
  m.def(
      "config_hash",
      [](const std::string& text) { return b::config_hash(parse(text)); },
      py::arg("config_json"));

  m.def(
      "simulate",
      [](const std::string& text, std::uint64_t seed) {
        const auto config = parse(text);
        b::RunRecord record;
        {
          py::gil_scoped_release release;
          record = b::run_simulation(config, seed);
        }
        return record_dict(record);
      },
      py::arg("config_json"), py::arg("seed"),
      "One run of agents[0] against agents[1].");
  m.def(
      "run_experiment",
      [](const std::string& text, const std::string& out_dir,
         std::size_t n_workers) {
        const auto config = parse(text);
        b::ExperimentOptions options;
        options.n_workers = n_workers;
        options.out_dir = out_dir;
        b::ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = b::run_experiment(config, options);
        }
        py::dict d;
        py::list records;
        for (const auto& r : result.records) records.append(record_dict(r));
        d["records"] = records;
        d["groups"] = result.groups;
        d["equilibrium"] = report_dict(result.setup.eq);
        d["grid"] = result.setup.grid.values;
        py::list failures;
        for (const auto& f : result.failures) {
          py::dict fd;
          fd["group"] = f.group;
          fd["seed"] = f.seed;
          fd["message"] = f.message;
          failures.append(fd);
        }
        d["failures"] = failures;
        return d;
      },
      py::arg("config_json"), py::arg("out_dir") = std::string(),
      py::arg("n_workers") = 1,
      "Every seed of the configured scenario; writes files when out_dir is set.");
  m.def(
      "write_report",
      [](const std::string& dir) {
        const auto r = b::write_report(dir);
        py::dict d;
        d["groups"] = r.groups;
        d["runs"] = r.runs;
        return d;
      },
      py::arg("dir"));
}
