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

// bertrand_arena: command line front end for the pricing lab.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bertrand/config.hpp"
#include "bertrand/csv.hpp"
#include "bertrand/equilibrium.hpp"
#include "bertrand/errors.hpp"
#include "bertrand/harness.hpp"
#include "bertrand/market.hpp"
#include "bertrand/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct MarketArgs {
  std::string model = "logit";
  std::optional<double> c, g, mu, k;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "standard, edgeworth or logit")
        ->check(CLI::IsMember({"standard", "edgeworth", "logit"}));
    cmd->add_option("--c", c, "marginal cost");
    cmd->add_option("--g", g, "logit product quality");
    cmd->add_option("--mu", mu, "logit horizontal differentiation");
    cmd->add_option("--k", k, "Edgeworth capacity");
  }

  bertrand::MarketSpec spec() const {
    using bertrand::MarketKind;
    bertrand::MarketSpec s;
    s.kind = bertrand::parse_market_kind(model);
    if (s.kind == MarketKind::kLogit) s.c = 1.0;
    if (c) s.c = *c;
    if (g) s.g = *g;
    if (mu) s.mu = *mu;
    if (k) s.k = *k;
    s.validate();
    return s;
  }
};

struct RunArgs {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t n_workers = 1;
  std::vector<std::string> overrides;
  bool quiet = false;

  void attach(CLI::App* cmd, bool workers) {
    cmd->add_option("--config", config_path, "JSON experiment config")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--seed", seed, "base seed (overrides the config)");
    if (workers) {
      cmd->add_option("--n-workers", n_workers, "parallel runs")
          ->check(CLI::PositiveNumber);
    }
    cmd->add_option("--override", overrides, "dotted.key=value, repeatable");
    cmd->add_flag("--quiet", quiet, "suppress per-epoch progress");
  }
};

bertrand::ExperimentConfig resolve_config(const RunArgs& args) {
  json doc;
  if (!args.config_path.empty()) {
    doc = bertrand::config_to_json(bertrand::load_config(args.config_path));
  } else {
    doc = bertrand::config_to_json(bertrand::ExperimentConfig{});
  }
  for (const auto& o : args.overrides) bertrand::apply_override(doc, o);
  bertrand::ExperimentConfig config = bertrand::config_from_json(doc);
  if (args.seed) config.base_seed = *args.seed;
  config.validate();
  return config;
}

fs::path output_dir(const RunArgs& args, const bertrand::ExperimentConfig& config) {
  if (!args.out.empty()) return args.out;
  const char* root = std::getenv("BERTRAND_ARENA_OUT");
  const fs::path base = root && *root ? fs::path(root) : fs::path("bertrand_runs");
  return base / (std::string(bertrand::to_string(config.scenario)) + "_" +
                 bertrand::config_hash(config).substr(0, 8));
}

bertrand::ProgressFn progress_printer(bool quiet) {
  if (quiet) return {};
  auto mu = std::make_shared<std::mutex>();
  return [mu](const bertrand::ProgressEvent& e) {
    std::lock_guard<std::mutex> lock(*mu);
    std::fprintf(stderr,
                 "[%s seed=%llu] epoch %lld/%lld price=(%.4f, %.4f) "
                 "profit=(%.4f, %.4f)\n",
                 e.group.c_str(), static_cast<unsigned long long>(e.seed),
                 static_cast<long long>(e.row.epoch),
                 static_cast<long long>(e.total_epochs), e.row.price0,
                 e.row.price1, e.row.profit0, e.row.profit1);
  };
}

json equilibrium_json(const bertrand::MarketSpec& spec,
                      const bertrand::EquilibriumReport& eq) {
  return {{"model", std::string(bertrand::to_string(spec.kind))},
          {"c", spec.c},
          {"p_nash", eq.p_nash},
          {"p_monopoly", eq.p_monopoly},
          {"pi_nash", eq.pi_nash},
          {"pi_monopoly", eq.pi_monopoly}};
}

int run_and_report(const RunArgs& args, bertrand::ExperimentConfig config) {
  const fs::path out = output_dir(args, config);
  bertrand::ExperimentOptions options;
  options.n_workers = args.n_workers;
  options.out_dir = out;
  options.progress = progress_printer(args.quiet);
  const auto result = bertrand::run_experiment(config, options);

  json summary = {{"out", out.string()},
                  {"config_hash", bertrand::config_hash(config)},
                  {"runs", result.records.size()},
                  {"failed", result.failures.size()}};
  std::cout << summary.dump() << '\n';
  if (!result.failures.empty()) {
    std::cerr << "failed runs:\n";
    for (const auto& f : result.failures) {
      std::cerr << "  " << f.group << " seed " << f.seed << ": " << f.message
                << '\n';
    }
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent Bertrand pricing lab"};
  app.require_subcommand(1);

  MarketArgs eq_args;
  auto* equilibria = app.add_subcommand("equilibria", "Nash and monopoly benchmarks");
  eq_args.attach(equilibria);

  MarketArgs surf_args;
  int resolution = 101;
  std::string surf_out;
  auto* surface = app.add_subcommand("surface", "profit surface of agent 0 as CSV");
  surf_args.attach(surface);
  surface->add_option("--resolution", resolution, "points per axis")
      ->check(CLI::Range(2, 100000));
  surface->add_option("--out", surf_out, "output directory (stdout if absent)");

  RunArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "one seed of the configured scenario");
  sim_args.attach(simulate, false);

  RunArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "all seeds of the configured scenario");
  exp_args.attach(experiment, true);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "metrics exports for a finished experiment");
  report->add_option("--out,dir", report_dir, "experiment directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*equilibria) {
      const auto spec = eq_args.spec();
      std::cout << equilibrium_json(spec, bertrand::equilibrium_report(spec)).dump(2)
                << '\n';
    } else if (*surface) {
      const auto spec = surf_args.spec();
      const auto points = bertrand::profit_surface(spec, resolution);
      if (surf_out.empty()) {
        bertrand::write_surface_csv(std::cout, points);
      } else {
        fs::create_directories(surf_out);
        std::ofstream file(fs::path(surf_out) / "surface.csv", std::ios::binary);
        if (!file) throw bertrand::FormatError("cannot write surface.csv");
        bertrand::write_surface_csv(file, points);
      }
    } else if (*simulate) {
      auto config = resolve_config(sim_args);
      config.n_runs = 1;
      return run_and_report(sim_args, config);
    } else if (*experiment) {
      return run_and_report(exp_args, resolve_config(exp_args));
    } else if (*report) {
      const auto r = bertrand::write_report(report_dir);
      std::cout << json{{"groups", r.groups}, {"runs", r.runs}}.dump() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
