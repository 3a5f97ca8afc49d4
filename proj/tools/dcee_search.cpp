// Copyright 2026 The DCEE Search Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run | batch | validate.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dcee/config.hpp"
#include "dcee/errors.hpp"
#include "dcee/io.hpp"
#include "dcee/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<int> repeats;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::size_t> particles;
  std::optional<int> horizon;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_run_flags) {
  cmd->add_option("--config", f.config, "Config JSON file")->required();
  if (!with_run_flags) {
    return;
  }
  cmd->add_option("--seed", f.seed, "Episode seed (run) and base seed (batch)");
  cmd->add_option("--strategy", f.strategy, "Restrict to one strategy")
      ->check(CLI::IsMember({"dcee", "mpc", "entrotaxis"}));
  cmd->add_option("--repeats", f.repeats, "Repeats per scenario and strategy (batch)");
  cmd->add_option("--jobs", f.jobs, "Concurrent episodes (0 = all cores)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--particles", f.particles, "Particle count");
  cmd->add_option("--horizon", f.horizon, "DCEE planning horizon (1-3)");
}

dcee::ConfigOverrides to_overrides(const CommonFlags& f) {
  dcee::ConfigOverrides o;
  o.seed = f.seed;
  if (f.strategy) {
    o.strategy = dcee::parse_strategy(*f.strategy);
  }
  o.repeats = f.repeats;
  o.jobs = f.jobs;
  o.output_dir = f.out;
  o.particles = f.particles;
  o.horizon = f.horizon;
  return o;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

int cmd_validate(const CommonFlags& flags) {
  const auto cfg = dcee::load_config(flags.config);
  std::cout << cfg.effective.dump(2) << '\n';
  std::cerr << "config OK: " << cfg.batch_scenarios().size() << " scenario(s), " << cfg.strategies.size()
            << " strategy(ies)\n";
  return kExitOk;
}

int cmd_run(const CommonFlags& flags) {
  const auto cfg = dcee::load_config(flags.config, to_overrides(flags));
  const std::filesystem::path out_dir = cfg.output_dir;
  std::filesystem::create_directories(out_dir);
  int status = kExitOk;
  for (const auto strategy : cfg.strategies) {
    dcee::Scenario sc = cfg.scenario;
    sc.planner.strategy = strategy;
    const std::string stem = std::string(dcee::to_string(strategy));
    try {
      const auto rec = dcee::run_episode(sc);
      const auto metrics = dcee::compute_metrics(rec, sc);
      {
        auto os = open_output(out_dir / (stem + "_trace.csv"));
        dcee::write_trace_csv(os, rec, sc, cfg.effective);
      }
      {
        auto os = open_output(out_dir / (stem + "_posterior.json"));
        os << nlohmann::json{{"config", cfg.effective}, {"posterior", dcee::posterior_to_json(rec.terminal_posterior)}}
                  .dump()
           << '\n';
      }
      {
        auto j = dcee::metrics_to_json(metrics);
        j["status"] = "ok";
        j["warnings"] = rec.warnings;
        j["config"] = cfg.effective;
        auto os = open_output(out_dir / (stem + "_metrics.json"));
        os << j.dump(2) << '\n';
      }
      for (const auto& w : rec.warnings) {
        std::cerr << stem << ": warning: " << w << '\n';
      }
      std::cerr << stem << ": final rmse " << metrics.final_rmse << " m, source "
                << (metrics.source_acquired ? "acquired" : "not acquired") << ", plume "
                << (metrics.plume_acquired ? "acquired" : "not acquired") << '\n';
    } catch (const dcee::ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      auto os = open_output(out_dir / (stem + "_metrics.json"));
      os << nlohmann::json{{"status", "failed"}, {"error", e.what()}, {"config", cfg.effective}}.dump(2) << '\n';
      std::cerr << stem << ": episode failed: " << e.what() << '\n';
      status = kExitRuntime;
    }
  }
  return status;
}

int cmd_batch(const CommonFlags& flags) {
  const auto cfg = dcee::load_config(flags.config, to_overrides(flags));
  const std::filesystem::path out_dir = cfg.output_dir;
  std::filesystem::create_directories(out_dir);
  const auto scenarios = cfg.batch_scenarios();
  const auto report = dcee::run_batch(scenarios, cfg.strategies, cfg.repeats, cfg.base_seed, cfg.jobs,
                                      [](std::size_t done, std::size_t total) {
                                        std::cerr << "\rcells " << done << "/" << total << std::flush;
                                      });
  std::cerr << '\n';
  {
    auto os = open_output(out_dir / "batch_report.json");
    os << dcee::batch_report_to_json(report, cfg.effective).dump(2) << '\n';
  }
  {
    auto os = open_output(out_dir / "batch_rmse.csv");
    dcee::write_batch_rmse_csv(os, report, cfg.effective);
  }
  {
    auto os = open_output(out_dir / "batch_acquisition.csv");
    dcee::write_acquisition_csv(os, report, cfg.effective);
  }
  std::size_t completed = 0;
  for (const auto& cell : report.cells) {
    if (cell.completed) {
      ++completed;
    } else {
      std::cerr << "cell " << report.scenario_names[cell.scenario_index] << "/" << dcee::to_string(cell.strategy)
                << "/" << cell.repeat << " failed: " << cell.error << '\n';
    }
  }
  for (const auto& s : report.strategies) {
    std::cerr << dcee::to_string(s.strategy) << ": source " << s.overall.source_acquired << "/" << s.overall.cells
              << ", plume " << s.overall.plume_acquired << "/" << s.overall.cells << ", mean final rmse "
              << s.mean_final_rmse << " m\n";
  }
  const bool enough = static_cast<double>(completed) >= 0.95 * static_cast<double>(report.cells.size());
  return enough ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autonomous source search: DCEE, MPC and Entrotaxis planners over a simulated plume"};
  app.require_subcommand(1);
  CommonFlags run_flags;
  CommonFlags batch_flags;
  CommonFlags validate_flags;
  auto* run = app.add_subcommand("run", "Run one episode per configured strategy");
  auto* batch = app.add_subcommand("batch", "Run the scenario battery x repeats x strategies");
  auto* check = app.add_subcommand("validate", "Validate a config and print the effective settings");
  add_common_flags(run, run_flags, true);
  add_common_flags(batch, batch_flags, true);
  add_common_flags(check, validate_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*batch) return cmd_batch(batch_flags);
    return cmd_validate(validate_flags);
  } catch (const dcee::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
