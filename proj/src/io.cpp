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

#include "dcee/io.hpp"

#include <cstdio>
#include <string>

#include "dcee/planner.hpp"

namespace dcee {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string heading_label(const std::optional<Action>& a) {
  if (!a) return "";
  if (a->elevation > 0) return "up";
  if (a->elevation < 0) return "down";
  return std::to_string(a->heading_deg);
}

json acquisition_to_json(const AcquisitionSummary& s) {
  return json{{"cells", s.cells},
              {"completed", s.completed},
              {"source_acquired", s.source_acquired},
              {"plume_acquired", s.plume_acquired},
              {"source_acquisition_rate", s.source_rate()},
              {"plume_acquisition_rate", s.plume_rate()}};
}

void config_comment(std::ostream& os, const json& config) { os << "# effective_config=" << config.dump() << '\n'; }

void acquisition_row(std::ostream& os, std::string_view strategy, const std::string& scenario,
                     const AcquisitionSummary& s) {
  os << strategy << ',' << scenario << ',' << s.cells << ',' << s.completed << ',' << s.source_acquired << ','
     << (s.cells - s.source_acquired) << ',' << s.plume_acquired << ',' << (s.cells - s.plume_acquired) << ','
     << fmt(s.source_rate()) << ',' << fmt(s.plume_rate()) << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& os, const RunRecord& rec, const Scenario& sc, const json& config) {
  config_comment(os, config);
  os << kTraceColumns << '\n';
  for (const auto& row : rec.rows) {
    const auto& mean = row.posterior_mean;
    os << row.step << ',' << fmt(row.position.x) << ',' << fmt(row.position.y) << ',' << fmt(row.position.z) << ','
       << fmt(row.measurement.value) << ',' << (row.measurement.detected ? 1 : 0) << ',' << fmt(mean.source.x) << ','
       << fmt(mean.source.y) << ',' << fmt(mean.source.z) << ',' << fmt(mean.release_rate) << ','
       << fmt(row.cov_trace) << ',' << heading_label(row.action) << ','
       << fmt(position_rmse(mean.source, sc.ground_truth.source, sc.rmse_mode)) << '\n';
  }
}

json posterior_to_json(const ParticleSet& ps) {
  json params = json::object();
  for (const auto p : kAllParams) {
    std::vector<double> values;
    values.reserve(ps.size());
    for (const auto& theta : ps.particles) {
      values.push_back(get_param(theta, p));
    }
    params[std::string(param_name(p))] = std::move(values);
  }
  return json{{"count", ps.size()}, {"parameters", std::move(params)}, {"weights", ps.weights}};
}

ParticleSet posterior_from_json(const json& j) {
  ParticleSet ps;
  ps.weights = j.at("weights").get<std::vector<double>>();
  ps.particles.resize(ps.weights.size());
  for (const auto p : kAllParams) {
    const auto values = j.at("parameters").at(std::string(param_name(p))).get<std::vector<double>>();
    for (std::size_t i = 0; i < values.size() && i < ps.particles.size(); ++i) {
      set_param(ps.particles[i], p, values[i]);
    }
  }
  return ps;
}

json metrics_to_json(const Metrics& m) {
  json j{{"final_rmse", m.final_rmse},
         {"source_acquired", m.source_acquired},
         {"plume_acquired", m.plume_acquired},
         {"first_detection_step", nullptr},
         {"rmse_series", m.rmse_series}};
  if (m.first_detection_step) {
    j["first_detection_step"] = *m.first_detection_step;
  }
  return j;
}

json batch_report_to_json(const BatchReport& report, const json& config) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json cell{{"scenario", report.scenario_names[c.scenario_index]},
              {"scenario_index", c.scenario_index},
              {"strategy", to_string(c.strategy)},
              {"repeat", c.repeat},
              {"seed", c.seed},
              {"completed", c.completed}};
    if (c.completed) {
      cell["final_rmse"] = c.metrics.final_rmse;
      cell["source_acquired"] = c.metrics.source_acquired;
      cell["plume_acquired"] = c.metrics.plume_acquired;
      cell["first_detection_step"] = c.metrics.first_detection_step ? json(*c.metrics.first_detection_step) : json();
    } else {
      cell["error"] = c.error;
    }
    cells.push_back(std::move(cell));
  }
  json strategies = json::object();
  for (const auto& s : report.strategies) {
    json per_scenario = json::object();
    for (std::size_t i = 0; i < s.per_scenario.size(); ++i) {
      per_scenario[report.scenario_names[i]] = acquisition_to_json(s.per_scenario[i]);
    }
    strategies[std::string(to_string(s.strategy))] = json{{"overall", acquisition_to_json(s.overall)},
                                                          {"per_scenario", std::move(per_scenario)},
                                                          {"mean_final_rmse", s.mean_final_rmse},
                                                          {"mean_rmse", s.mean_rmse}};
  }
  return json{{"config", config},
              {"base_seed", report.base_seed},
              {"repeats", report.repeats},
              {"scenarios", report.scenario_names},
              {"strategies", std::move(strategies)},
              {"cells", std::move(cells)}};
}

void write_batch_rmse_csv(std::ostream& os, const BatchReport& report, const json& config) {
  config_comment(os, config);
  os << "step";
  std::size_t steps = 0;
  for (const auto& s : report.strategies) {
    os << ',' << to_string(s.strategy);
    steps = std::max(steps, s.mean_rmse.size());
  }
  os << '\n';
  for (std::size_t k = 0; k < steps; ++k) {
    os << k;
    for (const auto& s : report.strategies) {
      os << ',' << (k < s.mean_rmse.size() ? fmt(s.mean_rmse[k]) : "");
    }
    os << '\n';
  }
}

void write_acquisition_csv(std::ostream& os, const BatchReport& report, const json& config) {
  config_comment(os, config);
  os << "strategy,scenario,cells,completed,source_acquired,source_not_acquired,plume_acquired,plume_not_acquired,"
        "source_rate,plume_rate\n";
  for (const auto& s : report.strategies) {
    acquisition_row(os, to_string(s.strategy), "all", s.overall);
    for (std::size_t i = 0; i < s.per_scenario.size(); ++i) {
      acquisition_row(os, to_string(s.strategy), report.scenario_names[i], s.per_scenario[i]);
    }
  }
}

}  // namespace dcee
