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

#ifndef DCEE_IO_HPP
#define DCEE_IO_HPP

#include <ostream>

#include <json.hpp>

#include "dcee/estimator.hpp"
#include "dcee/simulator.hpp"

namespace dcee {

/// Trace columns, in file order.
inline constexpr const char* kTraceColumns =
    "step,x,y,z,z_value,detected,mean_sx,mean_sy,mean_sz,mean_q,cov_trace,action_heading_deg,rmse";

/// One row per step. The first line is a `#` comment holding the effective configuration.
void write_trace_csv(std::ostream& os, const RunRecord& rec, const Scenario& sc, const nlohmann::json& config);

/// {"parameters": {name: [...]}, "weights": [...]} with wind_dir in radians.
nlohmann::json posterior_to_json(const ParticleSet& ps);
ParticleSet posterior_from_json(const nlohmann::json& j);

nlohmann::json metrics_to_json(const Metrics& m);

nlohmann::json batch_report_to_json(const BatchReport& report, const nlohmann::json& config);

/// step followed by one mean-RMSE column per strategy.
void write_batch_rmse_csv(std::ostream& os, const BatchReport& report, const nlohmann::json& config);

/// Acquisition table: one row per strategy (scenario "all") and per (scenario, strategy).
void write_acquisition_csv(std::ostream& os, const BatchReport& report, const nlohmann::json& config);

}  // namespace dcee

#endif  // DCEE_IO_HPP
