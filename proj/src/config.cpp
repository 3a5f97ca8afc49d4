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

#include "dcee/config.hpp"

#include <cmath>
#include <fstream>
#include <thread>

#include "dcee/errors.hpp"

namespace dcee {

using nlohmann::json;

namespace {

constexpr const char* kTruth = "truth";
constexpr const char* kBounds = "bounds";

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

json battery_item_schema() { return json{{"name", ""}, {"source", {0.0, 0.0, 0.0}}, {"wind_dir_deg", 0.0}}; }

void check_value(const json& value, const json& schema, const std::string& path);

void check_object(const json& value, const json& schema, const std::string& path) {
  if (!value.is_object()) {
    throw ConfigError(path, "expected an object");
  }
  for (const auto& [key, child] : value.items()) {
    const auto it = schema.find(key);
    if (it == schema.end()) {
      throw ConfigError(join(path, key), "unknown key");
    }
    check_value(child, *it, join(path, key));
  }
}

void check_value(const json& value, const json& schema, const std::string& path) {
  if (schema.is_object()) {
    check_object(value, schema, path);
  } else if (schema.is_boolean()) {
    if (!value.is_boolean()) throw ConfigError(path, "expected a boolean");
  } else if (schema.is_number_unsigned() || schema.is_number_integer()) {
    if (!value.is_number_integer()) throw ConfigError(path, "expected an integer");
    if (schema.is_number_unsigned() && !value.is_number_unsigned() && value.get<std::int64_t>() < 0) {
      throw ConfigError(path, "must be >= 0");
    }
  } else if (schema.is_number()) {
    if (!value.is_number()) throw ConfigError(path, "expected a number");
  } else if (schema.is_string()) {
    const auto& s = schema.get_ref<const std::string&>();
    if (s == kTruth || s == kBounds) {
      if (!(value.is_number() || (value.is_string() && value.get_ref<const std::string&>() == s))) {
        throw ConfigError(path, "expected a number or \"" + s + "\"");
      }
    } else if (!value.is_string()) {
      throw ConfigError(path, "expected a string");
    }
  } else if (schema.is_array()) {
    if (!value.is_array()) throw ConfigError(path, "expected an array");
    if (path.ends_with("battery")) {
      const json item = battery_item_schema();
      for (std::size_t i = 0; i < value.size(); ++i) {
        check_object(value[i], item, indexed(path, i));
        for (const char* required : {"source", "wind_dir_deg"}) {
          if (!value[i].contains(required)) {
            throw ConfigError(join(indexed(path, i), required), "missing required key");
          }
        }
      }
    } else if (path.ends_with("strategies")) {
      if (value.empty()) throw ConfigError(path, "at least one strategy is required");
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_string() || !parse_strategy(value[i].get<std::string>())) {
          throw ConfigError(indexed(path, i), "expected one of dcee, mpc, entrotaxis");
        }
      }
    } else {
      if (value.size() != schema.size()) {
        throw ConfigError(path, "expected " + std::to_string(schema.size()) + " numbers");
      }
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw ConfigError(indexed(path, i), "expected a number");
      }
    }
  }
}

double number(const json& j, const std::string& key, const std::string& path) {
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw ConfigError(join(path, key), "must be finite");
  return v;
}

Position position(const json& j, const std::string& path) {
  const auto& a = j;
  if (!a.is_array() || a.size() != 3) throw ConfigError(path, "expected [x, y, z]");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Interval interval(const json& a, const std::string& path) {
  if (!a.is_array() || a.size() != 2) throw ConfigError(path, "expected [min, max]");
  Interval i{a[0].get<double>(), a[1].get<double>()};
  if (!(i.min < i.max)) throw ConfigError(path, "min must be < max");
  return i;
}

double resolve(const json& v, double fallback) { return v.is_string() ? fallback : v.get<double>(); }

template <class T>
T checked_int(const json& j, const std::string& key, const std::string& path, long long lo) {
  const auto v = j.at(key).get<long long>();
  if (v < lo) throw ConfigError(join(path, key), "must be >= " + std::to_string(lo));
  return static_cast<T>(v);
}

Scenario build_scenario(const json& s, const json* battery_entry, std::size_t battery_index) {
  const std::string path = "scenario";
  Scenario sc;
  sc.name = s.at("name").get<std::string>();
  sc.seed = s.at("seed").get<std::uint64_t>();
  sc.step_budget = checked_int<int>(s, "step_budget", path, 0);
  sc.particle_count = checked_int<std::size_t>(s, "particle_count", path, 2);
  sc.resample_threshold_ratio = number(s, "resample_threshold_ratio", path);
  sc.acquisition_threshold = number(s, "acquisition_threshold", path);
  const auto rmse_mode = s.at("rmse_mode").get<std::string>();
  if (rmse_mode == "per_axis") {
    sc.rmse_mode = RmseMode::kPerAxis;
  } else if (rmse_mode == "euclidean") {
    sc.rmse_mode = RmseMode::kEuclidean;
  } else {
    throw ConfigError(join(path, "rmse_mode"), "expected per_axis or euclidean");
  }

  const auto& gt = s.at("ground_truth");
  const std::string gt_path = join(path, "ground_truth");
  sc.ground_truth.source = position(gt.at("source"), join(gt_path, "source"));
  sc.ground_truth.release_rate = number(gt, "release_rate", gt_path);
  sc.ground_truth.wind_speed = number(gt, "wind_speed", gt_path);
  sc.ground_truth.wind_dir = normalize_angle(deg_to_rad(number(gt, "wind_dir_deg", gt_path)));
  sc.ground_truth.diffusivity = number(gt, "diffusivity", gt_path);
  sc.ground_truth.particle_lifetime = number(gt, "particle_lifetime", gt_path);
  if (battery_entry != nullptr) {
    const std::string bpath = indexed("battery", battery_index);
    sc.ground_truth.source = position(battery_entry->at("source"), join(bpath, "source"));
    sc.ground_truth.wind_dir = normalize_angle(deg_to_rad(battery_entry->at("wind_dir_deg").get<double>()));
    sc.name = battery_entry->value("name", std::string{});
    if (sc.name.empty()) sc.name = "source_" + std::to_string(battery_index);
  }

  const auto& b = s.at("bounds");
  const std::string b_path = join(path, "bounds");
  sc.bounds.x = interval(b.at("x"), join(b_path, "x"));
  sc.bounds.y = interval(b.at("y"), join(b_path, "y"));
  sc.bounds.z = interval(b.at("z"), join(b_path, "z"));
  sc.start = position(s.at("start"), join(path, "start"));

  const auto& sn = s.at("sensor");
  const std::string sn_path = join(path, "sensor");
  sc.sensor.threshold = number(sn, "threshold", sn_path);
  sc.sensor.detect_prob = number(sn, "detect_prob", sn_path);
  sc.sensor.noise_std_detect = number(sn, "noise_std_detect", sn_path);
  sc.sensor.noise_ratio_detect = number(sn, "noise_ratio_detect", sn_path);
  sc.sensor.noise_std_nondetect = number(sn, "noise_std_nondetect", sn_path);
  sc.sensor.miss_model_prob = number(sn, "miss_model_prob", sn_path);
  sc.sensor.likelihood_floor = number(sn, "likelihood_floor", sn_path);

  const auto& pr = s.at("prior");
  const auto& truth = sc.ground_truth;
  const auto uniform = [&](const char* key, const Interval& axis) {
    const auto& e = pr.at(key);
    return ParamPrior<Uniform>{{resolve(e.at("lo"), axis.min), resolve(e.at("hi"), axis.max)}, e.at("free").get<bool>()};
  };
  const auto normal = [&](const char* key, double truth_value, double unit) {
    const auto& e = pr.at(key);
    return ParamPrior<Normal>{{resolve(e.at("mean"), truth_value / unit) * unit, e.at("variance").get<double>() * unit * unit},
                              e.at("free").get<bool>()};
  };
  sc.prior.source_x = uniform("source_x", sc.bounds.x);
  sc.prior.source_y = uniform("source_y", sc.bounds.y);
  sc.prior.source_z = uniform("source_z", sc.bounds.z);
  const auto& q = pr.at("release_rate");
  sc.prior.release_rate = {{q.at("shape").get<double>(), q.at("scale").get<double>()}, q.at("free").get<bool>()};
  sc.prior.wind_speed = normal("wind_speed", truth.wind_speed, 1.0);
  sc.prior.wind_dir = normal("wind_dir_deg", truth.wind_dir, deg_to_rad(1.0));
  sc.prior.diffusivity = normal("diffusivity", truth.diffusivity, 1.0);
  sc.prior.particle_lifetime = normal("particle_lifetime", truth.particle_lifetime, 1.0);
  sc.prior.fixed = truth;

  const auto& mc = s.at("mcmc");
  const std::string mc_path = join(path, "mcmc");
  sc.mcmc.proposals_per_particle = checked_int<int>(mc, "proposals_per_particle", mc_path, 0);
  sc.mcmc.proposal_scale = number(mc, "proposal_scale", mc_path);
  sc.mcmc.regularization = number(mc, "regularization", mc_path);

  const auto& pl = s.at("planner");
  const std::string pl_path = join(path, "planner");
  sc.planner.step_size = number(pl, "step_size", pl_path);
  sc.planner.predictions_per_step = checked_int<int>(pl, "predictions_per_step", pl_path, 1);
  sc.planner.horizon = checked_int<int>(pl, "horizon", pl_path, 1);
  sc.planner.entropy_bins = checked_int<int>(pl, "entropy_bins", pl_path, 1);
  sc.planner.vertical_moves = pl.at("vertical_moves").get<bool>();

  try {
    validate(sc);
  } catch (const ConfigError& e) {
    const std::string& p = e.path();
    // Prior and planner validators report paths relative to the scenario.
    if (p.starts_with("prior") || p.starts_with("planner") || p.starts_with("particle_count")) {
      std::string message = e.what();
      message = message.substr(message.find(": ") + 2);
      throw ConfigError(join(path, p), message);
    }
    throw;
  }
  if (battery_entry != nullptr && !sc.bounds.contains(sc.ground_truth.source)) {
    throw ConfigError(join(indexed("battery", battery_index), "source"), "source must lie inside scenario.bounds");
  }
  return sc;
}

}  // namespace

json default_config_json() {
  const json uniform_bounds = {{"free", true}, {"lo", kBounds}, {"hi", kBounds}};
  return json{
      {"schema_version", kSchemaVersion},
      {"output_dir", "out"},
      {"strategies", {"dcee", "mpc", "entrotaxis"}},
      {"repeats", 10},
      {"base_seed", 1U},
      {"jobs", 0},
      {"scenario",
       {{"name", "default"},
        {"seed", 1U},
        {"step_budget", 900},
        {"particle_count", 20000},
        {"resample_threshold_ratio", 0.5},
        {"rmse_mode", "per_axis"},
        {"acquisition_threshold", 3.0},
        {"ground_truth",
         {{"source", {25.0, 25.0, 1.0}},
          {"release_rate", 5.0},
          {"wind_speed", 4.0},
          {"wind_dir_deg", 0.0},
          {"diffusivity", 1.0},
          {"particle_lifetime", 8.0}}},
        {"bounds", {{"x", {0.0, 50.0}}, {"y", {0.0, 50.0}}, {"z", {0.0, 8.0}}}},
        {"start", {2.0, 2.0, 4.0}},
        {"sensor",
         {{"threshold", SensorParams{}.threshold},
          {"detect_prob", SensorParams{}.detect_prob},
          {"noise_std_detect", SensorParams{}.noise_std_detect},
          {"noise_ratio_detect", SensorParams{}.noise_ratio_detect},
          {"noise_std_nondetect", SensorParams{}.noise_std_nondetect},
          {"miss_model_prob", SensorParams{}.miss_model_prob},
          {"likelihood_floor", SensorParams{}.likelihood_floor}}},
        {"prior",
         {{"source_x", uniform_bounds},
          {"source_y", uniform_bounds},
          {"source_z", uniform_bounds},
          {"release_rate", {{"free", true}, {"shape", 2.0}, {"scale", 5.0}}},
          {"wind_speed", {{"free", false}, {"mean", kTruth}, {"variance", 2.0}}},
          {"wind_dir_deg", {{"free", false}, {"mean", kTruth}, {"variance", 10.0}}},
          {"diffusivity", {{"free", false}, {"mean", kTruth}, {"variance", 2.0}}},
          {"particle_lifetime", {{"free", false}, {"mean", kTruth}, {"variance", 2.0}}}}},
        {"mcmc",
         {{"proposals_per_particle", McmcConfig{}.proposals_per_particle},
          {"proposal_scale", McmcConfig{}.proposal_scale},
          {"regularization", McmcConfig{}.regularization}}},
        {"planner",
         {{"step_size", PlannerConfig{}.step_size},
          {"predictions_per_step", PlannerConfig{}.predictions_per_step},
          {"horizon", PlannerConfig{}.horizon},
          {"entropy_bins", PlannerConfig{}.entropy_bins},
          {"vertical_moves", PlannerConfig{}.vertical_moves}}}}},
      {"battery", json::array()},
  };
}

std::vector<Scenario> RunConfig::batch_scenarios() const {
  return battery.empty() ? std::vector<Scenario>{scenario} : battery;
}

RunConfig parse_config(const json& doc, const ConfigOverrides& overrides) {
  if (!doc.is_object()) {
    throw ConfigError("", "config root must be an object");
  }
  if (!doc.contains("schema_version")) {
    throw ConfigError("schema_version", "missing required key");
  }
  json schema = default_config_json();
  check_object(doc, schema, "");
  if (doc.at("schema_version").get<long long>() != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  }

  json effective = schema;
  effective.merge_patch(doc);
  if (overrides.seed) {
    effective["scenario"]["seed"] = *overrides.seed;
    effective["base_seed"] = *overrides.seed;
  }
  if (overrides.strategy) effective["strategies"] = json::array({std::string(to_string(*overrides.strategy))});
  if (overrides.repeats) effective["repeats"] = *overrides.repeats;
  if (overrides.jobs) effective["jobs"] = *overrides.jobs;
  if (overrides.output_dir) effective["output_dir"] = *overrides.output_dir;
  if (overrides.particles) effective["scenario"]["particle_count"] = *overrides.particles;
  if (overrides.horizon) effective["scenario"]["planner"]["horizon"] = *overrides.horizon;

  RunConfig cfg;
  cfg.scenario = build_scenario(effective.at("scenario"), nullptr, 0);
  for (const auto& s : effective.at("strategies")) {
    cfg.strategies.push_back(*parse_strategy(s.get<std::string>()));
  }
  const auto& battery = effective.at("battery");
  for (std::size_t i = 0; i < battery.size(); ++i) {
    cfg.battery.push_back(build_scenario(effective.at("scenario"), &battery[i], i));
  }
  cfg.repeats = checked_int<int>(effective, "repeats", "", 1);
  cfg.base_seed = effective.at("base_seed").get<std::uint64_t>();
  const int jobs = checked_int<int>(effective, "jobs", "", 0);
  cfg.jobs = jobs > 0 ? jobs : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  cfg.output_dir = effective.at("output_dir").get<std::string>();
  cfg.effective = std::move(effective);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", "cannot open config file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc, overrides);
}

}  // namespace dcee
