// Copyright 2026 The Pairsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pairsense/sim/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pairsense::sim {

using nlohmann::json;

Scenario default_scenario() {
  Scenario s;
  s.faults.charge_failure_daily_prob = 0.01;
  s.faults.crash_hourly_prob = 0.02;
  s.faults.restart_fail_prob = 0.2;
  return s;
}

ScenarioError::ScenarioError(std::vector<std::string> violations_in)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "invalid scenario:";
        for (const auto& v : violations_in) os << "\n  - " << v;
        return os.str();
      }()),
      violations(std::move(violations_in)) {}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> violations;
  auto prob = [&](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      violations.push_back(std::string(name) + " must be in [0, 1]");
    }
  };
  if (s.days < 1) violations.push_back("days must be >= 1");
  if (s.n_couples < 1) violations.push_back("n_couples must be >= 1");
  try {
    escalation::validate(s.windows);
  } catch (const std::invalid_argument& e) {
    violations.push_back(e.what());
  }
  prob(s.behavior.speech_prob_together, "behavior.speech_prob_together");
  prob(s.behavior.speech_prob_apart, "behavior.speech_prob_apart");
  prob(s.behavior.tv_bout_prob, "behavior.tv_bout_prob");
  if (s.behavior.speech_prob_together >= 1.0) {
    violations.push_back("behavior.speech_prob_together must be < 1");
  }
  if (s.behavior.together_bout_mean_min <= 0 || s.behavior.apart_bout_mean_min <= 0) {
    violations.push_back("behavior bout means must be positive");
  }
  if (s.behavior.distance_together_min_m <= 0 ||
      s.behavior.distance_together_max_m < s.behavior.distance_together_min_m ||
      s.behavior.distance_apart_m <= 0) {
    violations.push_back("behavior distances must be positive and ordered");
  }
  prob(s.compliance.start_prob, "compliance.start_prob");
  prob(s.compliance.complete_prob, "compliance.complete_prob");
  prob(s.compliance.diary_prob, "compliance.diary_prob");
  prob(s.faults.charge_failure_daily_prob, "faults.charge_failure_daily_prob");
  prob(s.faults.crash_hourly_prob, "faults.crash_hourly_prob");
  prob(s.faults.restart_fail_prob, "faults.restart_fail_prob");
  prob(s.transport.drop_prob, "transport.drop_prob");
  prob(s.transport.ble_failure_prob, "transport.ble_failure_prob");
  if (s.transport.ble_failure_cap < 1) {
    violations.push_back("transport.ble_failure_cap must be >= 1");
  }
  if (s.pathloss.path_loss_exponent < 1.0) {
    violations.push_back("pathloss.path_loss_exponent must be >= 1");
  }
  if (s.pathloss.noise_std_db < 0.0) {
    violations.push_back("pathloss.noise_std_db must be >= 0");
  }
  if (!(s.prox.threshold_dbm < 0.0)) {
    violations.push_back("prox.threshold_dbm must be negative");
  }
  if (s.prox.scan_period_ms <= 0) {
    violations.push_back("prox.scan_period_ms must be positive");
  }
  const auto& t = s.timing;
  if (t.record_duration <= 0 || t.first_alert_wait <= 0 || t.second_alert_wait <= 0 ||
      t.min_gap <= 0 || t.selfreport_expiry <= 0 || t.eod_expiry <= 0) {
    violations.push_back("timing durations must be positive");
  }
  if (t.backup_minute < 0 || t.backup_minute * kMsPerMinute + t.record_duration > kMsPerHour) {
    violations.push_back("timing.backup_minute must leave room for a full recording");
  }
  return violations;
}

namespace {

json outages_to_json(const std::vector<transport::OutageInterval>& outages) {
  json arr = json::array();
  for (const auto& o : outages) arr.push_back(json::array({o.start, o.end}));
  return arr;
}

std::vector<transport::OutageInterval> outages_from_json(const json& arr) {
  std::vector<transport::OutageInterval> out;
  for (const auto& o : arr) {
    out.push_back({o.at(0).get<TimeMs>(), o.at(1).get<TimeMs>()});
  }
  return out;
}

template <typename T>
void maybe(const json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

void maybe_range(const json& j, const char* key, escalation::HourRange& range) {
  if (j.contains(key)) {
    range.start = j.at(key).at(0).get<int>();
    range.end = j.at(key).at(1).get<int>();
  }
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scenario file " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw std::runtime_error("scenario parse error: " + std::string(e.what()));
  }

  Scenario s = default_scenario();
  maybe(j, "version", s.version);
  if (s.version != 1) throw std::runtime_error("unsupported scenario version");
  maybe(j, "seed", s.seed);
  maybe(j, "n_couples", s.n_couples);
  maybe(j, "days", s.days);
  if (j.contains("availability")) {
    const auto& a = j.at("availability");
    maybe_range(a, "weekday_morning", s.windows.weekday_morning);
    maybe_range(a, "weekday_evening", s.windows.weekday_evening);
    maybe_range(a, "weekend_morning", s.windows.weekend_morning);
    maybe_range(a, "weekend_evening", s.windows.weekend_evening);
  }
  if (j.contains("behavior")) {
    const auto& b = j.at("behavior");
    maybe(b, "together_bout_mean_min", s.behavior.together_bout_mean_min);
    maybe(b, "apart_bout_mean_min", s.behavior.apart_bout_mean_min);
    maybe(b, "speech_prob_together", s.behavior.speech_prob_together);
    maybe(b, "speech_prob_apart", s.behavior.speech_prob_apart);
    maybe(b, "speech_burst_mean_s", s.behavior.speech_burst_mean_s);
    maybe(b, "distance_together_min_m", s.behavior.distance_together_min_m);
    maybe(b, "distance_together_max_m", s.behavior.distance_together_max_m);
    maybe(b, "distance_apart_m", s.behavior.distance_apart_m);
    maybe(b, "tv_bout_prob", s.behavior.tv_bout_prob);
  }
  if (j.contains("compliance")) {
    const auto& c = j.at("compliance");
    maybe(c, "start_prob", s.compliance.start_prob);
    maybe(c, "complete_prob", s.compliance.complete_prob);
    maybe(c, "diary_prob", s.compliance.diary_prob);
  }
  if (j.contains("faults")) {
    const auto& f = j.at("faults");
    maybe(f, "charge_failure_daily_prob", s.faults.charge_failure_daily_prob);
    maybe(f, "crash_hourly_prob", s.faults.crash_hourly_prob);
    maybe(f, "restart_fail_prob", s.faults.restart_fail_prob);
    maybe(f, "watchdog_enabled", s.faults.watchdog_enabled);
    if (f.contains("internet_outages")) {
      s.faults.internet_outages = outages_from_json(f.at("internet_outages"));
    }
    if (f.contains("server_hangups")) {
      s.faults.server_hangups = outages_from_json(f.at("server_hangups"));
    }
  }
  if (j.contains("transport")) {
    const auto& t = j.at("transport");
    maybe(t, "ble_latency_ms", s.transport.ble_latency_ms);
    maybe(t, "datalayer_latency_ms", s.transport.datalayer_latency_ms);
    maybe(t, "internet_latency_ms", s.transport.internet_latency_ms);
    maybe(t, "jitter_ms", s.transport.jitter_ms);
    maybe(t, "drop_prob", s.transport.drop_prob);
    maybe(t, "ble_failure_prob", s.transport.ble_failure_prob);
    maybe(t, "ble_failure_cap", s.transport.ble_failure_cap);
    maybe(t, "store_and_forward", s.transport.store_and_forward);
  }
  if (j.contains("pathloss")) {
    const auto& p = j.at("pathloss");
    maybe(p, "rssi_at_1m_dbm", s.pathloss.rssi_at_1m_dbm);
    maybe(p, "path_loss_exponent", s.pathloss.path_loss_exponent);
    maybe(p, "noise_std_db", s.pathloss.noise_std_db);
    maybe(p, "threshold_dbm", s.prox.threshold_dbm);
    maybe(p, "scan_period_ms", s.prox.scan_period_ms);
  }
  if (j.contains("timing")) {
    const auto& t = j.at("timing");
    auto maybe_min = [&](const char* key, TimeMs& value) {
      if (t.contains(key)) value = t.at(key).get<TimeMs>() * kMsPerMinute;
    };
    maybe_min("record_duration_min", s.timing.record_duration);
    maybe_min("first_alert_wait_min", s.timing.first_alert_wait);
    maybe_min("second_alert_wait_min", s.timing.second_alert_wait);
    maybe_min("min_gap_min", s.timing.min_gap);
    maybe(t, "backup_minute", s.timing.backup_minute);
    maybe_min("selfreport_expiry_min", s.timing.selfreport_expiry);
    maybe_min("eod_expiry_min", s.timing.eod_expiry);
  }
  if (j.contains("mode")) {
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "ground-truth") {
      s.mode = VadMode::GroundTruth;
    } else if (mode == "dsp") {
      s.mode = VadMode::Dsp;
    } else {
      throw std::runtime_error("scenario mode must be 'ground-truth' or 'dsp'");
    }
  }

  auto violations = validate(s);
  if (!violations.empty()) throw ScenarioError(std::move(violations));
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  json j{
      {"version", s.version},
      {"seed", s.seed},
      {"n_couples", s.n_couples},
      {"days", s.days},
      {"availability",
       {{"weekday_morning", {s.windows.weekday_morning.start, s.windows.weekday_morning.end}},
        {"weekday_evening", {s.windows.weekday_evening.start, s.windows.weekday_evening.end}},
        {"weekend_morning", {s.windows.weekend_morning.start, s.windows.weekend_morning.end}},
        {"weekend_evening", {s.windows.weekend_evening.start, s.windows.weekend_evening.end}}}},
      {"behavior",
       {{"together_bout_mean_min", s.behavior.together_bout_mean_min},
        {"apart_bout_mean_min", s.behavior.apart_bout_mean_min},
        {"speech_prob_together", s.behavior.speech_prob_together},
        {"speech_prob_apart", s.behavior.speech_prob_apart},
        {"speech_burst_mean_s", s.behavior.speech_burst_mean_s},
        {"distance_together_min_m", s.behavior.distance_together_min_m},
        {"distance_together_max_m", s.behavior.distance_together_max_m},
        {"distance_apart_m", s.behavior.distance_apart_m},
        {"tv_bout_prob", s.behavior.tv_bout_prob}}},
      {"compliance",
       {{"start_prob", s.compliance.start_prob},
        {"complete_prob", s.compliance.complete_prob},
        {"diary_prob", s.compliance.diary_prob}}},
      {"faults",
       {{"charge_failure_daily_prob", s.faults.charge_failure_daily_prob},
        {"crash_hourly_prob", s.faults.crash_hourly_prob},
        {"restart_fail_prob", s.faults.restart_fail_prob},
        {"watchdog_enabled", s.faults.watchdog_enabled},
        {"internet_outages", outages_to_json(s.faults.internet_outages)},
        {"server_hangups", outages_to_json(s.faults.server_hangups)}}},
      {"transport",
       {{"ble_latency_ms", s.transport.ble_latency_ms},
        {"datalayer_latency_ms", s.transport.datalayer_latency_ms},
        {"internet_latency_ms", s.transport.internet_latency_ms},
        {"jitter_ms", s.transport.jitter_ms},
        {"drop_prob", s.transport.drop_prob},
        {"ble_failure_prob", s.transport.ble_failure_prob},
        {"ble_failure_cap", s.transport.ble_failure_cap},
        {"store_and_forward", s.transport.store_and_forward}}},
      {"pathloss",
       {{"rssi_at_1m_dbm", s.pathloss.rssi_at_1m_dbm},
        {"path_loss_exponent", s.pathloss.path_loss_exponent},
        {"noise_std_db", s.pathloss.noise_std_db},
        {"threshold_dbm", s.prox.threshold_dbm},
        {"scan_period_ms", s.prox.scan_period_ms}}},
      {"timing",
       {{"record_duration_min", s.timing.record_duration / kMsPerMinute},
        {"first_alert_wait_min", s.timing.first_alert_wait / kMsPerMinute},
        {"second_alert_wait_min", s.timing.second_alert_wait / kMsPerMinute},
        {"min_gap_min", s.timing.min_gap / kMsPerMinute},
        {"backup_minute", s.timing.backup_minute},
        {"selfreport_expiry_min", s.timing.selfreport_expiry / kMsPerMinute},
        {"eod_expiry_min", s.timing.eod_expiry / kMsPerMinute}}},
      {"mode", s.mode == VadMode::GroundTruth ? "ground-truth" : "dsp"},
  };
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write scenario file " + path.string());
  os << j.dump(2) << "\n";
}

}  // namespace pairsense::sim
