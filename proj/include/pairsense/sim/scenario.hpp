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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pairsense/escalation.hpp"
#include "pairsense/proximity.hpp"
#include "pairsense/session.hpp"
#include "pairsense/transport.hpp"

namespace pairsense::sim {

// Couple behavior ground truth: alternating together/apart bouts with
// exponential lengths, and a two-state per-second speech process per partner
// whose stationary speaking fraction depends on co-location.
struct BehaviorParams {
  double together_bout_mean_min = 70.0;
  double apart_bout_mean_min = 20.0;
  double speech_prob_together = 0.10;   // stationary speaking fraction
  double speech_prob_apart = 0.02;
  double speech_burst_mean_s = 12.0;    // mean talking-burst length
  double distance_together_min_m = 0.5;
  double distance_together_max_m = 10.0;
  double distance_apart_m = 50.0;
  // Watches left on a table near a running TV: proximity plus non-partner
  // speech. Probability that a together-bout is such a bout.
  double tv_bout_prob = 0.12;
};

struct ComplianceParams {
  double start_prob = 0.61;                 // P(start a shown self-report)
  double complete_prob = 0.97;              // P(complete | started)
  double diary_prob = 0.85;                 // P(end-of-day diary completed)
};

struct FaultParams {
  double charge_failure_daily_prob = 0.0;  // watch off for the whole day
  double crash_hourly_prob = 0.0;
  double restart_fail_prob = 0.0;          // self-restart fails, watchdog needed
  bool watchdog_enabled = true;
  std::vector<transport::OutageInterval> internet_outages;
  std::vector<transport::OutageInterval> server_hangups;
};

struct TransportParams {
  TimeMs ble_latency_ms = 50;
  TimeMs datalayer_latency_ms = 200;
  TimeMs internet_latency_ms = 500;
  TimeMs jitter_ms = 0;
  double drop_prob = 0.0;
  double ble_failure_prob = 0.0;
  int ble_failure_cap = 3;
  bool store_and_forward = false;
};

enum class VadMode { GroundTruth, Dsp };

struct Scenario {
  int version = 1;
  std::uint64_t seed = 42;
  int n_couples = 13;
  int days = 7;  // day 0 is a Monday
  escalation::AvailabilityWindows windows;
  BehaviorParams behavior;
  ComplianceParams compliance;
  FaultParams faults;
  TransportParams transport;
  proximity::PathLossModel pathloss;
  proximity::ProximityConfig prox;
  session::TimingConfig timing;
  VadMode mode = VadMode::GroundTruth;
};

Scenario default_scenario();

// All constraint violations, empty when valid.
std::vector<std::string> validate(const Scenario& scenario);

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::vector<std::string> violations);
  std::vector<std::string> violations;
};

// JSON file; unspecified fields keep their defaults. Throws ScenarioError on
// constraint violations.
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace pairsense::sim
