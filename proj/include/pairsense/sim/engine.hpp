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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pairsense/obslog.hpp"
#include "pairsense/sim/scenario.hpp"
#include "pairsense/sim/trace.hpp"

namespace pairsense::sim {

// Conversation-capture rate under each recording policy: (a) the
// interaction-triggered policy of the session machine, (b) a fixed-minute
// scheduled recording every availability hour, (c) a random-minute recording
// every availability hour. Empty when no recording happened under a policy.
struct PolicyRates {
  std::optional<double> triggered;
  std::optional<double> scheduled;
  std::optional<double> random;
};

struct FaultTally {
  long charge_failure_days = 0;
  long crashes = 0;
  long self_restarts = 0;
  long watchdog_recoveries = 0;
  long ble_stack_resets = 0;
  long relay_failures = 0;  // self-report prompt never reached the phone
};

struct EscalationTally {
  long reminder_sms_morning = 0;
  long reminder_sms_evening = 0;
  long participant_sms = 0;
  long supervisor_email = 0;
};

struct SimReport {
  obslog::CollectionCounts counts;
  obslog::CollectionMetrics collection;
  obslog::ConversationMetrics conversation;
  long retained_triggered = 0;
  long retained_backup = 0;
  PolicyRates policies;
  FaultTally faults;
  EscalationTally escalation;
  // Timing facts the output validator needs to re-check session invariants.
  long min_gap_min = 20;
  int backup_minute = 44;
};

struct RunResult {
  std::vector<std::string> couple_ids;
  // Per couple, in emission order: config records, then per-hour BLE, error
  // and hourly records.
  std::map<std::string, std::vector<obslog::LogRecord>> logs;
  std::vector<obslog::RecordingAnnotation> annotations;
  std::vector<std::string> escalation_lines;
  SimReport report;
};

// Full deterministic study run: identical scenario, identical bytes out.
RunResult run(const Scenario& scenario);

PolicyRates compare_policies(const Scenario& scenario);

// logs/<couple>.log, annotations.csv, report.txt, report.json,
// escalation.log under out_dir (created if missing).
void write_outputs(const RunResult& result, const std::filesystem::path& out_dir);

// Re-derives the collection counts from parsed log records; the inverse of
// the run-side bookkeeping.
obslog::CollectionCounts derive_counts(const std::vector<obslog::LogRecord>& records);

// Self-consistency pass over a written output directory: recomputed counts
// and metrics must match report.json and the session invariants must hold on
// the logs. Returns violations, empty when consistent.
std::vector<std::string> validate_outputs(const std::filesystem::path& out_dir);

std::string format_report(const SimReport& report);
std::string report_to_json(const SimReport& report);

}  // namespace pairsense::sim
