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

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pairsense/escalation.hpp"
#include "pairsense/session.hpp"
#include "pairsense/time.hpp"

namespace pairsense::obslog {

// Line-delimited structured records: one JSON object per line, tagged with a
// "type" field and a schema version. Greppable, append-safe, diff-friendly.
inline constexpr int kSchemaVersion = 1;

// An event counter inside an hourly log: explicit count plus the timestamps,
// which must agree.
struct EventCount {
  std::vector<TimeMs> at;

  int count() const { return static_cast<int>(at.size()); }
  friend bool operator==(const EventCount&, const EventCount&) = default;
};

struct ConfigLog {
  std::string couple_id;
  std::string device;  // "A" (central) or "B" (peripheral)
  int days = 7;
  escalation::AvailabilityWindows windows;

  friend bool operator==(const ConfigLog&, const ConfigLog&) = default;
};

struct BeforeStudyLog {
  TimeMs timestamp = 0;
  double battery_level = 0.0;
  TimeMs ms_until_start = 0;
  int exceptions_prev_hour = 0;

  friend bool operator==(const BeforeStudyLog&, const BeforeStudyLog&) = default;
};

struct HourlyLog {
  std::string couple_id;
  std::string device;
  TimeMs timestamp = 0;   // written at the end of the hour it covers
  TimeMs hour_start = 0;  // the covered hour
  double battery_level = 100.0;
  EventCount ble_scan_or_advertise;
  EventCount closeness_met;
  EventCount no_silence_detections;
  EventCount vad_detections;
  EventCount connections;
  EventCount recordings;
  EventCount selfreport_alert1;
  EventCount selfreport_alert2;
  EventCount selfreport_started;
  EventCount selfreport_completed;
  bool was_backup = false;
  bool audio_discarded = false;
  EventCount errors;
  EventCount restarts;
  bool internet_available = true;
  double storage_remaining_mb = 0.0;

  friend bool operator==(const HourlyLog&, const HourlyLog&) = default;
};

struct BleLog {
  std::string couple_id;
  TimeMs timestamp = 0;
  double rssi_dbm = 0.0;

  friend bool operator==(const BleLog&, const BleLog&) = default;
};

struct ErrorLog {
  std::string couple_id;
  std::string device;
  TimeMs timestamp = 0;
  std::string message;

  friend bool operator==(const ErrorLog&, const ErrorLog&) = default;
};

using LogRecord = std::variant<ConfigLog, BeforeStudyLog, HourlyLog, BleLog, ErrorLog>;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
        line_number(line_number) {}
  int line_number;
};

// parse_log(write_log(r)) == r, exactly.
std::string write_log(const LogRecord& record);
LogRecord parse_log(const std::string& line, int line_number = 0);
std::vector<LogRecord> parse_log_file(const std::string& path);

struct RecordingAnnotation {
  std::string recording_id;
  bool has_speech = false;
  bool male_spoke = false;
  bool female_spoke = false;
  bool conversation = false;  // implies both partners spoke
  session::RecordingKind kind = session::RecordingKind::Triggered;
};

void validate(const RecordingAnnotation& a);
void write_annotations_csv(const std::string& path,
                           const std::vector<RecordingAnnotation>& annotations);
std::vector<RecordingAnnotation> read_annotations_csv(const std::string& path);

struct CollectionCounts {
  long total_expected = 0;
  long expected_app_running = 0;
  long sensor_collected = 0;
  long selfreport_triggered = 0;
  long selfreport_started = 0;
  long selfreport_completed = 0;
};

// completed <= started <= triggered <= expected_app_running <= total_expected
void validate(const CollectionCounts& counts);

// Percentage of a ratio, half-up rounded to one decimal.
double round_percent(long numerator, long denominator);

struct CollectionMetrics {
  // Percentages; empty when the denominator is zero.
  std::optional<double> collected_of_total;
  std::optional<double> collected_of_running;
  std::optional<double> triggered_of_total;
  std::optional<double> triggered_of_running;
  std::optional<double> started_of_triggered;
  std::optional<double> completed_of_triggered;
};

// Throws when the study-level denominators (total expected, expected with the
// app running) are zero; per-trigger ratios degrade to empty instead, so the
// caller can print "n/a".
CollectionMetrics collection_metrics(const CollectionCounts& counts);

struct ConversationMetrics {
  std::optional<double> speech_overall;
  std::optional<double> speech_triggered;
  std::optional<double> speech_backup;
  std::optional<double> conversation_overall;
  std::optional<double> conversation_triggered;
  std::optional<double> either_spoke_triggered;
  std::optional<double> conversation_backup;
};

ConversationMetrics conversation_metrics(const std::vector<RecordingAnnotation>& annotations);

// Count of availability hours covered by an hourly log (the only observable
// for "the app was running").
long app_running_hours(const std::vector<HourlyLog>& logs,
                       const escalation::AvailabilityWindows& windows);

// Whether an absolute hour lies in the availability window; day 0 is a
// Monday, days 5-6 weekend.
bool hour_in_windows(TimeMs hour_start, const escalation::AvailabilityWindows& windows);

}  // namespace pairsense::obslog
