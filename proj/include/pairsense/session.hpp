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
#include <vector>

#include "pairsense/time.hpp"

namespace pairsense::session {

enum class Role { Central, Peripheral };

struct TimingConfig {
  TimeMs record_duration = 5 * kMsPerMinute;
  TimeMs first_alert_wait = 2 * kMsPerMinute;
  TimeMs second_alert_wait = 2 * kMsPerMinute;
  TimeMs min_gap = 20 * kMsPerMinute;
  int backup_minute = 44;
  TimeMs selfreport_expiry = 4 * kMsPerMinute;
  TimeMs eod_expiry = 45 * kMsPerMinute;
};

enum class Phase {
  Idle,
  Scanning,
  Connected,
  VadListening,
  Recording,
  AwaitingSelfReport,
  HourDone,
};

enum class RecordingKind { Triggered, Backup };

enum class SelfReportStatus { NotTriggered, Triggered, Started, Completed, Expired };

struct RecordingRecord {
  TimeMs start = 0;
  TimeMs end = 0;
  RecordingKind kind = RecordingKind::Triggered;
  bool retained = false;
  SelfReportStatus selfreport = SelfReportStatus::NotTriggered;
};

enum class TimerId { Backup, Alert };

enum class EventKind {
  HourStart,
  ProximityMet,
  ConnectFailed,
  SpeechDetected,
  RecordingComplete,
  SelfReportStarted,
  SelfReportCompleted,
  TimerFired,
  BackupTimeReached,
  HourEnd,
};

struct SessionEvent {
  EventKind kind;
  TimeMs at = 0;
  TimerId timer = TimerId::Backup;  // meaningful for TimerFired only
};

enum class ActionKind {
  StartScan,
  StartAdvertise,
  ConnectPeer,
  StartVad,
  StartRecording,
  StartPeerRecording,
  Vibrate,
  SendRecordingDoneIntent,
  DeleteAudio,
  RetainAudio,
  ScheduleTimer,
  StartBackupRecording,
};

struct Action {
  ActionKind kind;
  TimerId timer = TimerId::Backup;  // for ScheduleTimer
  TimeMs at = 0;                    // for ScheduleTimer

  friend bool operator==(const Action&, const Action&) = default;
};

// Central-watch state. Transitions are pure; the per-hour record list and
// the cross-hour last_recording_start live here so that advance needs no
// hidden context.
struct SessionState {
  Role role = Role::Central;
  Phase phase = Phase::Idle;
  TimeMs hour_start = 0;
  RecordingKind rec_kind = RecordingKind::Triggered;
  TimeMs rec_started_at = 0;
  int alerts_sent = 0;
  TimeMs selfreport_deadline = 0;
  std::optional<TimeMs> last_recording_start;  // persists across hours
  std::vector<RecordingRecord> records;        // this hour, start-ordered
};

struct StepResult {
  SessionState state;
  std::vector<Action> actions;
};

class InvalidTransition : public std::logic_error {
 public:
  InvalidTransition(Phase phase, EventKind event);
  Phase phase;
  EventKind event;
};

// Pure transition function. Stale timers are dropped silently; truly illegal
// (phase, event) pairs throw InvalidTransition.
StepResult advance(const SessionState& state, const SessionEvent& event,
                   const TimingConfig& config);

// Start-to-start minimum gap; boundary inclusive, and no prior recording in
// the study epoch always qualifies.
bool eligible_to_start(TimeMs now, std::optional<TimeMs> last_recording_start,
                       const TimingConfig& config);

// A backup is due from the backup minute onward when no recording of this
// hour is pending or kept (every earlier one expired) and none is running.
bool backup_due(const SessionState& state, TimeMs clock, const TimingConfig& config);

// Retention pass over one hour's records: only the last recording may be
// kept, and only when its self-report was at least started.
std::vector<RecordingRecord> retain(std::vector<RecordingRecord> records);

// Timestamp-based kind, as used when post-processing: minute 44 onward is a
// backup slot.
RecordingKind classify_kind(TimeMs start_timestamp);

// Reduced peripheral mirror: advertises, records on peer command, runs its
// own backup clock. Self-report handling is owned by its phone, not modeled
// here.
struct PeripheralMirror {
  enum class Phase { Idle, Advertising, Connected, Recording, HourDone };
  Phase phase = Phase::Idle;
  TimeMs hour_start = 0;
  int recordings_this_hour = 0;

  void hour_start_at(TimeMs t);
  void peer_connected();
  void start_recording();
  void recording_complete();
  void hour_end();
};

const char* to_string(Phase phase);
const char* to_string(EventKind kind);
const char* to_string(ActionKind kind);
const char* to_string(SelfReportStatus status);
const char* to_string(RecordingKind kind);

// One line-delimited debug record: timestamp, state before, event, state
// after, action list.
std::string format_transition(TimeMs at, const SessionState& before,
                              const SessionEvent& event, const StepResult& result);

}  // namespace pairsense::session
