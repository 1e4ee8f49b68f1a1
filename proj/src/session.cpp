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

#include "pairsense/session.hpp"

#include <sstream>

namespace pairsense::session {

namespace {

bool has_pending_or_kept_record(const SessionState& state) {
  for (const auto& r : state.records) {
    if (r.selfreport == SelfReportStatus::Triggered ||
        r.selfreport == SelfReportStatus::Started ||
        r.selfreport == SelfReportStatus::Completed) {
      return true;
    }
  }
  return false;
}

TimeMs hour_end_of(const SessionState& state) { return state.hour_start + kMsPerHour; }

bool recording_fits(const SessionState& state, TimeMs start, const TimingConfig& config) {
  return start + config.record_duration <= hour_end_of(state);
}

void start_recording(SessionState& state, std::vector<Action>& actions, TimeMs at,
                     RecordingKind kind) {
  state.phase = Phase::Recording;
  state.rec_kind = kind;
  state.rec_started_at = at;
  state.last_recording_start = at;
  RecordingRecord record;
  record.start = at;
  record.kind = kind;
  state.records.push_back(record);
  if (kind == RecordingKind::Triggered) {
    actions.push_back({ActionKind::StartRecording});
    actions.push_back({ActionKind::StartPeerRecording});
  } else {
    actions.push_back({ActionKind::StartBackupRecording});
  }
}

// Backup timer while the machine is free to record. Reschedules once past a
// still-open minimum gap; otherwise the slot is forfeited for the hour.
void handle_backup_timer(SessionState& state, std::vector<Action>& actions, TimeMs at,
                         const TimingConfig& config) {
  if (has_pending_or_kept_record(state)) return;
  if (!recording_fits(state, at, config)) return;
  if (!eligible_to_start(at, state.last_recording_start, config)) {
    TimeMs retry_at = *state.last_recording_start + config.min_gap;
    if (recording_fits(state, retry_at, config)) {
      actions.push_back({ActionKind::ScheduleTimer, TimerId::Backup, retry_at});
    }
    return;
  }
  start_recording(state, actions, at, RecordingKind::Backup);
}

}  // namespace

InvalidTransition::InvalidTransition(Phase phase_in, EventKind event_in)
    : std::logic_error(std::string("invalid transition: ") + to_string(event_in) +
                       " in phase " + to_string(phase_in)),
      phase(phase_in),
      event(event_in) {}

bool eligible_to_start(TimeMs now, std::optional<TimeMs> last_recording_start,
                       const TimingConfig& config) {
  return !last_recording_start || now - *last_recording_start >= config.min_gap;
}

bool backup_due(const SessionState& state, TimeMs clock, const TimingConfig& config) {
  return minute_of_hour(clock) >= config.backup_minute && state.phase != Phase::Recording &&
         !has_pending_or_kept_record(state);
}

RecordingKind classify_kind(TimeMs start_timestamp) {
  return minute_of_hour(start_timestamp) >= 44 ? RecordingKind::Backup
                                               : RecordingKind::Triggered;
}

std::vector<RecordingRecord> retain(std::vector<RecordingRecord> records) {
  for (auto& r : records) r.retained = false;
  if (!records.empty()) {
    auto& last = records.back();
    if (last.selfreport == SelfReportStatus::Started ||
        last.selfreport == SelfReportStatus::Completed) {
      last.retained = true;
    }
  }
  return records;
}

StepResult advance(const SessionState& state, const SessionEvent& event,
                   const TimingConfig& config) {
  StepResult result{state, {}};
  SessionState& s = result.state;
  std::vector<Action>& actions = result.actions;
  const TimeMs at = event.at;

  switch (event.kind) {
    case EventKind::HourStart: {
      if (s.phase != Phase::Idle && s.phase != Phase::HourDone) {
        throw InvalidTransition(s.phase, event.kind);
      }
      s.phase = Phase::Scanning;
      s.hour_start = at;
      s.records.clear();
      s.alerts_sent = 0;
      actions.push_back({s.role == Role::Central ? ActionKind::StartScan
                                                 : ActionKind::StartAdvertise});
      actions.push_back({ActionKind::ScheduleTimer, TimerId::Backup,
                         at + config.backup_minute * kMsPerMinute});
      return result;
    }

    case EventKind::ProximityMet: {
      switch (s.phase) {
        case Phase::Scanning:
          s.phase = Phase::Connected;
          actions.push_back({ActionKind::ConnectPeer});
          actions.push_back({ActionKind::StartVad});
          return result;
        case Phase::Connected:
        case Phase::VadListening:
          s.phase = Phase::VadListening;
          return result;
        case Phase::Recording:
        case Phase::AwaitingSelfReport:
          return result;  // continuous RSSI observations keep arriving
        default:
          throw InvalidTransition(s.phase, event.kind);
      }
    }

    case EventKind::ConnectFailed: {
      if (s.phase != Phase::Connected && s.phase != Phase::VadListening) {
        throw InvalidTransition(s.phase, event.kind);
      }
      s.phase = Phase::Scanning;
      actions.push_back({ActionKind::StartScan});
      return result;
    }

    case EventKind::SpeechDetected: {
      switch (s.phase) {
        case Phase::Connected:
        case Phase::VadListening:
          if (eligible_to_start(at, s.last_recording_start, config) &&
              recording_fits(s, at, config)) {
            start_recording(s, actions, at, RecordingKind::Triggered);
          }
          return result;
        case Phase::Recording:
        case Phase::AwaitingSelfReport:
          return result;  // speech continues; VAD output is moot here
        default:
          throw InvalidTransition(s.phase, event.kind);
      }
    }

    case EventKind::RecordingComplete: {
      if (s.phase != Phase::Recording) throw InvalidTransition(s.phase, event.kind);
      s.records.back().end = at;
      s.records.back().selfreport = SelfReportStatus::Triggered;
      s.phase = Phase::AwaitingSelfReport;
      s.alerts_sent = 1;
      s.selfreport_deadline = at + config.first_alert_wait;
      actions.push_back({ActionKind::Vibrate});
      actions.push_back({ActionKind::SendRecordingDoneIntent});
      actions.push_back({ActionKind::ScheduleTimer, TimerId::Alert, s.selfreport_deadline});
      return result;
    }

    case EventKind::SelfReportStarted: {
      if (s.phase != Phase::AwaitingSelfReport) throw InvalidTransition(s.phase, event.kind);
      s.records.back().selfreport = SelfReportStatus::Started;
      s.phase = Phase::Scanning;
      s.alerts_sent = 0;
      actions.push_back({ActionKind::RetainAudio});
      actions.push_back({ActionKind::StartScan});
      return result;
    }

    case EventKind::SelfReportCompleted: {
      for (auto it = s.records.rbegin(); it != s.records.rend(); ++it) {
        if (it->selfreport == SelfReportStatus::Started) {
          it->selfreport = SelfReportStatus::Completed;
          return result;
        }
      }
      throw InvalidTransition(s.phase, event.kind);
    }

    case EventKind::BackupTimeReached:
    case EventKind::TimerFired: {
      TimerId id = event.kind == EventKind::BackupTimeReached ? TimerId::Backup : event.timer;
      if (id == TimerId::Alert) {
        if (s.phase != Phase::AwaitingSelfReport || at != s.selfreport_deadline) {
          return result;  // stale
        }
        if (s.alerts_sent == 1) {
          s.alerts_sent = 2;
          s.selfreport_deadline = at + config.second_alert_wait;
          actions.push_back({ActionKind::Vibrate});
          actions.push_back({ActionKind::ScheduleTimer, TimerId::Alert, s.selfreport_deadline});
        } else {
          s.records.back().selfreport = SelfReportStatus::Expired;
          s.alerts_sent = 0;
          s.phase = Phase::Scanning;
          actions.push_back({ActionKind::DeleteAudio});
          actions.push_back({ActionKind::StartScan});
        }
        return result;
      }
      // backup timer
      switch (s.phase) {
        case Phase::Scanning:
        case Phase::Connected:
        case Phase::VadListening:
          handle_backup_timer(s, actions, at, config);
          return result;
        case Phase::Recording:
        case Phase::AwaitingSelfReport:
        case Phase::HourDone:
        case Phase::Idle:
          return result;  // stale or superseded
      }
      return result;
    }

    case EventKind::HourEnd: {
      if (s.phase == Phase::Idle || s.phase == Phase::HourDone) {
        throw InvalidTransition(s.phase, event.kind);
      }
      if (s.phase == Phase::Recording) {
        s.records.back().end = at;
        actions.push_back({ActionKind::DeleteAudio});
      } else if (s.phase == Phase::AwaitingSelfReport) {
        s.records.back().selfreport = SelfReportStatus::Expired;
        actions.push_back({ActionKind::DeleteAudio});
      }
      s.phase = Phase::HourDone;
      s.alerts_sent = 0;
      return result;
    }
  }
  throw InvalidTransition(s.phase, event.kind);
}

void PeripheralMirror::hour_start_at(TimeMs t) {
  phase = Phase::Advertising;
  hour_start = t;
  recordings_this_hour = 0;
}

void PeripheralMirror::peer_connected() {
  if (phase == Phase::Advertising) phase = Phase::Connected;
}

void PeripheralMirror::start_recording() {
  if (phase == Phase::Advertising || phase == Phase::Connected) {
    phase = Phase::Recording;
    ++recordings_this_hour;
  }
}

void PeripheralMirror::recording_complete() {
  if (phase == Phase::Recording) phase = Phase::Advertising;
}

void PeripheralMirror::hour_end() { phase = Phase::HourDone; }

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Idle: return "Idle";
    case Phase::Scanning: return "Scanning";
    case Phase::Connected: return "Connected";
    case Phase::VadListening: return "VadListening";
    case Phase::Recording: return "Recording";
    case Phase::AwaitingSelfReport: return "AwaitingSelfReport";
    case Phase::HourDone: return "HourDone";
  }
  return "?";
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::HourStart: return "HourStart";
    case EventKind::ProximityMet: return "ProximityMet";
    case EventKind::ConnectFailed: return "ConnectFailed";
    case EventKind::SpeechDetected: return "SpeechDetected";
    case EventKind::RecordingComplete: return "RecordingComplete";
    case EventKind::SelfReportStarted: return "SelfReportStarted";
    case EventKind::SelfReportCompleted: return "SelfReportCompleted";
    case EventKind::TimerFired: return "TimerFired";
    case EventKind::BackupTimeReached: return "BackupTimeReached";
    case EventKind::HourEnd: return "HourEnd";
  }
  return "?";
}

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::StartScan: return "StartScan";
    case ActionKind::StartAdvertise: return "StartAdvertise";
    case ActionKind::ConnectPeer: return "ConnectPeer";
    case ActionKind::StartVad: return "StartVad";
    case ActionKind::StartRecording: return "StartRecording";
    case ActionKind::StartPeerRecording: return "StartPeerRecording";
    case ActionKind::Vibrate: return "Vibrate";
    case ActionKind::SendRecordingDoneIntent: return "SendRecordingDoneIntent";
    case ActionKind::DeleteAudio: return "DeleteAudio";
    case ActionKind::RetainAudio: return "RetainAudio";
    case ActionKind::ScheduleTimer: return "ScheduleTimer";
    case ActionKind::StartBackupRecording: return "StartBackupRecording";
  }
  return "?";
}

const char* to_string(SelfReportStatus status) {
  switch (status) {
    case SelfReportStatus::NotTriggered: return "NotTriggered";
    case SelfReportStatus::Triggered: return "Triggered";
    case SelfReportStatus::Started: return "Started";
    case SelfReportStatus::Completed: return "Completed";
    case SelfReportStatus::Expired: return "Expired";
  }
  return "?";
}

const char* to_string(RecordingKind kind) {
  return kind == RecordingKind::Triggered ? "Triggered" : "Backup";
}

std::string format_transition(TimeMs at, const SessionState& before,
                              const SessionEvent& event, const StepResult& result) {
  std::ostringstream os;
  os << at << '\t' << to_string(before.phase) << '\t' << to_string(event.kind) << '\t'
     << to_string(result.state.phase) << '\t';
  for (std::size_t i = 0; i < result.actions.size(); ++i) {
    if (i) os << ',';
    os << to_string(result.actions[i].kind);
    if (result.actions[i].kind == ActionKind::ScheduleTimer) {
      os << '(' << (result.actions[i].timer == TimerId::Backup ? "backup" : "alert") << '@'
         << result.actions[i].at << ')';
    }
  }
  return os.str();
}

}  // namespace pairsense::session
