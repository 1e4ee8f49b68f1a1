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

#include "pairsense/sim/engine.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "pairsense/proximity.hpp"
#include "pairsense/session.hpp"
#include "pairsense/transport.hpp"
#include "pairsense/vad/audio.hpp"
#include "pairsense/vad/model.hpp"
#include "pairsense/vad/train.hpp"

namespace pairsense::sim {

using nlohmann::json;
using obslog::EventCount;
using obslog::HourlyLog;
using obslog::LogRecord;
using session::RecordingKind;
using session::SelfReportStatus;

namespace {

// Substream tags, per couple: trace = idx*16+1 (see generate_traces), the
// rest below. Fault and policy draws are keyed by (day, hour) so that
// compare_policies can recompute them without replaying the run.
constexpr std::uint64_t kStreamNoise = 2;
constexpr std::uint64_t kStreamComplianceA = 3;
constexpr std::uint64_t kStreamComplianceB = 4;
constexpr std::uint64_t kStreamTransport = 5;
constexpr std::uint64_t kStreamFaults = 6;
constexpr std::uint64_t kStreamPolicy = 7;
constexpr std::uint64_t kStreamAudio = 8;

std::string couple_name(int index) {
  std::ostringstream os;
  os << 'c' << std::setw(2) << std::setfill('0') << index + 1;
  return os.str();
}

bool is_weekend(int day) { return day % 7 >= 5; }

const escalation::HourRange& morning_of(const Scenario& sc, int day) {
  return is_weekend(day) ? sc.windows.weekend_morning : sc.windows.weekday_morning;
}

const escalation::HourRange& evening_of(const Scenario& sc, int day) {
  return is_weekend(day) ? sc.windows.weekend_evening : sc.windows.weekday_evening;
}

bool in_windows(const Scenario& sc, int day, int hour) {
  return morning_of(sc, day).contains(hour) || evening_of(sc, day).contains(hour);
}

struct ChargeDraw {
  bool failed = false;
};

ChargeDraw charge_draw(const Rng& fault_stream, int day, double prob) {
  Rng r = fault_stream.substream(100 + static_cast<std::uint64_t>(day));
  return {prob > 0.0 && r.bernoulli(prob)};
}

struct CrashDraw {
  bool crash = false;
  int second = 0;
  bool restart_ok = true;
};

CrashDraw crash_draw(const Rng& fault_stream, int day, int hour, const FaultParams& f) {
  Rng r = fault_stream.substream(1000 + static_cast<std::uint64_t>(day) * 24 + hour);
  CrashDraw d;
  d.crash = f.crash_hourly_prob > 0.0 && r.bernoulli(f.crash_hourly_prob);
  d.second = static_cast<int>(r.uniform_index(3590));
  d.restart_ok = !(f.restart_fail_prob > 0.0 && r.bernoulli(f.restart_fail_prob));
  return d;
}

int random_policy_minute(const Rng& policy_stream, int day, int hour) {
  Rng r = policy_stream.substream(static_cast<std::uint64_t>(day) * 24 + hour);
  return static_cast<int>(r.uniform_index(55));
}

struct EngineEvent {
  enum class Kind {
    Timer,
    RecComplete,
    SelfStartA,
    SelfCompleteA,
    SelfStartB,
    SelfCompleteB,
    AlertB2,
    ExpireB,
  };
  Kind kind;
  TimeMs at = 0;
  session::TimerId timer = session::TimerId::Backup;
  int seq = 0;
};

// Peripheral-side recording bookkeeping; spans mirror the central records,
// the self-report flow is this partner's own.
struct BRecord {
  TimeMs start = 0;
  TimeMs end = 0;
  RecordingKind kind = RecordingKind::Triggered;
  SelfReportStatus status = SelfReportStatus::NotTriggered;
};

struct DayReportStats {
  int completed_morning_a = 0;
  int completed_evening_a = 0;
  int completed_morning_b = 0;
  int completed_evening_b = 0;
};

class CoupleSim {
 public:
  CoupleSim(const Scenario& sc, int index, const CoupleTrace& trace,
            const vad::VadModel* model, const vad::MfccExtractor* extractor,
            const Rng& root, RunResult& out)
      : sc_(sc),
        index_(index),
        trace_(trace),
        model_(model),
        extractor_(extractor),
        id_(couple_name(index)),
        rng_noise_(root.substream(index * 16 + kStreamNoise)),
        rng_compl_a_(root.substream(index * 16 + kStreamComplianceA)),
        rng_compl_b_(root.substream(index * 16 + kStreamComplianceB)),
        rng_transport_(root.substream(index * 16 + kStreamTransport)),
        rng_audio_(root.substream(index * 16 + kStreamAudio)),
        fault_stream_(root.substream(index * 16 + kStreamFaults)),
        out_(out) {
    dl_a_ = {transport::LinkKind::DataLayer, "watchA", "phoneA",
             sc.transport.datalayer_latency_ms, sc.transport.jitter_ms,
             sc.transport.drop_prob, {}};
    dl_b_ = {transport::LinkKind::DataLayer, "watchB", "phoneB",
             sc.transport.datalayer_latency_ms, sc.transport.jitter_ms,
             sc.transport.drop_prob, {}};
    inet_a_ = {transport::LinkKind::Internet, "phoneA", "server",
               sc.transport.internet_latency_ms, sc.transport.jitter_ms,
               sc.transport.drop_prob, sc.faults.internet_outages};
    inet_b_ = {transport::LinkKind::Internet, "phoneB", "server",
               sc.transport.internet_latency_ms, sc.transport.jitter_ms,
               sc.transport.drop_prob, sc.faults.internet_outages};
  }

  void run_study() {
    auto& log = out_.logs[id_];
    log.push_back(obslog::ConfigLog{id_, "A", sc_.days, sc_.windows});
    log.push_back(obslog::ConfigLog{id_, "B", sc_.days, sc_.windows});
    for (int day = 0; day < sc_.days; ++day) run_day(day);
  }

 private:
  // --- per-day -------------------------------------------------------------

  void run_day(int day) {
    DayReportStats stats{};
    ChargeDraw charge = charge_draw(fault_stream_, day, sc_.faults.charge_failure_daily_prob);
    bool down_for_day = false;
    battery_ = 100.0;
    active_hours_today_ = 0;
    if (charge.failed) {
      ++out_.report.faults.charge_failure_days;
    } else {
      for (int hour = 0; hour < 24; ++hour) {
        if (!in_windows(sc_, day, hour)) continue;
        if (down_for_day) continue;
        down_for_day = !run_hour(day, hour, stats);
      }
    }
    end_of_day(day, stats);
  }

  void end_of_day(int day, const DayReportStats& stats) {
    auto [exp_m, exp_e] = escalation::expected_counts(
        sc_.windows, is_weekend(day) ? escalation::DayKind::Weekend
                                     : escalation::DayKind::Weekday);
    TimeMs afternoon_at = (static_cast<TimeMs>(day) * 24 + 14) * kMsPerHour;
    TimeMs eod_at = (static_cast<TimeMs>(day) * 24 + 23) * kMsPerHour;

    auto check_partner = [&](const char* partner, int cm, int ce, Rng& rng_cm) {
      escalation::DayStats ds;
      ds.expected_morning = exp_m;
      ds.completed_morning = cm;
      ds.expected_evening = exp_e;
      ds.completed_evening = ce;
      ds.diary_completed = rng_cm.bernoulli(sc_.compliance.diary_prob);
      emit_escalation(afternoon_at, partner, escalation::afternoon_check(ds));
      emit_escalation(eod_at, partner, escalation::end_of_day_check(ds));
    };
    check_partner("A", stats.completed_morning_a, stats.completed_evening_a, rng_compl_a_);
    check_partner("B", stats.completed_morning_b, stats.completed_evening_b, rng_compl_b_);
  }

  void emit_escalation(TimeMs at, const char* partner, const escalation::EscalationDecision& d) {
    auto line = [&](const char* action) {
      std::ostringstream os;
      os << "t=" << at << " couple=" << id_ << " partner=" << partner
         << " action=" << action;
      out_.escalation_lines.push_back(os.str());
    };
    auto& tally = out_.report.escalation;
    if (d.reminder_sms_morning) { ++tally.reminder_sms_morning; line("reminder_sms_morning"); }
    if (d.reminder_sms_evening) { ++tally.reminder_sms_evening; line("reminder_sms_evening"); }
    if (d.participant_sms) { ++tally.participant_sms; line("participant_sms"); }
    if (d.supervisor_email) { ++tally.supervisor_email; line("supervisor_email"); }
  }

  // --- per-hour ------------------------------------------------------------

  // Returns false when the device goes down unrecovered with the watchdog
  // disabled (the rest of the day is lost).
  bool run_hour(int day, int hour, DayReportStats& stats) {
    const TimeMs hour_start = (static_cast<TimeMs>(day) * 24 + hour) * kMsPerHour;
    const TimeMs hour_end = hour_start + kMsPerHour;
    hour_start_ = hour_start;
    hour_end_ = hour_end;
    CrashDraw crash = crash_draw(fault_stream_, day, hour, sc_.faults);

    queue_.clear();
    seq_ = 0;
    hour_records_.clear();
    b_records_.clear();
    init_hourly(hourly_a_, "A", hour_start);
    init_hourly(hourly_b_, "B", hour_start);

    apply(session::advance(state_, {session::EventKind::HourStart, hour_start},
                           sc_.timing), hour_start, AlertBucket::None);
    mirror_.hour_start_at(hour_start);
    hourly_b_.ble_scan_or_advertise.at.push_back(hour_start);

    bool dropped = false;
    for (int s = 0; s < 3600; ++s) {
      TimeMs t = hour_start + static_cast<TimeMs>(s) * 1000;
      if (crash.crash && s == crash.second) {
        if (!handle_crash(t, crash.restart_ok)) {
          dropped = true;
          break;
        }
        crash.crash = false;
      }
      drain_queue(t);
      sense(t, static_cast<std::size_t>(day) * 86400 +
                   static_cast<std::size_t>(hour) * 3600 + s);
    }

    if (dropped) {
      state_.phase = session::Phase::HourDone;
      state_.records.clear();
      mirror_.hour_end();
      return !(sc_.faults.watchdog_enabled == false);
    }

    drain_queue(hour_end - 1);
    apply(session::advance(state_, {session::EventKind::HourEnd, hour_end}, sc_.timing),
          hour_end, AlertBucket::None);
    mirror_.hour_end();
    if (!b_records_.empty() && b_records_.back().status == SelfReportStatus::Triggered) {
      b_records_.back().status = SelfReportStatus::Expired;
    }

    finalize_hour(day, hour, stats);
    return true;
  }

  void init_hourly(HourlyLog& h, const char* device, TimeMs hour_start) {
    h = HourlyLog{};
    h.couple_id = id_;
    h.device = device;
    h.hour_start = hour_start;
    h.timestamp = hour_start + kMsPerHour;
    h.internet_available = !inet_a_.in_outage(hour_start);
  }

  void finalize_hour(int day, int hour, DayReportStats& stats) {
    ++active_hours_today_;
    battery_ = std::max(5.0, 100.0 - 4.5 * active_hours_today_);

    auto finals = session::retain(state_.records);
    bool a_retained = false;
    for (const auto& r : finals) {
      if (!r.retained) continue;
      a_retained = true;
      storage_a_mb_ -= 2.5;
      emit_annotation("A", r.start, r.end, r.kind);
      tally_retained(r.kind);
    }
    bool b_retained = false;
    if (!b_records_.empty()) {
      const BRecord& last = b_records_.back();
      if (last.status == SelfReportStatus::Started ||
          last.status == SelfReportStatus::Completed) {
        b_retained = true;
        storage_b_mb_ -= 2.5;
        emit_annotation("B", last.start, last.end, last.kind);
        tally_retained(last.kind);
      }
    }

    hourly_a_.battery_level = battery_;
    hourly_b_.battery_level = battery_;
    hourly_a_.storage_remaining_mb = storage_a_mb_;
    hourly_b_.storage_remaining_mb = storage_b_mb_;
    hourly_a_.was_backup = std::any_of(finals.begin(), finals.end(), [](const auto& r) {
      return r.kind == RecordingKind::Backup;
    });
    hourly_b_.was_backup = std::any_of(b_records_.begin(), b_records_.end(), [](const auto& r) {
      return r.kind == RecordingKind::Backup;
    });
    hourly_a_.audio_discarded = !finals.empty() && !a_retained;
    hourly_b_.audio_discarded = !b_records_.empty() && !b_retained;

    auto& log = out_.logs[id_];
    for (auto& r : hour_records_) log.push_back(std::move(r));
    log.push_back(hourly_a_);
    log.push_back(hourly_b_);

    auto& counts = out_.report.counts;
    counts.expected_app_running += 2;
    bool a_started = false, a_completed = false;
    for (const auto& r : finals) {
      if (r.selfreport == SelfReportStatus::Started ||
          r.selfreport == SelfReportStatus::Completed) a_started = true;
      if (r.selfreport == SelfReportStatus::Completed) a_completed = true;
    }
    bool b_started = false, b_completed = false;
    for (const auto& r : b_records_) {
      if (r.status == SelfReportStatus::Started ||
          r.status == SelfReportStatus::Completed) b_started = true;
      if (r.status == SelfReportStatus::Completed) b_completed = true;
    }
    counts.selfreport_triggered += (finals.empty() ? 0 : 1) + (b_records_.empty() ? 0 : 1);
    counts.selfreport_started += (a_started ? 1 : 0) + (b_started ? 1 : 0);
    counts.selfreport_completed += (a_completed ? 1 : 0) + (b_completed ? 1 : 0);
    counts.sensor_collected += (a_retained ? 1 : 0) + (b_retained ? 1 : 0);

    bool morning = morning_of(sc_, day).contains(hour);
    if (a_completed) (morning ? stats.completed_morning_a : stats.completed_evening_a)++;
    if (b_completed) (morning ? stats.completed_morning_b : stats.completed_evening_b)++;
  }

  void tally_retained(RecordingKind kind) {
    if (kind == RecordingKind::Triggered) {
      ++out_.report.retained_triggered;
    } else {
      ++out_.report.retained_backup;
    }
  }

  void emit_annotation(const char* device, TimeMs start, TimeMs end, RecordingKind kind) {
    obslog::RecordingAnnotation a;
    std::ostringstream os;
    os << id_ << "-d" << start / kMsPerDay << "-h" << hour_of_day(start) << "-m"
       << minute_of_hour(start) << "-" << device;
    a.recording_id = os.str();
    std::size_t s0 = static_cast<std::size_t>(start / 1000);
    std::size_t len = static_cast<std::size_t>((end - start) / 1000);
    bool a_spoke = trace_.partner_spoke(s0, len, true);
    bool b_spoke = trace_.partner_spoke(s0, len, false);
    bool tv = false;
    for (std::size_t s = s0; s < std::min(s0 + len, trace_.seconds()); ++s) {
      if (trace_.tv_audio[s]) { tv = true; break; }
    }
    a.has_speech = a_spoke || b_spoke || tv;
    a.male_spoke = a_spoke;
    a.female_spoke = b_spoke;
    a.conversation = trace_.conversation_in(s0, len);
    a.kind = kind;
    out_.annotations.push_back(a);
  }

  // --- faults --------------------------------------------------------------

  // Returns false when the crash is unrecovered and the hour must be dropped.
  bool handle_crash(TimeMs t, bool restart_ok) {
    ++out_.report.faults.crashes;
    hour_records_.push_back(obslog::ErrorLog{id_, "A", t, "app crash"});
    hourly_a_.errors.at.push_back(t);
    if (!restart_ok) {
      if (sc_.faults.watchdog_enabled) ++out_.report.faults.watchdog_recoveries;
      return false;
    }
    ++out_.report.faults.self_restarts;
    TimeMs restart_at = t + 1000;
    hourly_a_.restarts.at.push_back(restart_at);

    // Central-side pending work dies with the process; the partner's own
    // phone flow (SelfStartB etc.) survives.
    std::erase_if(queue_, [](const EngineEvent& e) {
      return e.kind == EngineEvent::Kind::Timer ||
             e.kind == EngineEvent::Kind::RecComplete ||
             e.kind == EngineEvent::Kind::SelfStartA ||
             e.kind == EngineEvent::Kind::SelfCompleteA;
    });
    if (state_.phase == session::Phase::Recording) {
      state_.records.pop_back();
      mirror_.recording_complete();
      if (!b_records_.empty() && b_records_.back().end == 0) b_records_.pop_back();
      // the aborted recording never produced audio; unlog its start
      hourly_a_.recordings.at.pop_back();
      hourly_b_.recordings.at.pop_back();
    } else if (state_.phase == session::Phase::AwaitingSelfReport) {
      state_.records.back().selfreport = SelfReportStatus::Expired;
    }
    state_.phase = session::Phase::Scanning;
    state_.alerts_sent = 0;
    hourly_a_.ble_scan_or_advertise.at.push_back(restart_at);
    TimeMs backup_at = std::max(
        hour_start_ + static_cast<TimeMs>(sc_.timing.backup_minute) * kMsPerMinute,
        restart_at);
    push({EngineEvent::Kind::Timer, backup_at, session::TimerId::Backup});
    return true;
  }

  // --- event queue ---------------------------------------------------------

  void push(EngineEvent e) {
    e.seq = seq_++;
    queue_.push_back(e);
  }

  void drain_queue(TimeMs now) {
    while (true) {
      int best = -1;
      for (int i = 0; i < static_cast<int>(queue_.size()); ++i) {
        if (queue_[i].at > now) continue;
        if (best < 0 || queue_[i].at < queue_[best].at ||
            (queue_[i].at == queue_[best].at && queue_[i].seq < queue_[best].seq)) {
          best = i;
        }
      }
      if (best < 0) return;
      EngineEvent e = queue_[best];
      queue_.erase(queue_.begin() + best);
      dispatch(e);
    }
  }

  void dispatch(const EngineEvent& e) {
    switch (e.kind) {
      case EngineEvent::Kind::Timer: {
        AlertBucket bucket = e.timer == session::TimerId::Alert ? AlertBucket::Second
                                                                : AlertBucket::None;
        apply(session::advance(state_,
                               {session::EventKind::TimerFired, e.at, e.timer},
                               sc_.timing), e.at, bucket);
        return;
      }
      case EngineEvent::Kind::RecComplete: {
        if (state_.phase != session::Phase::Recording) return;
        apply(session::advance(state_, {session::EventKind::RecordingComplete, e.at},
                               sc_.timing), e.at, AlertBucket::First);
        mirror_.recording_complete();
        if (!b_records_.empty() && b_records_.back().end == 0) {
          b_records_.back().end = e.at;
          b_records_.back().status = SelfReportStatus::Triggered;
        }
        hourly_b_.selfreport_alert1.at.push_back(e.at);
        push({EngineEvent::Kind::AlertB2, e.at + sc_.timing.first_alert_wait});
        push({EngineEvent::Kind::ExpireB,
              e.at + sc_.timing.first_alert_wait + sc_.timing.second_alert_wait});
        begin_selfreport("B", e.at);
        return;
      }
      case EngineEvent::Kind::SelfStartA: {
        if (state_.phase != session::Phase::AwaitingSelfReport) return;
        apply(session::advance(state_, {session::EventKind::SelfReportStarted, e.at},
                               sc_.timing), e.at, AlertBucket::None);
        hourly_a_.selfreport_started.at.push_back(e.at);
        return;
      }
      case EngineEvent::Kind::SelfCompleteA: {
        bool any_started = std::any_of(
            state_.records.begin(), state_.records.end(), [](const auto& r) {
              return r.selfreport == SelfReportStatus::Started;
            });
        if (!any_started) return;
        apply(session::advance(state_, {session::EventKind::SelfReportCompleted, e.at},
                               sc_.timing), e.at, AlertBucket::None);
        hourly_a_.selfreport_completed.at.push_back(e.at);
        return;
      }
      case EngineEvent::Kind::SelfStartB: {
        if (b_records_.empty() || b_records_.back().status != SelfReportStatus::Triggered)
          return;
        b_records_.back().status = SelfReportStatus::Started;
        hourly_b_.selfreport_started.at.push_back(e.at);
        return;
      }
      case EngineEvent::Kind::SelfCompleteB: {
        if (b_records_.empty() || b_records_.back().status != SelfReportStatus::Started)
          return;
        b_records_.back().status = SelfReportStatus::Completed;
        hourly_b_.selfreport_completed.at.push_back(e.at);
        return;
      }
      case EngineEvent::Kind::AlertB2: {
        if (!b_records_.empty() && b_records_.back().status == SelfReportStatus::Triggered) {
          hourly_b_.selfreport_alert2.at.push_back(e.at);
        }
        return;
      }
      case EngineEvent::Kind::ExpireB: {
        if (!b_records_.empty() && b_records_.back().status == SelfReportStatus::Triggered) {
          b_records_.back().status = SelfReportStatus::Expired;
        }
        return;
      }
    }
  }

  // --- self-report relay + compliance --------------------------------------

  void begin_selfreport(const char* partner, TimeMs rec_end) {
    bool is_a = partner[0] == 'A';
    transport::Message intent{transport::MessageKind::RecordingDoneIntent,
                              is_a ? "watchA" : "watchB", is_a ? "phoneA" : "phoneB",
                              "", rec_end};
    transport::RelayConfig cfg;
    cfg.deadline_window = sc_.timing.selfreport_expiry;
    cfg.server_hangup = hangup_active(rec_end);
    cfg.store_and_forward = sc_.transport.store_and_forward;
    auto relay = transport::relay_selfreport_trigger(
        intent, is_a ? dl_a_ : dl_b_, is_a ? inet_a_ : inet_b_, cfg, rng_transport_);
    if (!relay.shown_at) {
      ++out_.report.faults.relay_failures;
      std::string msg = std::string("selfreport relay failed: ") +
                        transport::to_string(*relay.reason);
      hour_records_.push_back(obslog::ErrorLog{id_, is_a ? "A" : "B", rec_end, msg});
      (is_a ? hourly_a_ : hourly_b_).errors.at.push_back(rec_end);
      return;
    }
    Rng& rng_cm = is_a ? rng_compl_a_ : rng_compl_b_;
    if (!rng_cm.bernoulli(sc_.compliance.start_prob)) return;
    TimeMs start_at = *relay.shown_at + 15000 +
                      static_cast<TimeMs>(rng_cm.uniform_index(180)) * 1000;
    if (start_at >= hour_end_) return;
    push({is_a ? EngineEvent::Kind::SelfStartA : EngineEvent::Kind::SelfStartB, start_at});
    if (!rng_cm.bernoulli(sc_.compliance.complete_prob)) return;
    TimeMs complete_at = start_at + 20000 +
                         static_cast<TimeMs>(rng_cm.uniform_index(90)) * 1000;
    complete_at = std::max(start_at, std::min(complete_at, hour_end_ - 1000));
    push({is_a ? EngineEvent::Kind::SelfCompleteA : EngineEvent::Kind::SelfCompleteB,
          complete_at});
  }

  bool hangup_active(TimeMs t) const {
    for (const auto& o : sc_.faults.server_hangups) {
      if (t >= o.start && t < o.end) return true;
    }
    return false;
  }

  // --- per-second sensing --------------------------------------------------

  void sense(TimeMs t, std::size_t s_abs) {
    using session::Phase;
    switch (state_.phase) {
      case Phase::Scanning: {
        double rssi = proximity::predict_rssi(sc_.pathloss, trace_.distance_m[s_abs],
                                              rng_noise_.normal());
        if ((s_abs % 60) == 0) {
          hour_records_.push_back(obslog::BleLog{id_, t, rssi});
        }
        if (proximity::scan_step({t, rssi}, sc_.prox) ==
            proximity::ScanOutcome::AttemptConnect) {
          transport::BleConnectConfig cfg{sc_.transport.ble_failure_prob,
                                          sc_.transport.ble_failure_cap};
          switch (transport::ble_connect(ble_, true, cfg, rng_noise_)) {
            case transport::BleConnectOutcome::Connected:
              hourly_a_.closeness_met.at.push_back(t);
              hourly_a_.connections.at.push_back(t);
              hourly_b_.closeness_met.at.push_back(t);
              hourly_b_.connections.at.push_back(t);
              apply(session::advance(state_, {session::EventKind::ProximityMet, t},
                                     sc_.timing), t, AlertBucket::None);
              mirror_.peer_connected();
              break;
            case transport::BleConnectOutcome::StackResetPerformed:
              ++out_.report.faults.ble_stack_resets;
              hour_records_.push_back(obslog::ErrorLog{id_, "A", t, "ble stack reset"});
              hourly_a_.errors.at.push_back(t);
              break;
            case transport::BleConnectOutcome::Failed:
              break;
          }
        }
        return;
      }
      case Phase::Connected:
      case Phase::VadListening: {
        double rssi = proximity::predict_rssi(sc_.pathloss, trace_.distance_m[s_abs],
                                              rng_noise_.normal());
        if (!proximity::is_proximate({t, rssi}, sc_.prox)) {
          apply(session::advance(state_, {session::EventKind::ConnectFailed, t},
                                 sc_.timing), t, AlertBucket::None);
          return;
        }
        apply(session::advance(state_, {session::EventKind::ProximityMet, t}, sc_.timing),
              t, AlertBucket::None);
        if (!speech_at(s_abs)) return;
        hourly_a_.no_silence_detections.at.push_back(t);
        hourly_a_.vad_detections.at.push_back(t);
        apply(session::advance(state_, {session::EventKind::SpeechDetected, t}, sc_.timing),
              t, AlertBucket::None);
        return;
      }
      default:
        return;
    }
  }

  bool speech_at(std::size_t s_abs) {
    bool partner = trace_.partner_a_speaking[s_abs] || trace_.partner_b_speaking[s_abs];
    bool tv = trace_.tv_audio[s_abs] != 0;
    if (sc_.mode == VadMode::GroundTruth) return partner || tv;
    vad::Vec audio = (partner || tv) ? vad::synth_speech_like(1.0, rng_audio_)
                                     : vad::synth_noise(1.0, rng_audio_);
    return vad::decide_segment(*model_, *extractor_, audio) ==
           vad::SegmentDecision::Speech;
  }

  // --- action plumbing -----------------------------------------------------

  enum class AlertBucket { None, First, Second };

  void apply(const session::StepResult& result, TimeMs at, AlertBucket bucket) {
    state_ = result.state;
    for (const auto& a : result.actions) {
      switch (a.kind) {
        case session::ActionKind::StartScan:
        case session::ActionKind::StartAdvertise:
          hourly_a_.ble_scan_or_advertise.at.push_back(at);
          break;
        case session::ActionKind::ScheduleTimer:
          push({EngineEvent::Kind::Timer, a.at, a.timer});
          break;
        case session::ActionKind::StartRecording:
        case session::ActionKind::StartBackupRecording: {
          RecordingKind kind = a.kind == session::ActionKind::StartRecording
                                   ? RecordingKind::Triggered
                                   : RecordingKind::Backup;
          hourly_a_.recordings.at.push_back(at);
          hourly_b_.recordings.at.push_back(at);
          push({EngineEvent::Kind::RecComplete, at + sc_.timing.record_duration});
          mirror_.start_recording();
          b_records_.push_back({at, 0, kind, SelfReportStatus::NotTriggered});
          break;
        }
        case session::ActionKind::Vibrate:
          if (bucket == AlertBucket::First) {
            hourly_a_.selfreport_alert1.at.push_back(at);
          } else if (bucket == AlertBucket::Second) {
            hourly_a_.selfreport_alert2.at.push_back(at);
          }
          break;
        case session::ActionKind::SendRecordingDoneIntent:
          begin_selfreport("A", at);
          break;
        case session::ActionKind::ConnectPeer:
        case session::ActionKind::StartVad:
        case session::ActionKind::StartPeerRecording:
        case session::ActionKind::DeleteAudio:
        case session::ActionKind::RetainAudio:
          break;
      }
    }
  }

  // --- members -------------------------------------------------------------

  const Scenario& sc_;
  int index_;
  const CoupleTrace& trace_;
  const vad::VadModel* model_;
  const vad::MfccExtractor* extractor_;
  std::string id_;

  Rng rng_noise_;
  Rng rng_compl_a_;
  Rng rng_compl_b_;
  Rng rng_transport_;
  Rng rng_audio_;
  Rng fault_stream_;

  RunResult& out_;

  transport::Link dl_a_, dl_b_, inet_a_, inet_b_;
  transport::BleConnectionState ble_;
  session::SessionState state_;
  session::PeripheralMirror mirror_;

  std::vector<EngineEvent> queue_;
  int seq_ = 0;
  std::vector<BRecord> b_records_;
  std::vector<LogRecord> hour_records_;  // BLE + error records of the hour
  HourlyLog hourly_a_, hourly_b_;
  TimeMs hour_start_ = 0, hour_end_ = 0;
  double battery_ = 100.0;
  int active_hours_today_ = 0;
  double storage_a_mb_ = 2048.0;
  double storage_b_mb_ = 2048.0;
};

vad::VadModel train_loop_model() {
  Rng rng(1234);
  vad::MfccExtractor extractor;
  std::vector<vad::LabeledFeature> labeled;
  auto add = [&](const vad::Vec& audio, vad::FrameLabel label) {
    for (int f = 0; f + vad::kFrameSize <= audio.size(); f += vad::kFrameSize) {
      labeled.emplace_back(extractor.extract(audio.segment(f, vad::kFrameSize)), label);
    }
  };
  add(vad::synth_speech_like(30.0, rng), vad::FrameLabel::Speech);
  add(vad::synth_noise(30.0, rng), vad::FrameLabel::NonSpeech);
  vad::TrainOptions options;
  options.seed = 7;
  return vad::train(labeled, options);
}

void compute_policies(const Scenario& sc, const std::vector<CoupleTrace>& traces,
                      SimReport& report) {
  report.policies.triggered = report.conversation.conversation_triggered;
  Rng root(sc.seed);
  long hours = 0, sched_conv = 0, rand_conv = 0;
  std::size_t span_s = static_cast<std::size_t>(sc.timing.record_duration / 1000);
  for (int c = 0; c < sc.n_couples; ++c) {
    Rng fault_stream = root.substream(c * 16 + kStreamFaults);
    Rng policy_stream = root.substream(c * 16 + kStreamPolicy);
    for (int day = 0; day < sc.days; ++day) {
      if (charge_draw(fault_stream, day, sc.faults.charge_failure_daily_prob).failed)
        continue;
      for (int hour = 0; hour < 24; ++hour) {
        if (!in_windows(sc, day, hour)) continue;
        ++hours;
        std::size_t hour_s = (static_cast<std::size_t>(day) * 24 + hour) * 3600;
        std::size_t sched_start = hour_s + static_cast<std::size_t>(sc.timing.backup_minute) * 60;
        if (traces[c].conversation_in(sched_start, span_s)) ++sched_conv;
        int minute = random_policy_minute(policy_stream, day, hour);
        if (traces[c].conversation_in(hour_s + minute * 60u, span_s)) ++rand_conv;
      }
    }
  }
  if (hours > 0) {
    report.policies.scheduled = obslog::round_percent(sched_conv, hours);
    report.policies.random = obslog::round_percent(rand_conv, hours);
  }
}

}  // namespace

RunResult run(const Scenario& scenario) {
  auto violations = validate(scenario);
  if (!violations.empty()) throw ScenarioError(std::move(violations));

  RunResult out;
  out.report.min_gap_min = scenario.timing.min_gap / kMsPerMinute;
  out.report.backup_minute = scenario.timing.backup_minute;

  vad::VadModel model;
  vad::MfccExtractor extractor;
  if (scenario.mode == VadMode::Dsp) model = train_loop_model();

  std::vector<CoupleTrace> traces = generate_traces(scenario);
  Rng root(scenario.seed);

  long window_hours = 0;
  for (int day = 0; day < scenario.days; ++day) {
    auto [m, e] = escalation::expected_counts(
        scenario.windows, is_weekend(day) ? escalation::DayKind::Weekend
                                          : escalation::DayKind::Weekday);
    window_hours += m + e;
  }
  out.report.counts.total_expected =
      static_cast<long>(scenario.n_couples) * 2 * window_hours;

  for (int c = 0; c < scenario.n_couples; ++c) {
    out.couple_ids.push_back(couple_name(c));
    out.logs[couple_name(c)];  // keep couples with zero hours present
    CoupleSim sim(scenario, c, traces[c], &model, &extractor, root, out);
    sim.run_study();
  }

  obslog::validate(out.report.counts);
  if (out.report.counts.total_expected > 0 && out.report.counts.expected_app_running > 0) {
    out.report.collection = obslog::collection_metrics(out.report.counts);
  }
  if (!out.annotations.empty()) {
    out.report.conversation = obslog::conversation_metrics(out.annotations);
  }
  compute_policies(scenario, traces, out.report);
  return out;
}

PolicyRates compare_policies(const Scenario& scenario) {
  return run(scenario).report.policies;
}

// --- outputs ---------------------------------------------------------------

namespace {

json opt_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

std::optional<double> opt_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string opt_pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << *v << "%";
  return os.str();
}

}  // namespace

std::string report_to_json(const SimReport& r) {
  json j{
      {"counts",
       {{"total_expected", r.counts.total_expected},
        {"expected_app_running", r.counts.expected_app_running},
        {"sensor_collected", r.counts.sensor_collected},
        {"selfreport_triggered", r.counts.selfreport_triggered},
        {"selfreport_started", r.counts.selfreport_started},
        {"selfreport_completed", r.counts.selfreport_completed}}},
      {"collection",
       {{"collected_of_total", opt_to_json(r.collection.collected_of_total)},
        {"collected_of_running", opt_to_json(r.collection.collected_of_running)},
        {"triggered_of_total", opt_to_json(r.collection.triggered_of_total)},
        {"triggered_of_running", opt_to_json(r.collection.triggered_of_running)},
        {"started_of_triggered", opt_to_json(r.collection.started_of_triggered)},
        {"completed_of_triggered", opt_to_json(r.collection.completed_of_triggered)}}},
      {"conversation",
       {{"speech_overall", opt_to_json(r.conversation.speech_overall)},
        {"speech_triggered", opt_to_json(r.conversation.speech_triggered)},
        {"speech_backup", opt_to_json(r.conversation.speech_backup)},
        {"conversation_overall", opt_to_json(r.conversation.conversation_overall)},
        {"conversation_triggered", opt_to_json(r.conversation.conversation_triggered)},
        {"either_spoke_triggered", opt_to_json(r.conversation.either_spoke_triggered)},
        {"conversation_backup", opt_to_json(r.conversation.conversation_backup)}}},
      {"retained", {{"triggered", r.retained_triggered}, {"backup", r.retained_backup}}},
      {"policies",
       {{"triggered", opt_to_json(r.policies.triggered)},
        {"scheduled", opt_to_json(r.policies.scheduled)},
        {"random", opt_to_json(r.policies.random)}}},
      {"faults",
       {{"charge_failure_days", r.faults.charge_failure_days},
        {"crashes", r.faults.crashes},
        {"self_restarts", r.faults.self_restarts},
        {"watchdog_recoveries", r.faults.watchdog_recoveries},
        {"ble_stack_resets", r.faults.ble_stack_resets},
        {"relay_failures", r.faults.relay_failures}}},
      {"escalation",
       {{"reminder_sms_morning", r.escalation.reminder_sms_morning},
        {"reminder_sms_evening", r.escalation.reminder_sms_evening},
        {"participant_sms", r.escalation.participant_sms},
        {"supervisor_email", r.escalation.supervisor_email}}},
      {"timing", {{"min_gap_min", r.min_gap_min}, {"backup_minute", r.backup_minute}}},
  };
  return j.dump(2);
}

std::string format_report(const SimReport& r) {
  std::ostringstream os;
  os << "collection\n"
     << "  total expected self-reports ........ " << r.counts.total_expected << "\n"
     << "  expected, app running .............. " << r.counts.expected_app_running << "\n"
     << "  sensor data collected .............. " << r.counts.sensor_collected << "\n"
     << "  self-reports triggered ............. " << r.counts.selfreport_triggered << "\n"
     << "  self-reports started ............... " << r.counts.selfreport_started << "\n"
     << "  self-reports completed ............. " << r.counts.selfreport_completed << "\n"
     << "collection rates\n"
     << "  collected / total .................. " << opt_pct(r.collection.collected_of_total) << "\n"
     << "  collected / app running ............ " << opt_pct(r.collection.collected_of_running) << "\n"
     << "  triggered / total .................. " << opt_pct(r.collection.triggered_of_total) << "\n"
     << "  triggered / app running ............ " << opt_pct(r.collection.triggered_of_running) << "\n"
     << "  started / triggered ................ " << opt_pct(r.collection.started_of_triggered) << "\n"
     << "  completed / triggered .............. " << opt_pct(r.collection.completed_of_triggered) << "\n"
     << "recordings retained\n"
     << "  triggered .......................... " << r.retained_triggered << "\n"
     << "  backup ............................. " << r.retained_backup << "\n"
     << "conversation content\n"
     << "  speech, overall .................... " << opt_pct(r.conversation.speech_overall) << "\n"
     << "  speech, triggered .................. " << opt_pct(r.conversation.speech_triggered) << "\n"
     << "  speech, backup ..................... " << opt_pct(r.conversation.speech_backup) << "\n"
     << "  conversation, overall .............. " << opt_pct(r.conversation.conversation_overall) << "\n"
     << "  conversation, triggered ............ " << opt_pct(r.conversation.conversation_triggered) << "\n"
     << "  either partner spoke, triggered .... " << opt_pct(r.conversation.either_spoke_triggered) << "\n"
     << "  conversation, backup ............... " << opt_pct(r.conversation.conversation_backup) << "\n"
     << "policy comparison (conversation-capture rate)\n"
     << "  interaction-triggered .............. " << opt_pct(r.policies.triggered) << "\n"
     << "  scheduled fixed minute ............. " << opt_pct(r.policies.scheduled) << "\n"
     << "  random minute ...................... " << opt_pct(r.policies.random) << "\n"
     << "faults\n"
     << "  charge-failure days ................ " << r.faults.charge_failure_days << "\n"
     << "  crashes ............................ " << r.faults.crashes << "\n"
     << "  self restarts ...................... " << r.faults.self_restarts << "\n"
     << "  watchdog recoveries ................ " << r.faults.watchdog_recoveries << "\n"
     << "  ble stack resets ................... " << r.faults.ble_stack_resets << "\n"
     << "  self-report relay failures ......... " << r.faults.relay_failures << "\n"
     << "escalation\n"
     << "  morning reminder sms ............... " << r.escalation.reminder_sms_morning << "\n"
     << "  evening reminder sms ............... " << r.escalation.reminder_sms_evening << "\n"
     << "  participant sms .................... " << r.escalation.participant_sms << "\n"
     << "  supervisor email ................... " << r.escalation.supervisor_email << "\n";
  return os.str();
}

void write_outputs(const RunResult& result, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "logs");
  for (const auto& [couple, records] : result.logs) {
    std::ofstream os(out_dir / "logs" / (couple + ".log"));
    if (!os) throw std::runtime_error("cannot write log file for " + couple);
    for (const auto& r : records) os << obslog::write_log(r) << "\n";
  }
  obslog::write_annotations_csv((out_dir / "annotations.csv").string(),
                                result.annotations);
  {
    std::ofstream os(out_dir / "report.txt");
    os << format_report(result.report);
  }
  {
    std::ofstream os(out_dir / "report.json");
    os << report_to_json(result.report) << "\n";
  }
  {
    std::ofstream os(out_dir / "escalation.log");
    for (const auto& line : result.escalation_lines) os << line << "\n";
  }
}

obslog::CollectionCounts derive_counts(const std::vector<LogRecord>& records) {
  obslog::CollectionCounts counts;
  std::map<std::pair<std::string, std::string>, obslog::ConfigLog> configs;
  for (const auto& r : records) {
    if (const auto* c = std::get_if<obslog::ConfigLog>(&r)) {
      configs[{c->couple_id, c->device}] = *c;
    }
  }
  for (const auto& [key, c] : configs) {
    for (int day = 0; day < c.days; ++day) {
      auto [m, e] = escalation::expected_counts(
          c.windows, is_weekend(day) ? escalation::DayKind::Weekend
                                     : escalation::DayKind::Weekday);
      counts.total_expected += m + e;
    }
  }
  for (const auto& r : records) {
    const auto* h = std::get_if<HourlyLog>(&r);
    if (!h) continue;
    auto it = configs.find({h->couple_id, h->device});
    if (it == configs.end()) {
      throw std::runtime_error("hourly log without a config record: " + h->couple_id +
                               "/" + h->device);
    }
    if (!obslog::hour_in_windows(h->hour_start, it->second.windows)) continue;
    ++counts.expected_app_running;
    if (h->recordings.count() > 0) {
      ++counts.selfreport_triggered;
      if (!h->audio_discarded) ++counts.sensor_collected;
    }
    if (h->selfreport_started.count() > 0) ++counts.selfreport_started;
    if (h->selfreport_completed.count() > 0) ++counts.selfreport_completed;
  }
  return counts;
}

std::vector<std::string> validate_outputs(const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> violations;
  auto fail = [&](const std::string& msg) { violations.push_back(msg); };

  json report;
  {
    std::ifstream is(out_dir / "report.json");
    if (!is) return {"missing report.json"};
    report = json::parse(is);
  }

  std::vector<LogRecord> records;
  std::vector<fs::path> log_files;
  if (fs::exists(out_dir / "logs")) {
    for (const auto& entry : fs::directory_iterator(out_dir / "logs")) {
      log_files.push_back(entry.path());
    }
  }
  std::sort(log_files.begin(), log_files.end());
  for (const auto& f : log_files) {
    try {
      auto parsed = obslog::parse_log_file(f.string());
      records.insert(records.end(), parsed.begin(), parsed.end());
    } catch (const std::exception& e) {
      fail(f.filename().string() + ": " + e.what());
    }
  }

  obslog::CollectionCounts derived;
  try {
    derived = derive_counts(records);
    obslog::validate(derived);
  } catch (const std::exception& e) {
    fail(std::string("count derivation: ") + e.what());
    return violations;
  }

  const auto& jc = report.at("counts");
  auto check_count = [&](const char* name, long actual) {
    long expected = jc.at(name).get<long>();
    if (expected != actual) {
      fail(std::string("counts.") + name + ": report " + std::to_string(expected) +
           " vs logs " + std::to_string(actual));
    }
  };
  check_count("total_expected", derived.total_expected);
  check_count("expected_app_running", derived.expected_app_running);
  check_count("sensor_collected", derived.sensor_collected);
  check_count("selfreport_triggered", derived.selfreport_triggered);
  check_count("selfreport_started", derived.selfreport_started);
  check_count("selfreport_completed", derived.selfreport_completed);

  std::vector<obslog::RecordingAnnotation> annotations;
  try {
    annotations = obslog::read_annotations_csv((out_dir / "annotations.csv").string());
  } catch (const std::exception& e) {
    fail(std::string("annotations: ") + e.what());
    return violations;
  }
  if (static_cast<long>(annotations.size()) != derived.sensor_collected) {
    fail("annotation rows (" + std::to_string(annotations.size()) +
         ") != sensor_collected (" + std::to_string(derived.sensor_collected) + ")");
  }

  obslog::ConversationMetrics conv;
  if (!annotations.empty()) conv = obslog::conversation_metrics(annotations);
  const auto& jv = report.at("conversation");
  auto check_conv = [&](const char* name, const std::optional<double>& actual) {
    auto expected = opt_from_json(jv.at(name));
    if (expected != actual) fail(std::string("conversation.") + name + " mismatch");
  };
  check_conv("speech_overall", conv.speech_overall);
  check_conv("speech_triggered", conv.speech_triggered);
  check_conv("speech_backup", conv.speech_backup);
  check_conv("conversation_overall", conv.conversation_overall);
  check_conv("conversation_triggered", conv.conversation_triggered);
  check_conv("either_spoke_triggered", conv.either_spoke_triggered);
  check_conv("conversation_backup", conv.conversation_backup);

  // Session invariants visible in the logs: start-to-start gaps and per-hour
  // self-report ordering.
  TimeMs min_gap = report.at("timing").at("min_gap_min").get<TimeMs>() * kMsPerMinute;
  std::map<std::pair<std::string, std::string>, std::vector<const HourlyLog*>> by_device;
  for (const auto& r : records) {
    if (const auto* h = std::get_if<HourlyLog>(&r)) {
      by_device[{h->couple_id, h->device}].push_back(h);
    }
  }
  for (auto& [key, logs] : by_device) {
    std::sort(logs.begin(), logs.end(),
              [](const HourlyLog* a, const HourlyLog* b) { return a->hour_start < b->hour_start; });
    std::optional<TimeMs> last_start;
    for (const HourlyLog* h : logs) {
      if (h->selfreport_started.count() > h->recordings.count() ||
          h->selfreport_completed.count() > h->selfreport_started.count()) {
        fail(key.first + "/" + key.second + " hour " + std::to_string(h->hour_start) +
             ": self-report counts out of order");
      }
      if (h->audio_discarded && h->recordings.count() == 0) {
        fail(key.first + "/" + key.second + " hour " + std::to_string(h->hour_start) +
             ": audio discarded without a recording");
      }
      for (TimeMs start : h->recordings.at) {
        if (last_start && start - *last_start < min_gap) {
          fail(key.first + "/" + key.second + ": recording starts " +
               std::to_string(*last_start) + " and " + std::to_string(start) +
               " violate the minimum gap");
        }
        last_start = start;
      }
    }
  }

  return violations;
}

}  // namespace pairsense::sim
